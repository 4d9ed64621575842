//! Acceptance suite: one pass/fail line per criterion.
//!
//! It runs as a single harness-free binary so that the runtime limits are measured
//! without other tests competing for cores. Criterion 11 reruns criteria 1-10
//! and compares their JSON summaries byte for byte.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use common::*;
use hpd::circle::{two_level_density, Density, SpectralMeasure, TrigPoly};
use hpd::criterion::{cn_oracle, tq1_criterion, two_level_bounds, two_level_check};
use hpd::hankel::{
    boundedness_family, en_inequality_check, hlp_pairing, smoothed_inequality_check, two_weight_check, Boundedness,
    Series,
};
use hpd::kernel::{alpha_from_measure, branching_toeplitz, cantor_gram, hpd_check, psd_check, HpdSequence, PSD_TOL};
use hpd::predict::{finite_distance, predict_tq1, predict_tq_from_measure, symmetric_reduction, PredictOptions};
use hpd::process::{empirical_cov, sample_from_kernel, simulate_xr, theta_average, CovCheck, SimulationConfig};
use hpd::tree::TreeTruncation;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
    summary: Value,
}

fn verdict(pass: bool, detail: String, summary: Value) -> Verdict {
    Verdict { pass, detail, summary }
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let e = start.elapsed();
    (e < limit, format!("{:.2}s < {}s", e.as_secs_f64(), limit.as_secs()))
}

fn two_plus_two_cos() -> SpectralMeasure {
    SpectralMeasure::trig_density(TrigPoly::cosine_series(&[2.0, 2.0])).unwrap()
}

/// β_q kernels at depth 4 are PSD and equal their Cantor Gram factorization.
fn kernel_positivity() -> Verdict {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut pass = true;
    for q in [2, 3] {
        let a = branching_toeplitz(&HpdSequence::beta(q, 4), &TreeTruncation::new(q, 4).unwrap()).unwrap();
        let psd = psd_check(&a, PSD_TOL);
        let gram = cantor_gram(q, 4).unwrap().gram;
        let dev = (gram.data() - a.data()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        pass &= psd.min_eigenvalue >= -1e-9 && dev <= 1e-12;
        rows.push(json!({ "q": q, "min_eigenvalue": psd.min_eigenvalue, "gram_deviation": dev }));
    }
    let (fast, t) = within(Duration::from_secs(5), start);
    let detail = format!(
        "λ_min q=2 {:.3e}, q=3 {:.3e}; Gram deviation ≤ 1e-12; {t}",
        rows[0]["min_eigenvalue"].as_f64().unwrap(),
        rows[1]["min_eigenvalue"].as_f64().unwrap()
    );
    verdict(pass && fast, detail, json!(rows))
}

/// First order at which the Toeplitz test fails, if any up to `max`.
fn first_failing_order(alpha: &HpdSequence, max: usize) -> Option<usize> {
    (1..=max).find(|&n| !hpd_check(alpha, n, None).unwrap().verdict)
}

fn random_sequence(rng: &mut ChaCha8Rng, q: usize, n: usize, spread: f64) -> HpdSequence {
    let complex = rng.random_bool(0.3);
    let values = (0..=n)
        .map(|k| {
            if k == 0 {
                return Complex64::new(1.0, 0.0);
            }
            let w = (q as f64).powf(-(k as f64) / 2.0) * spread;
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            Complex64::new(rng.random_range(-1.0..1.0), im) * w
        })
        .collect();
    HpdSequence::new(q, values).unwrap()
}

/// Measures give PSD tree kernels; Toeplitz-failing sequences give non-PSD tree kernels.
fn classification() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut forward_bad = 0;
    for _ in 0..200 {
        let nu = random_measure(&mut rng);
        for q in [2, 3] {
            let a = branching_toeplitz(
                &alpha_from_measure(&nu, q, 4).unwrap(),
                &TreeTruncation::new(q, 4).unwrap(),
            )
            .unwrap();
            let psd = psd_check(&a, PSD_TOL);
            forward_bad += usize::from(!psd.psd);
        }
    }
    // q = 2 sequences fail by order 8; q = 3 ones by order 5, which keeps the tree at 364 vertices.
    let mut reverse_bad = 0;
    let mut decay_rejects = 0;
    let mut depth_hist = [0usize; 9];
    let mut collected = 0;
    while collected < 200 {
        let q = if collected < 100 { 2 } else { 3 };
        let max = if q == 2 { 8 } else { 5 };
        let alpha = random_sequence(&mut rng, q, max, 1.4);
        let Some(n) = first_failing_order(&alpha, max) else {
            continue;
        };
        collected += 1;
        let report = hpd_check(&alpha, n, None).unwrap();
        decay_rejects += usize::from(report.failing_n.is_some());
        let a = branching_toeplitz(&alpha, &TreeTruncation::new(q, n).unwrap()).unwrap();
        reverse_bad += usize::from(psd_check(&a, PSD_TOL).psd);
        depth_hist[n] += 1;
    }
    let disagreements = forward_bad + reverse_bad;
    verdict(
        disagreements == 0,
        format!(
            "400 measure kernels PSD, 200 failing sequences caught ({decay_rejects} by decay); disagreements {disagreements}"
        ),
        json!({ "forward_failures": forward_bad, "reverse_failures": reverse_bad, "decay_rejects": decay_rejects, "failing_depths": depth_hist }),
    )
}

/// Sequences passing the HPD check obey |α(n)| ≤ α(0) q^{-n/2} + 1e-12.
fn decay_bound() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let n = 8;
    let (mut passing, mut violations) = (0, 0);
    let mut candidates = Vec::new();
    for i in 0..300 {
        let q = 2 + i % 2;
        candidates.push(alpha_from_measure(&random_measure(&mut rng), q, n).unwrap());
        candidates.push(random_sequence(&mut rng, q, n, 0.6));
    }
    for alpha in &candidates {
        if !hpd_check(alpha, n, None).unwrap().verdict {
            continue;
        }
        passing += 1;
        let a0 = alpha.get(0).re;
        let q = alpha.arity() as f64;
        violations += (0..=n)
            .filter(|&k| alpha.get(k as i64).norm() > a0 * q.powf(-(k as f64) / 2.0) + 1e-12)
            .count();
    }
    verdict(
        violations == 0 && passing >= 300,
        format!("{passing} passing sequences, {violations} decay violations"),
        json!({ "passing": passing, "violations": violations }),
    )
}

/// X^(r) with q = 2, r = 1/2: variance, comparable and incomparable covariances.
fn gaussian_construction() -> Verdict {
    let start = Instant::now();
    let cfg = SimulationConfig::new(2, 0.5, 2, 100_000, SEED);
    let batch = simulate_xr(&cfg).unwrap();
    let ix = |l: &str| batch.index_of(l).unwrap();
    let pairs = [(ix("e"), ix("e")), (ix("e"), ix("s1")), (ix("s1"), ix("s2"))];
    let theory = [4.0 / 3.0, 0.5 * FRAC_1_SQRT_2 / 0.75, 0.0];
    let est = empirical_cov(&batch, &pairs).unwrap();
    let checks: Vec<CovCheck> = est
        .iter()
        .zip(theory)
        .map(|(e, t)| CovCheck::new(&batch, e, t))
        .collect();
    let (fast, t) = within(Duration::from_secs(30), start);
    let pass = fast && checks.iter().all(|c| c.pass);
    let detail = checks
        .iter()
        .map(|c| {
            format!(
                "{}-{} {:.4} in [{:.4}, {:.4}]",
                c.pair[0], c.pair[1], c.theory, c.ci99[0], c.ci99[1]
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    verdict(pass, format!("{detail}; {t}"), json!(checks))
}

/// Level averages of the β_2 process have Cov(Θ_n, Θ_{n+k}) = 1.
fn spatial_average() -> Verdict {
    let trunc = TreeTruncation::new(2, 6).unwrap();
    let a = branching_toeplitz(&HpdSequence::beta(2, 6), &trunc).unwrap();
    let theta = theta_average(&sample_from_kernel(&a, 20_000, SEED + 5).unwrap(), &trunc).unwrap();
    let pairs: Vec<(usize, usize)> = (0..=3).flat_map(|n| (0..=3).map(move |k| (n, n + k))).collect();
    let est = empirical_cov(&theta, &pairs).unwrap();
    let checks: Vec<CovCheck> = est.iter().map(|e| CovCheck::new(&theta, e, 1.0)).collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    verdict(
        passed == checks.len(),
        format!("{passed}/{} pairs (n, k ≤ 3) cover 1 at 99%", checks.len()),
        json!(checks),
    )
}

/// Tree prediction distance equals the Toeplitz reduction.
fn symmetry_reduction() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for i in 0..50 {
        let q = 2 + i % 2;
        let depth = rng.random_range(1..=4);
        let degree = rng.random_range(0..=4);
        let floor = rng.random_range(0.05..0.5);
        let density = Density::Trig(nonneg_trig(&mut rng, degree, floor));
        let nu = SpectralMeasure::new(random_atoms(&mut rng, 2), Some(density)).unwrap();
        let alpha = alpha_from_measure(&nu, q, depth).unwrap();
        let full = finite_distance(
            &branching_toeplitz(&alpha, &TreeTruncation::new(q, depth).unwrap()).unwrap(),
            0,
        )
        .unwrap();
        let reduced = symmetric_reduction(&alpha, depth).unwrap();
        worst = worst.max((full - reduced).abs());
        rows.push(json!([q, depth, full, reduced]));
    }
    verdict(
        worst < 1e-8,
        format!("50 sequences, max |tree − reduction| = {worst:.2e}"),
        json!(rows),
    )
}

/// Prediction distances on T_q and T(q;1).
fn prediction() -> Verdict {
    let opts = PredictOptions::default();
    let flat = predict_tq_from_measure(&SpectralMeasure::lebesgue(), 2, &[1, 2, 3, 4, 6, 8], &opts).unwrap();
    let flat_ok = flat.szego_value == 1.0 && flat.oracle_values.iter().all(|v| v.value == 1.0);
    let opts16 = PredictOptions { grid: 1 << 16, ..opts };
    let cos = predict_tq_from_measure(&two_plus_two_cos(), 2, &[1, 2, 4], &opts16).unwrap();
    let cos_ok = (cos.szego_value - 1.0).abs() <= 1e-6;
    let tq1_flat: Vec<f64> = (2..=4)
        .map(|q| {
            predict_tq1(&SpectralMeasure::lebesgue(), q, 4096, 1e-9)
                .unwrap()
                .value
                .unwrap()
        })
        .collect();
    let tq1_flat_ok = tq1_flat.iter().all(|v| (v - 1.0).abs() <= 1e-12);
    let boundary = predict_tq1(&two_plus_two_cos(), 2, 1 << 16, 1e-9).unwrap();
    let boundary_ok = boundary.value.is_some_and(|v| v.abs() <= 1e-3);
    verdict(
        flat_ok && cos_ok && tq1_flat_ok && boundary_ok,
        format!(
            "T_q: m gives {}, 2+2cosθ gives {:.9}; T(q;1): m gives {:?}, 2+2cosθ gives {:.2e}",
            flat.szego_value,
            cos.szego_value,
            tq1_flat,
            boundary.value.unwrap_or(f64::NAN)
        ),
        json!({ "flat": flat, "cos": cos, "tq1_flat": tq1_flat, "tq1_boundary": boundary }),
    )
}

/// Boundary case of the T(q;1) criterion, its C_n sweep and the two-level endpoint.
fn tq1_criterion_check() -> Verdict {
    let mu = two_plus_two_cos();
    let rep = tq1_criterion(&mu, 2, 1 << 16, 1e-9).unwrap();
    let boundary_ok = (rep.lhs - rep.rhs).abs() < 1e-6;
    let sweep2 = cn_oracle(&mu, 2, 32).unwrap();
    let sweep2_ok = sweep2.min_eigs.iter().all(|&l| l >= -1e-6);
    let sweep3 = cn_oracle(&mu, 3, 32).unwrap();
    let sweep3_ok = sweep3.first_failure.is_some();
    let mut endpoint = Vec::new();
    let mut endpoint_ok = true;
    for q in 2..=6 {
        let t = two_level_bounds(q).unwrap().lower;
        // The endpoint bounds √(a/b): take b = 1, a = t².
        let check = two_level_check(t * t, 1.0, q, 0.0).unwrap();
        let density = tq1_criterion(&two_level_density(t * t, 1.0, 4096).unwrap(), q, 4096, 0.0).unwrap();
        // Reading the endpoint as a/b itself misses equality.
        let literal = two_level_check(t, 1.0, q, 0.0).unwrap();
        let gap = (check.ratio - check.threshold).abs();
        endpoint_ok &= gap < 1e-9 && (density.lhs - density.rhs).abs() < 1e-9;
        endpoint.push(json!({ "q": q, "endpoint": t, "gap": gap, "density_gap": density.lhs - density.rhs, "literal_gap": literal.ratio - literal.threshold }));
    }
    verdict(
        boundary_ok && sweep2_ok && sweep3_ok && endpoint_ok,
        format!(
            "|lhs − rhs| = {:.1e}; q=2 sweep min λ {:.2e} to n=32; q=3 first failure n={:?}; two-level endpoint equality for q=2..6",
            (rep.lhs - rep.rhs).abs(),
            sweep2.min_eigs.iter().copied().fold(f64::INFINITY, f64::min),
            sweep3.first_failure
        ),
        json!({ "criterion": rep, "sweep_q2": sweep2, "sweep_q3_first_failure": sweep3.first_failure, "two_level": endpoint }),
    )
}

/// Saturation of the two-weight constant and random checks of the three inequalities.
fn hankel_inequalities() -> Verdict {
    let start = Instant::now();
    let mut saturation = Vec::new();
    let mut pass = true;
    for r in [0.3, FRAC_1_SQRT_2, 0.9] {
        let rep = two_weight_check(
            &SpectralMeasure::atom(0.0, 1.0),
            r,
            &TrigPoly::monomial(1, 1.0),
            8192,
            128,
        )
        .unwrap();
        pass &= rep.holds && rep.slack.abs() < 1e-6;
        saturation.push(rep.slack);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut violations = [0usize; 3];
    let mut min_slack = [f64::INFINITY; 3];
    for _ in 0..100 {
        let mu = random_mixed_measure(&mut rng);
        let f = random_h20(&mut rng, 5);
        let r = rng.random_range(0.05..0.95);
        let n = rng.random_range(1..=4);
        let b0 = random_analytic_below(&mut rng, n);
        let reports = [
            two_weight_check(&mu, r, &f, 8192, 128).unwrap(),
            en_inequality_check(&mu, &b0, &f, n, 8192, 128).unwrap(),
            smoothed_inequality_check(&mu, &f, 8192, 128).unwrap(),
        ];
        for (k, rep) in reports.iter().enumerate() {
            violations[k] += usize::from(!rep.holds);
            min_slack[k] = min_slack[k].min(rep.slack / rep.bound.max(1e-300));
        }
    }
    let (fast, t) = within(Duration::from_secs(60), start);
    pass &= fast && violations == [0, 0, 0];
    verdict(
        pass,
        format!(
            "saturation slacks {:.1e}/{:.1e}/{:.1e}; violations two-weight {} E_N {} smoothed {}; {t}",
            saturation[0], saturation[1], saturation[2], violations[0], violations[1], violations[2]
        ),
        json!({ "saturation_slack": saturation, "violations": violations, "min_relative_slack": min_slack }),
    )
}

/// Tri-state boundedness on the two standard families and the Hilbert-type pairing.
fn boundedness() -> Verdict {
    let geometric = boundedness_family(
        |m| Complex64::new(if m == 0 { 0.0 } else { 0.5f64.powi(m as i32) }, 0.0),
        16,
    )
    .unwrap();
    let harmonic = boundedness_family(|m| Complex64::new(if m == 0 { 0.0 } else { 1.0 / m as f64 }, 0.0), 16).unwrap();
    let families_ok = geometric.tri_state == Boundedness::Bounded
        && harmonic.tri_state == Boundedness::Unbounded
        && harmonic.positive_coefficient.map(|p| p.verdict) == Some(Series::Divergent);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..1000 {
        let la = rng.random_range(1..=200);
        let lb = rng.random_range(1..=200);
        let a: Vec<f64> = (0..la).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..lb).map(|_| rng.random_range(0.0..1.0)).collect();
        let p = hlp_pairing(&a, &b).unwrap();
        failures += usize::from(!p.holds);
        worst = worst.max(p.pairing / p.bound);
    }
    verdict(
        families_ok && failures == 0,
        format!(
            "geometric {:?}, harmonic {:?} (positive-coefficient test divergent); 1000 pairs, max pairing/bound {worst:.3}",
            geometric.tri_state, harmonic.tri_state
        ),
        json!({ "geometric": geometric, "harmonic": harmonic, "hlp_failures": failures, "hlp_max_ratio": worst }),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 10] = [
    ("kernel positivity", kernel_positivity),
    ("classification", classification),
    ("decay bound", decay_bound),
    ("gaussian construction", gaussian_construction),
    ("spatial average", spatial_average),
    ("symmetry reduction", symmetry_reduction),
    ("prediction", prediction),
    ("T(q;1) criterion", tq1_criterion_check),
    ("hankel inequalities", hankel_inequalities),
    ("boundedness", boundedness),
];

fn line(k: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {k:>2} {} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn main() {
    let mut failed = Vec::new();
    let mut first = Vec::new();
    for (k, (name, run)) in CRITERIA.iter().enumerate() {
        let v = run();
        line(k + 1, name, v.pass, &v.detail);
        if !v.pass {
            failed.push(k + 1);
        }
        first.push(serde_json::to_string(&v.summary).unwrap());
    }
    let differing: Vec<usize> = CRITERIA
        .iter()
        .enumerate()
        .filter(|(k, (_, run))| serde_json::to_string(&run().summary).unwrap() != first[*k])
        .map(|(k, _)| k + 1)
        .collect();
    let deterministic = differing.is_empty();
    line(
        11,
        "determinism",
        deterministic,
        &if deterministic {
            "criteria 1-10 rerun with identical JSON".to_string()
        } else {
            format!("criteria {differing:?} differ")
        },
    );
    if !deterministic {
        failed.push(11);
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
