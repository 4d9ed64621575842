//! Sampling the stationary process `X^(r)` and a kernel-driven Gaussian field,
//! then comparing empirical covariances with theory.

use hpd::kernel::{branching_toeplitz, HpdSequence};
use hpd::process::{empirical_cov, sample_from_kernel, simulate_xr, xr_covariance, CovCheck, SimulationConfig};
use hpd::tree::{TreeTruncation, Vertex};

fn main() -> hpd::Result<()> {
    let cfg = SimulationConfig::new(2, 0.5, 3, 20_000, 7);
    let batch = simulate_xr(&cfg)?;
    println!(
        "X^(r): {} variables, {} samples, tail cutoff {}",
        batch.n_vars(),
        20_000,
        cfg.tail_cutoff()
    );

    let pairs = [("e", "e"), ("e", "s1"), ("s1", "s2"), ("s1s1", "s2")];
    let idx: Vec<(usize, usize)> = pairs
        .iter()
        .map(|(a, b)| (batch.index_of(a).unwrap(), batch.index_of(b).unwrap()))
        .collect();
    for (est, (a, b)) in empirical_cov(&batch, &idx)?.iter().zip(pairs) {
        let theory = xr_covariance(&cfg, &a.parse::<Vertex>()?, &b.parse::<Vertex>()?);
        let check = CovCheck::new(&batch, est, theory);
        println!(
            "  cov({a},{b}) = {:.4} ± {:.4}, theory {:.4}: {:?}",
            est.cov, est.half_width, theory, check
        );
    }

    let trunc = TreeTruncation::new(2, 2)?;
    let k = branching_toeplitz(&HpdSequence::beta(2, 4), &trunc)?;
    let field = sample_from_kernel(&k, 5, 1)?;
    print!("{}", field.to_csv());
    Ok(())
}
