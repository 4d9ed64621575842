//! The `T(q;1)` admissibility criterion against the PSD sweep of `C_n`,
//! two-level densities and the sup-norm sufficient condition.

use hpd::circle::{SpectralMeasure, TrigPoly};
use hpd::criterion::{cn_oracle, sup_norm_sufficient, tq1_criterion, two_level_bounds, two_level_check};

fn main() -> hpd::Result<()> {
    let w = TrigPoly::cosine_series(&[2.0, 2.0]);
    let mu = SpectralMeasure::trig_density(w)?;
    for q in [2, 3] {
        let crit = tq1_criterion(&mu, q, 4096, 1e-9)?;
        let oracle = cn_oracle(&mu, q, 12)?;
        println!(
            "2+2cos θ, q={q}: criterion {} (margin {:+.4}), C_n sweep first failure {:?}",
            crit.holds, crit.margin, oracle.first_failure
        );
    }

    let bounds = two_level_bounds(2)?;
    println!(
        "q=2 two-level window for a/b: [{:.4}, {:.4}]",
        bounds.ratio_lower, bounds.ratio_upper
    );
    for (a, b) in [(0.1, 1.0), (0.05, 1.0)] {
        let c = two_level_check(a, b, 2, 1e-9)?;
        println!(
            "  a={a}, b={b}: ratio {:.4} vs {:.4}, holds {}",
            c.ratio, c.threshold, c.holds
        );
    }

    let g = TrigPoly::cosine_series(&[0.0, 0.15]);
    let s = sup_norm_sufficient(&g, 2, 4096, 1e-9)?;
    println!(
        "sup|g| = {:.3} ≤ {:.3}: {}, criterion {}",
        s.sup, s.bound, s.sufficient, s.criterion.holds
    );
    Ok(())
}
