//! Branching-Toeplitz kernels, the `q`-HPD check, Markov products and the
//! Cantor Gram factorization.

use hpd::circle::SpectralMeasure;
use hpd::kernel::{
    alpha_from_measure, branching_toeplitz, cantor_gram, hpd_check, markov_product, psd_check, HpdSequence, PSD_TOL,
};
use hpd::tree::TreeTruncation;

fn main() -> hpd::Result<()> {
    let q = 2;
    let trunc = TreeTruncation::new(q, 4)?;

    let beta = HpdSequence::beta(q, 8);
    let k = branching_toeplitz(&beta, &trunc)?;
    println!("β kernel: {} vertices, {:?}", k.size(), psd_check(&k, PSD_TOL));

    let nu = SpectralMeasure::lebesgue().with_atom(0.7, 0.3)?.normalized()?;
    let alpha = alpha_from_measure(&nu, q, 8)?;
    let report = hpd_check(&alpha, 8, Some(4))?;
    println!(
        "measure-derived α: verdict {} ({:?}), oracle disagrees: {}",
        report.verdict, report.method, report.oracle_disagrees
    );

    // Decays too slowly to be 2-HPD.
    let slow = HpdSequence::from_real(q, &[1.0, 0.9, 0.8, 0.7, 0.6, 0.5])?;
    let report = hpd_check(&slow, 5, Some(3))?;
    println!(
        "slow α: verdict {}, failing n {:?}: {}",
        report.verdict, report.failing_n, report.message
    );

    // Glue a second kernel onto vertex s1; its other labels are renamed apart.
    let k2 = branching_toeplitz(&alpha, &trunc)?;
    let renamed = k2
        .labels()
        .iter()
        .map(|l| if l == "s1" { l.clone() } else { format!("b:{l}") })
        .collect();
    let product = markov_product(&k, &k2.with_labels(renamed)?, "s1")?;
    println!("Markov product through vertex s1: {:?}", psd_check(&product, PSD_TOL));

    let cantor = cantor_gram(q, 3)?;
    let beta3 = branching_toeplitz(&HpdSequence::beta(q, 6), &TreeTruncation::new(q, 3)?)?;
    let deviation = (cantor.gram.data() - beta3.data())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    println!("Cantor Gram vs β kernel: max deviation {deviation:.2e}");
    Ok(())
}
