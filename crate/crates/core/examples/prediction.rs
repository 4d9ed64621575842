//! Prediction distances on homogeneous trees and on `T(q;1)`, with the finite
//! oracles approaching the Szegő value.

use hpd::circle::{SpectralMeasure, TrigPoly};
use hpd::predict::{predict_tq1, predict_tq_from_measure, PredictOptions};

fn main() -> hpd::Result<()> {
    let nu = SpectralMeasure::trig_density(TrigPoly::cosine_series(&[2.0, 0.5]))?;
    let report = predict_tq_from_measure(&nu, 2, &[1, 2, 3, 4], &PredictOptions::default())?;
    for v in &report.oracle_values {
        println!("depth {}: {:.6} ({:?})", v.depth, v.value, v.method);
    }
    println!("Szegő value {:.6}, gap {:.2e}", report.szego_value, report.gap);

    let mu = SpectralMeasure::lebesgue();
    let tq1 = predict_tq1(&mu, 3, 4096, 1e-9)?;
    println!(
        "T(3;1) root distance for Lebesgue: {:?} (valid {})",
        tq1.value, tq1.valid
    );
    Ok(())
}
