//! Hankel operators: the two-weight, `E_N` and smoothed inequalities,
//! boundedness of symbol families and the Hilbert-type pairing bound.

use hpd::circle::{SpectralMeasure, TrigPoly};
use hpd::hankel::{
    boundedness_family, en_inequality_check, hlp_pairing, smoothed_inequality_check, two_weight_check,
    DEFAULT_HANKEL_GRID, DEFAULT_N_SYM,
};
use num_complex::Complex64;

fn main() -> hpd::Result<()> {
    let mu = SpectralMeasure::lebesgue().with_atom(0.0, 1.0)?;
    let f = TrigPoly::from_real([(1, 1.0), (2, -0.5), (3, 0.25)]);

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let tw = two_weight_check(&mu, r, &f, DEFAULT_HANKEL_GRID, DEFAULT_N_SYM)?;
    println!(
        "two-weight: sup ratio {:.4} ≤ {:.4}, holds {}",
        tw.sup_ratio, tw.bound, tw.holds
    );

    let b0 = TrigPoly::from_real([(0, 1.0), (1, 0.5)]);
    let en = en_inequality_check(&mu, &b0, &f, 3, DEFAULT_HANKEL_GRID, DEFAULT_N_SYM)?;
    println!(
        "E_3: sup ratio {:.4} ≤ {:.4}, holds {}",
        en.sup_ratio, en.bound, en.holds
    );

    let sm = smoothed_inequality_check(&mu, &f, DEFAULT_HANKEL_GRID, DEFAULT_N_SYM)?;
    println!(
        "smoothed: sup ratio {:.4} ≤ {:.4}, slack {:.4}",
        sm.sup_ratio, sm.bound, sm.slack
    );

    for (name, coeff) in [
        (
            "geometric 0.9",
            Box::new(|m: usize| Complex64::new(0.9f64.powi(m as i32), 0.0)) as Box<dyn Fn(usize) -> Complex64>,
        ),
        (
            "1/m",
            Box::new(|m: usize| Complex64::new(if m == 0 { 0.0 } else { 1.0 / m as f64 }, 0.0)),
        ),
        (
            "1/m²",
            Box::new(|m: usize| Complex64::new(if m == 0 { 0.0 } else { 1.0 / (m * m) as f64 }, 0.0)),
        ),
    ] {
        let rep = boundedness_family(coeff, 16)?;
        println!("symbol {name}: {:?}", rep.tri_state);
    }

    let a: Vec<f64> = (1..=200).map(|n| 1.0 / n as f64).collect();
    let b: Vec<f64> = (1..=200).map(|n| 1.0 / (n as f64).sqrt()).collect();
    let hlp = hlp_pairing(&a, &b)?;
    println!("HLP pairing {:.4} ≤ {:.4}: {}", hlp.pairing, hlp.bound, hlp.holds);
    Ok(())
}
