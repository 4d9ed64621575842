//! Spectral measures on the circle: Fourier coefficients, Poisson smoothing,
//! Riesz projections, `E_N` averaging and the Szegő geometric mean.

use hpd::circle::{ac_szego_mean, poisson_log_bound, SpectralMeasure, TrigPoly, DEFAULT_GRID};

fn main() -> hpd::Result<()> {
    // w(θ) = 2 + 2cos θ = |1 + e^{iθ}|², geometric mean 1.
    let w = TrigPoly::cosine_series(&[2.0, 2.0]);
    let mu = SpectralMeasure::trig_density(w.clone())?.with_atom(1.0, 0.5)?;
    println!("mass {:.3}, atom mass {:.3}", mu.total_mass(), mu.atom_mass());
    for n in 0..3 {
        println!("  μ̂({n}) = {:.4}", mu.fourier(n));
    }

    let gm = ac_szego_mean(&mu, DEFAULT_GRID);
    println!("Szegő mean {:.6} via {:?}", gm.value, gm.method);

    let smoothed = mu.poisson_convolve(0.5)?;
    println!("P_0.5 * μ: μ̂(1) = {:.4}", smoothed.fourier(1));
    let bound = poisson_log_bound(&mu, 0.5, DEFAULT_GRID, 1e-9)?;
    println!(
        "log P_r[μ] ≥ P_r[log w]: {:.4} vs {:.4}, holds = {}",
        bound.lhs, bound.rhs, bound.holds
    );

    let f = TrigPoly::from_real([(-2, 1.0), (0, 3.0), (1, -1.0), (4, 2.0)]);
    let (plus, minus) = f.riesz();
    println!("R+ f = {:?}", plus.iter().collect::<Vec<_>>());
    println!("R- f = {:?}", minus.iter().collect::<Vec<_>>());
    println!("E_2 f = {:?}", f.e_n_average(2).iter().collect::<Vec<_>>());
    Ok(())
}
