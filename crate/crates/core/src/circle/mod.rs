//! Measures and functions on the unit circle.
//!
//! All integrals are against normalized Haar measure `dm` (total mass 1) and
//! the Poisson kernel is normalized by `P̂_r(n) = r^{|n|}`, so no `2π`
//! factors appear anywhere.

mod measure;
mod szego;
mod trig;

pub use measure::{
    poisson_kernel, two_level_density, Atom, Density, DensityJson, GridDensity, MeasureJson, SpectralMeasure,
    DENSITY_TOL, VERIFY_GRID,
};
pub use szego::{
    ac_szego_mean, poisson_log_bound, szego_mean, szego_mean_samples, trig_log_mean, PoissonLogBound, SzegoMean,
    SzegoMethod, DEFAULT_GRID, LOG_FLOOR, VANISHING_FRACTION,
};
pub use trig::{Norms, TrigPoly};

#[allow(unused_imports)]
pub(crate) use trig::grid_angle;
