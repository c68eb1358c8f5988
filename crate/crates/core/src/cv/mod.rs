//! Continuous-variable analytics: the effective potential in the imbalance
//! coordinates `(x, y)`, its stationary points, local harmonic approximants,
//! closed-form spectra and Hermite-Gauss eigenfunctions.
//!
//! Throughout, `q = (x + y)/sqrt(2)` and `p = (x - y)/sqrt(2)`. The quantum
//! number `n` always belongs to the `q` oscillator and `m` to the `p`
//! oscillator, whatever the regime.

mod spectrum;
mod states;
mod stationary;

pub use spectrum::{
    collapse_levels, cv_levels, cv_relative_levels, quadratic_form, strong_quadratic_form,
    weak_quadratic_form, CollapseLevel, CVLevel,
    QuadraticForm,
};
pub use states::{cv_eigenstate, eigenfunction_density, hermite, hermite_function, CVDensity, CVEigenstate};
pub use stationary::{
    classify_point, default_seeds, stationary_points_general, stationary_points_symmetric,
    Branch, PointKind, StationaryPoint, StationarySearch,
};

use crate::model::EffectiveParams;
use crate::{Error, Result};

/// Effective potential `V(x, y)`.
pub fn potential(e: &EffectiveParams, x: f64, y: f64) -> Result<f64> {
    check_domain(x, y)?;
    Ok(-e.gamma + 0.25 * e.u_a * (1.0 + x * x) + 0.25 * e.u_b * (1.0 + y * y)
        + 0.5 * e.w * (1.0 + x * y)
        - e.tau_a * (1.0 - x * x).sqrt()
        - e.tau_b * (1.0 - y * y).sqrt())
}

/// Residuals of the stationarity equations, `2 dV/dx` and `2 dV/dy`:
///
/// `w y + u_a x + 2 x tau_a / sqrt(1 - x^2) = 0` and the mirror for `y`.
pub fn stationarity_residual(e: &EffectiveParams, x: f64, y: f64) -> [f64; 2] {
    [
        e.w * y + e.u_a * x + 2.0 * x * e.tau_a / (1.0 - x * x).sqrt(),
        e.w * x + e.u_b * y + 2.0 * y * e.tau_b / (1.0 - y * y).sqrt(),
    ]
}

/// Jacobian of [`stationarity_residual`], row-major.
pub fn stationarity_jacobian(e: &EffectiveParams, x: f64, y: f64) -> [[f64; 2]; 2] {
    [
        [e.u_a + 2.0 * e.tau_a / (1.0 - x * x).powf(1.5), e.w],
        [e.w, e.u_b + 2.0 * e.tau_b / (1.0 - y * y).powf(1.5)],
    ]
}

/// Hessian of `V`; half the Jacobian above.
pub fn potential_hessian(e: &EffectiveParams, x: f64, y: f64) -> [[f64; 2]; 2] {
    let j = stationarity_jacobian(e, x, y);
    [[0.5 * j[0][0], 0.5 * j[0][1]], [0.5 * j[1][0], 0.5 * j[1][1]]]
}

fn check_domain(x: f64, y: f64) -> Result<()> {
    if !(x.abs() <= 1.0 && y.abs() <= 1.0) {
        return Err(Error::Domain(format!("imbalances outside [-1, 1]: ({x}, {y})")));
    }
    Ok(())
}
