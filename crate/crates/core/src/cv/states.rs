use serde::{Deserialize, Serialize};

use super::spectrum::regime_form;
use crate::exact::AmplitudeGrid;
use crate::fock::{FockBasis, Parity};
use crate::model::{classify_regime, EffectiveParams, Regime, Strength};
use crate::{Error, Result};

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite(n: usize, z: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * z);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized oscillator eigenfunction `H_n(z) exp(-z^2/2) / sqrt(2^n n! sqrt(pi))`.
///
/// Evaluated through the recurrence of the normalized functions, which
/// stays finite for large `n` where `H_n` and `n!` overflow separately.
pub fn hermite_function(n: usize, z: f64) -> f64 {
    let mut prev = std::f64::consts::PI.powf(-0.25) * (-0.5 * z * z).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * z * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * z * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// A Hermite-Gauss eigenstate of the harmonic approximant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVEigenstate {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub nu: f64,
    pub regime: Regime,
    /// Mirror parity `r` of the symmetrized doublet state (strong only).
    pub parity: Option<Parity>,
    /// `|x1|` of the pair of minima (strong only).
    pub offset: Option<f64>,
    /// Centre of the `x > 0` well in `(q, p)` (origin when weak).
    pub centre_q: f64,
    pub centre_p: f64,
}

/// Builds `Psi_{n,m}` (weak) or `Psi^r_{n,m}` (strong; `r` defaults to even).
pub fn cv_eigenstate(
    e: &EffectiveParams,
    n: usize,
    m: usize,
    parity: Option<Parity>,
) -> Result<CVEigenstate> {
    let (regime, form) = regime_form(e)?;
    let strong = regime.strength == Strength::Strong;
    if !strong && parity.is_some() {
        return Err(Error::WrongRegime(
            "parity label only applies to strong-regime doublets".into(),
        ));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(CVEigenstate {
        n,
        m,
        lambda: form.lambda(),
        nu: form.nu(),
        regime,
        parity: strong.then(|| parity.unwrap_or(Parity::Even)),
        offset: strong.then_some(form.centre_x.abs()),
        centre_q: s * (form.centre_x + form.centre_y),
        centre_p: s * (form.centre_x - form.centre_y),
    })
}

impl CVEigenstate {
    fn well(&self, q: f64, p: f64) -> f64 {
        let (dq, dp) = (q - self.centre_q, p - self.centre_p);
        hermite_function(self.n, dq / self.lambda) * hermite_function(self.m, dp / self.nu)
            / (self.lambda * self.nu).sqrt()
    }

    /// Continuum-normalized amplitude at `(x, y)`. In the strong regime
    /// `Phi^-(x, y) = Phi^+(-x, -y)`, so `r` is the eigenvalue under the
    /// mirror `(x, y) -> (-x, -y)`.
    pub fn amplitude(&self, x: f64, y: f64) -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (q, p) = (s * (x + y), s * (x - y));
        match self.parity {
            None => self.well(q, p),
            Some(r) => s * (self.well(q, p) + r.sign() * self.well(-q, -p)),
        }
    }
}

/// CV probability grid together with its diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CVDensity {
    pub grid: AmplitudeGrid,
    /// `sum |Psi|^2 dx dy` before discrete renormalization.
    pub raw_norm: f64,
    /// Set when a Gaussian width is below the lattice spacing, where the
    /// sampled grid no longer resolves the state.
    pub width_underflow: bool,
}

/// Samples `|Psi|^2` on the lattice `x = 2i/N_a - 1`, `y = 2j/N_b - 1` and
/// renormalizes it to a discrete distribution.
pub fn eigenfunction_density(
    e: &EffectiveParams,
    state: &CVEigenstate,
    basis: &FockBasis,
) -> Result<CVDensity> {
    let regime = classify_regime(e)?;
    if regime != state.regime {
        return Err(Error::WrongRegime(format!(
            "state built for {} but parameters are {}",
            state.regime, regime
        )));
    }
    let (na, nb) = (basis.n_a, basis.n_b);
    if na == 0 || nb == 0 {
        return Err(Error::InvalidParams("grid needs N_a, N_b >= 1".into()));
    }
    let (dx, dy) = (2.0 / na as f64, 2.0 / nb as f64);
    let mut values = Vec::with_capacity(basis.dim);
    for i in 0..=na {
        let x = i as f64 * dx - 1.0;
        for j in 0..=nb {
            let y = j as f64 * dy - 1.0;
            values.push(state.amplitude(x, y).powi(2));
        }
    }
    let raw_norm = values.iter().sum::<f64>() * dx * dy;
    let spacing = 0.5 * dx.hypot(dy);
    let width_underflow = state.lambda < spacing || state.nu < spacing;
    let grid = AmplitudeGrid::from_weights(na, nb, values)?;
    Ok(CVDensity {
        grid,
        raw_norm,
        width_underflow,
    })
}
