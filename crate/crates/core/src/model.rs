//! Microscopic and effective couplings of the two-species dimer.
//!
//! Energies are measured in units of `J_a` unless a caller chooses otherwise;
//! ħ = 1 throughout.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance used to decide `u_a == u_b` and `tau_a == tau_b`.
pub const SYMMETRY_RTOL: f64 = 1e-12;
/// Relative tolerance (scaled by `u + 2 tau`) for the critical point.
pub const CRITICAL_RTOL: f64 = 1e-9;

/// Microscopic couplings of the two-species dimer Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(rename = "J_a")]
    pub j_a: f64,
    #[serde(rename = "J_b")]
    pub j_b: f64,
    #[serde(rename = "U_a")]
    pub u_a: f64,
    #[serde(rename = "U_b")]
    pub u_b: f64,
    /// Interspecies coupling, signed (negative is attractive).
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "N_a")]
    pub n_a: usize,
    #[serde(rename = "N_b")]
    pub n_b: usize,
}

impl ModelParams {
    /// Twin species: equal hopping, intraspecies interaction and boson number.
    pub fn twin(n_per_species: usize, j: f64, u: f64, w: f64) -> Self {
        Self {
            j_a: j,
            j_b: j,
            u_a: u,
            u_b: u,
            w,
            n_a: n_per_species,
            n_b: n_per_species,
        }
    }

    pub fn with_w(mut self, w: f64) -> Self {
        self.w = w;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.j_a, self.j_b, self.u_a, self.u_b, self.w]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("couplings must be finite".into()));
        }
        if self.n_a < 1 || self.n_b < 1 {
            return Err(Error::InvalidParams(format!(
                "boson numbers must be >= 1 (N_a = {}, N_b = {})",
                self.n_a, self.n_b
            )));
        }
        if self.j_a <= 0.0 || self.j_b <= 0.0 {
            return Err(Error::InvalidParams("hopping amplitudes must be > 0".into()));
        }
        if self.u_a < 0.0 || self.u_b < 0.0 {
            return Err(Error::InvalidParams(
                "intraspecies interactions must be >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn is_twin(&self) -> bool {
        self.n_a == self.n_b && rel_eq(self.j_a, self.j_b) && rel_eq(self.u_a, self.u_b)
    }
}

/// Effective couplings entering the CV potential and the semiclassical
/// Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// `N_a^2 U_a`
    pub u_a: f64,
    /// `N_b^2 U_b`
    pub u_b: f64,
    /// `J_a N_a`
    pub tau_a: f64,
    /// `J_b N_b`
    pub tau_b: f64,
    /// `W N_a N_b`
    pub w: f64,
    /// `(U_a N_a + U_b N_b) / 2`
    pub gamma: f64,
    /// `1 / N_a`
    pub eps_a: f64,
    /// `1 / N_b`
    pub eps_b: f64,
}

impl EffectiveParams {
    /// Symmetric effective couplings with equal species numbers `1/eps`.
    pub fn twin(u: f64, tau: f64, w: f64, eps: f64) -> Self {
        Self {
            u_a: u,
            u_b: u,
            tau_a: tau,
            tau_b: tau,
            w,
            gamma: u * eps,
            eps_a: eps,
            eps_b: eps,
        }
    }

    pub fn with_w(mut self, w: f64) -> Self {
        self.w = w;
        self
    }

    /// Weak/strong threshold `u + 2 tau` (species a values; equal to species b
    /// in the symmetric case).
    pub fn threshold(&self) -> f64 {
        self.u_a + 2.0 * self.tau_a
    }

    /// Natural energy scale `u + 2 tau + |w|` used to scale residual
    /// tolerances.
    pub fn scale(&self) -> f64 {
        self.u_a.max(self.u_b) + 2.0 * self.tau_a.max(self.tau_b) + self.w.abs()
    }
}

pub fn effective_params(p: &ModelParams) -> EffectiveParams {
    let na = p.n_a as f64;
    let nb = p.n_b as f64;
    EffectiveParams {
        u_a: na * na * p.u_a,
        u_b: nb * nb * p.u_b,
        tau_a: p.j_a * na,
        tau_b: p.j_b * nb,
        w: p.w * na * nb,
        gamma: 0.5 * (p.u_a * na + p.u_b * nb),
        eps_a: 1.0 / na,
        eps_b: 1.0 / nb,
    }
}

pub fn is_symmetric_case(e: &EffectiveParams) -> bool {
    rel_eq(e.u_a, e.u_b) && rel_eq(e.tau_a, e.tau_b)
}

/// Critical interspecies coupling `W_c = 4J/N + U` for twin species, with
/// `N = N_a + N_b` the total boson number.
pub fn critical_coupling(p: &ModelParams) -> Result<f64> {
    if !p.is_twin() {
        return Err(Error::InvalidParams(
            "closed-form critical coupling requires twin species".into(),
        ));
    }
    let n_total = (p.n_a + p.n_b) as f64;
    Ok(4.0 * p.j_a / n_total + p.u_a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionSign {
    Repulsive,
    Attractive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Weak,
    Strong,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Regime {
    pub sign: InteractionSign,
    pub strength: Strength,
}

impl Regime {
    pub fn is_repulsive(&self) -> bool {
        self.sign == InteractionSign::Repulsive
    }

    /// Short tag such as `weak-repulsive`, used in CSV output.
    pub fn tag(&self) -> &'static str {
        use InteractionSign::*;
        use Strength::*;
        match (self.strength, self.sign) {
            (Weak, Repulsive) => "weak-repulsive",
            (Weak, Attractive) => "weak-attractive",
            (Strong, Repulsive) => "strong-repulsive",
            (Strong, Attractive) => "strong-attractive",
            (Critical, Repulsive) => "critical-repulsive",
            (Critical, Attractive) => "critical-attractive",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Classifies the symmetric case by comparing `|w|` with `u + 2 tau`.
/// `w = 0` counts as repulsive.
pub fn classify_regime(e: &EffectiveParams) -> Result<Regime> {
    if !is_symmetric_case(e) {
        return Err(Error::Asymmetric);
    }
    let threshold = e.threshold();
    let tol = CRITICAL_RTOL * threshold;
    let strength = if (e.w.abs() - threshold).abs() <= tol {
        Strength::Critical
    } else if e.w.abs() < threshold {
        Strength::Weak
    } else {
        Strength::Strong
    };
    let sign = if e.w < 0.0 {
        InteractionSign::Attractive
    } else {
        InteractionSign::Repulsive
    };
    Ok(Regime { sign, strength })
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= SYMMETRY_RTOL * a.abs().max(b.abs())
}
