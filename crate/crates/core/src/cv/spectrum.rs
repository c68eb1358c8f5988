use serde::{Deserialize, Serialize};

use super::stationary::{symmetric_offset, PointKind, StationaryPoint};
use crate::model::{classify_regime, is_symmetric_case, EffectiveParams, Regime, Strength};
use crate::{Error, Result};

/// Local harmonic approximant `K + M (-d_q^2 - d_p^2) + k_q q^2 + k_p p^2`
/// about a minimum, in coordinates `q, p` measured from that minimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub centre_x: f64,
    pub centre_y: f64,
    pub constant: f64,
    pub stiffness_q: f64,
    pub stiffness_p: f64,
    /// Prefactor `M` of the Laplacian.
    pub mass_coeff: f64,
    pub omega_q: f64,
    pub omega_p: f64,
}

impl QuadraticForm {
    fn new(centre: (f64, f64), constant: f64, k_q: f64, k_p: f64, mass: f64) -> Self {
        Self {
            centre_x: centre.0,
            centre_y: centre.1,
            constant,
            stiffness_q: k_q,
            stiffness_p: k_p,
            mass_coeff: mass,
            omega_q: oscillator_frequency(mass, k_q),
            omega_p: oscillator_frequency(mass, k_p),
        }
    }

    /// Gaussian width `lambda` of the `q` oscillator, `lambda^2 = sqrt(M/k_q)`.
    pub fn lambda(&self) -> f64 {
        (self.mass_coeff / self.stiffness_q).powf(0.25)
    }

    /// Gaussian width `nu` of the `p` oscillator.
    pub fn nu(&self) -> f64 {
        (self.mass_coeff / self.stiffness_p).powf(0.25)
    }

    pub fn energy(&self, n: usize, m: usize) -> f64 {
        self.constant + self.omega_q * (n as f64 + 0.5) + self.omega_p * (m as f64 + 0.5)
    }
}

fn oscillator_frequency(mass: f64, k: f64) -> f64 {
    // Within the critical window k may come out a rounding error below zero.
    2.0 * (mass * k.max(0.0)).sqrt()
}

/// Closed form about the origin, valid for `|w| <= u + 2 tau`. The sign of
/// `w` decides which of `q`, `p` is soft.
pub fn weak_quadratic_form(e: &EffectiveParams) -> QuadraticForm {
    let (u, tau, w, eps) = (e.u_a, e.tau_a, e.w, e.eps_a);
    let mass = 2.0 * tau * eps * eps;
    let constant = -e.gamma - 2.0 * tau + 0.5 * (w + u);
    QuadraticForm::new(
        (0.0, 0.0),
        constant,
        0.25 * (u + 2.0 * tau + w),
        0.25 * (u + 2.0 * tau - w),
        mass,
    )
}

/// Closed form about the `x > 0` member of the symmetric pair of minima,
/// valid for `|w| > u + 2 tau`.
pub fn strong_quadratic_form(e: &EffectiveParams) -> Result<QuadraticForm> {
    let (u, tau, w, eps) = (e.u_a, e.tau_a, e.w, e.eps_a);
    let x1 = symmetric_offset(u, tau, w)
        .ok_or_else(|| Error::WrongRegime("no symmetric pair of minima".into()))?;
    let d = w.abs() - u;
    let curvature = d.powi(3) / (16.0 * tau * tau);
    let mass = 4.0 * tau * tau * eps * eps / d;
    let (centre, constant) = if w > 0.0 {
        ((x1, -x1), u - e.gamma - 2.0 * tau * tau / d)
    } else {
        ((x1, x1), u - w.abs() - e.gamma - 2.0 * tau * tau / d)
    };
    Ok(QuadraticForm::new(
        centre,
        constant,
        0.25 * (u + w) + curvature,
        0.25 * (u - w) + curvature,
        mass,
    ))
}

/// Harmonic approximant about a minimum (or the marginal origin at
/// criticality) of the symmetric potential.
pub fn quadratic_form(e: &EffectiveParams, pt: &StationaryPoint) -> Result<QuadraticForm> {
    if !is_symmetric_case(e) {
        return Err(Error::Asymmetric);
    }
    if pt.kind != PointKind::Minimum {
        return Err(Error::WrongRegime(format!(
            "quadratic form needs a minimum, ({}, {}) is a {:?}",
            pt.x, pt.y, pt.kind
        )));
    }
    let regime = classify_regime(e)?;
    let form = if regime.strength == Strength::Strong {
        let f = strong_quadratic_form(e)?;
        if pt.x < 0.0 {
            // Mirror image: same oscillator, reflected centre.
            QuadraticForm {
                centre_x: -f.centre_x,
                centre_y: -f.centre_y,
                ..f
            }
        } else {
            f
        }
    } else {
        weak_quadratic_form(e)
    };
    let d = (form.centre_x - pt.x).hypot(form.centre_y - pt.y);
    if d > 1e-8 {
        return Err(Error::InvalidParams(format!(
            "({}, {}) is not a closed-form minimum",
            pt.x, pt.y
        )));
    }
    Ok(form)
}

/// Harmonic form of the ground-state minimum for non-critical symmetric
/// parameters.
pub(crate) fn regime_form(e: &EffectiveParams) -> Result<(Regime, QuadraticForm)> {
    if !is_symmetric_case(e) {
        return Err(Error::Asymmetric);
    }
    let regime = classify_regime(e)?;
    let form = match regime.strength {
        Strength::Weak => weak_quadratic_form(e),
        Strength::Strong => strong_quadratic_form(e)?,
        Strength::Critical => {
            return Err(Error::WrongRegime(
                "critical coupling: the oscillator spectrum collapses, use collapse_levels".into(),
            ))
        }
    };
    Ok((regime, form))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVLevel {
    pub n: usize,
    pub m: usize,
    pub energy: f64,
    pub regime: Regime,
    /// 1 in the weak regime, 2 for the strong-regime doublets.
    pub degeneracy: usize,
}

/// All `E(n, m)` for `n <= n_max`, `m <= m_max`, sorted ascending.
pub fn cv_levels(e: &EffectiveParams, n_max: usize, m_max: usize) -> Result<Vec<CVLevel>> {
    let (regime, form) = regime_form(e)?;
    let degeneracy = if regime.strength == Strength::Strong { 2 } else { 1 };
    let mut levels = Vec::with_capacity((n_max + 1) * (m_max + 1));
    for n in 0..=n_max {
        for m in 0..=m_max {
            levels.push(CVLevel {
                n,
                m,
                energy: form.energy(n, m),
                regime,
                degeneracy,
            });
        }
    }
    levels.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.n.cmp(&b.n))
            .then(a.m.cmp(&b.m))
    });
    Ok(levels)
}

/// First `count` levels relative to the lowest, doublets expanded into two
/// equal entries so that indices line up with an exact spectrum.
pub fn cv_relative_levels(levels: &[CVLevel], count: usize) -> Vec<f64> {
    let mut flat: Vec<f64> = levels
        .iter()
        .flat_map(|l| std::iter::repeat(l.energy).take(l.degeneracy))
        .collect();
    flat.sort_by(f64::total_cmp);
    flat.truncate(count);
    let e0 = flat.first().copied().unwrap_or(0.0);
    flat.iter().map(|e| e - e0).collect()
}

/// One level of the critical-point branch: an oscillator ladder in `n`
/// plus a free-particle term in `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseLevel {
    pub n: usize,
    pub k: f64,
    pub energy: f64,
}

/// `E(n, k) = K + 2 sqrt(tau eps^2 (u + 2 tau)) (n + 1/2) + 2 tau eps^2 k`
/// with `K = u - tau - gamma` for repulsive coupling (the potential at the
/// origin at `w = u + 2 tau`; `-3 tau - gamma` on the attractive side).
pub fn collapse_levels(
    e: &EffectiveParams,
    n_max: usize,
    k_values: &[f64],
) -> Result<Vec<CollapseLevel>> {
    if !is_symmetric_case(e) {
        return Err(Error::Asymmetric);
    }
    let regime = classify_regime(e)?;
    if regime.strength != Strength::Critical {
        return Err(Error::WrongRegime(format!(
            "collapse branch needs critical coupling, got {regime}"
        )));
    }
    let (u, tau, eps) = (e.u_a, e.tau_a, e.eps_a);
    let w_c = e.w.signum() * (u + 2.0 * tau);
    let constant = -e.gamma - 2.0 * tau + 0.5 * (u + w_c);
    let omega = 2.0 * (tau * eps * eps * (u + 2.0 * tau)).sqrt();
    let free = 2.0 * tau * eps * eps;
    let mut out = Vec::with_capacity((n_max + 1) * k_values.len());
    for n in 0..=n_max {
        for &k in k_values {
            out.push(CollapseLevel {
                n,
                k,
                energy: constant + omega * (n as f64 + 0.5) + free * k,
            });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv::{potential, potential_hessian, stationary_points_symmetric};

    const EPS: f64 = 1.0 / 30.0;

    fn form_constant_check(e: &EffectiveParams, f: &QuadraticForm) -> Result<f64> {
        Ok(potential(e, f.centre_x, f.centre_y)? - f.constant)
    }

    fn twin(w: f64) -> EffectiveParams {
        EffectiveParams::twin(9.0, 30.0, w, EPS)
    }

    #[test]
    fn weak_frequencies_example() {
        let f = weak_quadratic_form(&twin(0.9));
        let wq = (2.0 * 30.0 * EPS * EPS * (9.0 + 60.0 + 0.9)).sqrt();
        let wp = (2.0 * 30.0 * EPS * EPS * (9.0 + 60.0 - 0.9)).sqrt();
        assert!((f.omega_q - wq).abs() < 1e-13);
        assert!((f.omega_p - wp).abs() < 1e-13);
        assert!((f.omega_q - 2.15870).abs() < 1e-5);
        assert!((f.omega_p - 2.13073).abs() < 1e-5);
        assert!((f.lambda().powi(2) - (8.0 * 30.0 * EPS * EPS / 69.9).sqrt()).abs() < 1e-14);
        assert!((f.nu().powi(2) - (8.0 * 30.0 * EPS * EPS / 68.1).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn strong_frequencies_example() {
        let e = twin(108.0);
        let f = strong_quadratic_form(&e).unwrap();
        let (u, tau, w) = (9.0, 30.0, 108.0);
        let wn = EPS * (w - u) * (1.0 + 4.0 * tau * tau * (u + w) / (w - u).powi(3)).sqrt();
        let wm = EPS * ((w - u).powi(2) - 4.0 * tau * tau).sqrt();
        assert!((f.omega_q - wn).abs() < 1e-12);
        assert!((f.omega_p - wm).abs() < 1e-12);
        assert!((f.omega_q - 3.951_870).abs() < 1e-6);
        assert!((f.omega_p - 2.624_881).abs() < 1e-6);
    }

    #[test]
    fn stiffness_matches_hessian_and_constant_matches_potential() {
        for w in [0.9, 40.0, -40.0, 108.0, -108.0, 250.0, -250.0] {
            let e = twin(w);
            let pts = stationary_points_symmetric(&e).unwrap();
            for pt in pts.iter().filter(|p| p.kind == PointKind::Minimum) {
                let f = quadratic_form(&e, pt).unwrap();
                let h = potential_hessian(&e, pt.x, pt.y);
                // V = 1/2 x^T H x in (x, y) becomes k_q q^2 + k_p p^2.
                let kq = 0.5 * (h[0][0] + h[0][1]);
                let kp = 0.5 * (h[0][0] - h[0][1]);
                assert!((f.stiffness_q - kq).abs() <= 1e-10 * kq.abs().max(1.0), "w={w}");
                assert!((f.stiffness_p - kp).abs() <= 1e-10 * kp.abs().max(1.0), "w={w}");
                assert!(form_constant_check(&e, &f).unwrap().abs() < 1e-10);
            }
            if let Some(saddle) = pts.iter().find(|p| p.kind == PointKind::Saddle) {
                assert!(quadratic_form(&e, saddle).is_err());
            }
        }
    }

    #[test]
    fn critical_point_has_flat_p_direction() {
        let f = weak_quadratic_form(&twin(69.0));
        assert_eq!(f.stiffness_p, 0.0);
        assert_eq!(f.omega_p, 0.0);
        assert!(cv_levels(&twin(69.0), 2, 2).is_err());
    }

    #[test]
    fn level_ordering_and_degeneracy() {
        let weak = cv_levels(&twin(0.9), 3, 3).unwrap();
        assert_eq!(weak.len(), 16);
        assert!(weak.windows(2).all(|p| p[0].energy <= p[1].energy));
        assert!(weak.iter().all(|l| l.degeneracy == 1));

        let strong = cv_levels(&twin(108.0), 3, 3).unwrap();
        assert!(strong.iter().all(|l| l.degeneracy == 2));
        let labels: Vec<_> = strong.iter().take(5).map(|l| (l.n, l.m)).collect();
        assert_eq!(labels, vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1)]);
        let rel = cv_relative_levels(&strong, 4);
        assert_eq!(rel[0], 0.0);
        assert_eq!(rel[1], 0.0);
        assert!(rel[2] > 0.0 && rel[2] == rel[3]);
    }

    #[test]
    fn collapse_branch() {
        let e = twin(69.0);
        let ks = [0.0, 1.0, 2.0];
        let lv = collapse_levels(&e, 2, &ks).unwrap();
        let at = |n: usize, k: f64| lv.iter().find(|l| l.n == n && l.k == k).unwrap().energy;
        let free = 2.0 * 30.0 * EPS * EPS;
        assert!((at(0, 1.0) - at(0, 0.0) - free).abs() < 1e-12);
        assert!((at(1, 2.0) - at(1, 1.0) - free).abs() < 1e-12);
        let ladder = at(1, 0.0) - at(0, 0.0);
        let omega = 2.0 * (30.0 * EPS * EPS * 69.0).sqrt();
        assert!((ladder - omega).abs() < 1e-12);
        // Limit of both stiff-mode spacings.
        let below = weak_quadratic_form(&twin(69.0 - 1e-9)).omega_q;
        let above = strong_quadratic_form(&twin(69.0 + 1e-9)).unwrap().omega_q;
        assert!((below - omega).abs() < 1e-8 && (above - omega).abs() < 1e-8);
        assert!((at(0, 0.0) - (9.0 - 30.0 - 0.3 + 0.5 * omega)).abs() < 1e-12);
        assert!(collapse_levels(&twin(0.9), 2, &ks).is_err());
    }
}
