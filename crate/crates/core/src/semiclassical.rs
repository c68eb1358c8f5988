//! Mean-field phase-space dynamics of the dimer.
//!
//! The phase space is `(x, y, theta_x, theta_y)` with brackets
//! `{x, theta_x} = 1/N_a`, `{y, theta_y} = 1/N_b`. Hamilton's equations read
//!
//! ```text
//! dx/dt       = -eps_a dH/dtheta_x = -2 eps_a tau_a sqrt(1 - x^2) sin(2 theta_x)
//! dtheta_x/dt =  eps_a dH/dx       =  eps_a (w y / 2 + u_a x / 2 + x tau_a cos(2 theta_x) / sqrt(1 - x^2))
//! ```
//!
//! and likewise for `y`, so `dH/dt = 0` holds identically.

use serde::{Deserialize, Serialize};

use crate::cv::{default_seeds, stationary_points_general, stationarity_residual};
use crate::model::EffectiveParams;
use crate::{Error, Result};

/// Integration stops once `|x|` or `|y|` reaches this value.
pub const BOUNDARY: f64 = 1.0 - 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub theta_x: f64,
    pub theta_y: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, theta_x: f64, theta_y: f64) -> Self {
        Self {
            x,
            y,
            theta_x,
            theta_y,
        }
    }

    /// Same populations, phases negated: the time-reversed state.
    pub fn time_reversed(self) -> Self {
        Self::new(self.x, self.y, -self.theta_x, -self.theta_y)
    }

    fn check(&self) -> Result<()> {
        let finite = [self.x, self.y, self.theta_x, self.theta_y]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x.abs() >= 1.0 || self.y.abs() >= 1.0 {
            return Err(Error::Domain(format!(
                "phase point outside |x|, |y| < 1: ({}, {})",
                self.x, self.y
            )));
        }
        Ok(())
    }

    fn as_array(self) -> [f64; 4] {
        [self.x, self.y, self.theta_x, self.theta_y]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// `H_s = (u_a/4)(1+x^2) + (u_b/4)(1+y^2) + (w/2)(1+xy)
///        - tau_a sqrt(1-x^2) cos 2theta_x - tau_b sqrt(1-y^2) cos 2theta_y`.
pub fn hs_energy(e: &EffectiveParams, pt: &PhasePoint) -> Result<f64> {
    pt.check()?;
    Ok(energy_unchecked(e, &pt.as_array()))
}

fn energy_unchecked(e: &EffectiveParams, s: &[f64; 4]) -> f64 {
    let [x, y, tx, ty] = *s;
    0.25 * e.u_a * (1.0 + x * x) + 0.25 * e.u_b * (1.0 + y * y) + 0.5 * e.w * (1.0 + x * y)
        - e.tau_a * (1.0 - x * x).sqrt() * (2.0 * tx).cos()
        - e.tau_b * (1.0 - y * y).sqrt() * (2.0 * ty).cos()
}

/// `(dx/dt, dy/dt, dtheta_x/dt, dtheta_y/dt)`.
pub fn hamilton_rhs(e: &EffectiveParams, pt: &PhasePoint) -> Result<[f64; 4]> {
    pt.check()?;
    Ok(rhs_unchecked(e, &pt.as_array()))
}

fn rhs_unchecked(e: &EffectiveParams, s: &[f64; 4]) -> [f64; 4] {
    let [x, y, tx, ty] = *s;
    let (sx, sy) = ((1.0 - x * x).sqrt(), (1.0 - y * y).sqrt());
    [
        -2.0 * e.eps_a * e.tau_a * sx * (2.0 * tx).sin(),
        -2.0 * e.eps_b * e.tau_b * sy * (2.0 * ty).sin(),
        e.eps_a * (0.5 * e.w * y + 0.5 * e.u_a * x + x * e.tau_a * (2.0 * tx).cos() / sx),
        e.eps_b * (0.5 * e.w * x + 0.5 * e.u_b * y + y * e.tau_b * (2.0 * ty).cos() / sy),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub point: PhasePoint,
    pub energy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub dt: f64,
    pub scheme: String,
    /// Largest `|H(t) - H(0)| / max(1, |H(0)|)` over every step taken.
    pub max_drift: f64,
    /// The orbit reached `|x|` or `|y| >= BOUNDARY` and was cut short.
    pub hit_boundary: bool,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory always holds its start")
    }
}

/// Fixed-step RK4 from `start` to `t_end`, sampling every step.
pub fn integrate(
    e: &EffectiveParams,
    start: PhasePoint,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_sampled(e, start, t_end, dt, 1)
}

/// As [`integrate`], keeping every `stride`-th step (and the final one).
pub fn integrate_sampled(
    e: &EffectiveParams,
    start: PhasePoint,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    start.check()?;
    if !(dt > 0.0 && t_end > 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidParams(format!(
            "need dt > 0 and t_end > 0 (dt = {dt}, t_end = {t_end})"
        )));
    }
    let stride = stride.max(1);
    let steps = (t_end / dt).round().max(1.0) as usize;
    let h0 = hs_energy(e, &start)?;
    let scale = h0.abs().max(1.0);
    let mut s = start.as_array();
    let mut samples = vec![TrajectorySample {
        t: 0.0,
        point: start,
        energy: h0,
    }];
    let mut max_drift: f64 = 0.0;
    let mut hit_boundary = false;
    for step in 1..=steps {
        let next = match rk4_step(e, &s, dt) {
            Some(n) => n,
            None => {
                hit_boundary = true;
                break;
            }
        };
        s = next;
        let energy = energy_unchecked(e, &s);
        max_drift = max_drift.max((energy - h0).abs() / scale);
        let edge = s[0].abs() >= BOUNDARY || s[1].abs() >= BOUNDARY;
        if step % stride == 0 || step == steps || edge {
            samples.push(TrajectorySample {
                t: step as f64 * dt,
                point: PhasePoint::from_array(s),
                energy,
            });
        }
        if edge {
            hit_boundary = true;
            break;
        }
    }
    Ok(Trajectory {
        samples,
        dt,
        scheme: "rk4".into(),
        max_drift,
        hit_boundary,
    })
}

/// One RK4 step; `None` when a stage leaves the open square.
fn rk4_step(e: &EffectiveParams, s: &[f64; 4], dt: f64) -> Option<[f64; 4]> {
    let inside = |v: &[f64; 4]| v[0].abs() < 1.0 && v[1].abs() < 1.0;
    let shift = |a: &[f64; 4], k: &[f64; 4], f: f64| {
        [a[0] + f * k[0], a[1] + f * k[1], a[2] + f * k[2], a[3] + f * k[3]]
    };
    let k1 = rhs_unchecked(e, s);
    let s2 = shift(s, &k1, 0.5 * dt);
    if !inside(&s2) {
        return None;
    }
    let k2 = rhs_unchecked(e, &s2);
    let s3 = shift(s, &k2, 0.5 * dt);
    if !inside(&s3) {
        return None;
    }
    let k3 = rhs_unchecked(e, &s3);
    let s4 = shift(s, &k3, dt);
    if !inside(&s4) {
        return None;
    }
    let k4 = rhs_unchecked(e, &s4);
    let mut out = *s;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    (inside(&out) && out.iter().all(|v| v.is_finite())).then_some(out)
}

/// Zero-phase fixed points; their populations are the stationary points of
/// the effective potential.
pub fn fixed_points(e: &EffectiveParams) -> Result<Vec<PhasePoint>> {
    let search = stationary_points_general(e, &default_seeds(e))?;
    Ok(search
        .points
        .iter()
        .map(|p| PhasePoint::new(p.x, p.y, 0.0, 0.0))
        .collect())
}

/// Largest scaled stationarity residual over a set of fixed points.
pub fn fixed_point_residual(e: &EffectiveParams, pts: &[PhasePoint]) -> f64 {
    pts.iter()
        .map(|p| {
            let r = stationarity_residual(e, p.x, p.y);
            r[0].hypot(r[1]) / e.scale()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv::{potential, stationary_points_symmetric};

    fn twin(w: f64) -> EffectiveParams {
        EffectiveParams::twin(9.0, 30.0, w, 1.0 / 30.0)
    }

    #[test]
    fn energy_examples() {
        let e = twin(0.9);
        let o = PhasePoint::new(0.0, 0.0, 0.0, 0.0);
        assert!((hs_energy(&e, &o).unwrap() - (4.5 + 0.45 - 60.0)).abs() < 1e-12);
        let pt = PhasePoint::new(0.3, -0.2, 0.0, 0.0);
        let v = potential(&e, 0.3, -0.2).unwrap();
        assert!((hs_energy(&e, &pt).unwrap() - (v + e.gamma)).abs() < 1e-12);

        let flipped = PhasePoint::new(0.3, -0.2, std::f64::consts::FRAC_PI_2, 0.0);
        let tau_term = 30.0 * (1.0f64 - 0.09).sqrt();
        let diff = hs_energy(&e, &flipped).unwrap() - hs_energy(&e, &pt).unwrap();
        assert!((diff - 2.0 * tau_term).abs() < 1e-12);
        assert!(hs_energy(&e, &PhasePoint::new(1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn rhs_matches_finite_differences() {
        let e = EffectiveParams {
            u_a: 4.0,
            u_b: 6.0,
            tau_a: 20.0,
            tau_b: 15.0,
            w: 33.0,
            gamma: 0.1,
            eps_a: 0.05,
            eps_b: 1.0 / 30.0,
        };
        let pt = PhasePoint::new(0.2, -0.4, 0.3, -1.1);
        let r = hamilton_rhs(&e, &pt).unwrap();
        let h = 1e-6;
        let dh = |i: usize| {
            let mut a = pt.as_array();
            let mut b = pt.as_array();
            a[i] += h;
            b[i] -= h;
            (energy_unchecked(&e, &a) - energy_unchecked(&e, &b)) / (2.0 * h)
        };
        assert!((r[0] + e.eps_a * dh(2)).abs() < 1e-6);
        assert!((r[1] + e.eps_b * dh(3)).abs() < 1e-6);
        assert!((r[2] - e.eps_a * dh(0)).abs() < 1e-6);
        assert!((r[3] - e.eps_b * dh(1)).abs() < 1e-6);
    }

    #[test]
    fn uniform_and_strong_fixed_points() {
        let weak = twin(0.9);
        let fp = fixed_points(&weak).unwrap();
        assert_eq!(fp, vec![PhasePoint::new(0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(hamilton_rhs(&weak, &fp[0]).unwrap(), [0.0; 4]);

        let strong = twin(108.0);
        let fp = fixed_points(&strong).unwrap();
        assert_eq!(fp.len(), 3);
        let closed = stationary_points_symmetric(&strong).unwrap();
        for c in &closed {
            assert!(fp
                .iter()
                .any(|p| (p.x - c.x).abs() < 1e-10 && (p.y - c.y).abs() < 1e-10));
        }
        for p in &fp {
            let r = hamilton_rhs(&strong, p).unwrap();
            assert!(r.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn stationary_start_stays_put() {
        let e = twin(108.0);
        let x1 = (1.0f64 - 3600.0 / 9801.0).sqrt();
        let tr = integrate(&e, PhasePoint::new(x1, -x1, 0.0, 0.0), 1.0, 1e-2).unwrap();
        let end = tr.last().point;
        assert!((end.x - x1).abs() < 1e-12 && end.theta_x.abs() < 1e-12);
        assert!(!tr.hit_boundary);
    }

    #[test]
    fn rejects_bad_steps() {
        let e = twin(0.9);
        let o = PhasePoint::new(0.0, 0.0, 0.0, 0.0);
        assert!(integrate(&e, o, 1.0, 0.0).is_err());
        assert!(integrate(&e, o, -1.0, 0.1).is_err());
    }

    #[test]
    fn boundary_is_flagged() {
        // Large phase drives the population towards full imbalance.
        let e = EffectiveParams::twin(0.0, 30.0, 0.0, 1.0 / 30.0);
        let start = PhasePoint::new(0.999_999, 0.0, -0.7, 0.0);
        let tr = integrate(&e, start, 10.0, 1e-3).unwrap();
        assert!(tr.hit_boundary);
    }
}
