use serde::{Deserialize, Serialize};

use super::{potential, potential_hessian, stationarity_jacobian, stationarity_residual};
use crate::model::{is_symmetric_case, EffectiveParams};
use crate::{Error, Result};

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 60;
const DEDUP_DIST: f64 = 1e-8;
const EDGE: f64 = 1.0 - 1e-12;
const GRID_SEEDS: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Minimum,
    Saddle,
    Maximum,
}

/// Which of the three solution branches a point belongs to: the uniform
/// point at the origin, or the member of a symmetric pair with `x > 0`
/// (`Plus`) or `x < 0` (`Minus`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Uniform,
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub x: f64,
    pub y: f64,
    pub kind: PointKind,
    pub branch: Branch,
    pub v_value: f64,
}

impl StationaryPoint {
    fn new(e: &EffectiveParams, x: f64, y: f64) -> Result<Self> {
        Ok(Self {
            x,
            y,
            kind: classify_point(e, x, y),
            branch: branch_of(x, y),
            v_value: potential(e, x, y)?,
        })
    }

    /// Scaled residual of the stationarity equations.
    pub fn residual(&self, e: &EffectiveParams) -> f64 {
        let r = stationarity_residual(e, self.x, self.y);
        r[0].hypot(r[1]) / e.scale()
    }
}

/// Hessian-based classification. A degenerate Hessian with positive trace
/// (the marginal point at criticality) is reported as a minimum.
pub fn classify_point(e: &EffectiveParams, x: f64, y: f64) -> PointKind {
    let h = potential_hessian(e, x, y);
    let trace = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let tol = 1e-12 * trace * trace;
    if det < -tol {
        PointKind::Saddle
    } else if trace > 0.0 {
        PointKind::Minimum
    } else {
        PointKind::Maximum
    }
}

fn branch_of(x: f64, y: f64) -> Branch {
    let lead = if x.abs() > DEDUP_DIST { x } else { y };
    if lead.abs() <= DEDUP_DIST {
        Branch::Uniform
    } else if lead > 0.0 {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

/// Closed-form stationary points of the symmetric case: the origin, plus
/// the pair `x1 = ±sqrt(1 - 4 tau^2 / (|w| - u)^2)` in the strong regime,
/// with `y = -x` for repulsive and `y = x` for attractive coupling.
pub fn stationary_points_symmetric(e: &EffectiveParams) -> Result<Vec<StationaryPoint>> {
    if !is_symmetric_case(e) {
        return Err(Error::Asymmetric);
    }
    let mut out = vec![StationaryPoint::new(e, 0.0, 0.0)?];
    if let Some(x1) = symmetric_offset(e.u_a, e.tau_a, e.w) {
        let s = if e.w > 0.0 { -1.0 } else { 1.0 };
        out.push(StationaryPoint::new(e, x1, s * x1)?);
        out.push(StationaryPoint::new(e, -x1, -s * x1)?);
    }
    Ok(out)
}

/// `|x1|` of the symmetric pair, `None` unless `|w| > u + 2 tau`.
pub(crate) fn symmetric_offset(u: f64, tau: f64, w: f64) -> Option<f64> {
    let d = w.abs() - u;
    if d <= 2.0 * tau {
        return None;
    }
    let x1 = (1.0 - 4.0 * tau * tau / (d * d)).sqrt();
    (x1 > 0.0).then_some(x1)
}

#[derive(Clone, Debug)]
pub struct StationarySearch {
    pub points: Vec<StationaryPoint>,
    /// Seeds from which Newton failed to converge.
    pub failed_seeds: usize,
}

/// Seeds for the general solver: the origin, the closed-form pair of the
/// nearest symmetric parameter set and an 11 x 11 grid of cell centres.
pub fn default_seeds(e: &EffectiveParams) -> Vec<(f64, f64)> {
    let mut seeds = vec![(0.0, 0.0)];
    let u = 0.5 * (e.u_a + e.u_b);
    let tau = 0.5 * (e.tau_a + e.tau_b);
    if let Some(x1) = symmetric_offset(u, tau, e.w) {
        let s = if e.w > 0.0 { -1.0 } else { 1.0 };
        seeds.push((x1, s * x1));
        seeds.push((-x1, -s * x1));
    }
    let g = GRID_SEEDS as f64;
    for i in 0..GRID_SEEDS {
        for j in 0..GRID_SEEDS {
            seeds.push(((2 * i + 1) as f64 / g - 1.0, (2 * j + 1) as f64 / g - 1.0));
        }
    }
    seeds
}

/// Damped Newton on the stationarity equations from every seed; converged
/// points are deduplicated and classified.
pub fn stationary_points_general(
    e: &EffectiveParams,
    seeds: &[(f64, f64)],
) -> Result<StationarySearch> {
    let mut points: Vec<StationaryPoint> = Vec::new();
    let mut failed_seeds = 0;
    for &seed in seeds {
        match newton(e, seed) {
            Some((x, y)) => {
                let dup = points
                    .iter()
                    .any(|p| (p.x - x).hypot(p.y - y) < DEDUP_DIST);
                if !dup {
                    points.push(StationaryPoint::new(e, x, y)?);
                }
            }
            None => failed_seeds += 1,
        }
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Ok(StationarySearch {
        points,
        failed_seeds,
    })
}

fn newton(e: &EffectiveParams, (mut x, mut y): (f64, f64)) -> Option<(f64, f64)> {
    let tol = NEWTON_TOL * e.scale();
    let norm = |x: f64, y: f64| {
        let r = stationarity_residual(e, x, y);
        r[0].hypot(r[1])
    };
    let mut res = norm(x, y);
    for _ in 0..NEWTON_MAX_ITER {
        if res <= tol {
            break;
        }
        let r = stationarity_residual(e, x, y);
        let j = stationarity_jacobian(e, x, y);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dy = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let (nx, ny) = (x - t * dx, y - t * dy);
            if nx.abs() < EDGE && ny.abs() < EDGE {
                let nr = norm(nx, ny);
                if nr < res {
                    x = nx;
                    y = ny;
                    res = nr;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (res <= tol && x.abs() < EDGE && y.abs() < EDGE).then_some((x, y))
}
