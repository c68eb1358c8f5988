use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SweepSpec};
use crate::cv::{collapse_levels, cv_levels, cv_relative_levels};
use crate::exact::{even_sector_gap, relative_levels, solve_parity_resolved, SolverChoice};
use crate::fock::Parity;
use crate::model::{classify_regime, effective_params, ModelParams, Regime, Strength};
use crate::{Error, Result};

/// Exact and CV relative levels at one value of `W`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "W")]
    pub w: f64,
    pub exact_rel: Vec<f64>,
    pub cv_rel: Option<Vec<f64>>,
    /// Smallest spacing between consecutive computed exact levels.
    pub min_gap: Option<f64>,
    /// First excitation inside the ground state's mirror-parity sector.
    pub parity_gap: Option<f64>,
    /// `None` for parameter sets outside the symmetric case.
    pub regime: Option<Regime>,
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(w: f64, err: Error) -> Self {
        Self {
            w,
            exact_rel: Vec::new(),
            cv_rel: None,
            min_gap: None,
            parity_gap: None,
            regime: None,
            error: Some(err.to_string()),
        }
    }
}

/// Computes one sweep record; errors are folded into the record.
pub fn sweep_point(
    p: &ModelParams,
    k: usize,
    n_max: usize,
    m_max: usize,
    solver: SolverChoice,
) -> SweepRecord {
    match try_sweep_point(p, k, n_max, m_max, solver) {
        Ok(r) => r,
        Err(err) => SweepRecord::failed(p.w, err),
    }
}

fn try_sweep_point(
    p: &ModelParams,
    k: usize,
    n_max: usize,
    m_max: usize,
    solver: SolverChoice,
) -> Result<SweepRecord> {
    let spectrum = solve_parity_resolved(p, k, solver, false)?;
    let exact_rel = relative_levels(&spectrum);
    let min_gap = spectrum
        .eigenvalues
        .windows(2)
        .map(|w| w[1] - w[0])
        .reduce(f64::min);
    let even: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .zip(spectrum.parities.as_deref().unwrap_or(&[]))
        .filter(|(_, &par)| par == Parity::Even)
        .map(|(e, _)| *e)
        .take(2)
        .collect();
    let parity_gap = if even.len() == 2 {
        Some(even[1] - even[0])
    } else {
        even_sector_gap(p, solver).ok().map(|(_, g)| g)
    };

    let e = effective_params(p);
    let regime = classify_regime(&e).ok();
    let cv_rel = match regime {
        None => None,
        Some(r) if r.strength == Strength::Critical => {
            let ks: Vec<f64> = (0..=m_max).map(|k| k as f64).collect();
            let mut levels: Vec<f64> = collapse_levels(&e, n_max, &ks)?
                .into_iter()
                .map(|l| l.energy)
                .collect();
            levels.truncate(k);
            let e0 = levels[0];
            Some(levels.into_iter().map(|x| x - e0).collect())
        }
        Some(_) => Some(cv_relative_levels(&cv_levels(&e, n_max, m_max)?, k)),
    };
    Ok(SweepRecord {
        w: p.w,
        exact_rel,
        cv_rel,
        min_gap,
        parity_gap,
        regime,
        error: None,
    })
}

/// Runs the configured `W` sweep (or the single configured point) in
/// parallel; records come back in sweep order.
pub fn sweep_coupling(cfg: &RunConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let ws = match &cfg.sweep {
        Some(s) => s.values(),
        None => vec![cfg.params.w],
    };
    Ok(ws
        .par_iter()
        .map(|&w| sweep_point(&cfg.params.with_w(w), cfg.levels, cfg.n_max, cfg.m_max, cfg.solver))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    #[serde(rename = "W")]
    pub w: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseEstimate {
    /// Estimated `W` of the gap minimum.
    pub estimate: f64,
    /// The discrete minimum sits at an end of the sweep; no interpolation.
    pub boundary: bool,
    pub gap_at_minimum: f64,
    pub curve: Vec<GapPoint>,
}

/// Parity-sector gap `E_1^+ - E_0^+` at each `W`, evaluated in parallel.
pub fn gap_curve(p: &ModelParams, ws: &[f64], solver: SolverChoice) -> Result<Vec<GapPoint>> {
    ws.par_iter()
        .map(|&w| {
            let (_, gap) = even_sector_gap(&p.with_w(w), solver)?;
            Ok(GapPoint { w, gap })
        })
        .collect()
}

/// Locates the minimum of the records' parity-sector gap.
pub fn locate_collapse(records: &[SweepRecord]) -> Result<CollapseEstimate> {
    let curve: Vec<GapPoint> = records
        .iter()
        .filter_map(|r| r.parity_gap.map(|gap| GapPoint { w: r.w, gap }))
        .collect();
    locate_gap_minimum(curve)
}

/// Quadratic interpolation through the discrete minimum and its two
/// neighbours.
pub fn locate_gap_minimum(mut curve: Vec<GapPoint>) -> Result<CollapseEstimate> {
    if curve.len() < 3 {
        return Err(Error::InvalidParams(format!(
            "need at least 3 gap values, got {}",
            curve.len()
        )));
    }
    curve.sort_by(|a, b| a.w.total_cmp(&b.w));
    let i = argmin(&curve);
    let at = curve[i];
    if i == 0 || i + 1 == curve.len() {
        return Ok(CollapseEstimate {
            estimate: at.w,
            boundary: true,
            gap_at_minimum: at.gap,
            curve,
        });
    }
    let (a, b, c) = (curve[i - 1], at, curve[i + 1]);
    let num = (b.w - a.w).powi(2) * (b.gap - c.gap) - (b.w - c.w).powi(2) * (b.gap - a.gap);
    let den = (b.w - a.w) * (b.gap - c.gap) - (b.w - c.w) * (b.gap - a.gap);
    let estimate = if den == 0.0 { b.w } else { b.w - 0.5 * num / den };
    Ok(CollapseEstimate {
        estimate,
        boundary: false,
        gap_at_minimum: at.gap,
        curve,
    })
}

fn argmin(curve: &[GapPoint]) -> usize {
    curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap))
        .map(|(i, _)| i)
        .expect("non-empty curve")
}

/// Coarse sweep over `[start, stop]`, then a fine sweep across the two
/// coarse cells around the discrete minimum. The returned curve holds both
/// passes.
pub fn locate_collapse_refined(
    p: &ModelParams,
    start: f64,
    stop: f64,
    coarse: usize,
    fine: usize,
    solver: SolverChoice,
) -> Result<CollapseEstimate> {
    let ws = SweepSpec::w(start, stop, coarse)?.values();
    let first = locate_gap_minimum(gap_curve(p, &ws, solver)?)?;
    if first.boundary {
        return Ok(first);
    }
    let i = argmin(&first.curve);
    let (lo, hi) = (first.curve[i - 1].w, first.curve[i + 1].w);
    let fine_ws = SweepSpec::w(lo, hi, fine.max(3))?.values();
    let second = locate_gap_minimum(gap_curve(p, &fine_ws, solver)?)?;
    let mut curve = first.curve;
    curve.extend(second.curve);
    curve.sort_by(|a, b| a.w.total_cmp(&b.w));
    curve.dedup_by(|a, b| a.w == b.w);
    Ok(CollapseEstimate { curve, ..second })
}
