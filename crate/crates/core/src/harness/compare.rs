use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cv::{cv_eigenstate, cv_levels, cv_relative_levels, eigenfunction_density};
use crate::exact::{
    amplitude_grid, ground_state_energy, relative_levels, solve_parity_resolved, AmplitudeGrid,
    SolverChoice,
};
use crate::fock::FockBasis;
use crate::model::{classify_regime, effective_params, ModelParams, Regime};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDeviation {
    pub index: usize,
    pub exact: f64,
    pub cv: f64,
    pub abs_dev: f64,
    /// `abs_dev / exact`; absent where the exact level is (numerically) zero.
    pub rel_dev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapEntry {
    pub label: String,
    pub overlap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub ns: Vec<usize>,
    pub deviations: Vec<f64>,
    /// `d` in `deviation ~ C N^{-d}`.
    pub exponent: f64,
    pub prefactor: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub regime: Option<Regime>,
    pub levels: Vec<LevelDeviation>,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub mean_rel: f64,
    pub overlaps: Vec<OverlapEntry>,
    pub scaling: Vec<ScalingFit>,
}

/// Level-by-level deviations of the first `count` relative levels, matched
/// by sorted position.
pub fn compare_spectra(exact_rel: &[f64], cv_rel: &[f64], count: usize) -> ComparisonReport {
    let count = count.min(exact_rel.len()).min(cv_rel.len());
    let top = exact_rel[..count].iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let levels: Vec<LevelDeviation> = (0..count)
        .map(|i| {
            let (ex, cv) = (exact_rel[i], cv_rel[i]);
            let abs_dev = (cv - ex).abs();
            let rel_dev = (ex.abs() > 1e-8 * top).then(|| abs_dev / ex.abs());
            LevelDeviation {
                index: i,
                exact: ex,
                cv,
                abs_dev,
                rel_dev,
            }
        })
        .collect();
    let rels: Vec<f64> = levels.iter().filter_map(|l| l.rel_dev).collect();
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let abss: Vec<f64> = levels.iter().map(|l| l.abs_dev).collect();
    ComparisonReport {
        regime: None,
        max_abs: abss.iter().cloned().fold(0.0, f64::max),
        mean_abs: mean(&abss),
        max_rel: rels.iter().cloned().fold(0.0, f64::max),
        mean_rel: mean(&rels),
        levels,
        overlaps: Vec::new(),
        scaling: Vec::new(),
    }
}

/// Bhattacharyya coefficient `sum sqrt(a_ij b_ij)`.
pub fn density_overlap(a: &AmplitudeGrid, b: &AmplitudeGrid) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let s: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x * y).sqrt())
        .sum();
    Ok(s.clamp(0.0, 1.0))
}

/// Least-squares fit of `ln d = ln C - exponent ln N`.
pub fn fit_power_law(ns: &[usize], deviations: &[f64]) -> Result<ScalingFit> {
    if ns.len() != deviations.len() || ns.len() < 2 {
        return Err(Error::InvalidParams("need at least two (N, deviation) pairs".into()));
    }
    if deviations.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidParams("deviations must be positive".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|d| d.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(ScalingFit {
        ns: ns.to_vec(),
        deviations: deviations.to_vec(),
        exponent: -slope,
        prefactor: (my - slope * mx).exp(),
    })
}

/// Ground-level offset `|E_0^cv - E_0^exact|` in units of the interaction
/// scale `u_a = N_a^2 U_a`, the natural energy unit of the CV Hamiltonian.
pub fn ground_offset(p: &ModelParams, solver: SolverChoice) -> Result<f64> {
    let e = effective_params(p);
    if !(e.u_a > 0.0) {
        return Err(Error::InvalidParams("ground offset is scaled by u_a, which is zero".into()));
    }
    let cv0 = cv_levels(&e, 0, 0)?[0].energy;
    let ex0 = ground_state_energy(p, solver)?;
    Ok((cv0 - ex0).abs() / e.u_a)
}

/// Fits the ground offset across total boson numbers `ns` (split equally
/// between the species); `params(n_total)` supplies the parameter point.
pub fn deviation_scaling<F>(ns: &[usize], params: F, solver: SolverChoice) -> Result<ScalingFit>
where
    F: Fn(usize) -> ModelParams + Sync,
{
    let devs: Vec<f64> = ns
        .par_iter()
        .map(|&n| ground_offset(&params(n), solver))
        .collect::<Result<_>>()?;
    fit_power_law(ns, &devs)
}

/// Full single-point comparison: level deviations for the first `k`
/// levels and the ground-state grid overlap.
pub fn compare_point(
    p: &ModelParams,
    k: usize,
    n_max: usize,
    m_max: usize,
    solver: SolverChoice,
) -> Result<ComparisonReport> {
    let e = effective_params(p);
    let regime = classify_regime(&e)?;
    let spectrum = solve_parity_resolved(p, k, solver, true)?;
    let exact_rel = relative_levels(&spectrum);
    let cv_rel = cv_relative_levels(&cv_levels(&e, n_max, m_max)?, k);
    let mut report = compare_spectra(&exact_rel, &cv_rel, k);
    report.regime = Some(regime);

    let basis = FockBasis::for_params(p)?;
    let exact_grid = amplitude_grid(&spectrum, 0, &basis)?;
    let state = cv_eigenstate(&e, 0, 0, None)?;
    let cv_grid = eigenfunction_density(&e, &state, &basis)?.grid;
    report.overlaps.push(OverlapEntry {
        label: "ground".into(),
        overlap: density_overlap(&exact_grid, &cv_grid)?,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_have_zero_deviation() {
        let v = [0.0, 1.0, 2.0, 2.0];
        let r = compare_spectra(&v, &v, 4);
        assert_eq!(r.max_abs, 0.0);
        assert_eq!(r.max_rel, 0.0);
        assert_eq!(r.levels.len(), 4);
        assert!(r.levels[0].rel_dev.is_none());
    }

    #[test]
    fn relative_deviation_and_clipping() {
        let r = compare_spectra(&[0.0, 2.0, 4.0], &[0.0, 2.1, 3.8, 9.0], 10);
        assert_eq!(r.levels.len(), 3);
        assert!((r.max_rel - 0.05).abs() < 1e-12);
        assert!((r.max_abs - 0.2).abs() < 1e-12);
    }

    #[test]
    fn overlap_bounds() {
        let a = AmplitudeGrid::from_weights(1, 1, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let b = AmplitudeGrid::from_weights(1, 1, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(density_overlap(&a, &a).unwrap(), 1.0);
        assert_eq!(density_overlap(&a, &b).unwrap(), 0.0);
        let c = AmplitudeGrid::from_weights(2, 1, vec![1.0; 6]).unwrap();
        assert!(matches!(density_overlap(&a, &c), Err(Error::Shape(_))));
    }

    #[test]
    fn power_law_fit_is_exact_on_power_law() {
        let ns = [40, 60, 100, 200];
        let devs: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-1.7)).collect();
        let f = fit_power_law(&ns, &devs).unwrap();
        assert!((f.exponent - 1.7).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-10);
        assert!(fit_power_law(&ns, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }
}
