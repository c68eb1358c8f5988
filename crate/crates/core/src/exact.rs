//! Exact low-lying spectra and eigenstate probability grids.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::fock::{self, FockBasis, Parity, ParitySector, SymmetricMatrix, DENSE_THRESHOLD};
use crate::linalg::{self, LanczosOptions, LinearOperator};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Relative spacing below which consecutive levels form a degenerate cluster.
pub const CLUSTER_RTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Dense,
    Lanczos,
    #[default]
    Auto,
}

impl SolverChoice {
    fn use_dense(self, dim: usize) -> bool {
        match self {
            SolverChoice::Dense => true,
            SolverChoice::Lanczos => false,
            SolverChoice::Auto => dim <= DENSE_THRESHOLD,
        }
    }
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(SolverChoice::Dense),
            "lanczos" => Ok(SolverChoice::Lanczos),
            "auto" => Ok(SolverChoice::Auto),
            other => Err(Error::InvalidParams(format!("unknown solver '{other}'"))),
        }
    }
}

/// Sorted low-lying eigenvalues with optional eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// Mirror parity of each level, when solved sector by sector.
    pub parities: Option<Vec<Parity>>,
    /// `||H v - E v||` per returned eigenvector.
    pub residuals: Option<Vec<f64>>,
}

impl Spectrum {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// The `k` algebraically smallest eigenpairs, solver picked by dimension.
pub fn lowest_eigenpairs(h: &SymmetricMatrix, k: usize) -> Result<Spectrum> {
    lowest_eigenpairs_with(h, k, SolverChoice::Auto, true)
}

pub fn lowest_eigenpairs_with(
    h: &SymmetricMatrix,
    k: usize,
    solver: SolverChoice,
    want_vectors: bool,
) -> Result<Spectrum> {
    let n = h.dim();
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} for dimension {n}")));
    }
    let (values, vectors) = if solver.use_dense(n) {
        let eig = linalg::symmetric_eigen(&h.to_dense(), n, want_vectors)?;
        let vectors = want_vectors
            .then(|| (0..k).map(|j| eig.vector(j).unwrap().to_vec()).collect::<Vec<_>>());
        (eig.values[..k].to_vec(), vectors)
    } else {
        let res = linalg::lowest_eigenpairs_lanczos(h, k, &LanczosOptions::default())?;
        (res.values, want_vectors.then_some(res.vectors))
    };
    let mut spectrum = Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
        parities: None,
        residuals: None,
    };
    finish_vectors(h, &mut spectrum)?;
    Ok(spectrum)
}

/// Largest accepted `||H v - E v|| / max(1, |E|)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Fixes eigenvector signs (largest-magnitude component positive), records
/// residuals and rejects pairs above [`RESIDUAL_TOL`].
fn finish_vectors<A: LinearOperator + ?Sized>(h: &A, spectrum: &mut Spectrum) -> Result<()> {
    if let Some(vectors) = spectrum.eigenvectors.as_mut() {
        let mut hv = vec![0.0; h.dim()];
        let mut residuals = Vec::with_capacity(vectors.len());
        for (v, &e) in vectors.iter_mut().zip(&spectrum.eigenvalues) {
            fix_sign(v);
            h.apply(v, &mut hv);
            let r: f64 = hv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - e * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if r > RESIDUAL_TOL * e.abs().max(1.0) {
                return Err(Error::NotConverged {
                    iterations: 0,
                    residual: r,
                });
            }
            residuals.push(r);
        }
        spectrum.residuals = Some(residuals);
    }
    Ok(())
}

pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lowest `k` levels of the full problem, solved separately in the two
/// mirror-parity sectors and merged. Tunnelling doublets land in different
/// sectors, so they are resolved no matter how small their splitting.
pub fn solve_parity_resolved(
    p: &ModelParams,
    k: usize,
    solver: SolverChoice,
    want_vectors: bool,
) -> Result<Spectrum> {
    p.validate()?;
    let basis = FockBasis::for_params(p)?;
    if k == 0 || k > basis.dim {
        return Err(Error::OutOfRange(format!("k = {k} for dimension {}", basis.dim)));
    }
    let upper = fock::hamiltonian_entries(p, &basis);
    let mut levels: Vec<(f64, Parity, Option<Vec<f64>>)> = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let sector = ParitySector::new(basis, parity);
        if sector.dim() == 0 {
            continue;
        }
        let hs = sector.project(&upper);
        let ks = k.min(sector.dim());
        let s = lowest_eigenpairs_with(&hs, ks, solver, want_vectors)?;
        let vectors = s.eigenvectors.map(|vs| vs.into_iter().map(|v| sector.embed(&v)));
        match vectors {
            Some(vs) => levels.extend(s.eigenvalues.into_iter().zip(vs).map(|(e, v)| (e, parity, Some(v)))),
            None => levels.extend(s.eigenvalues.into_iter().map(|e| (e, parity, None))),
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    levels.truncate(k);
    let eigenvalues = levels.iter().map(|l| l.0).collect();
    let parities = Some(levels.iter().map(|l| l.1).collect());
    let eigenvectors = want_vectors.then(|| levels.into_iter().map(|l| l.2.unwrap()).collect());
    let mut spectrum = Spectrum {
        eigenvalues,
        eigenvectors,
        parities,
        residuals: None,
    };
    if want_vectors {
        let h = SymmetricMatrix::from_upper_triplets(basis.dim, &upper);
        finish_vectors(&h, &mut spectrum)?;
    }
    Ok(spectrum)
}

/// Ground energy and the lowest excitation inside the ground state's
/// (even) mirror-parity sector. Unlike the plain `E_1 - E_0`, this gap does
/// not close with the tunnelling splitting of the localized phase.
pub fn even_sector_gap(p: &ModelParams, solver: SolverChoice) -> Result<(f64, f64)> {
    p.validate()?;
    let basis = FockBasis::for_params(p)?;
    let upper = fock::hamiltonian_entries(p, &basis);
    let sector = ParitySector::new(basis, Parity::Even);
    if sector.dim() < 2 {
        return Err(Error::OutOfRange("even sector has fewer than two states".into()));
    }
    let hs = sector.project(&upper);
    let s = lowest_eigenpairs_with(&hs, 2, solver, false)?;
    Ok((s.eigenvalues[0], s.eigenvalues[1] - s.eigenvalues[0]))
}

/// Ground energy from the even sector alone (the ground state is always
/// mirror-even: the hopping terms are non-positive in the Fock basis).
pub fn ground_state_energy(p: &ModelParams, solver: SolverChoice) -> Result<f64> {
    p.validate()?;
    let basis = FockBasis::for_params(p)?;
    let upper = fock::hamiltonian_entries(p, &basis);
    let hs = ParitySector::new(basis, Parity::Even).project(&upper);
    Ok(lowest_eigenpairs_with(&hs, 1, solver, false)?.eigenvalues[0])
}

pub fn relative_levels(spectrum: &Spectrum) -> Vec<f64> {
    let e0 = spectrum.eigenvalues[0];
    spectrum.eigenvalues.iter().map(|e| e - e0).collect()
}

/// Groups consecutive levels whose spacing is within `rel_tol * max(1, |E|)`.
pub fn degenerate_clusters(values: &[f64], rel_tol: f64) -> Vec<Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len()
            || (values[i] - values[i - 1]).abs() > rel_tol * values[i - 1].abs().max(1.0);
        if split {
            clusters.push(start..i);
            start = i;
        }
    }
    clusters
}

/// Probability grid `|c_ij|^2` over `(i, j) = (n_L, m_L)`, i.e. the
/// coefficient on `|N_a - i, i, N_b - j, j>` in `|n_R, n_L, m_R, m_L>`
/// ordering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeGrid {
    pub n_a: usize,
    pub n_b: usize,
    /// Row-major `(N_a + 1) x (N_b + 1)`.
    pub values: Vec<f64>,
}

impl AmplitudeGrid {
    /// Normalized `|v|^2` reshaped onto the grid.
    pub fn from_amplitudes(basis: &FockBasis, v: &[f64]) -> Result<Self> {
        if v.len() != basis.dim {
            return Err(Error::DimensionMismatch {
                expected: basis.dim,
                found: v.len(),
            });
        }
        Self::from_weights(basis.n_a, basis.n_b, v.iter().map(|x| x * x).collect())
    }

    /// Normalizes non-negative weights onto the grid.
    pub fn from_weights(n_a: usize, n_b: usize, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != (n_a + 1) * (n_b + 1) {
            return Err(Error::DimensionMismatch {
                expected: (n_a + 1) * (n_b + 1),
                found: values.len(),
            });
        }
        let total: f64 = values.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidParams("grid weights sum to zero".into()));
        }
        values.iter_mut().for_each(|x| *x /= total);
        Ok(Self { n_a, n_b, values })
    }

    pub fn rows(&self) -> usize {
        self.n_a + 1
    }

    pub fn cols(&self) -> usize {
        self.n_b + 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Index `(i, j)` of the largest entry.
    pub fn argmax(&self) -> (usize, usize) {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
        (k / self.cols(), k % self.cols())
    }

    /// Local maxima (8-neighbourhood) above `frac` of the global maximum.
    /// Plateaus are reported once, at their first cell in row-major order.
    pub fn peaks(&self, frac: f64) -> Vec<(usize, usize)> {
        let max = self.values.iter().cloned().fold(0.0, f64::max);
        let (rows, cols) = (self.rows() as isize, self.cols() as isize);
        let mut out = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                let v = self.get(i as usize, j as usize);
                if v < frac * max || v <= 0.0 {
                    continue;
                }
                let mut is_peak = true;
                'nb: for di in -1..=1 {
                    for dj in -1..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (a, b) = (i + di, j + dj);
                        if a < 0 || b < 0 || a >= rows || b >= cols {
                            continue;
                        }
                        let nv = self.get(a as usize, b as usize);
                        // Strictly larger neighbour, or an equal one earlier in
                        // row-major order, disqualifies.
                        let earlier = (a, b) < (i, j);
                        if nv > v || (nv == v && earlier) {
                            is_peak = false;
                            break 'nb;
                        }
                    }
                }
                if is_peak {
                    out.push((i as usize, j as usize));
                }
            }
        }
        out
    }
}

pub fn amplitude_grid(spectrum: &Spectrum, which: usize, basis: &FockBasis) -> Result<AmplitudeGrid> {
    let vectors = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("spectrum was computed without eigenvectors".into()))?;
    let v = vectors.get(which).ok_or_else(|| {
        Error::OutOfRange(format!("level {which} of {} computed", vectors.len()))
    })?;
    AmplitudeGrid::from_amplitudes(basis, v)
}

/// Summed (then renormalized) probability grid over a range of levels, the
/// projector-level quantity for a degenerate cluster.
pub fn cluster_grid(spectrum: &Spectrum, levels: Range<usize>, basis: &FockBasis) -> Result<AmplitudeGrid> {
    let mut acc = vec![0.0; basis.dim];
    for l in levels {
        let g = amplitude_grid(spectrum, l, basis)?;
        acc.iter_mut().zip(&g.values).for_each(|(a, b)| *a += b);
    }
    AmplitudeGrid::from_weights(basis.n_a, basis.n_b, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_basis, build_hamiltonian};

    #[test]
    fn unequal_species_ground_vector_is_accurate() {
        let p = ModelParams {
            j_a: 1.7847849576980814,
            j_b: 1.5928946579269039,
            u_a: 0.8672263865479303,
            u_b: 0.6077898855468745,
            w: 0.8968424520279362,
            n_a: 3,
            n_b: 6,
        };
        let basis = build_basis(3, 6).unwrap();
        let h = build_hamiltonian(&p, &basis).unwrap();
        let s = lowest_eigenpairs_with(&h, basis.dim, SolverChoice::Dense, true).unwrap();
        assert!(s.residuals.unwrap().iter().all(|&r| r < 1e-11));
    }

    fn four_level_oracle(j: f64, w: f64) -> Vec<f64> {
        let r = (w * w + 16.0 * j * j).sqrt();
        let mut v = vec![0.5 * (w - r), 0.0, w, 0.5 * (w + r)];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn four_by_four_lowest_and_relative() {
        let p = ModelParams::twin(1, 1.0, 0.0, 0.1);
        let basis = build_basis(1, 1).unwrap();
        let h = build_hamiltonian(&p, &basis).unwrap();
        let s = lowest_eigenpairs(&h, 4).unwrap();
        let want = four_level_oracle(1.0, 0.1);
        for (a, b) in s.eigenvalues.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
        let rel = relative_levels(&s);
        assert_eq!(rel[0], 0.0);
        for (r, w) in rel.iter().zip(&want) {
            assert!((r - (w - want[0])).abs() < 1e-13);
        }
    }

    #[test]
    fn scalar_matrix_triple() {
        let n = 6;
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 2.5)).collect();
        let h = SymmetricMatrix::from_upper_triplets(n, &triplets);
        let s = lowest_eigenpairs(&h, 3).unwrap();
        assert_eq!(s.eigenvalues, vec![2.5, 2.5, 2.5]);
        assert!(lowest_eigenpairs(&h, 0).is_err());
        assert!(lowest_eigenpairs(&h, 7).is_err());
    }

    #[test]
    fn decoupled_ground_state_is_binomial_product() {
        // W = 0, U = 0: ground state (a_L + a_R)^N |0>, so |c_n|^2 = C(N, n) / 2^N.
        let (na, nb) = (6, 4);
        let p = ModelParams {
            j_a: 1.0,
            j_b: 0.5,
            u_a: 0.0,
            u_b: 0.0,
            w: 0.0,
            n_a: na,
            n_b: nb,
        };
        let basis = build_basis(na, nb).unwrap();
        let s = lowest_eigenpairs(&build_hamiltonian(&p, &basis).unwrap(), 1).unwrap();
        let g = amplitude_grid(&s, 0, &basis).unwrap();
        let binom = |n: usize, k: usize| -> f64 {
            (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        };
        for i in 0..=na {
            for j in 0..=nb {
                let want = binom(na, i) / 2f64.powi(na as i32) * binom(nb, j) / 2f64.powi(nb as i32);
                assert!((g.get(i, j) - want).abs() < 1e-12);
            }
        }
        assert!((g.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_resolved_matches_full_solve() {
        let p = ModelParams::twin(7, 1.0, 0.05, 0.4);
        let basis = build_basis(7, 7).unwrap();
        let full = lowest_eigenpairs(&build_hamiltonian(&p, &basis).unwrap(), 10).unwrap();
        let split = solve_parity_resolved(&p, 10, SolverChoice::Dense, true).unwrap();
        for (a, b) in full.eigenvalues.iter().zip(&split.eigenvalues) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(split.parities.as_ref().unwrap()[0], Parity::Even);
        for r in split.residuals.as_ref().unwrap() {
            assert!(*r < 1e-9);
        }
    }

    #[test]
    fn lanczos_and_dense_agree() {
        let p = ModelParams::twin(12, 1.0, 0.02, 0.05);
        let basis = build_basis(12, 12).unwrap();
        let h = build_hamiltonian(&p, &basis).unwrap();
        let d = lowest_eigenpairs_with(&h, 8, SolverChoice::Dense, true).unwrap();
        let l = lowest_eigenpairs_with(&h, 8, SolverChoice::Lanczos, true).unwrap();
        for (a, b) in d.eigenvalues.iter().zip(&l.eigenvalues) {
            assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
        }
        for (r, e) in l.residuals.unwrap().iter().zip(&l.eigenvalues) {
            assert!(*r <= 1e-8 * e.abs().max(1.0));
        }
    }

    #[test]
    fn clusters_and_sign_convention() {
        let c = degenerate_clusters(&[0.0, 1e-12, 1.0, 2.0, 2.0], 1e-9);
        assert_eq!(c, vec![0..2, 2..3, 3..5]);
        let mut v = vec![0.1, -0.9, 0.3];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }

    #[test]
    fn grid_errors() {
        let basis = build_basis(2, 2).unwrap();
        let s = Spectrum {
            eigenvalues: vec![0.0],
            eigenvectors: None,
            parities: None,
            residuals: None,
        };
        assert!(amplitude_grid(&s, 0, &basis).is_err());
        let s = Spectrum {
            eigenvectors: Some(vec![vec![1.0; 9]]),
            ..s
        };
        assert!(amplitude_grid(&s, 1, &basis).is_err());
        assert!(AmplitudeGrid::from_weights(2, 2, vec![0.0; 9]).is_err());
    }

    #[test]
    fn peak_finder() {
        let mut w = vec![0.0; 25];
        w[6] = 1.0; // (1, 1)
        w[18] = 0.5; // (3, 3)
        w[24] = 0.01; // below threshold
        let g = AmplitudeGrid::from_weights(4, 4, w).unwrap();
        assert_eq!(g.peaks(0.1), vec![(1, 1), (3, 3)]);
        assert_eq!(g.argmax(), (1, 1));
    }
}
