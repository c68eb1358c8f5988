//! Fixed-(N_a, N_b) occupation-number basis and the exact dimer Hamiltonian.
//!
//! States are labelled by the left-well occupations `(n_L, m_L)`; the right
//! wells hold `n_R = N_a - n_L` and `m_R = N_b - m_L`. Ordering is row-major,
//! `index = n_L (N_b + 1) + m_L`, so reversing the index order maps every
//! state onto its left/right mirror image.

use std::io::Write;

use rayon::prelude::*;

use crate::linalg::{CsrMatrix, LinearOperator};
use crate::model::ModelParams;
use crate::{Error, Result};

pub const DEFAULT_DIM_CAP: usize = 1_000_000;
/// Dense storage is used up to this dimension.
pub const DENSE_THRESHOLD: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockBasis {
    pub n_a: usize,
    pub n_b: usize,
    pub dim: usize,
}

impl FockBasis {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        Self::with_cap(n_a, n_b, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(n_a: usize, n_b: usize, cap: usize) -> Result<Self> {
        let dim = (n_a + 1)
            .checked_mul(n_b + 1)
            .ok_or(Error::BasisTooLarge { dim: usize::MAX, cap })?;
        if dim > cap {
            return Err(Error::BasisTooLarge { dim, cap });
        }
        Ok(Self { n_a, n_b, dim })
    }

    pub fn for_params(p: &ModelParams) -> Result<Self> {
        Self::new(p.n_a, p.n_b)
    }

    #[inline]
    pub fn index(&self, n_l: usize, m_l: usize) -> usize {
        debug_assert!(n_l <= self.n_a && m_l <= self.n_b);
        n_l * (self.n_b + 1) + m_l
    }

    #[inline]
    pub fn state(&self, index: usize) -> (usize, usize) {
        (index / (self.n_b + 1), index % (self.n_b + 1))
    }

    /// Index of the left/right mirrored state `(N_a - n_L, N_b - m_L)`.
    #[inline]
    pub fn mirror(&self, index: usize) -> usize {
        self.dim - 1 - index
    }
}

/// Real symmetric matrix, dense below [`DENSE_THRESHOLD`] and sparse above.
#[derive(Clone, Debug, PartialEq)]
pub enum SymmetricMatrix {
    /// Row-major full storage.
    Dense { dim: usize, data: Vec<f64> },
    Sparse(CsrMatrix),
}

impl SymmetricMatrix {
    /// Builds from upper-triangle triplets. Each off-diagonal element is
    /// written once and mirrored.
    pub fn from_upper_triplets(dim: usize, upper: &[(usize, usize, f64)]) -> Self {
        if dim <= DENSE_THRESHOLD {
            let mut data = vec![0.0; dim * dim];
            for &(i, j, v) in upper {
                data[i * dim + j] += v;
                if i != j {
                    data[j * dim + i] += v;
                }
            }
            SymmetricMatrix::Dense { dim, data }
        } else {
            SymmetricMatrix::Sparse(CsrMatrix::from_upper_triplets(dim, upper))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SymmetricMatrix::Dense { dim, .. } => *dim,
            SymmetricMatrix::Sparse(m) => m.dim,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            SymmetricMatrix::Dense { dim, data } => data[i * dim + j],
            SymmetricMatrix::Sparse(m) => m.get(i, j),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, SymmetricMatrix::Dense { .. })
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            SymmetricMatrix::Dense { data, .. } => data.clone(),
            SymmetricMatrix::Sparse(m) => m.to_dense(),
        }
    }

    /// Non-zero upper-triangle entries in row-major order.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        match self {
            SymmetricMatrix::Dense { dim, data } => {
                let n = *dim;
                let mut out = Vec::new();
                for i in 0..n {
                    for j in i..n {
                        let v = data[i * n + j];
                        if v != 0.0 {
                            out.push((i, j, v));
                        }
                    }
                }
                out
            }
            SymmetricMatrix::Sparse(m) => {
                let mut out = Vec::new();
                for i in 0..m.dim {
                    for (j, v) in m.row(i) {
                        if j >= i && v != 0.0 {
                            out.push((i, j, v));
                        }
                    }
                }
                out
            }
        }
    }

    /// Writes the upper triangle as `i j value` lines (0-based).
    pub fn write_coordinate_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, j, v) in self.upper_entries() {
            writeln!(out, "{i} {j} {}", crate::harness::output::fmt_f64(v))?;
        }
        Ok(())
    }
}

impl LinearOperator for SymmetricMatrix {
    fn dim(&self) -> usize {
        SymmetricMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match self {
            SymmetricMatrix::Dense { dim, data } => {
                for (i, yi) in y.iter_mut().enumerate() {
                    let row = &data[i * dim..(i + 1) * dim];
                    *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            SymmetricMatrix::Sparse(m) => m.apply(x, y),
        }
    }
}

/// Diagonal element of the Hamiltonian for the state `(n_L, m_L)`.
pub fn diagonal_element(p: &ModelParams, n_l: usize, m_l: usize) -> f64 {
    let n_r = p.n_a - n_l;
    let m_r = p.n_b - m_l;
    let pair = |k: usize| (k * k.saturating_sub(1)) as f64;
    0.5 * p.u_a * (pair(n_l) + pair(n_r))
        + 0.5 * p.u_b * (pair(m_l) + pair(m_r))
        + p.w * (n_l * m_l + n_r * m_r) as f64
}

/// Upper-triangle matrix elements of the Hamiltonian. Rows are generated in
/// parallel; the output order is deterministic.
pub fn hamiltonian_entries(p: &ModelParams, basis: &FockBasis) -> Vec<(usize, usize, f64)> {
    (0..basis.dim)
        .into_par_iter()
        .map(|idx| {
            let (n_l, m_l) = basis.state(idx);
            let n_r = p.n_a - n_l;
            let m_r = p.n_b - m_l;
            let mut row = Vec::with_capacity(3);
            row.push((idx, idx, diagonal_element(p, n_l, m_l)));
            // (n_L, m_L) <-> (n_L + 1, m_L): a_L^+ a_R.
            if n_r > 0 {
                let t = -p.j_a * (((n_l + 1) * n_r) as f64).sqrt();
                row.push((idx, basis.index(n_l + 1, m_l), t));
            }
            if m_r > 0 {
                let t = -p.j_b * (((m_l + 1) * m_r) as f64).sqrt();
                row.push((idx, basis.index(n_l, m_l + 1), t));
            }
            row
        })
        .flatten()
        .collect()
}

pub fn build_basis(n_a: usize, n_b: usize) -> Result<FockBasis> {
    FockBasis::new(n_a, n_b)
}

pub fn build_hamiltonian(p: &ModelParams, basis: &FockBasis) -> Result<SymmetricMatrix> {
    if p.n_a != basis.n_a || p.n_b != basis.n_b {
        return Err(Error::InvalidParams(format!(
            "basis ({}, {}) does not match parameters ({}, {})",
            basis.n_a, basis.n_b, p.n_a, p.n_b
        )));
    }
    let entries = hamiltonian_entries(p, basis);
    Ok(SymmetricMatrix::from_upper_triplets(basis.dim, &entries))
}

/// Swaps the species-b wells: the component at `(n_L, m_L)` moves to
/// `(n_L, N_b - m_L)`.
pub fn b_parity_transform(basis: &FockBasis, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: v.len(),
        });
    }
    let mut out = vec![0.0; basis.dim];
    for (idx, &x) in v.iter().enumerate() {
        let (n_l, m_l) = basis.state(idx);
        out[basis.index(n_l, basis.n_b - m_l)] = x;
    }
    Ok(out)
}

/// Eigenvalue of the full left/right mirror `P: (n_L, m_L) -> (N_a - n_L,
/// N_b - m_L)`, which commutes with the Hamiltonian for every parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Symmetry-adapted basis of one mirror-parity sector.
///
/// Sector state `s` is `(|r> + sign |P r>) / sqrt(2)` for a representative
/// `r < P r`, or `|r>` itself for the self-mirrored centre state (even
/// sector only, present when `N_a` and `N_b` are both even).
#[derive(Clone, Debug)]
pub struct ParitySector {
    pub parity: Parity,
    pub basis: FockBasis,
    /// Representative full-basis index of each sector state.
    pub reps: Vec<usize>,
}

impl ParitySector {
    pub fn new(basis: FockBasis, parity: Parity) -> Self {
        let reps = (0..basis.dim)
            .filter(|&i| {
                let m = basis.mirror(i);
                i < m || (i == m && parity == Parity::Even)
            })
            .collect();
        Self {
            parity,
            basis,
            reps,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Position of full-basis state `i` within the sector together with its
    /// coefficient in that sector state.
    fn locate(&self, i: usize) -> Option<(usize, f64)> {
        let m = self.basis.mirror(i);
        let rep = i.min(m);
        let pos = self.reps.binary_search(&rep).ok()?;
        let coeff = if i == m {
            1.0
        } else if i == rep {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            self.parity.sign() * std::f64::consts::FRAC_1_SQRT_2
        };
        Some((pos, coeff))
    }

    fn components(&self, pos: usize) -> impl Iterator<Item = (usize, f64)> {
        let r = self.reps[pos];
        let m = self.basis.mirror(r);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sign = self.parity.sign();
        let pair = if r == m {
            [(r, 1.0), (usize::MAX, 0.0)]
        } else {
            [(r, s), (m, sign * s)]
        };
        pair.into_iter().filter(|&(i, _)| i != usize::MAX)
    }

    /// Projects the full Hamiltonian (upper triplets) onto this sector.
    pub fn project(&self, upper: &[(usize, usize, f64)]) -> SymmetricMatrix {
        // Row lists of the full matrix, both triangles.
        let n = self.basis.dim;
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in upper {
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        let mut acc: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for a in 0..self.dim() {
            for (i, ci) in self.components(a) {
                for &(j, hij) in &rows[i] {
                    if let Some((b, cj)) = self.locate(j) {
                        if b >= a {
                            *acc.entry((a, b)).or_insert(0.0) += ci * cj * hij;
                        }
                    }
                }
            }
        }
        let triplets: Vec<_> = acc
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((a, b), v)| (a, b, v))
            .collect();
        SymmetricMatrix::from_upper_triplets(self.dim(), &triplets)
    }

    /// Maps a sector vector back to the full basis.
    pub fn embed(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.basis.dim];
        for (pos, &x) in v.iter().enumerate() {
            for (i, c) in self.components(pos) {
                out[i] += c * x;
            }
        }
        out
    }
}
