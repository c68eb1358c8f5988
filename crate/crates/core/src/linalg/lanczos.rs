//! Restarted block Lanczos with full reorthogonalization.
//!
//! The Krylov basis is kept explicitly (together with `A` applied to it), so
//! every restart is a Rayleigh-Ritz projection on an orthonormal basis. The
//! block size bounds the multiplicity of an exactly degenerate level that can
//! be resolved; near-degenerate pairs are resolved by the Ritz step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{axpy, dense::symmetric_eigen, dot, norm, LinearOperator};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub block_size: usize,
    /// Largest basis before a restart; `None` picks `max(3k + 2b, 40)`.
    pub max_basis: Option<usize>,
    pub max_restarts: usize,
    /// Convergence when `||A y - theta y|| <= tol * max(1, |theta|)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            block_size: 4,
            max_basis: None,
            max_restarts: 400,
            tol: 1e-9,
            seed: 0x5eed_d1e7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
    pub matvecs: usize,
}

/// Lowest `k` eigenpairs of the symmetric operator `op`.
pub fn lowest_eigenpairs_lanczos<A: LinearOperator + ?Sized>(
    op: &A,
    k: usize,
    opts: &LanczosOptions,
) -> Result<LanczosResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} for dimension {n}")));
    }
    let b = opts.block_size.clamp(1, n);
    let m = opts
        .max_basis
        .unwrap_or_else(|| (3 * k + 2 * b).max(40))
        .max(k + b)
        .min(n);
    if m >= n {
        return materialized(op, k);
    }
    let keep = (k + b).min(m / 2).max(k);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut random_block = |count: usize| -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| (0..n).map(|_| rng.gen::<f64>() - 0.5).collect())
            .collect()
    };

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut hq: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut pending = random_block(b);
    let mut matvecs = 0;
    let mut worst = f64::INFINITY;

    for restart in 0..=opts.max_restarts {
        let mut injections = 0;
        while q.len() < m {
            let start = q.len();
            for cand in pending.drain(..) {
                if let Some(v) = orthonormalize(&q, cand) {
                    let mut hv = vec![0.0; n];
                    op.apply(&v, &mut hv);
                    matvecs += 1;
                    q.push(v);
                    hq.push(hv);
                    if q.len() == m {
                        break;
                    }
                }
            }
            if q.len() == start {
                // Invariant subspace reached: continue from fresh directions.
                injections += 1;
                if injections > 8 {
                    break;
                }
                pending = random_block(b);
                continue;
            }
            pending = hq[start..].to_vec();
        }

        let mm = q.len();
        let mut t = vec![0.0; mm * mm];
        for i in 0..mm {
            for j in i..mm {
                let v = 0.5 * (dot(&q[i], &hq[j]) + dot(&q[j], &hq[i]));
                t[i * mm + j] = v;
                t[j * mm + i] = v;
            }
        }
        let eig = symmetric_eigen(&t, mm, true)?;
        let nkeep = keep.min(mm);
        let mut ys = Vec::with_capacity(nkeep);
        let mut hys = Vec::with_capacity(nkeep);
        let mut residuals = Vec::with_capacity(nkeep);
        for i in 0..nkeep {
            let s = eig.vector(i).expect("vectors requested");
            let mut y = vec![0.0; n];
            let mut hy = vec![0.0; n];
            for j in 0..mm {
                axpy(s[j], &q[j], &mut y);
                axpy(s[j], &hq[j], &mut hy);
            }
            let theta = eig.values[i];
            let r: Vec<f64> = hy.iter().zip(&y).map(|(a, b)| a - theta * b).collect();
            residuals.push(r);
            ys.push(y);
            hys.push(hy);
        }
        let res_norms: Vec<f64> = residuals.iter().map(|r| norm(r)).collect();
        let scaled = |i: usize| res_norms[i] / eig.values[i].abs().max(1.0);
        worst = (0..k).map(scaled).fold(0.0, f64::max);
        if worst <= opts.tol {
            return Ok(LanczosResult {
                values: eig.values[..k].to_vec(),
                vectors: ys.into_iter().take(k).collect(),
                residuals: res_norms[..k].to_vec(),
                restarts: restart,
                matvecs,
            });
        }

        pending = (0..k)
            .filter(|&i| scaled(i) > opts.tol)
            .take(b)
            .map(|i| residuals[i].clone())
            .collect();
        q = ys;
        hq = hys;
    }
    Err(Error::NotConverged {
        iterations: matvecs,
        residual: worst,
    })
}

/// Classical Gram-Schmidt applied twice; `None` when `v` is (numerically)
/// inside the span of `basis`.
fn orthonormalize(basis: &[Vec<f64>], mut v: Vec<f64>) -> Option<Vec<f64>> {
    let original = norm(&v);
    if original == 0.0 || !original.is_finite() {
        return None;
    }
    for _ in 0..2 {
        for qj in basis {
            let c = dot(qj, &v);
            axpy(-c, qj, &mut v);
        }
    }
    let nv = norm(&v);
    if nv <= 1e-10 * original {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Some(v)
}

fn materialized<A: LinearOperator + ?Sized>(op: &A, k: usize) -> Result<LanczosResult> {
    let n = op.dim();
    let mut a = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        op.apply(&e, &mut col);
        for i in 0..n {
            a[i * n + j] = col[i];
        }
    }
    let eig = symmetric_eigen(&a, n, true)?;
    let vectors: Vec<Vec<f64>> = (0..k).map(|j| eig.vector(j).unwrap().to_vec()).collect();
    let mut residuals = Vec::with_capacity(k);
    for (j, v) in vectors.iter().enumerate() {
        op.apply(v, &mut col);
        let r: f64 = col
            .iter()
            .zip(v)
            .map(|(a, b)| (a - eig.values[j] * b).powi(2))
            .sum::<f64>()
            .sqrt();
        residuals.push(r);
    }
    Ok(LanczosResult {
        values: eig.values[..k].to_vec(),
        vectors,
        residuals,
        restarts: 0,
        matvecs: n,
    })
}
