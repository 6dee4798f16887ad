//! Top-`k` symmetric eigensolvers.
//!
//! Two backends share one contract: a dense decomposition (nalgebra's
//! symmetric QR) and a block Lanczos iteration with full reorthogonalization
//! and thick restarts. `Auto` picks the dense path for small matrices and
//! falls back to it whenever the Krylov iteration does not converge.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::par;

/// Matrices up to this order are always decomposed densely.
pub const DENSE_LIMIT: usize = 300;

/// Relative residual target for iterative solves: `‖Mv − λv‖ ≤ tol · ‖M‖_F`.
pub const RESIDUAL_TOL: f64 = 1e-10;

const LANCZOS_SEED: u64 = 0x5eed_1a2c;
const MAX_RESTARTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// Leading eigenpairs, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// `N × k`, orthonormal columns.
    pub vectors: DMatrix<f64>,
}

/// Something that can multiply a block of vectors by a symmetric matrix.
pub(crate) trait SymOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
}

impl SymOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        symmetric_mul(self, x)
    }
}

/// `M x` for symmetric `M`, split into row blocks across the thread pool.
pub(crate) fn symmetric_mul(m: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let chunks = par::threads().min(n / 64).max(1);
    if chunks == 1 {
        return m * x;
    }
    let step = n.div_ceil(chunks);
    // Rows r0..r1 of a symmetric M are the transposed columns r0..r1.
    let parts = par::map_range(chunks, |c| {
        let r0 = c * step;
        let len = step.min(n - r0);
        m.columns(r0, len).tr_mul(x)
    });
    let mut out = DMatrix::zeros(n, x.ncols());
    for (c, part) in parts.into_iter().enumerate() {
        out.rows_mut(c * step, part.nrows()).copy_from(&part);
    }
    out
}

/// Top-`k` eigenpairs of `m` with the default backend selection.
pub fn sym_eig(m: &SymmetricMatrix, k: usize) -> Result<EigenPairs> {
    sym_eig_with(m, k, EigenMethod::Auto)
}

pub fn sym_eig_with(m: &SymmetricMatrix, k: usize, method: EigenMethod) -> Result<EigenPairs> {
    top_eigs(m, k, method, None)
}

/// Top-`k` eigenpairs, optionally warm-starting the Krylov solver from the
/// columns of `start`.
pub(crate) fn top_eigs(
    m: &SymmetricMatrix,
    k: usize,
    method: EigenMethod,
    start: Option<&DMatrix<f64>>,
) -> Result<EigenPairs> {
    let n = m.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    let use_dense = match method {
        EigenMethod::Dense => true,
        EigenMethod::Lanczos => false,
        EigenMethod::Auto => n <= DENSE_LIMIT || 4 * k > n,
    };
    if use_dense {
        return Ok(dense_top(m.as_matrix(), k));
    }
    let tol = RESIDUAL_TOL * m.frobenius_norm().max(f64::MIN_POSITIVE);
    match block_lanczos(m.as_matrix(), k, tol, start, LANCZOS_SEED)? {
        Some(pairs) => Ok(pairs),
        None if method == EigenMethod::Auto => Ok(dense_top(m.as_matrix(), k)),
        None => Err(Error::Eigen(format!("Lanczos did not converge for {k} eigenpairs"))),
    }
}

/// Full dense decomposition, truncated to the leading `k` pairs.
pub(crate) fn dense_top(m: &DMatrix<f64>, k: usize) -> EigenPairs {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(m.nrows(), k);
    for (c, &i) in order[..k].iter().enumerate() {
        vectors.set_column(c, &eig.eigenvectors.column(i));
    }
    fix_signs(&mut vectors);
    EigenPairs { values, vectors }
}

/// Flips each column so its largest-magnitude entry is positive.
pub(crate) fn fix_signs(v: &mut DMatrix<f64>) {
    for mut col in v.column_iter_mut() {
        let mut best = 0usize;
        for i in 0..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Orthonormalizes the columns of `block` against the first `m` columns of
/// `basis` and each other (two Gram-Schmidt passes). Columns that collapse
/// are dropped.
fn orthonormalize_into(basis: &DMatrix<f64>, m: usize, block: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let mut accepted: Vec<DVector<f64>> = Vec::new();
    let v = basis.columns(0, m);
    for col in block.column_iter() {
        let mut x: DVector<f64> = col.into_owned();
        let start = x.norm();
        if start == 0.0 {
            continue;
        }
        for _ in 0..2 {
            if m > 0 {
                let coeffs = v.tr_mul(&x);
                x -= v * coeffs;
            }
            for a in &accepted {
                let c = a.dot(&x);
                x.axpy(-c, a, 1.0);
            }
        }
        let norm = x.norm();
        if norm > 1e-10 * start {
            accepted.push(x / norm);
        }
    }
    accepted
}

fn random_block(n: usize, b: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, b, |_, _| StandardNormal.sample(rng))
}

/// Block Lanczos with full reorthogonalization and thick restarts for the
/// algebraically largest `k` eigenpairs of `op`.
///
/// The basis is extended with the Ritz residuals of the leading pairs, which
/// spans the same block Krylov space as the three-term recurrence but keeps
/// the bookkeeping explicit. Returns `Ok(None)` if the residual target is not
/// reached within the restart budget.
pub(crate) fn block_lanczos(
    op: &dyn SymOperator,
    k: usize,
    tol: f64,
    start: Option<&DMatrix<f64>>,
    seed: u64,
) -> Result<Option<EigenPairs>> {
    let n = op.dim();
    let b = (k + 3).min(n);
    let max_basis = (10 * k).max(80).min(n);
    let keep = (k + b).min(max_basis.saturating_sub(b)).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut v = DMatrix::<f64>::zeros(n, max_basis);
    let mut w = DMatrix::<f64>::zeros(n, max_basis);
    let mut t = DMatrix::<f64>::zeros(max_basis, max_basis);
    let mut m = 0usize;

    let mut init = random_block(n, b, &mut rng);
    if let Some(s) = start {
        for c in 0..s.ncols().min(b) {
            init.set_column(c, &s.column(c));
        }
    }
    let mut pending = init;

    for _ in 0..MAX_RESTARTS {
        // Extend the basis.
        let mut fresh = orthonormalize_into(&v, m, &pending);
        if fresh.is_empty() && m < n {
            fresh = orthonormalize_into(&v, m, &random_block(n, b, &mut rng));
        }
        fresh.truncate(max_basis - m);
        if !fresh.is_empty() {
            let r = fresh.len();
            let block = DMatrix::from_columns(&fresh);
            let wb = op.apply(&block);
            v.columns_mut(m, r).copy_from(&block);
            w.columns_mut(m, r).copy_from(&wb);
            let cross = v.columns(0, m + r).tr_mul(&wb);
            for j in 0..r {
                for i in 0..m + r {
                    t[(i, m + j)] = cross[(i, j)];
                    t[(m + j, i)] = cross[(i, j)];
                }
            }
            for j in 0..r {
                for i in 0..j {
                    let avg = 0.5 * (t[(m + i, m + j)] + t[(m + j, m + i)]);
                    t[(m + i, m + j)] = avg;
                    t[(m + j, m + i)] = avg;
                }
            }
            m += r;
        }
        if m < k {
            pending = random_block(n, b, &mut rng);
            continue;
        }

        // Rayleigh-Ritz on the current basis.
        let proj = SymmetricEigen::new(t.view((0, 0), (m, m)).into_owned());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &c| proj.eigenvalues[c].total_cmp(&proj.eigenvalues[a]));
        let p = b.min(m);
        let mut y = DMatrix::zeros(m, p);
        for (c, &i) in order[..p].iter().enumerate() {
            y.set_column(c, &proj.eigenvectors.column(i));
        }
        let theta: Vec<f64> = order[..p].iter().map(|&i| proj.eigenvalues[i]).collect();
        let x = v.columns(0, m) * &y;
        let mut resid = w.columns(0, m) * &y;
        for (c, &th) in theta.iter().enumerate() {
            let xc = x.column(c).into_owned();
            resid.column_mut(c).axpy(-th, &xc, 1.0);
        }
        let converged = (0..k).all(|c| resid.column(c).norm() <= tol);
        if converged || m == n {
            let mut vectors = x.columns(0, k).into_owned();
            fix_signs(&mut vectors);
            return Ok(Some(EigenPairs { values: theta[..k].to_vec(), vectors }));
        }

        if m + b > max_basis {
            // Thick restart: keep the leading Ritz vectors.
            let q = keep.min(m);
            let mut yk = DMatrix::zeros(m, q);
            for (c, &i) in order[..q].iter().enumerate() {
                yk.set_column(c, &proj.eigenvectors.column(i));
            }
            let nv = v.columns(0, m) * &yk;
            let nw = w.columns(0, m) * &yk;
            let nt = yk.transpose() * t.view((0, 0), (m, m)) * &yk;
            v.columns_mut(0, q).copy_from(&nv);
            w.columns_mut(0, q).copy_from(&nw);
            t.fill(0.0);
            for j in 0..q {
                for i in 0..q {
                    t[(i, j)] = 0.5 * (nt[(i, j)] + nt[(j, i)]);
                }
            }
            m = q;
        }
        pending = resid;
    }
    Ok(None)
}
