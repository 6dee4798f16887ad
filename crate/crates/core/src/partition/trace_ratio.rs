//! Trace-ratio maximization `max tr(PᵀSP) / tr(PᵀQP)` over orthonormal `P`
//! by the Newton-Lanczos iteration.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::eigen::{self, EigenMethod, EigenPairs, SymOperator, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::model::{Constraint, PartitionCandidate, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Regularizer for a singular `Q`, and for a vanishing `tr(PᵀQP)`.
    pub epsilon: f64,
    /// Relative stopping tolerance on successive ratios.
    pub tol: f64,
    pub max_iter: usize,
    pub method: EigenMethod,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { epsilon: 1e-6, tol: 1e-8, max_iter: 100, method: EigenMethod::Auto }
    }
}

/// Result of a Newton-Lanczos run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRatioState {
    pub rho: f64,
    pub candidate: PartitionCandidate,
    /// `ρ` after initialization and after every accepted step; non-decreasing.
    pub history: Vec<f64>,
    /// False when `max_iter` was hit; `candidate` is then the best state seen.
    pub converged: bool,
}

/// `tr(PᵀMP)`.
pub(crate) fn trace_form(m: &SymmetricMatrix, p: &DMatrix<f64>) -> f64 {
    let mp = eigen::symmetric_mul(m.as_matrix(), p);
    mp.dot(p)
}

/// `tr(PᵀSP) / tr(PᵀQP)`, with the denominator replaced by
/// `tr(Pᵀ(Q + εI)P)` when it falls below `ε`.
pub fn trace_ratio(s: &SymmetricMatrix, q: &SymmetricMatrix, p: &DMatrix<f64>, epsilon: f64) -> f64 {
    let num = trace_form(s, p);
    let mut den = trace_form(q, p);
    if den < epsilon {
        den += epsilon * p.ncols() as f64;
    }
    num / den
}

/// `(1/K) tr(PᵀSP) / tr(PᵀQP)`, the relaxed objective the iteration maximizes.
pub fn relaxed_objective(s: &SymmetricMatrix, q: &SymmetricMatrix, p: &DMatrix<f64>, epsilon: f64) -> f64 {
    trace_ratio(s, q, p, epsilon) / p.ncols() as f64
}

/// `L⁻¹ S L⁻ᵀ` applied blockwise, where `L Lᵀ` factors the (regularized) `Q`.
struct WhitenedOperator<'a> {
    s: &'a SymmetricMatrix,
    chol: &'a Cholesky<f64, Dyn>,
}

impl SymOperator for WhitenedOperator<'_> {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let l = self.chol.l_dirty();
        let y = l.tr_solve_lower_triangular(x).expect("Cholesky factor has a positive diagonal");
        let sy = eigen::symmetric_mul(self.s.as_matrix(), &y);
        l.solve_lower_triangular(&sy).expect("Cholesky factor has a positive diagonal")
    }
}

/// Factors `Q`, or `Q + εI` when `Q` is singular to within `ε`.
fn factor_q(q: &SymmetricMatrix, epsilon: f64) -> Result<Cholesky<f64, Dyn>> {
    if let Some(chol) = Cholesky::new(q.as_matrix().clone()) {
        let l = chol.l_dirty();
        let min_pivot = (0..l.nrows()).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
        if min_pivot > epsilon {
            return Ok(chol);
        }
    }
    let n = q.dim();
    let shifted = q.as_matrix() + DMatrix::identity(n, n) * epsilon;
    Cholesky::new(shifted).ok_or_else(|| Error::InvalidInput("Q + εI is not positive definite".into()))
}

/// Orthonormal basis for the `K` principal eigenvectors of `Q⁻¹S`
/// (or `(Q + εI)⁻¹S`).
pub fn initial_subspace(s: &SymmetricMatrix, q: &SymmetricMatrix, k: usize, epsilon: f64) -> Result<DMatrix<f64>> {
    let n = s.dim();
    let chol = factor_q(q, epsilon)?;
    let op = WhitenedOperator { s, chol: &chol };
    let pairs: EigenPairs = if n <= DENSE_LIMIT {
        let ident = DMatrix::identity(n, n);
        let mut m = op.apply(&ident);
        m = (&m + m.transpose()) * 0.5;
        eigen::dense_top(&m, k)
    } else {
        let scale = s.frobenius_norm() / epsilon.min(1.0);
        match eigen::block_lanczos(&op, k, 1e-10 * scale, None, 0x1a1f)? {
            Some(p) => p,
            None => return Err(Error::Eigen("initial subspace did not converge".into())),
        }
    };
    // Generalized eigenvectors v = L⁻ᵀ w, then orthonormalized.
    let v = chol
        .l_dirty()
        .tr_solve_lower_triangular(&pairs.vectors)
        .ok_or_else(|| Error::Invariant("singular Cholesky factor".into()))?;
    let mut p = v.qr().q();
    eigen::fix_signs(&mut p);
    Ok(p)
}

/// Maximizes the trace ratio over `N × K` orthonormal matrices.
pub fn newton_lanczos(
    s: &SymmetricMatrix,
    q: &SymmetricMatrix,
    kappa: usize,
    opts: &NewtonOptions,
) -> Result<TraceRatioState> {
    let n = s.dim();
    if q.dim() != n {
        return Err(Error::InvalidInput(format!("S is {n}x{n} but Q is {}x{}", q.dim(), q.dim())));
    }
    if kappa == 0 || kappa > n {
        return Err(Error::InvalidParameter(format!("kappa must be in [1, {n}], got {kappa}")));
    }
    let eps = opts.epsilon;
    let mut p = initial_subspace(s, q, kappa, eps)?;
    let mut rho = trace_ratio(s, q, &p, eps);
    let mut history = vec![rho];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let shifted = s.add_scaled(q, -rho)?;
        let pairs = eigen::top_eigs(&shifted, kappa, opts.method, Some(&p))?;
        let next = pairs.vectors;
        let next_rho = trace_ratio(s, q, &next, eps);
        if next_rho < rho {
            // No ascent left beyond solver noise: keep the better iterate.
            converged = true;
            break;
        }
        let step = next_rho - rho;
        p = next;
        rho = next_rho;
        history.push(rho);
        if step <= opts.tol * history[history.len() - 2].abs().max(1.0) {
            converged = true;
            break;
        }
    }

    Ok(TraceRatioState {
        rho,
        candidate: PartitionCandidate { p, rho, iterations, constraint: Constraint::Orthonormal },
        history,
        converged,
    })
}

/// `tr(Pᵀ(S − ρQ)P)` for the returned state; zero at a fixed point.
pub fn stationarity_residual(s: &SymmetricMatrix, q: &SymmetricMatrix, state: &TraceRatioState) -> f64 {
    let p = &state.candidate.p;
    trace_form(s, p) - state.rho * trace_form(q, p)
}
