//! Spectral partitioning of a similarity matrix.
//!
//! The discriminative criterion (DHPC) relaxes to a trace ratio solved by
//! Newton-Lanczos; the normalized-cut baseline relaxes to a generalized
//! eigenproblem. Both are discretized by the same rotation refinement.

mod discretize;
mod objective;
mod trace_ratio;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

pub use self::discretize::{candidate_from_p, discrete_refine, normalize_rows, RefineOptions, Refinement};
pub use self::objective::{dhpc_objective, DhpcValue};
pub use self::trace_ratio::{
    initial_subspace, newton_lanczos, relaxed_objective, stationarity_residual, trace_ratio, NewtonOptions,
    TraceRatioState,
};
pub use crate::eigen::{sym_eig, sym_eig_with, EigenMethod, EigenPairs};

use crate::eigen;
use crate::error::{Error, Result};
use crate::model::{degrees, laplacian, Constraint, Partition, PartitionCandidate, SymmetricMatrix};

/// Solves `max tr(ZᵀSZ)` subject to `ZᵀDZ = I` for diagonal `D`:
/// `Z = D^{-1/2} U` with `U` the leading eigenvectors of `D^{-1/2} S D^{-1/2}`.
///
/// The returned `rho` is `h(Z) = tr(ZᵀSZ) / K`.
pub fn generalized_eig(s: &SymmetricMatrix, d: &SymmetricMatrix, k: usize) -> Result<PartitionCandidate> {
    let n = s.dim();
    if d.dim() != n {
        return Err(Error::InvalidInput("S and D differ in size".into()));
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && d.get(i, j) != 0.0 {
                return Err(Error::InvalidInput("D must be diagonal".into()));
            }
        }
    }
    generalized_eig_diag(s, &d.diagonal(), k, EigenMethod::Auto)
}

fn generalized_eig_diag(s: &SymmetricMatrix, d: &[f64], k: usize, method: EigenMethod) -> Result<PartitionCandidate> {
    if let Some(vertex) = d.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateGraph { vertex });
    }
    let inv_sqrt: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let m = s.as_matrix();
    let normalized = SymmetricMatrix::from_upper_fn(s.dim(), |i, j| inv_sqrt[i] * m[(i, j)] * inv_sqrt[j])?;
    let pairs = eigen::top_eigs(&normalized, k, method, None)?;
    let mut z = pairs.vectors;
    for (i, mut row) in z.row_iter_mut().enumerate() {
        row *= inv_sqrt[i];
    }
    let rho = pairs.values.iter().sum::<f64>() / k as f64;
    Ok(PartitionCandidate { p: z, rho, iterations: 1, constraint: Constraint::DegreeOrthonormal })
}

/// Partitioning criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Criterion {
    /// Discriminative trace-ratio criterion.
    #[default]
    Dhpc,
    /// Multi-class normalized cut.
    Nc,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Dhpc => "dhpc",
            Criterion::Nc => "nc",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dhpc" => Ok(Criterion::Dhpc),
            "nc" => Ok(Criterion::Nc),
            other => Err(Error::InvalidParameter(format!("unknown criterion '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterOptions {
    pub newton: NewtonOptions,
    pub refine: RefineOptions,
}

impl ClusterOptions {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            newton: NewtonOptions { epsilon, ..NewtonOptions::default() },
            refine: RefineOptions { seed, ..RefineOptions::default() },
        }
    }
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self::new(1e-6, 0)
    }
}

/// A partition plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutcome {
    pub partition: Partition,
    /// Trace ratio `ρ` (DHPC) or `h(Z)` (NC).
    pub objective: f64,
    pub solver_iterations: usize,
    pub refine_iterations: usize,
    /// False if either the solver or the refinement hit its iteration cap.
    pub converged: bool,
    pub embedding: DMatrix<f64>,
}

/// Partitions `s` into `kappa` clusters under the chosen criterion.
pub fn cluster(s: &SymmetricMatrix, kappa: usize, opts: &ClusterOptions, criterion: Criterion) -> Result<ClusterOutcome> {
    let n = s.dim();
    if kappa < 1 || kappa > n {
        return Err(Error::InvalidParameter(format!("kappa must be in [1, {n}], got {kappa}")));
    }
    let (candidate, solver_converged) = match criterion {
        Criterion::Dhpc => {
            let q = laplacian(s)?;
            let state = newton_lanczos(s, &q, kappa, &opts.newton)?;
            (state.candidate, state.converged)
        }
        Criterion::Nc => (generalized_eig_diag(s, &degrees(s)?, kappa, opts.newton.method)?, true),
    };
    let xt = candidate_from_p(&candidate)?;
    let refined = discrete_refine(&xt, &opts.refine)?;
    Ok(ClusterOutcome {
        partition: refined.partition,
        objective: candidate.rho,
        solver_iterations: candidate.iterations,
        refine_iterations: refined.iterations,
        converged: solver_converged && refined.converged,
        embedding: xt,
    })
}
