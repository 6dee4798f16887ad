use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fusion::{ablation_config, fuse, Ablation};
use crate::knn::knn_similarity;
use crate::model::{Dataset, HyperParams, Partition, SymmetricMatrix};
use crate::overcluster::{build_communities, classic_spectral, overclustering_similarity, DEFAULT_METHODS};
use crate::pairwise::{pairwise_similarity, resolve_sigma, KernelSpec};
use crate::partition::{cluster, ClusterOptions, Criterion};

/// A clustering method as run by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Fused hypergraph similarity, partitioned by the configured criterion.
    Hypergraph(Ablation),
    /// Classic spectral clustering on the kernel matrix.
    Csc,
}

impl Default for Method {
    fn default() -> Self {
        Method::Hypergraph(Ablation::Pko)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Hypergraph(a) => a.fmt(f),
            Method::Csc => f.write_str("CSC"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("csc") {
            Ok(Method::Csc)
        } else {
            s.parse().map(Method::Hypergraph)
        }
    }
}

/// The fused similarity together with the kernel scale used for it.
#[derive(Debug, Clone)]
pub struct Similarity {
    pub sigma: f64,
    pub a: SymmetricMatrix,
    pub s: SymmetricMatrix,
}

/// Builds `A` and the fused `S` for an ablation. Terms with zero weight are
/// skipped, so `P` returns `S = A` exactly.
pub fn fused_similarity(ds: &Dataset, params: &HyperParams, ablation: Ablation) -> Result<Similarity> {
    params.validate(ds.len())?;
    let sigma = resolve_sigma(ds, params.sigma)?;
    let a = pairwise_similarity(ds, &KernelSpec::gaussian(sigma)?)?;
    let w = ablation_config(ablation, params.weights);
    if w.beta() == 0.0 && w.gamma() == 0.0 {
        let s = a.scaled(w.alpha())?;
        return Ok(Similarity { sigma, a, s });
    }
    let b = if w.beta() > 0.0 { knn_similarity(&a, params.k)? } else { a.clone() };
    let c = if w.gamma() > 0.0 {
        let comms = build_communities(&a, params.communities(), &DEFAULT_METHODS, params.seed)?;
        overclustering_similarity(&a, &comms, params.neighbor_set_size)?
    } else {
        a.clone()
    };
    let s = fuse(&a, &b, &c, w)?;
    Ok(Similarity { sigma, a, s })
}

/// Result of one end-to-end run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub partition: Partition,
    pub sigma: f64,
    /// Relaxed objective; `None` for methods without one.
    pub objective: Option<f64>,
    pub solver_iterations: usize,
    pub refine_iterations: usize,
    pub converged: bool,
}

/// Similarity construction, partitioning and discretization for one dataset.
pub fn run_once(ds: &Dataset, params: &HyperParams, method: Method, criterion: Criterion) -> Result<RunOutput> {
    match method {
        Method::Csc => {
            let sigma = resolve_sigma(ds, params.sigma)?;
            let a = pairwise_similarity(ds, &KernelSpec::gaussian(sigma)?)?;
            let partition = classic_spectral(&a, params.kappa, params.seed)?;
            Ok(RunOutput { partition, sigma, objective: None, solver_iterations: 0, refine_iterations: 0, converged: true })
        }
        Method::Hypergraph(ablation) => {
            let sim = fused_similarity(ds, params, ablation)?;
            let out = cluster(&sim.s, params.kappa, &ClusterOptions::new(params.epsilon, params.seed), criterion)?;
            Ok(RunOutput {
                partition: out.partition,
                sigma: sim.sigma,
                objective: Some(out.objective),
                solver_iterations: out.solver_iterations,
                refine_iterations: out.refine_iterations,
                converged: out.converged,
            })
        }
    }
}
