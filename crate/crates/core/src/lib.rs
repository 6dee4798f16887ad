//! Context-aware hypergraph spectral clustering.
//!
//! Pairwise, kNN and over-clustering hypergraph similarities are fused into
//! one matrix, which is partitioned by a discriminative trace-ratio criterion
//! (or the normalized-cut baseline) and discretized by rotation refinement.

pub mod eigen;
pub mod error;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod harness;
pub mod knn;
pub mod model;
pub mod overcluster;
pub mod pairwise;
pub mod par;
pub mod partition;

pub use error::{Error, ErrorClass, Result};
pub use eval::{accuracy, corrupt, nmi, ContingencyTable, CorruptionKind, CorruptionSpec};
pub use fusion::{ablation_config, fuse, Ablation, FusionWeights};
pub use model::{
    degree_matrix, laplacian, Constraint, Dataset, HyperParams, HypergraphIncidence, Partition,
    PartitionCandidate, SigmaChoice, SymmetricMatrix,
};
pub use partition::{cluster, ClusterOptions, ClusterOutcome, Criterion};
