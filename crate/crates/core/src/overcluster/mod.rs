//! Over-clustering hypergraph: base clusterers split the vertices into more
//! communities than the target cluster count, and every community becomes a
//! weighted hyperedge.

mod kmeans;

use std::fmt;

use nalgebra::DMatrix;

pub use self::kmeans::{kmeans, kmeans_restarts, KMeansResult, MAX_LLOYD_ITERATIONS};

use crate::eigen;
use crate::error::{Error, Result};
use crate::features::{self, FeatureVector};
use crate::knn::nearest;
use crate::model::{degrees, HypergraphIncidence, Partition, SymmetricMatrix};
use crate::par;
use crate::partition::{cluster, ClusterOptions, Criterion};

/// k-means restarts inside the spectral base clusterers.
pub const SPECTRAL_KMEANS_RESTARTS: usize = 10;

/// Classic (Ng-Jordan-Weiss) spectral clustering: leading eigenvectors of
/// `D^{-1/2} S D^{-1/2}`, rows scaled to unit length, then k-means.
pub fn classic_spectral(s: &SymmetricMatrix, kappa: usize, seed: u64) -> Result<Partition> {
    let n = s.dim();
    if kappa == 0 || kappa > n {
        return Err(Error::InvalidParameter(format!("kappa must be in [1, {n}], got {kappa}")));
    }
    let d = degrees(s)?;
    if let Some(vertex) = d.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateGraph { vertex });
    }
    let inv_sqrt: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let m = s.as_matrix();
    let normalized = SymmetricMatrix::from_upper_fn(n, |i, j| inv_sqrt[i] * m[(i, j)] * inv_sqrt[j])?;
    let mut u = eigen::sym_eig(&normalized, kappa)?.vectors;
    for mut row in u.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let km = kmeans_restarts(&u, kappa, SPECTRAL_KMEANS_RESTARTS, seed)?;
    Ok(km.partition.canonicalized())
}

/// Multi-class spectral clustering: the normalized-cut relaxation solved as a
/// generalized eigenproblem, discretized by rotation refinement.
pub fn multiclass_spectral(s: &SymmetricMatrix, kappa: usize, seed: u64) -> Result<Partition> {
    Ok(cluster(s, kappa, &ClusterOptions::new(1e-6, seed), Criterion::Nc)?.partition)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommunityMethod {
    Classic,
    Multiclass,
}

impl fmt::Display for CommunityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommunityMethod::Classic => "classic",
            CommunityMethod::Multiclass => "multiclass",
        })
    }
}

/// Vertex communities from one or more base clusterers. Communities from the
/// same method are disjoint and cover every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunitySet {
    vertices: usize,
    communities: Vec<Vec<usize>>,
    methods: Vec<CommunityMethod>,
}

impl CommunitySet {
    pub fn new(vertices: usize, communities: Vec<Vec<usize>>, methods: Vec<CommunityMethod>) -> Result<Self> {
        if communities.len() != methods.len() {
            return Err(Error::InvalidInput("one method tag per community required".into()));
        }
        if communities.iter().any(Vec::is_empty) {
            return Err(Error::InvalidInput("communities must be non-empty".into()));
        }
        if communities.iter().flatten().any(|&v| v >= vertices) {
            return Err(Error::InvalidInput("community references a missing vertex".into()));
        }
        Ok(Self { vertices, communities, methods })
    }

    /// Adds every non-empty cluster of `partition` as a community.
    pub fn push_partition(&mut self, partition: &Partition, method: CommunityMethod) {
        for members in partition.clusters().into_iter().filter(|c| !c.is_empty()) {
            self.communities.push(members);
            self.methods.push(method);
        }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn methods(&self) -> &[CommunityMethod] {
        &self.methods
    }
}

pub const DEFAULT_METHODS: [CommunityMethod; 2] = [CommunityMethod::Classic, CommunityMethod::Multiclass];

/// Over-clusters `a` with each method into `per_method` communities. Method
/// `m` (in order) is seeded with `seed + m`.
pub fn build_communities(
    a: &SymmetricMatrix,
    per_method: usize,
    methods: &[CommunityMethod],
    seed: u64,
) -> Result<CommunitySet> {
    let partitions = par::map_slice(&methods.iter().copied().enumerate().collect::<Vec<_>>(), |&(m, method)| {
        let s = seed.wrapping_add(m as u64);
        match method {
            CommunityMethod::Classic => classic_spectral(a, per_method, s),
            CommunityMethod::Multiclass => multiclass_spectral(a, per_method, s),
        }
    });
    let mut set = CommunitySet::new(a.dim(), Vec::new(), Vec::new())?;
    for (p, &method) in partitions.into_iter().zip(methods) {
        set.push_partition(&p?, method);
    }
    Ok(set)
}

/// Per-community neighbour averages and weight.
struct CommunityStats {
    /// `1 + mean_{m ∈ 𝔑_i} a_mi` for each member `i`, aligned with members.
    affinity: Vec<f64>,
    /// `μ_l`.
    weight: f64,
}

fn community_stats(a: &SymmetricMatrix, members: &[usize], neighbor_set_size: usize) -> CommunityStats {
    let take = neighbor_set_size.min(members.len() - 1);
    let averages: Vec<f64> = members
        .iter()
        .map(|&i| {
            if take == 0 {
                return 0.0;
            }
            let nb = nearest(a, i, members.iter().copied(), take);
            nb.iter().map(|&m| a.get(m, i)).sum::<f64>() / nb.len() as f64
        })
        .collect();
    let weight = 0.5 * (1.0 + averages.iter().sum::<f64>() / members.len() as f64);
    CommunityStats { affinity: averages.into_iter().map(|x| 1.0 + x).collect(), weight }
}

fn all_stats(a: &SymmetricMatrix, comms: &CommunitySet, neighbor_set_size: usize) -> Result<Vec<CommunityStats>> {
    if comms.vertices() != a.dim() {
        return Err(Error::InvalidInput("community set and similarity matrix differ in size".into()));
    }
    if neighbor_set_size == 0 {
        return Err(Error::InvalidParameter("neighbor set size must be at least 1".into()));
    }
    Ok(par::map_slice(comms.communities(), |members| community_stats(a, members, neighbor_set_size)))
}

/// Incidence `h_o(v_i, e_l) = sqrt(1 + ā_il) / sqrt(Σ_t μ_t 𝕀(v_i, e_t)(1 + ā_it))`
/// with weights `μ_l`, where `ā_il` averages `a` over the nearest members of
/// `e_l` to `v_i`.
pub fn overclustering_incidence(
    a: &SymmetricMatrix,
    comms: &CommunitySet,
    neighbor_set_size: usize,
) -> Result<HypergraphIncidence> {
    let stats = all_stats(a, comms, neighbor_set_size)?;
    let mut denom = vec![0.0; a.dim()];
    for (members, st) in comms.communities().iter().zip(&stats) {
        for (&i, &aff) in members.iter().zip(&st.affinity) {
            denom[i] += st.weight * aff;
        }
    }
    let values = comms
        .communities()
        .iter()
        .zip(&stats)
        .map(|(members, st)| members.iter().zip(&st.affinity).map(|(&i, &aff)| (aff / denom[i]).sqrt()).collect())
        .collect();
    let weights = stats.iter().map(|s| s.weight).collect();
    HypergraphIncidence::new(a.dim(), comms.communities().to_vec(), values, weights)
}

/// Vertex-to-community vectors `y_q` with entries `sqrt(μ_l 𝕀(v_q, e_l)(1 + ā_ql))`.
pub fn overclustering_feature_vectors(
    a: &SymmetricMatrix,
    comms: &CommunitySet,
    neighbor_set_size: usize,
) -> Result<Vec<FeatureVector>> {
    let stats = all_stats(a, comms, neighbor_set_size)?;
    let triples = comms.communities().iter().zip(&stats).enumerate().flat_map(|(l, (members, st))| {
        members.iter().zip(&st.affinity).map(move |(&q, &aff)| (l, q, (st.weight * aff).sqrt()))
    });
    Ok(features::collect_vectors(a.dim(), triples))
}

/// Over-clustering similarity `C = H_o Σ_o H_oᵀ`.
pub fn overclustering_similarity(
    a: &SymmetricMatrix,
    comms: &CommunitySet,
    neighbor_set_size: usize,
) -> Result<SymmetricMatrix> {
    overclustering_incidence(a, comms, neighbor_set_size)?.weighted_gram()
}

/// The same matrix as [`overclustering_similarity`], computed as cosines of
/// the vertex-to-community vectors.
pub fn overclustering_similarity_cosine(
    a: &SymmetricMatrix,
    comms: &CommunitySet,
    neighbor_set_size: usize,
) -> Result<SymmetricMatrix> {
    features::cosine_similarity(&overclustering_feature_vectors(a, comms, neighbor_set_size)?)
}

/// Row-stacked matrix view used by tests and benches.
pub fn embedding_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
