//! kNN hypergraph: one hyperedge per vertex holding the vertex and its `k`
//! most similar neighbours, with a soft, self-normalizing incidence.

use crate::error::{Error, Result};
use crate::features::{self, FeatureVector};
use crate::model::{HypergraphIncidence, SymmetricMatrix};
use crate::par;

/// Indices of the `k` most similar vertices to `center` (excluding itself),
/// ordered by descending similarity with ties broken by ascending index.
pub(crate) fn nearest(a: &SymmetricMatrix, center: usize, candidates: impl Iterator<Item = usize>, k: usize) -> Vec<usize> {
    let row = a.row(center);
    let mut c: Vec<usize> = candidates.filter(|&j| j != center).collect();
    let by_similarity = |x: &usize, y: &usize| row[*y].total_cmp(&row[*x]).then(x.cmp(y));
    if k < c.len() {
        c.select_nth_unstable_by(k, by_similarity);
        c.truncate(k);
    }
    c.sort_by(by_similarity);
    c
}

/// Builds the `N` kNN hyperedges `e_l = {v_l} ∪ kNN(v_l)` with weights
/// `δ_l` (mean similarity of the centroid to every member, itself included).
///
/// The returned incidence is the plain membership indicator; see
/// [`knn_incidence`] for the soft assignment.
pub fn knn_hyperedges(a: &SymmetricMatrix, k: usize) -> Result<HypergraphIncidence> {
    let n = a.dim();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("k must be in [1, {n}), got {k}")));
    }
    let edges: Vec<Vec<usize>> = par::map_range(n, |l| {
        let mut members = Vec::with_capacity(k + 1);
        members.push(l);
        members.extend(nearest(a, l, 0..n, k));
        members
    });
    let weights = edges
        .iter()
        .enumerate()
        .map(|(l, members)| members.iter().map(|&j| a.get(l, j)).sum::<f64>() / members.len() as f64)
        .collect();
    let values = edges.iter().map(|m| vec![1.0; m.len()]).collect();
    HypergraphIncidence::new(n, edges, values, weights)
}

/// Per-vertex `Σ_t δ_t 𝕀(v_i, e_t) a_ti²`.
fn knn_denominators(a: &SymmetricMatrix, edges: &HypergraphIncidence) -> Vec<f64> {
    let mut denom = vec![0.0; a.dim()];
    for (l, &delta) in edges.weights().iter().enumerate() {
        for &i in edges.members(l) {
            let ali = a.get(l, i);
            denom[i] += delta * ali * ali;
        }
    }
    denom
}

/// Soft incidence `h(v_i, e_l) = a_li 𝕀(v_i, e_l) / sqrt(Σ_t δ_t 𝕀(v_i, e_t) a_ti²)`.
pub fn knn_incidence(a: &SymmetricMatrix, edges: &HypergraphIncidence) -> Result<HypergraphIncidence> {
    let denom = knn_denominators(a, edges);
    if let Some(i) = denom.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Invariant(format!("kNN normalization for vertex {i} is zero")));
    }
    let n = edges.vertices();
    let mut all_edges = Vec::with_capacity(edges.num_edges());
    let mut values = Vec::with_capacity(edges.num_edges());
    for l in 0..edges.num_edges() {
        let members = edges.members(l).to_vec();
        values.push(members.iter().map(|&i| a.get(l, i) / denom[i].sqrt()).collect());
        all_edges.push(members);
    }
    HypergraphIncidence::new(n, all_edges, values, edges.weights().to_vec())
}

/// Vertex-to-hyperedge vectors `x_m` with entries `a_lm sqrt(𝕀(v_m, e_l) δ_l)`.
pub fn knn_feature_vectors(a: &SymmetricMatrix, edges: &HypergraphIncidence) -> Vec<FeatureVector> {
    let triples = (0..edges.num_edges()).flat_map(|l| {
        let delta = edges.weights()[l];
        edges.members(l).iter().map(move |&m| (l, m, a.get(l, m) * delta.sqrt()))
    });
    features::collect_vectors(a.dim(), triples)
}

/// kNN hypergraph similarity `B = H_n Σ_n H_nᵀ`.
pub fn knn_similarity(a: &SymmetricMatrix, k: usize) -> Result<SymmetricMatrix> {
    let edges = knn_hyperedges(a, k)?;
    knn_incidence(a, &edges)?.weighted_gram()
}

/// The same matrix as [`knn_similarity`], computed as cosines of the
/// vertex-to-hyperedge feature vectors.
pub fn knn_similarity_cosine(a: &SymmetricMatrix, k: usize) -> Result<SymmetricMatrix> {
    let edges = knn_hyperedges(a, k)?;
    features::cosine_similarity(&knn_feature_vectors(a, &edges))
}
