//! Sparse vertex-to-hyperedge feature vectors and their cosine similarity.
//!
//! Both the kNN and the over-clustering similarities can be written as the
//! cosine between per-vertex feature vectors; this is the second of the two
//! equivalent routes (the first is the weighted incidence product).

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::par;

/// A vertex's feature vector over hyperedges, stored as `(hyperedge, value)`
/// pairs sorted by hyperedge index.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub owner: usize,
    pub entries: Vec<(usize, f64)>,
}

impl FeatureVector {
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = 0.0;
        while let (Some(&&(ia, va)), Some(&&(ib, vb))) = (a.peek(), b.peek()) {
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += va * vb;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    /// Expands to a dense vector of length `len`.
    pub fn dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(l, v) in &self.entries {
            out[l] = v;
        }
        out
    }
}

/// `M[i][j] = ⟨x_i, x_j⟩ / (‖x_i‖ ‖x_j‖)`.
pub fn cosine_similarity(vectors: &[FeatureVector]) -> Result<SymmetricMatrix> {
    let norms: Vec<f64> = vectors.iter().map(FeatureVector::norm).collect();
    if let Some(i) = norms.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Invariant(format!("vertex {i} has an all-zero feature vector")));
    }
    SymmetricMatrix::from_upper_fn(vectors.len(), |i, j| {
        vectors[i].dot(&vectors[j]) / (norms[i] * norms[j])
    })
}

/// Groups `(hyperedge, vertex, value)` triples into per-vertex vectors.
pub(crate) fn collect_vectors(n: usize, triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Vec<FeatureVector> {
    let mut per_vertex: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (l, v, x) in triples {
        per_vertex[v].push((l, x));
    }
    par::map_range(n, |owner| {
        let mut entries = per_vertex[owner].clone();
        entries.sort_by_key(|&(l, _)| l);
        FeatureVector { owner, entries }
    })
}
