use crate::error::{Error, Result};
use crate::model::{Partition, SymmetricMatrix};

/// Value of the discriminative partitioning criterion
/// `g(X) = (1/K) Σ_n XₙᵀSXₙ / XₙᵀQXₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DhpcValue {
    /// Mean of the per-cluster ratios; `+∞` when some cluster has no cut.
    pub value: f64,
    /// Per-cluster `(XₙᵀSXₙ, XₙᵀQXₙ)`.
    pub terms: Vec<(f64, f64)>,
    /// Some cluster has zero cut mass.
    pub disconnected: bool,
}

pub fn dhpc_objective(x: &Partition, s: &SymmetricMatrix, q: &SymmetricMatrix) -> Result<DhpcValue> {
    let n = s.dim();
    if x.len() != n || q.dim() != n {
        return Err(Error::InvalidInput("partition and matrices disagree on size".into()));
    }
    let clusters = x.clusters();
    if let Some(c) = clusters.iter().position(Vec::is_empty) {
        return Err(Error::InvalidInput(format!("cluster {c} is empty")));
    }
    let terms: Vec<(f64, f64)> = clusters
        .iter()
        .map(|members| {
            let mut intra = 0.0;
            let mut cut = 0.0;
            for &i in members {
                for &j in members {
                    intra += s.get(i, j);
                    cut += q.get(i, j);
                }
            }
            (intra, cut)
        })
        .collect();
    let disconnected = terms.iter().any(|&(_, cut)| cut <= 0.0);
    let value = if disconnected {
        f64::INFINITY
    } else {
        terms.iter().map(|&(intra, cut)| intra / cut).sum::<f64>() / terms.len() as f64
    };
    Ok(DhpcValue { value, terms, disconnected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::laplacian;
    use nalgebra::DMatrix;

    #[test]
    fn all_ones_balanced_split() {
        let s = SymmetricMatrix::new(DMatrix::from_element(6, 6, 1.0)).unwrap();
        let q = laplacian(&s).unwrap();
        let x = Partition::from_labels(vec![0, 1, 0, 1, 1, 0], 2).unwrap();
        let g = dhpc_objective(&x, &s, &q).unwrap();
        assert_eq!(g.value, 1.0);
        assert!(!g.disconnected);
    }

    #[test]
    fn disconnected_blocks_are_flagged() {
        let s = DMatrix::from_fn(4, 4, |i, j| if (i < 2) == (j < 2) { 1.0 } else { 0.0 });
        let s = SymmetricMatrix::new(s).unwrap();
        let q = laplacian(&s).unwrap();
        let x = Partition::from_labels(vec![0, 0, 1, 1], 2).unwrap();
        let g = dhpc_objective(&x, &s, &q).unwrap();
        assert!(g.disconnected);
        assert!(g.value.is_infinite());
    }

    #[test]
    fn empty_cluster_rejected() {
        let s = SymmetricMatrix::identity(3);
        let x = Partition::from_labels(vec![0, 0, 0], 2).unwrap();
        assert!(dhpc_objective(&x, &s, &s).is_err());
    }
}
