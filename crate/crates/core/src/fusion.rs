//! Convex combination of the pairwise, kNN and over-clustering similarities.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;

/// Weights `(α, β)` on the pairwise and kNN similarities; the over-clustering
/// similarity receives `1 − α − β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionWeights {
    alpha: f64,
    beta: f64,
}

/// Slack on `α + β ≤ 1` so that decimal inputs like `0.6 + 0.4` pass.
const SUM_SLACK: f64 = 1e-12;

/// The weight grid searched in experiments.
pub const WEIGHT_GRID: [(f64, f64); 9] = [
    (0.2, 0.2),
    (0.2, 0.4),
    (0.2, 0.6),
    (0.4, 0.2),
    (0.4, 0.4),
    (0.6, 0.2),
    (0.6, 0.4),
    (0.2, 0.0),
    (0.0, 0.2),
];

impl FusionWeights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0 && alpha + beta <= 1.0 + SUM_SLACK;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "fusion weights need alpha, beta >= 0 and alpha + beta <= 1, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Weight on the over-clustering similarity.
    pub fn gamma(&self) -> f64 {
        (1.0 - self.alpha - self.beta).max(0.0)
    }
}

impl Default for FusionWeights {
    fn default() -> Self {
        Self { alpha: 0.4, beta: 0.4 }
    }
}

/// `S = α A + β B + (1 − α − β) C`.
pub fn fuse(a: &SymmetricMatrix, b: &SymmetricMatrix, c: &SymmetricMatrix, w: FusionWeights) -> Result<SymmetricMatrix> {
    let n = a.dim();
    if b.dim() != n || c.dim() != n {
        return Err(Error::InvalidInput(format!(
            "similarity dimensions differ: {n}, {}, {}",
            b.dim(),
            c.dim()
        )));
    }
    let (wa, wb, wc) = (w.alpha(), w.beta(), w.gamma());
    let (ma, mb, mc) = (a.as_matrix(), b.as_matrix(), c.as_matrix());
    SymmetricMatrix::from_upper_fn(n, |i, j| wa * ma[(i, j)] + wb * mb[(i, j)] + wc * mc[(i, j)])
}

/// Named hypergraph combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ablation {
    /// Pairwise + kNN + over-clustering.
    Pko,
    /// Pairwise + kNN.
    Pk,
    /// Pairwise + over-clustering.
    Po,
    /// Pairwise only.
    P,
}

impl Ablation {
    pub const ALL: [Ablation; 4] = [Ablation::Pko, Ablation::Pk, Ablation::Po, Ablation::P];

    /// Whether the configuration needs the over-clustering similarity at all.
    pub fn uses_overclustering(self) -> bool {
        matches!(self, Ablation::Pko | Ablation::Po)
    }

    pub fn uses_knn(self) -> bool {
        matches!(self, Ablation::Pko | Ablation::Pk)
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ablation::Pko => "PKO",
            Ablation::Pk => "PK",
            Ablation::Po => "PO",
            Ablation::P => "P",
        })
    }
}

impl FromStr for Ablation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PKO" => Ok(Ablation::Pko),
            "PK" => Ok(Ablation::Pk),
            "PO" => Ok(Ablation::Po),
            "P" => Ok(Ablation::P),
            other => Err(Error::InvalidParameter(format!("unknown ablation '{other}'"))),
        }
    }
}

/// Weights for an ablation, derived from the caller's PKO weights.
///
/// `PK` keeps `α` and moves everything else onto the kNN term, `PO` keeps `α`
/// and drops the kNN term, `P` is the kernel matrix alone.
pub fn ablation_config(name: Ablation, base: FusionWeights) -> FusionWeights {
    let alpha = base.alpha();
    match name {
        Ablation::Pko => base,
        Ablation::Pk => FusionWeights { alpha, beta: 1.0 - alpha },
        Ablation::Po => FusionWeights { alpha, beta: 0.0 },
        Ablation::P => FusionWeights { alpha: 1.0, beta: 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit_diag(n: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>());
        let mut s = (&m + m.transpose()) / 2.0;
        s.fill_diagonal(1.0);
        SymmetricMatrix::new(s).unwrap()
    }

    #[test]
    fn degenerate_weights_select_one_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b, c) = (random_unit_diag(5, &mut rng), random_unit_diag(5, &mut rng), random_unit_diag(5, &mut rng));
        assert_eq!(fuse(&a, &b, &c, FusionWeights::new(1.0, 0.0).unwrap()).unwrap(), a);
        assert_eq!(fuse(&a, &b, &c, FusionWeights::new(0.0, 1.0).unwrap()).unwrap(), b);
        assert_eq!(fuse(&a, &b, &c, FusionWeights::new(0.0, 0.0).unwrap()).unwrap(), c);
    }

    #[test]
    fn matches_direct_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (a, b, c) = (random_unit_diag(6, &mut rng), random_unit_diag(6, &mut rng), random_unit_diag(6, &mut rng));
        let s = fuse(&a, &b, &c, FusionWeights::new(0.4, 0.4).unwrap()).unwrap();
        for i in 0..6 {
            assert!((s.get(i, i) - 1.0).abs() < 1e-12);
            for j in 0..6 {
                let direct = 0.4 * a.get(i, j) + 0.4 * b.get(i, j) + 0.2 * c.get(i, j);
                assert!((s.get(i, j) - direct).abs() < 1e-15);
            }
        }
        assert_eq!(s.max_asymmetry(), 0.0);
        let same = fuse(&a, &a, &a, FusionWeights::new(0.3, 0.5).unwrap()).unwrap();
        assert!((same.as_matrix() - a.as_matrix()).amax() < 1e-15);
    }

    #[test]
    fn weight_validation() {
        assert!(FusionWeights::new(0.6, 0.4).is_ok());
        assert!(FusionWeights::new(0.7, 0.4).is_err());
        assert!(FusionWeights::new(-0.1, 0.4).is_err());
        for (a, b) in WEIGHT_GRID {
            assert!(FusionWeights::new(a, b).is_ok());
        }
    }

    #[test]
    fn ablations() {
        let base = FusionWeights::new(0.4, 0.4).unwrap();
        assert_eq!(ablation_config(Ablation::P, base), FusionWeights::new(1.0, 0.0).unwrap());
        let pk = ablation_config(Ablation::Pk, base);
        assert_eq!((pk.alpha(), pk.beta()), (0.4, 0.6));
        assert_eq!(pk.gamma(), 0.0);
        let po = ablation_config(Ablation::Po, base);
        assert_eq!((po.alpha(), po.beta()), (0.4, 0.0));
        assert!((po.gamma() - 0.6).abs() < 1e-15);
        assert!("XYZ".parse::<Ablation>().is_err());
        assert_eq!("pko".parse::<Ablation>().unwrap(), Ablation::Pko);
    }

    #[test]
    fn dimension_mismatch() {
        let a = SymmetricMatrix::identity(3);
        let b = SymmetricMatrix::identity(4);
        assert!(fuse(&a, &b, &a, FusionWeights::default()).is_err());
    }
}
