//! Gaussian-kernel pairwise similarity and the data-driven kernel-scale grid.

use crate::error::{Error, Result};
use crate::model::{Dataset, HypergraphIncidence, SigmaChoice, SymmetricMatrix};
use crate::par;

/// Number of candidate scales in the default grid.
pub const GRID_STEPS: usize = 15;

/// Grid index used when no scale is given: the narrowest kernel on the grid.
pub const DEFAULT_GRID_INDEX: usize = 1;

/// Kernel values below this are flushed to zero.
const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    kind: KernelKind,
    sigma: f64,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("kernel scale must be positive, got {sigma}")));
        }
        Ok(Self { kind: KernelKind::Gaussian, sigma })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn eval_unchecked(&self, zi: &[f64], zj: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Gaussian => gaussian_from_sq_dist(sq_dist(zi, zj), self.sigma),
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn gaussian_from_sq_dist(d2: f64, sigma: f64) -> f64 {
    let v = (-d2 / (2.0 * sigma * sigma)).exp();
    if v < UNDERFLOW {
        0.0
    } else {
        v
    }
}

/// `exp(-‖zi - zj‖² / 2σ²)`.
pub fn gaussian_kernel(zi: &[f64], zj: &[f64], sigma: f64) -> Result<f64> {
    if zi.len() != zj.len() {
        return Err(Error::InvalidInput(format!(
            "vector lengths differ: {} vs {}",
            zi.len(),
            zj.len()
        )));
    }
    let spec = KernelSpec::gaussian(sigma)?;
    Ok(spec.eval_unchecked(zi, zj))
}

/// Mean over samples of the mean Euclidean distance to every other sample.
pub fn mean_distance(dataset: &Dataset) -> f64 {
    let n = dataset.len();
    let per_sample = par::map_range(n, |i| {
        let zi = dataset.row(i);
        let total: f64 = (0..n).filter(|&j| j != i).map(|j| sq_dist(zi, dataset.row(j)).sqrt()).sum();
        total / (n - 1) as f64
    });
    per_sample.iter().sum::<f64>() / n as f64
}

/// Candidate kernel scales `{λ · 0.2 · ρ̄ : λ = 1..=steps}`.
pub fn sigma_grid(dataset: &Dataset, steps: usize) -> Result<Vec<f64>> {
    let rho = mean_distance(dataset);
    if rho <= 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok((1..=steps).map(|lambda| lambda as f64 * 0.2 * rho).collect())
}

/// Resolves a [`SigmaChoice`] against a dataset.
pub fn resolve_sigma(dataset: &Dataset, choice: SigmaChoice) -> Result<f64> {
    match choice {
        SigmaChoice::Fixed(s) => KernelSpec::gaussian(s).map(|k| k.sigma()),
        SigmaChoice::GridIndex(lambda) => {
            if lambda == 0 {
                return Err(Error::InvalidParameter("sigma grid index is 1-based".into()));
            }
            let rho = mean_distance(dataset);
            if rho <= 0.0 {
                return Err(Error::DegenerateScale);
            }
            Ok(lambda as f64 * 0.2 * rho)
        }
    }
}

/// Kernel matrix `A` with `a_ij = G(z_i, z_j)` and unit diagonal.
///
/// This is also the pairwise hypergraph similarity `U = H_p Σ_p H_pᵀ`.
pub fn pairwise_similarity(dataset: &Dataset, kernel: &KernelSpec) -> Result<SymmetricMatrix> {
    SymmetricMatrix::from_upper_fn(dataset.len(), |i, j| {
        if i == j {
            1.0
        } else {
            kernel.eval_unchecked(dataset.row(i), dataset.row(j))
        }
    })
}

/// Pairwise hypergraph: one binary hyperedge per unordered vertex pair,
/// weighted by the pair's kernel value.
pub fn pairwise_incidence(a: &SymmetricMatrix) -> Result<HypergraphIncidence> {
    let n = a.dim();
    let m = n * (n - 1) / 2;
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..n {
        for j in i + 1..n {
            edges.push(vec![i, j]);
            weights.push(a.get(i, j));
        }
    }
    let values = vec![vec![1.0, 1.0]; m];
    HypergraphIncidence::new(n, edges, values, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(points: &[f64]) -> Dataset {
        Dataset::new(points.iter().map(|&x| vec![x]).collect(), None).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(gaussian_kernel(&[1.0, 2.0], &[1.0, 2.0], 0.7).unwrap(), 1.0);
        let s = 1.3;
        let d = s * 2f64.sqrt();
        let v = gaussian_kernel(&[0.0], &[d], s).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-15);
        let v = gaussian_kernel(&[0.0, 0.0], &[3.0, 4.0], 5.0).unwrap();
        assert!((v - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!(gaussian_kernel(&[0.0], &[0.0, 1.0], 1.0).is_err());
        assert!(gaussian_kernel(&[0.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn kernel_underflow_is_flushed() {
        assert_eq!(gaussian_kernel(&[0.0], &[1e3], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn grid_for_two_points() {
        let g = sigma_grid(&line(&[0.0, 1.0]), GRID_STEPS).unwrap();
        assert_eq!(g.len(), 15);
        assert!((g[0] - 0.2).abs() < 1e-15);
        assert!((g[14] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn grid_for_collinear_triple() {
        let g = sigma_grid(&line(&[0.0, 1.0, 2.0]), GRID_STEPS).unwrap();
        assert!((g[0] - 0.2 * 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_identical_points() {
        assert!(matches!(sigma_grid(&line(&[2.0, 2.0, 2.0]), 15), Err(Error::DegenerateScale)));
    }

    #[test]
    fn similarity_matches_double_loop() {
        let ds = Dataset::new(
            vec![vec![0.0, 1.0], vec![2.0, -1.0], vec![0.5, 0.5], vec![3.0, 3.0]],
            None,
        )
        .unwrap();
        let sigma = sigma_grid(&ds, GRID_STEPS).unwrap()[3];
        let a = pairwise_similarity(&ds, &KernelSpec::gaussian(sigma).unwrap()).unwrap();
        for i in 0..4 {
            assert_eq!(a.get(i, i), 1.0);
            for j in 0..4 {
                let direct = gaussian_kernel(ds.row(i), ds.row(j), sigma).unwrap();
                assert!((a.get(i, j) - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identical_points_give_all_ones() {
        let ds = line(&[4.0, 4.0]);
        let a = pairwise_similarity(&ds, &KernelSpec::gaussian(1.0).unwrap()).unwrap();
        assert!(a.as_matrix().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn incidence_edge_counts() {
        let a2 = pairwise_similarity(&line(&[0.0, 1.0]), &KernelSpec::gaussian(1.0).unwrap()).unwrap();
        let h2 = pairwise_incidence(&a2).unwrap();
        assert_eq!(h2.num_edges(), 1);
        assert_eq!(h2.members(0), &[0, 1]);
        assert_eq!(h2.weights()[0], a2.get(0, 1));
        let a4 = pairwise_similarity(&line(&[0.0, 1.0, 2.0, 5.0]), &KernelSpec::gaussian(1.0).unwrap()).unwrap();
        assert_eq!(pairwise_incidence(&a4).unwrap().num_edges(), 6);
    }

    proptest! {
        #[test]
        fn kernel_monotone_in_distance_and_scale(d1 in 0.01f64..5.0, extra in 0.01f64..5.0, s in 0.1f64..5.0, ds in 0.01f64..5.0) {
            let near = gaussian_kernel(&[0.0], &[d1], s).unwrap();
            let far = gaussian_kernel(&[0.0], &[d1 + extra], s).unwrap();
            prop_assert!(far <= near);
            let wider = gaussian_kernel(&[0.0], &[d1], s + ds).unwrap();
            prop_assert!(wider >= near);
        }
    }
}
