//! Turning a continuous embedding into a hard partition: row normalization
//! followed by alternating argmax / orthogonal Procrustes rotation.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Partition, PartitionCandidate};

/// Rows shorter than this cannot be normalized.
const MIN_ROW_NORM: f64 = 1e-12;

/// `X̃ = Diag(diag^{-1/2}(PPᵀ)) P`: every row of `P` scaled to unit length.
pub fn candidate_from_p(candidate: &PartitionCandidate) -> Result<DMatrix<f64>> {
    normalize_rows(&candidate.p)
}

pub fn normalize_rows(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut out = p.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let norm = row.norm();
        if !(norm >= MIN_ROW_NORM) {
            return Err(Error::DegenerateRow { vertex: i });
        }
        row /= norm;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub max_iter: usize,
    /// Picks the first row of the initial rotation.
    pub seed: u64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { max_iter: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub partition: Partition,
    /// Alignment objective (sum of singular values) at each iteration.
    pub phi_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Initial rotation: one random row of `X̃`, then repeatedly the row most
/// orthogonal to the rows chosen so far.
fn initial_rotation(xt: &DMatrix<f64>, seed: u64) -> DMatrix<f64> {
    let (n, k) = xt.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = DMatrix::zeros(k, k);
    let first = rng.random_range(0..n);
    r.set_column(0, &xt.row(first).transpose());
    let mut acc = vec![0.0; n];
    for j in 1..k {
        let proj = xt * r.column(j - 1);
        let mut best = 0;
        for i in 0..n {
            acc[i] += proj[i].abs();
            if acc[i] < acc[best] {
                best = i;
            }
        }
        r.set_column(j, &xt.row(best).transpose());
    }
    r
}

fn row_argmax(y: &DMatrix<f64>) -> Vec<usize> {
    y.row_iter()
        .map(|row| {
            let mut best = 0;
            for c in 1..row.len() {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Moves the weakest-margin rows into empty clusters.
fn repair_empty(labels: &mut [usize], y: &DMatrix<f64>, k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else { return };
        let candidate = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .min_by(|&a, &b| {
                let ma = y[(a, labels[a])] - y[(a, empty)];
                let mb = y[(b, labels[b])] - y[(b, empty)];
                ma.total_cmp(&mb)
            });
        match candidate {
            Some(i) => labels[i] = empty,
            None => return,
        }
    }
}

/// Finds a hard partition `X` and rotation `R` maximizing `tr(Xᵀ X̃ R)`.
pub fn discrete_refine(xt: &DMatrix<f64>, opts: &RefineOptions) -> Result<Refinement> {
    let (n, k) = xt.shape();
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput("empty embedding".into()));
    }
    if xt.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("embedding has non-finite entries".into()));
    }
    let mut r = initial_rotation(xt, opts.seed);
    let mut phi_history = Vec::new();
    let mut labels = vec![0; n];
    let mut y = xt * &r;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        y = xt * &r;
        labels = row_argmax(&y);
        // Procrustes: maximize tr(Rᵀ X̃ᵀX) with X̃ᵀX = U Σ Vᵀ  =>  R = U Vᵀ.
        let mut b = DMatrix::<f64>::zeros(k, k);
        for (i, &l) in labels.iter().enumerate() {
            for c in 0..k {
                b[(c, l)] += xt[(i, c)];
            }
        }
        let svd = b.svd(true, true);
        let phi: f64 = svd.singular_values.iter().sum();
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(Error::Invariant("SVD did not return singular vectors".into())),
        };
        let done = phi_history.last().is_some_and(|&prev: &f64| (phi - prev).abs() < 1e-10);
        phi_history.push(phi);
        if done {
            converged = true;
            break;
        }
        r = u * v_t;
    }

    repair_empty(&mut labels, &y, k);
    let partition = Partition::from_labels(labels, k)?.canonicalized();
    Ok(Refinement { partition, phi_history, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Constraint;

    fn cand(p: DMatrix<f64>) -> PartitionCandidate {
        PartitionCandidate { p, rho: 0.0, iterations: 0, constraint: Constraint::Orthonormal }
    }

    #[test]
    fn unit_rows_unchanged() {
        let p = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0]);
        assert_eq!(candidate_from_p(&cand(p.clone())).unwrap(), p);
    }

    #[test]
    fn scaled_row_normalized() {
        let p = DMatrix::from_row_slice(1, 2, &[0.03, 0.04]);
        let x = candidate_from_p(&cand(p)).unwrap();
        assert!((x[(0, 0)] - 0.6).abs() < 1e-15 && (x[(0, 1)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_row_is_reported() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(candidate_from_p(&cand(p)), Err(Error::DegenerateRow { vertex: 1 })));
    }

    #[test]
    fn binary_input_is_a_fixed_point() {
        let labels = vec![0, 0, 1, 2, 1, 2];
        let x = Partition::from_labels(labels.clone(), 3).unwrap().indicator();
        let out = discrete_refine(&x, &RefineOptions::default()).unwrap();
        assert_eq!(out.partition.labels(), labels.as_slice());
        assert_eq!(out.partition.indicator(), x);
        assert!(out.phi_history.windows(2).all(|w| (w[1] - w[0]).abs() < 1e-10));
    }

    #[test]
    fn empty_columns_are_repaired() {
        // every row points the same way; three clusters are still requested
        let xt = DMatrix::from_fn(6, 3, |i, j| if j == 0 { 1.0 - 0.01 * i as f64 } else { 0.01 * (i * (j + 1)) as f64 });
        let xt = normalize_rows(&xt).unwrap();
        let out = discrete_refine(&xt, &RefineOptions::default()).unwrap();
        assert!(!out.partition.has_empty_cluster());
    }
}
