//! Lloyd's k-means with k-means++ seeding.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Partition;
use crate::par;

pub const MAX_LLOYD_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub partition: Partition,
    /// Sum of squared distances to assigned centers.
    pub inertia: f64,
    pub iterations: usize,
}

struct Points {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl Points {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let (n, p) = m.shape();
        let mut data = Vec::with_capacity(n * p);
        for row in m.row_iter() {
            data.extend(row.iter());
        }
        Self { n, p, data }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest_center(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(x, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_seeds(pts: &Points, kappa: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut chosen = vec![rng.random_range(0..pts.n)];
    let mut d2: Vec<f64> = (0..pts.n).map(|i| sq_dist(pts.row(i), pts.row(chosen[0]))).collect();
    while chosen.len() < kappa {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // every remaining point coincides with a center
            (0..pts.n).find(|i| !chosen.contains(i)).expect("kappa <= n")
        };
        chosen.push(next);
        for (i, w) in d2.iter_mut().enumerate() {
            *w = w.min(sq_dist(pts.row(i), pts.row(next)));
        }
    }
    chosen.into_iter().map(|i| pts.row(i).to_vec()).collect()
}

fn lloyd(pts: &Points, kappa: usize, seed: u64) -> KMeansResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = plus_plus_seeds(pts, kappa, &mut rng);
    let mut labels = vec![usize::MAX; pts.n];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut changed = false;
        let mut dists = vec![0.0; pts.n];
        for i in 0..pts.n {
            let (c, d) = nearest_center(pts.row(i), &centers);
            dists[i] = d;
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        // Reseed empty clusters at the point farthest from its center.
        let mut counts = vec![0usize; kappa];
        for &l in &labels {
            counts[l] += 1;
        }
        for c in 0..kappa {
            if counts[c] == 0 {
                let far = (0..pts.n)
                    .filter(|&i| counts[labels[i]] > 1)
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
                if let Some(i) = far {
                    counts[labels[i]] -= 1;
                    labels[i] = c;
                    counts[c] = 1;
                    dists[i] = 0.0;
                    changed = true;
                }
            }
        }
        for (c, center) in centers.iter_mut().enumerate() {
            if counts[c] == 0 {
                continue;
            }
            center.iter_mut().for_each(|v| *v = 0.0);
            for i in (0..pts.n).filter(|&i| labels[i] == c) {
                for (v, x) in center.iter_mut().zip(pts.row(i)) {
                    *v += x;
                }
            }
            center.iter_mut().for_each(|v| *v /= counts[c] as f64);
        }
        if !changed || iterations >= MAX_LLOYD_ITERATIONS {
            break;
        }
    }
    let inertia = (0..pts.n).map(|i| sq_dist(pts.row(i), &centers[labels[i]])).sum();
    let partition = Partition::from_labels(labels, kappa).expect("labels are below kappa");
    KMeansResult { partition, inertia, iterations }
}

/// Clusters the rows of `points` into `kappa` groups.
pub fn kmeans(points: &DMatrix<f64>, kappa: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_restarts(points, kappa, 1, seed)
}

/// Best-inertia result over `restarts` independently seeded runs.
pub fn kmeans_restarts(points: &DMatrix<f64>, kappa: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    let n = points.nrows();
    if kappa == 0 || kappa > n {
        return Err(Error::InvalidParameter(format!("kappa must be in [1, {n}], got {kappa}")));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("k-means input has non-finite values".into()));
    }
    let pts = Points::from_matrix(points);
    let runs = par::map_range(restarts.max(1), |r| {
        lloyd(&pts, kappa, seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(r as u64))
    });
    Ok(runs
        .into_iter()
        .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
        .expect("at least one run"))
}
