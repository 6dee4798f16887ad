//! Clustering quality metrics and feature corruption.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::Dataset;

/// Joint counts of two labelings. Labels are compacted to `0..rows` and
/// `0..cols` in ascending order of their original values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    total: usize,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = BTreeMap::new();
    for &l in labels {
        map.entry(l).or_insert(0);
    }
    for (i, v) in map.values_mut().enumerate() {
        *v = i;
    }
    (labels.iter().map(|l| map[l]).collect(), map.len())
}

impl ContingencyTable {
    /// Rows index `truth` clusters, columns index `predicted` clusters.
    pub fn new(predicted: &[usize], truth: &[usize]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::InvalidInput(format!(
                "labelings differ in length: {} vs {}",
                predicted.len(),
                truth.len()
            )));
        }
        if truth.is_empty() {
            return Err(Error::InvalidInput("labelings are empty".into()));
        }
        let (t, rows) = compact(truth);
        let (p, cols) = compact(predicted);
        let mut counts = vec![vec![0; cols]; rows];
        for (&i, &j) in t.iter().zip(&p) {
            counts[i][j] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(Self { counts, row_sums, col_sums, total: truth.len() })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

fn entropy_term(sizes: &[usize], m: f64) -> f64 {
    sizes.iter().filter(|&&s| s > 0).map(|&s| s as f64 * (s as f64 / m).ln()).sum()
}

/// Normalized mutual information in `[0, 1]`, natural logarithms.
pub fn nmi(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(predicted, truth)?;
    let m = t.total as f64;
    let rows = t.row_sums.len();
    let cols = t.col_sums.len();
    if rows == 1 || cols == 1 {
        return Ok(if rows == 1 && cols == 1 { 1.0 } else { 0.0 });
    }
    let mut mutual = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &q) in row.iter().enumerate() {
            if q > 0 {
                let q = q as f64;
                mutual += q * (m * q / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln();
            }
        }
    }
    let denom = (entropy_term(&t.row_sums, m) * entropy_term(&t.col_sums, m)).sqrt();
    Ok((mutual / denom).clamp(0.0, 1.0))
}

/// Fraction of samples carrying their predicted cluster's plurality truth label.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(predicted, truth)?;
    let hits: usize = (0..t.col_sums.len()).map(|j| t.counts.iter().map(|r| r[j]).max().unwrap_or(0)).sum();
    Ok(hits as f64 / t.total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorruptionKind {
    AdditiveNoise,
    OutlierZeroing,
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorruptionKind::AdditiveNoise => "noise",
            CorruptionKind::OutlierZeroing => "zeroing",
        })
    }
}

impl FromStr for CorruptionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "noise" | "additive" | "additive-noise" => Ok(CorruptionKind::AdditiveNoise),
            "zeroing" | "zero" | "outlier-zeroing" => Ok(CorruptionKind::OutlierZeroing),
            other => Err(Error::InvalidParameter(format!("unknown corruption kind '{other}'"))),
        }
    }
}

/// What the noise level multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NoiseScale {
    /// Population standard deviation of each clean feature.
    #[default]
    FeatureStd,
    /// Unit scale in raw feature units.
    Absolute,
}

impl FromStr for NoiseScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "std" | "feature-std" => Ok(NoiseScale::FeatureStd),
            "absolute" | "abs" => Ok(NoiseScale::Absolute),
            other => Err(Error::InvalidParameter(format!("unknown noise scale '{other}'"))),
        }
    }
}

/// What a zeroing draw removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ZeroingMode {
    /// Each feature element independently.
    #[default]
    Element,
    /// Whole samples.
    Sample,
}

impl FromStr for ZeroingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "element" => Ok(ZeroingMode::Element),
            "sample" => Ok(ZeroingMode::Sample),
            other => Err(Error::InvalidParameter(format!("unknown zeroing mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    /// Noise magnitude, or zeroing probability.
    pub level: f64,
    pub seed: u64,
    pub noise_scale: NoiseScale,
    pub zeroing_mode: ZeroingMode,
}

impl CorruptionSpec {
    pub fn noise(level: f64, seed: u64) -> Self {
        Self {
            kind: CorruptionKind::AdditiveNoise,
            level,
            seed,
            noise_scale: NoiseScale::default(),
            zeroing_mode: ZeroingMode::default(),
        }
    }

    pub fn zeroing(ratio: f64, seed: u64) -> Self {
        Self { kind: CorruptionKind::OutlierZeroing, ..Self::noise(ratio, seed) }
    }

    pub fn validate(&self) -> Result<()> {
        let max = match self.kind {
            CorruptionKind::AdditiveNoise => 2.0,
            CorruptionKind::OutlierZeroing => 1.0,
        };
        if !(self.level >= 0.0 && self.level <= max) {
            return Err(Error::InvalidParameter(format!("{} level must be in [0, {max}], got {}", self.kind, self.level)));
        }
        Ok(())
    }
}

fn feature_std(ds: &Dataset) -> Vec<f64> {
    let (n, d) = (ds.len(), ds.dim());
    (0..d)
        .map(|c| {
            let mean = (0..n).map(|i| ds.row(i)[c]).sum::<f64>() / n as f64;
            ((0..n).map(|i| (ds.row(i)[c] - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
        })
        .collect()
}

/// Returns a corrupted copy of `ds`; labels are kept.
pub fn corrupt(ds: &Dataset, spec: &CorruptionSpec) -> Result<Dataset> {
    spec.validate()?;
    if spec.level == 0.0 {
        return Ok(ds.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = ds.dim();
    let mut features = ds.features().to_vec();
    match spec.kind {
        CorruptionKind::AdditiveNoise => {
            let scale = match spec.noise_scale {
                NoiseScale::FeatureStd => feature_std(ds),
                NoiseScale::Absolute => vec![1.0; d],
            };
            for (idx, v) in features.iter_mut().enumerate() {
                let g: f64 = rng.sample(StandardNormal);
                *v += spec.level * scale[idx % d] * g;
            }
        }
        CorruptionKind::OutlierZeroing => match spec.zeroing_mode {
            ZeroingMode::Element => {
                for v in features.iter_mut() {
                    if rng.random::<f64>() < spec.level {
                        *v = 0.0;
                    }
                }
            }
            ZeroingMode::Sample => {
                for row in features.chunks_mut(d) {
                    if rng.random::<f64>() < spec.level {
                        row.fill(0.0);
                    }
                }
            }
        },
    }
    ds.with_features(features)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmi_examples() {
        assert_eq!(nmi(&[0, 0, 1, 1, 2], &[0, 0, 1, 1, 2]).unwrap(), 1.0);
        assert!((nmi(&[2, 2, 0, 0, 1], &[0, 0, 1, 1, 2]).unwrap() - 1.0).abs() < 1e-15);
        assert!(nmi(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn nmi_degenerate_cases() {
        assert_eq!(nmi(&[0, 0, 0], &[0, 1, 1]).unwrap(), 0.0);
        assert_eq!(nmi(&[0, 1, 1], &[4, 4, 4]).unwrap(), 0.0);
        assert_eq!(nmi(&[3, 3], &[1, 1]).unwrap(), 1.0);
        assert!(nmi(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 0, 2], &[1, 0, 2]).unwrap(), 1.0);
        assert!((accuracy(&[0, 0, 0], &[0, 0, 1]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((accuracy(&[0, 0, 0, 1, 1, 1], &[0, 0, 1, 1, 2, 2]).unwrap() - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn contingency_marginals() {
        let t = ContingencyTable::new(&[0, 1, 1, 5], &[2, 2, 3, 3]).unwrap();
        assert_eq!(t.counts(), &[vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(t.row_sums(), &[2, 2]);
        assert_eq!(t.col_sums(), &[1, 2, 1]);
        assert_eq!(t.total(), 4);
    }

    fn grid(n: usize, d: usize) -> Dataset {
        let rows = (0..n).map(|i| (0..d).map(|c| (i * d + c) as f64 * 0.37 + 1.0).collect()).collect();
        Dataset::new(rows, Some((0..n).map(|i| i % 2).collect())).unwrap()
    }

    #[test]
    fn zero_level_is_identity() {
        let ds = grid(10, 3);
        assert_eq!(corrupt(&ds, &CorruptionSpec::noise(0.0, 4)).unwrap(), ds);
        assert_eq!(corrupt(&ds, &CorruptionSpec::zeroing(0.0, 4)).unwrap(), ds);
    }

    #[test]
    fn full_zeroing() {
        let ds = grid(10, 3);
        let z = corrupt(&ds, &CorruptionSpec::zeroing(1.0, 1)).unwrap();
        assert!(z.features().iter().all(|&v| v == 0.0));
        assert_eq!(z.labels(), ds.labels());
    }

    #[test]
    fn zeroing_fraction_concentrates() {
        let ds = grid(1000, 10);
        let z = corrupt(&ds, &CorruptionSpec::zeroing(0.4, 9)).unwrap();
        let frac = z.features().iter().filter(|&&v| v == 0.0).count() as f64 / 10000.0;
        assert!((frac - 0.4).abs() <= 0.02, "{frac}");
    }

    #[test]
    fn sample_zeroing_clears_whole_rows() {
        let ds = grid(200, 4);
        let spec = CorruptionSpec { zeroing_mode: ZeroingMode::Sample, ..CorruptionSpec::zeroing(0.5, 2) };
        let z = corrupt(&ds, &spec).unwrap();
        for i in 0..200 {
            let zeros = z.row(i).iter().filter(|&&v| v == 0.0).count();
            assert!(zeros == 0 || zeros == 4);
        }
    }

    #[test]
    fn noise_is_reproducible_and_scaled() {
        let ds = grid(500, 2);
        let a = corrupt(&ds, &CorruptionSpec::noise(1.0, 5)).unwrap();
        let b = corrupt(&ds, &CorruptionSpec::noise(1.0, 5)).unwrap();
        assert_eq!(a, b);
        let std = feature_std(&ds);
        let resid: Vec<f64> = a.features().iter().zip(ds.features()).map(|(x, y)| x - y).collect();
        let col0: f64 = (resid.iter().step_by(2).map(|r| r * r).sum::<f64>() / 500.0).sqrt();
        assert!((col0 / std[0] - 1.0).abs() < 0.1);
    }

    #[test]
    fn level_out_of_range() {
        let ds = grid(4, 1);
        assert!(corrupt(&ds, &CorruptionSpec::noise(2.5, 0)).is_err());
        assert!(corrupt(&ds, &CorruptionSpec::zeroing(-0.1, 0)).is_err());
    }
}
