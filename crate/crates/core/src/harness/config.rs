use std::fs;
use std::path::{Path, PathBuf};

use super::pipeline::Method;
use crate::error::{Error, Result};
use crate::eval::{CorruptionKind, NoiseScale, ZeroingMode};
use crate::fusion::{FusionWeights, WEIGHT_GRID};
use crate::model::{HyperParams, SigmaChoice};
use crate::partition::Criterion;

/// Parameters of the synthetic blob generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobSpec {
    pub kappa: usize,
    pub per_cluster: usize,
    pub dim: usize,
    pub separation: f64,
    pub seed: u64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        Self { kappa: 3, per_cluster: 50, dim: 2, separation: 6.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv(PathBuf),
    Blobs(BlobSpec),
}

/// How the kernel scale is chosen for a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaMode {
    Choice(SigmaChoice),
    /// Grid index with the best mean NMI over seeds on clean data.
    GridSearch,
}

/// A full experiment: every combination of methods, weights, `k` values and
/// community counts, run for every corruption level and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: DataSource,
    /// Base parameters; `kappa == 0` means "number of ground-truth classes".
    pub params: HyperParams,
    pub methods: Vec<Method>,
    pub weights: Vec<FusionWeights>,
    pub ks: Vec<usize>,
    /// Communities per over-clustering method; `None` is `2 * kappa`.
    pub communities: Vec<Option<usize>>,
    pub sigma: SigmaMode,
    pub criterion: Criterion,
    pub corruption: CorruptionKind,
    pub levels: Vec<f64>,
    pub noise_scale: NoiseScale,
    pub zeroing_mode: ZeroingMode,
    pub seeds: Vec<u64>,
    /// Worker cap for sweep cells; `None` uses every core.
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(data: DataSource) -> Self {
        Self {
            data,
            params: HyperParams::new(0),
            methods: vec![Method::default()],
            weights: vec![FusionWeights::default()],
            ks: vec![3],
            communities: vec![None],
            sigma: SigmaMode::Choice(SigmaChoice::default()),
            criterion: Criterion::Dhpc,
            corruption: CorruptionKind::AdditiveNoise,
            levels: vec![0.0],
            noise_scale: NoiseScale::default(),
            zeroing_mode: ZeroingMode::default(),
            seeds: (0..10).collect(),
            workers: None,
            out: None,
        }
    }

    /// Parses the flat `key = value` format. Relative paths resolve against
    /// `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = Self::new(DataSource::Blobs(BlobSpec::default()));
        let mut data: Option<PathBuf> = None;
        let mut blobs: Option<BlobSpec> = None;
        let mut alpha: Option<f64> = None;
        let mut beta: Option<f64> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(bad(line, format!("expected key = value, got '{content}'")));
            };
            let (key, value) = (key.trim(), value.trim());
            let err = |e: Error| bad(line, e.to_string());
            match key {
                "data" => data = Some(base_dir.join(value)),
                "synth.kappa" | "synth.per_cluster" | "synth.dim" | "synth.separation" | "synth.seed" => {
                    let b = blobs.get_or_insert_with(BlobSpec::default);
                    match key {
                        "synth.kappa" => b.kappa = num(value, line)?,
                        "synth.per_cluster" => b.per_cluster = num(value, line)?,
                        "synth.dim" => b.dim = num(value, line)?,
                        "synth.separation" => b.separation = num(value, line)?,
                        _ => b.seed = num(value, line)?,
                    }
                }
                "kappa" => cfg.params.kappa = num(value, line)?,
                "k" => cfg.ks = list(value, line)?,
                "alpha" => alpha = Some(num(value, line)?),
                "beta" => beta = Some(num(value, line)?),
                "weights" => cfg.weights = parse_weights(value, line)?,
                "method" | "methods" | "ablation" => {
                    cfg.methods = items(value).map(|m| m.parse().map_err(err)).collect::<Result<_>>()?
                }
                "criterion" => cfg.criterion = value.parse().map_err(err)?,
                "sigma" => cfg.sigma = SigmaMode::Choice(SigmaChoice::Fixed(num(value, line)?)),
                "sigma_index" => cfg.sigma = SigmaMode::Choice(SigmaChoice::GridIndex(num(value, line)?)),
                "sigma_grid" => {
                    if num::<bool>(value, line)? {
                        cfg.sigma = SigmaMode::GridSearch;
                    }
                }
                "communities" => cfg.communities = list(value, line)?.into_iter().map(Some).collect(),
                "neighbor_set_size" => cfg.params.neighbor_set_size = num(value, line)?,
                "epsilon" => cfg.params.epsilon = num(value, line)?,
                "corruption" => cfg.corruption = value.parse().map_err(err)?,
                "levels" => cfg.levels = list(value, line)?,
                "noise_scale" => cfg.noise_scale = value.parse().map_err(err)?,
                "zeroing_mode" => cfg.zeroing_mode = value.parse().map_err(err)?,
                "seeds" => cfg.seeds = parse_seeds(value, line)?,
                "workers" => cfg.workers = Some(num(value, line)?),
                "out" => cfg.out = Some(base_dir.join(value)),
                other => return Err(bad(line, format!("unknown key '{other}'"))),
            }
        }
        cfg.data = match (data, blobs) {
            (Some(_), Some(_)) => return Err(Error::InvalidParameter("set either data or synth.*, not both".into())),
            (Some(p), None) => DataSource::Csv(p),
            (None, Some(b)) => DataSource::Blobs(b),
            (None, None) => return Err(Error::InvalidParameter("config names no dataset (data or synth.*)".into())),
        };
        if alpha.is_some() || beta.is_some() {
            let d = FusionWeights::default();
            cfg.weights = vec![FusionWeights::new(alpha.unwrap_or(d.alpha()), beta.unwrap_or(d.beta()))?];
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("seed list is empty".into()));
        }
        if self.methods.is_empty() || self.weights.is_empty() || self.ks.is_empty() || self.communities.is_empty() {
            return Err(Error::InvalidParameter("methods, weights, k and communities need at least one value".into()));
        }
        if self.levels.is_empty() {
            return Err(Error::InvalidParameter("corruption level list is empty".into()));
        }
        if let DataSource::Csv(p) = &self.data {
            if !p.is_file() {
                return Err(Error::InvalidInput(format!("data file {} does not exist", p.display())));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        Ok(())
    }
}

fn bad(line: usize, message: String) -> Error {
    Error::InvalidParameter(format!("config line {line}: {message}"))
}

fn num<T: std::str::FromStr>(value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| bad(line, format!("cannot parse '{value}'")))
}

fn items(value: &str) -> impl Iterator<Item = &str> {
    value.split([',', ' ', '\t']).filter(|s| !s.is_empty())
}

fn list<T: std::str::FromStr>(value: &str, line: usize) -> Result<Vec<T>> {
    items(value).map(|v| num(v, line)).collect()
}

/// `grid`, or pairs like `0.4:0.4, 0.2:0.6`.
fn parse_weights(value: &str, line: usize) -> Result<Vec<FusionWeights>> {
    if value.eq_ignore_ascii_case("grid") {
        return WEIGHT_GRID.iter().map(|&(a, b)| FusionWeights::new(a, b)).collect();
    }
    items(value)
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| bad(line, format!("expected alpha:beta, got '{pair}'")))?;
            FusionWeights::new(num(a, line)?, num(b, line)?)
        })
        .collect()
}

/// `a..b` (half-open) or an explicit list.
fn parse_seeds(value: &str, line: usize) -> Result<Vec<u64>> {
    match value.split_once("..") {
        Some((a, b)) => Ok((num::<u64>(a.trim(), line)?..num::<u64>(b.trim(), line)?).collect()),
        None => list(value, line),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::Ablation;

    #[test]
    fn full_config() {
        let text = "
            # sweep
            synth.kappa = 3
            synth.per_cluster = 20
            kappa = 3
            methods = PKO, PK, CSC
            weights = 0.4:0.4 0.2:0.6
            k = 3,5
            criterion = nc
            sigma_index = 6
            corruption = zeroing
            levels = 0, 0.2, 0.4
            seeds = 0..4
            workers = 2
        ";
        let cfg = ExperimentConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(cfg.methods, vec![Method::Hypergraph(Ablation::Pko), Method::Hypergraph(Ablation::Pk), Method::Csc]);
        assert_eq!(cfg.weights.len(), 2);
        assert_eq!(cfg.ks, vec![3, 5]);
        assert_eq!(cfg.criterion, Criterion::Nc);
        assert_eq!(cfg.sigma, SigmaMode::Choice(SigmaChoice::GridIndex(6)));
        assert_eq!(cfg.corruption, CorruptionKind::OutlierZeroing);
        assert_eq!(cfg.levels, vec![0.0, 0.2, 0.4]);
        assert_eq!(cfg.seeds, vec![0, 1, 2, 3]);
        assert_eq!(cfg.workers, Some(2));
        assert!(matches!(cfg.data, DataSource::Blobs(BlobSpec { per_cluster: 20, .. })));
    }

    #[test]
    fn weight_grid_and_alpha_beta() {
        let cfg = ExperimentConfig::parse("synth.seed = 1\nweights = grid", Path::new(".")).unwrap();
        assert_eq!(cfg.weights.len(), 9);
        let cfg = ExperimentConfig::parse("synth.seed = 1\nalpha = 0.6\nbeta = 0.2", Path::new(".")).unwrap();
        assert_eq!(cfg.weights, vec![FusionWeights::new(0.6, 0.2).unwrap()]);
    }

    #[test]
    fn rejects_bad_input() {
        let p = Path::new(".");
        assert!(ExperimentConfig::parse("kappa = 3", p).is_err());
        assert!(ExperimentConfig::parse("synth.seed = 1\nbogus = 1", p).is_err());
        assert!(ExperimentConfig::parse("synth.seed = 1\nseeds = ", p).is_err());
        assert!(ExperimentConfig::parse("synth.seed = 1\nk = x", p).is_err());
        assert!(ExperimentConfig::parse("data = /no/such/file.csv", p).is_err());
        assert!(ExperimentConfig::parse("synth.seed = 1\nnot a pair", p).is_err());
    }
}
