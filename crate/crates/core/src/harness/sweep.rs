use std::time::Instant;

use sha2::{Digest, Sha256};

use super::config::{DataSource, ExperimentConfig, SigmaMode};
use super::io::{load_csv, synth_blobs};
use super::pipeline::{run_once, Method};
use crate::error::{Error, Result};
use crate::eval::{accuracy, corrupt, nmi, CorruptionKind, CorruptionSpec};
use crate::fusion::{ablation_config, FusionWeights};
use crate::model::{Dataset, HyperParams, SigmaChoice};
use crate::pairwise::GRID_STEPS;
use crate::par;
use crate::partition::Criterion;

/// One run of one configuration on one (possibly corrupted) dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    /// Hash of everything in the configuration except seed and level.
    pub fingerprint: String,
    pub method: Method,
    pub criterion: Criterion,
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub communities: usize,
    /// Kernel scale actually used; `None` if the run failed before choosing it.
    pub sigma: Option<f64>,
    pub corruption: CorruptionKind,
    pub level: f64,
    pub seed: u64,
    pub nmi: Option<f64>,
    pub accuracy: Option<f64>,
    pub rho: Option<f64>,
    pub solver_iterations: usize,
    pub refine_iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
    pub seconds: f64,
}

/// One point of the configuration product, with ablation weights applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub method: Method,
    pub params: HyperParams,
    pub sigma: SigmaMode,
}

fn sigma_key(s: SigmaMode) -> String {
    match s {
        SigmaMode::Choice(SigmaChoice::Fixed(v)) => format!("fixed:{v:e}"),
        SigmaMode::Choice(SigmaChoice::GridIndex(l)) => format!("index:{l}"),
        SigmaMode::GridSearch => "search".into(),
    }
}

fn data_key(d: &DataSource) -> String {
    match d {
        DataSource::Csv(p) => format!("csv:{}", p.display()),
        DataSource::Blobs(b) => {
            format!("blobs:{}x{}x{}:{:e}:{}", b.kappa, b.per_cluster, b.dim, b.separation, b.seed)
        }
    }
}

impl Variant {
    pub fn fingerprint(&self, cfg: &ExperimentConfig) -> String {
        let p = &self.params;
        let canonical = format!(
            "data={};method={};criterion={};kappa={};alpha={:e};beta={:e};k={};communities={};nbr={};eps={:e};sigma={};corruption={};noise_scale={:?};zeroing={:?}",
            data_key(&cfg.data),
            self.method,
            cfg.criterion,
            p.kappa,
            p.weights.alpha(),
            p.weights.beta(),
            p.k,
            p.communities(),
            p.neighbor_set_size,
            p.epsilon,
            sigma_key(self.sigma),
            cfg.corruption,
            cfg.noise_scale,
            cfg.zeroing_mode,
        );
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Expands the configuration product, dropping combinations that are
/// identical once method-irrelevant fields are normalized.
pub fn variants(cfg: &ExperimentConfig, kappa: usize) -> Vec<Variant> {
    let mut out: Vec<Variant> = Vec::new();
    for &method in &cfg.methods {
        for &w in &cfg.weights {
            for &k in &cfg.ks {
                for &communities in &cfg.communities {
                    let mut params = cfg.params.clone();
                    params.kappa = kappa;
                    params.k = k;
                    params.communities_per_method = communities;
                    params.weights = w;
                    match method {
                        Method::Hypergraph(a) => {
                            params.weights = ablation_config(a, w);
                            if !a.uses_knn() {
                                params.k = cfg.ks[0];
                            }
                            if !a.uses_overclustering() {
                                params.communities_per_method = cfg.communities[0];
                            }
                        }
                        Method::Csc => {
                            params.weights = FusionWeights::new(1.0, 0.0).expect("valid weights");
                            params.k = cfg.ks[0];
                            params.communities_per_method = cfg.communities[0];
                        }
                    }
                    let v = Variant { method, params, sigma: cfg.sigma };
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

/// Mixes a run seed and a level into the corruption RNG seed.
fn corruption_seed(seed: u64, level: f64) -> u64 {
    let mut z = seed ^ level.to_bits().rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn load_data(source: &DataSource) -> Result<Dataset> {
    match source {
        DataSource::Csv(p) => load_csv(p),
        DataSource::Blobs(b) => synth_blobs(b.kappa, b.per_cluster, b.dim, b.separation, b.seed),
    }
}

/// Grid index with the highest mean NMI over `seeds`; ties go to the smaller
/// index. Failed runs count as NMI 0.
pub fn search_sigma(ds: &Dataset, params: &HyperParams, method: Method, criterion: Criterion, seeds: &[u64]) -> Result<usize> {
    let truth = ds.labels().ok_or_else(|| Error::InvalidInput("sigma search needs labels".into()))?;
    let cells: Vec<(usize, u64)> = (1..=GRID_STEPS).flat_map(|l| seeds.iter().map(move |&s| (l, s))).collect();
    let scores = par::map_slice(&cells, |&(lambda, seed)| {
        let mut p = params.clone();
        p.sigma = SigmaChoice::GridIndex(lambda);
        p.seed = seed;
        run_once(ds, &p, method, criterion).and_then(|o| nmi(o.partition.labels(), truth)).unwrap_or(0.0)
    });
    let mut best = (1, f64::NEG_INFINITY);
    for lambda in 1..=GRID_STEPS {
        let mean = scores.chunks(seeds.len()).nth(lambda - 1).map_or(0.0, |c| c.iter().sum::<f64>() / c.len() as f64);
        if mean > best.1 {
            best = (lambda, mean);
        }
    }
    Ok(best.0)
}

struct Cell<'a> {
    variant: &'a Variant,
    fingerprint: &'a str,
    sigma: SigmaChoice,
    level: f64,
    seed: u64,
}

fn run_cell(ds: &Dataset, cfg: &ExperimentConfig, cell: &Cell<'_>) -> ResultRecord {
    let start = Instant::now();
    let p = &cell.variant.params;
    let mut record = ResultRecord {
        fingerprint: cell.fingerprint.to_string(),
        method: cell.variant.method,
        criterion: cfg.criterion,
        alpha: p.weights.alpha(),
        beta: p.weights.beta(),
        k: p.k,
        communities: p.communities(),
        sigma: None,
        corruption: cfg.corruption,
        level: cell.level,
        seed: cell.seed,
        nmi: None,
        accuracy: None,
        rho: None,
        solver_iterations: 0,
        refine_iterations: 0,
        converged: false,
        error: None,
        seconds: 0.0,
    };
    let outcome = (|| {
        let spec = CorruptionSpec {
            kind: cfg.corruption,
            level: cell.level,
            seed: corruption_seed(cell.seed, cell.level),
            noise_scale: cfg.noise_scale,
            zeroing_mode: cfg.zeroing_mode,
        };
        let data = corrupt(ds, &spec)?;
        let mut params = p.clone();
        params.sigma = cell.sigma;
        params.seed = cell.seed;
        let out = run_once(&data, &params, cell.variant.method, cfg.criterion)?;
        record.sigma = Some(out.sigma);
        let truth = ds.labels().expect("checked before the sweep");
        record.nmi = Some(nmi(out.partition.labels(), truth)?);
        record.accuracy = Some(accuracy(out.partition.labels(), truth)?);
        record.rho = out.objective;
        record.solver_iterations = out.solver_iterations;
        record.refine_iterations = out.refine_iterations;
        record.converged = out.converged;
        Ok::<_, Error>(())
    })();
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
    }
    record.seconds = start.elapsed().as_secs_f64();
    record
}

/// Runs every (variant, level, seed) cell. Configuration problems (missing
/// data, no labels) fail the whole call; failures inside a cell are recorded
/// on that cell's record only.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    run_pipeline_with(cfg, |_| {})
}

/// As [`run_pipeline`], calling `on_record` as each cell finishes.
pub fn run_pipeline_with<F>(cfg: &ExperimentConfig, on_record: F) -> Result<Vec<ResultRecord>>
where
    F: Fn(&ResultRecord) + Sync + Send,
{
    cfg.validate()?;
    let ds = load_data(&cfg.data)?;
    let classes = ds.num_classes().ok_or_else(|| Error::InvalidInput("experiments need a labeled dataset".into()))?;
    let kappa = if cfg.params.kappa == 0 { classes } else { cfg.params.kappa };
    let variants = variants(cfg, kappa);
    par::with_threads(cfg.workers, || {
        let sigmas: Vec<Result<SigmaChoice>> = variants
            .iter()
            .map(|v| match v.sigma {
                SigmaMode::Choice(c) => Ok(c),
                SigmaMode::GridSearch => {
                    search_sigma(&ds, &v.params, v.method, cfg.criterion, &cfg.seeds).map(SigmaChoice::GridIndex)
                }
            })
            .collect();
        let sigmas = sigmas.into_iter().collect::<Result<Vec<_>>>()?;
        let fingerprints: Vec<String> = variants.iter().map(|v| v.fingerprint(cfg)).collect();
        let mut cells = Vec::new();
        for (i, v) in variants.iter().enumerate() {
            for &level in &cfg.levels {
                for &seed in &cfg.seeds {
                    cells.push(Cell { variant: v, fingerprint: &fingerprints[i], sigma: sigmas[i], level, seed });
                }
            }
        }
        Ok(par::map_slice(&cells, |cell| {
            let r = run_cell(&ds, cfg, cell);
            on_record(&r);
            r
        }))
    })
}
