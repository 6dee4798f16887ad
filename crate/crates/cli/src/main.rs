use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use hgsc::harness::{
    emit_results, group_records, load_csv, run_once, run_pipeline_with, search_sigma, synth_blobs,
    write_assignments, write_csv, ExperimentConfig, Method,
};
use hgsc::{accuracy, nmi, Criterion, Error, ErrorClass, FusionWeights, HyperParams, SigmaChoice};

#[derive(Parser)]
#[command(name = "hgsc", version, about = "Hypergraph spectral clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one CSV file and write assignments plus run metrics.
    Cluster(ClusterArgs),
    /// Run a sweep described by a config file.
    Experiment(ExperimentArgs),
    /// Write a labeled Gaussian blob dataset.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    data: PathBuf,
    /// Number of clusters; defaults to the number of labels in the file.
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long, requires = "beta", conflicts_with = "ablation")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha", conflicts_with = "ablation")]
    beta: Option<f64>,
    /// PKO, PK, PO, P, or CSC for classic spectral clustering on the kernel.
    #[arg(long)]
    ablation: Option<Method>,
    #[arg(long, default_value = "dhpc")]
    criterion: Criterion,
    /// Fixed kernel width.
    #[arg(long, conflicts_with_all = ["sigma_grid", "sigma_index"])]
    sigma: Option<f64>,
    /// Kernel width as an index into the 15-step grid.
    #[arg(long, conflicts_with = "sigma_grid")]
    sigma_index: Option<usize>,
    /// Pick the grid width with the best NMI against the file's labels.
    #[arg(long)]
    sigma_grid: bool,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Communities per over-clustering method; defaults to 2 * kappa.
    #[arg(long)]
    communities: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker cap; overrides `workers` in the config.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    blobs: usize,
    #[arg(long, default_value_t = 50)]
    per_cluster: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Cluster(args) => cluster(args),
        Command::Experiment(args) => experiment(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Data => 2,
                ErrorClass::Numerical => 3,
            })
        }
    }
}

fn cluster(args: ClusterArgs) -> Result<(), Error> {
    let ds = load_csv(&args.data)?;
    let kappa = match (args.kappa, ds.num_classes()) {
        (Some(k), _) => k,
        (None, Some(c)) => c,
        (None, None) => return Err(Error::InvalidParameter("--kappa is required for unlabeled data".into())),
    };
    let method = args.ablation.unwrap_or_default();
    let mut params = HyperParams::new(kappa);
    params.k = args.k;
    params.seed = args.seed;
    params.communities_per_method = args.communities;
    if let (Some(a), Some(b)) = (args.alpha, args.beta) {
        params.weights = FusionWeights::new(a, b)?;
    }
    if let Some(s) = args.sigma {
        params.sigma = SigmaChoice::Fixed(s);
    } else if let Some(i) = args.sigma_index {
        params.sigma = SigmaChoice::GridIndex(i);
    }
    let start = Instant::now();
    let out = hgsc::par::with_threads(args.threads, || {
        if args.sigma_grid {
            let lambda = search_sigma(&ds, &params, method, args.criterion, &[args.seed])?;
            params.sigma = SigmaChoice::GridIndex(lambda);
        }
        run_once(&ds, &params, method, args.criterion)
    })?;
    let seconds = start.elapsed().as_secs_f64();

    fs::create_dir_all(&args.out)?;
    write_assignments(&ds, out.partition.labels(), args.out.join("assignments.csv"))?;
    let mut metrics = vec![
        ("method", method.to_string()),
        ("criterion", args.criterion.to_string()),
        ("kappa", kappa.to_string()),
        ("sigma", format!("{:.16e}", out.sigma)),
        ("objective", out.objective.map_or(String::new(), |r| format!("{r:.16e}"))),
        ("solver_iterations", out.solver_iterations.to_string()),
        ("refine_iterations", out.refine_iterations.to_string()),
        ("converged", out.converged.to_string()),
    ];
    if let Some(truth) = ds.labels() {
        metrics.push(("nmi", format!("{:.16e}", nmi(out.partition.labels(), truth)?)));
        metrics.push(("accuracy", format!("{:.16e}", accuracy(out.partition.labels(), truth)?)));
    }
    metrics.push(("seconds", format!("{seconds:.6}")));
    let mut text = String::from("metric,value\n");
    for (k, v) in &metrics {
        text.push_str(&format!("{k},{v}\n"));
        println!("{k:<18} {v}");
    }
    fs::write(args.out.join("metrics.csv"), text)?;
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    let out = args
        .out
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| Error::InvalidParameter("no output directory (--out or `out` in the config)".into()))?;
    let quiet = args.quiet;
    let records = run_pipeline_with(&cfg, |r| {
        if quiet {
            return;
        }
        match (&r.error, r.nmi, r.accuracy) {
            (None, Some(n), Some(a)) => eprintln!(
                "{} {} level={} seed={} nmi={n:.4} acc={a:.4} ({:.2}s)",
                r.fingerprint, r.method, r.level, r.seed, r.seconds
            ),
            (err, _, _) => eprintln!(
                "{} {} level={} seed={} failed: {}",
                r.fingerprint,
                r.method,
                r.level,
                r.seed,
                err.as_deref().unwrap_or("no metrics")
            ),
        }
    })?;
    let files = emit_results(&records, &out)?;
    for g in group_records(&records) {
        let r = g.records[0];
        let (n, ns) = g.nmi();
        let (a, as_) = g.accuracy();
        println!(
            "{} {:<4} {} level={:<5} nmi={n:.4}±{ns:.4} acc={a:.4}±{as_:.4} failures={}",
            r.fingerprint,
            r.method,
            r.corruption,
            r.level,
            g.failures()
        );
    }
    println!("wrote {} and {}", files.results.display(), files.summary.display());
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let ds = synth_blobs(args.blobs, args.per_cluster, args.dim, args.separation, args.seed)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_csv(&ds, &args.out)?;
    println!("wrote {} samples to {}", ds.len(), args.out.display());
    Ok(())
}
