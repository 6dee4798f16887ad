use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::sweep::ResultRecord;
use crate::error::{Error, Result};
use crate::eval::CorruptionKind;
use crate::model::Dataset;

fn parse_number(field: &str, line: u64, column: usize) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse { line, message: format!("column {}: '{field}' is not a finite number", column + 1) }),
    }
}

/// Reads a comma-separated dataset.
///
/// A first row that is not entirely numeric is a header. With a header, a
/// last column named `label` holds class labels (any strings) and a first
/// column named `id` holds sample identifiers.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let mut records = reader.records();
    let Some(first) = records.next() else { return Err(Error::EmptyDataset) };
    let first = first?;
    let header = first.iter().any(|f| f.parse::<f64>().is_err());
    let width = first.len();
    let (has_id, has_label) = if header {
        let id = first.get(0).is_some_and(|f| f.eq_ignore_ascii_case("id"));
        let label = width > usize::from(id) && first.get(width - 1).is_some_and(|f| f.eq_ignore_ascii_case("label"));
        (id, label)
    } else {
        (false, false)
    };
    let feature_cols = width - usize::from(has_id) - usize::from(has_label);
    if feature_cols == 0 {
        return Err(Error::Parse { line: 1, message: "no feature columns".into() });
    }

    let mut features = Vec::new();
    let mut ids = Vec::new();
    let mut raw_labels = Vec::new();
    let data_rows = if header { None } else { Some(Ok(first)) };
    for record in data_rows.into_iter().chain(records) {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::Parse { line, message: format!("expected {width} fields, found {}", record.len()) });
        }
        let mut fields = record.iter().enumerate();
        if has_id {
            ids.push(fields.next().map(|(_, f)| f.to_string()).unwrap_or_default());
        }
        for (c, f) in fields.by_ref().take(feature_cols) {
            features.push(parse_number(f, line, c)?);
        }
        if has_label {
            raw_labels.push(fields.next().map(|(_, f)| f.to_string()).unwrap_or_default());
        }
    }
    let n = features.len() / feature_cols;
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let (labels, names) = if has_label {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let labels = raw_labels
            .into_iter()
            .map(|l| {
                *index.entry(l.clone()).or_insert_with(|| {
                    names.push(l);
                    names.len() - 1
                })
            })
            .collect();
        (Some(labels), Some(names))
    } else {
        (None, None)
    };
    let mut ds = Dataset::from_flat(n, feature_cols, features, labels)?;
    if let Some(names) = names {
        ds = ds.with_label_names(names)?;
    }
    if has_id {
        ds = ds.with_ids(ids)?;
    }
    Ok(ds)
}

/// Writes a dataset in the format read by [`load_csv`].
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<String> = Vec::new();
    if ds.ids().is_some() {
        header.push("id".into());
    }
    header.extend((0..ds.dim()).map(|c| format!("x{c}")));
    if ds.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for i in 0..ds.len() {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        if let Some(ids) = ds.ids() {
            row.push(ids[i].clone());
        }
        row.extend(ds.row(i).iter().map(|v| v.to_string()));
        if let Some(labels) = ds.labels() {
            let l = labels[i];
            row.push(ds.label_names().map_or_else(|| l.to_string(), |names| names[l].clone()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `kappa` unit-variance isotropic Gaussian clusters of `per_cluster` points.
///
/// Centers sit at `(s/√2)·e_c` when `kappa ≤ dim`, so every pair is `s`
/// apart; otherwise they are spaced `s` apart along the first axis.
pub fn synth_blobs(kappa: usize, per_cluster: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if kappa == 0 || per_cluster == 0 || dim == 0 {
        return Err(Error::InvalidParameter("blob counts and dimension must be positive".into()));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(Error::InvalidParameter(format!("separation must be finite and non-negative, got {separation}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = kappa * per_cluster;
    let mut features = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for c in 0..kappa {
        let mut center = vec![0.0; dim];
        if kappa <= dim {
            center[c] = separation / std::f64::consts::SQRT_2;
        } else {
            center[0] = separation * c as f64;
        }
        for _ in 0..per_cluster {
            for &x in &center {
                let g: f64 = StandardNormal.sample(&mut rng);
                features.push(x + g);
            }
            labels.push(c);
        }
    }
    Dataset::from_flat(n, dim, features, Some(labels))
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

const RESULT_HEADER: [&str; 18] = [
    "fingerprint",
    "method",
    "criterion",
    "alpha",
    "beta",
    "k",
    "communities",
    "sigma",
    "corruption",
    "level",
    "seed",
    "nmi",
    "accuracy",
    "rho",
    "solver_iterations",
    "refine_iterations",
    "converged",
    "error",
];

const TIMING_HEADER: [&str; 5] = ["fingerprint", "corruption", "level", "seed", "seconds"];

const SUMMARY_HEADER: [&str; 17] = [
    "fingerprint",
    "method",
    "criterion",
    "alpha",
    "beta",
    "k",
    "communities",
    "corruption",
    "level",
    "runs",
    "failures",
    "nmi_mean",
    "nmi_std",
    "accuracy_mean",
    "accuracy_std",
    "rho_mean",
    "rho_std",
];

/// Mean and sample standard deviation; `(NaN, NaN)` for no values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Records sharing a configuration and corruption level.
#[derive(Debug, Clone)]
pub struct Group<'a> {
    pub records: Vec<&'a ResultRecord>,
}

impl Group<'_> {
    fn head(&self) -> &ResultRecord {
        self.records[0]
    }

    fn values(&self, f: impl Fn(&ResultRecord) -> Option<f64>) -> Vec<f64> {
        self.records.iter().filter_map(|r| f(r)).collect()
    }

    pub fn nmi(&self) -> (f64, f64) {
        mean_std(&self.values(|r| r.nmi))
    }

    pub fn accuracy(&self) -> (f64, f64) {
        mean_std(&self.values(|r| r.accuracy))
    }

    pub fn rho(&self) -> (f64, f64) {
        mean_std(&self.values(|r| r.rho))
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Groups by (fingerprint, corruption, level) in order of first appearance.
pub fn group_records(records: &[ResultRecord]) -> Vec<Group<'_>> {
    let mut groups: Vec<Group<'_>> = Vec::new();
    let mut index: HashMap<(String, CorruptionKind, u64), usize> = HashMap::new();
    for r in records {
        let key = (r.fingerprint.clone(), r.corruption, r.level.to_bits());
        match index.get(&key) {
            Some(&g) => groups[g].records.push(r),
            None => {
                index.insert(key, groups.len());
                groups.push(Group { records: vec![r] });
            }
        }
    }
    groups
}

fn write_lf(path: &Path, f: impl FnOnce(&mut csv::Writer<fs::File>) -> Result<()>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Paths written by [`emit_results`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedFiles {
    pub results: PathBuf,
    pub summary: PathBuf,
    pub timings: PathBuf,
    pub series: Vec<PathBuf>,
}

/// Writes `results.csv`, `summary.csv`, `timings.csv` and one
/// `series/<method>_<fingerprint>.csv` per configuration (metrics by level).
///
/// Wall-clock times live only in `timings.csv`, so the other files are
/// byte-identical across reruns of the same configuration.
pub fn emit_results(records: &[ResultRecord], out_dir: impl AsRef<Path>) -> Result<EmittedFiles> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no records to emit".into()));
    }
    let out = out_dir.as_ref();
    fs::create_dir_all(out.join("series"))?;
    let results = out.join("results.csv");
    write_lf(&results, |w| {
        w.write_record(RESULT_HEADER)?;
        for r in records {
            w.write_record([
                r.fingerprint.clone(),
                r.method.to_string(),
                r.criterion.to_string(),
                fmt_f(r.alpha),
                fmt_f(r.beta),
                r.k.to_string(),
                r.communities.to_string(),
                fmt_opt(r.sigma),
                r.corruption.to_string(),
                fmt_f(r.level),
                r.seed.to_string(),
                fmt_opt(r.nmi),
                fmt_opt(r.accuracy),
                fmt_opt(r.rho),
                r.solver_iterations.to_string(),
                r.refine_iterations.to_string(),
                r.converged.to_string(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        Ok(())
    })?;
    let timings = out.join("timings.csv");
    write_lf(&timings, |w| {
        w.write_record(TIMING_HEADER)?;
        for r in records {
            w.write_record([
                r.fingerprint.clone(),
                r.corruption.to_string(),
                fmt_f(r.level),
                r.seed.to_string(),
                fmt_f(r.seconds),
            ])?;
        }
        Ok(())
    })?;

    let groups = group_records(records);
    let summary = out.join("summary.csv");
    write_lf(&summary, |w| {
        w.write_record(SUMMARY_HEADER)?;
        for g in &groups {
            let h = g.head();
            let (nm, ns) = g.nmi();
            let (am, asd) = g.accuracy();
            let (rm, rs) = g.rho();
            w.write_record([
                h.fingerprint.clone(),
                h.method.to_string(),
                h.criterion.to_string(),
                fmt_f(h.alpha),
                fmt_f(h.beta),
                h.k.to_string(),
                h.communities.to_string(),
                h.corruption.to_string(),
                fmt_f(h.level),
                g.records.len().to_string(),
                g.failures().to_string(),
                fmt_f(nm),
                fmt_f(ns),
                fmt_f(am),
                fmt_f(asd),
                fmt_f(rm),
                fmt_f(rs),
            ])?;
        }
        Ok(())
    })?;

    let mut series: Vec<PathBuf> = Vec::new();
    let mut by_config: Vec<(String, Vec<&Group<'_>>)> = Vec::new();
    for g in &groups {
        let name = format!("{}_{}", g.head().method, g.head().fingerprint);
        match by_config.iter_mut().find(|(n, _)| *n == name) {
            Some((_, gs)) => gs.push(g),
            None => by_config.push((name, vec![g])),
        }
    }
    for (name, gs) in by_config {
        let path = out.join("series").join(format!("{name}.csv"));
        write_lf(&path, |w| {
            w.write_record(["corruption", "level", "runs", "nmi_mean", "nmi_std", "accuracy_mean", "accuracy_std"])?;
            for g in gs {
                let (nm, ns) = g.nmi();
                let (am, asd) = g.accuracy();
                w.write_record([
                    g.head().corruption.to_string(),
                    fmt_f(g.head().level),
                    g.records.len().to_string(),
                    fmt_f(nm),
                    fmt_f(ns),
                    fmt_f(am),
                    fmt_f(asd),
                ])?;
            }
            Ok(())
        })?;
        series.push(path);
    }
    Ok(EmittedFiles { results, summary, timings, series })
}

fn field(rec: &csv::StringRecord, i: usize, line: u64) -> Result<&str> {
    rec.get(i).ok_or_else(|| Error::Parse { line, message: format!("missing field {}", i + 1) })
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let s = field(rec, i, line)?;
    s.parse().map_err(|_| Error::Parse { line, message: format!("bad value '{s}' in column {}", i + 1) })
}

fn parse_opt(rec: &csv::StringRecord, i: usize, line: u64) -> Result<Option<f64>> {
    if field(rec, i, line)?.is_empty() {
        Ok(None)
    } else {
        parse_field(rec, i, line).map(Some)
    }
}

/// Reads back `results.csv` (and `timings.csv` when present).
pub fn read_results(dir: impl AsRef<Path>) -> Result<Vec<ResultRecord>> {
    let dir = dir.as_ref();
    let mut reader = csv::Reader::from_path(dir.join("results.csv"))?;
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let method = field(&rec, 1, line)?.parse()?;
        let criterion = field(&rec, 2, line)?.parse()?;
        let corruption = field(&rec, 8, line)?.parse()?;
        let error = field(&rec, 17, line)?;
        records.push(ResultRecord {
            fingerprint: field(&rec, 0, line)?.to_string(),
            method,
            criterion,
            alpha: parse_field(&rec, 3, line)?,
            beta: parse_field(&rec, 4, line)?,
            k: parse_field(&rec, 5, line)?,
            communities: parse_field(&rec, 6, line)?,
            sigma: parse_opt(&rec, 7, line)?,
            corruption,
            level: parse_field(&rec, 9, line)?,
            seed: parse_field(&rec, 10, line)?,
            nmi: parse_opt(&rec, 11, line)?,
            accuracy: parse_opt(&rec, 12, line)?,
            rho: parse_opt(&rec, 13, line)?,
            solver_iterations: parse_field(&rec, 14, line)?,
            refine_iterations: parse_field(&rec, 15, line)?,
            converged: parse_field(&rec, 16, line)?,
            error: (!error.is_empty()).then(|| error.to_string()),
            seconds: 0.0,
        });
    }
    let timings = dir.join("timings.csv");
    if timings.exists() {
        let mut reader = csv::Reader::from_path(timings)?;
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let Some(r) = records.get_mut(i) else {
                return Err(Error::Parse { line, message: "more timings than results".into() });
            };
            if field(&rec, 0, line)? != r.fingerprint || parse_field::<u64>(&rec, 3, line)? != r.seed {
                return Err(Error::Parse { line, message: "timings do not line up with results".into() });
            }
            r.seconds = parse_field(&rec, 4, line)?;
        }
    }
    Ok(records)
}

/// Writes one `index,label` row per sample (ids replace indices when present).
pub fn write_assignments(ds: &Dataset, labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let mut f = fs::File::create(path.as_ref())?;
    writeln!(f, "sample,cluster")?;
    for (i, l) in labels.iter().enumerate() {
        match ds.ids() {
            Some(ids) => writeln!(f, "{},{l}", ids[i])?,
            None => writeln!(f, "{i},{l}")?,
        }
    }
    Ok(())
}
