//! The `mlm` command-line tool.
//!
//! Subcommands: `degrees`, `fit`, `compare`, `gof`, `sample`, `plotdata`,
//! `tailcheck`. JSON outputs carry the tool name and version, the resolved
//! configuration, the seed and (unless `--deterministic`) a generation time.
//! CSV outputs written to a file get the same metadata in a
//! `<file>.meta.json` sidecar.
//!
//! Exit codes: 0 on success, 2 for input errors, 3 for numerical failures.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::distributions::{DistributionModel, Family, MlmParams};
use crate::error::{Error, Result};
use crate::estimation::{fit_mlm, fit_model, FitOptions, FitResult, Sample};
use crate::gof::{bootstrap_pvalue, compare_models, BootstrapOptions, MIN_EXPECTED};
use crate::graph_io::{
    degree_histogram_from_reader, discretize, load_histogram, DegreeHistogram, DegreeMode, DegreeOptions,
};
use crate::tailprops::{run_all, LimitCheck, TailCheckOptions};

pub const TOOL_NAME: &str = "mlm";
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable holding the default bootstrap thread count.
pub const THREADS_ENV: &str = "MLM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mlm", version, about = "Fit the Modified Lomax distribution to network degree data")]
pub struct Cli {
    /// Omit the generation time so repeated runs produce identical output.
    #[arg(long, global = true)]
    pub deterministic: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a degree histogram (CSV) from an edge list.
    Degrees(DegreesArgs),
    /// Fit one model family to a degree histogram and print JSON.
    Fit(FitArgs),
    /// Fit several families and rank them by KL divergence.
    Compare(CompareArgs),
    /// Parametric bootstrap chi-square goodness of fit.
    Gof(GofArgs),
    /// Draw random values from a parameterized model.
    Sample(SampleArgs),
    /// Observed and predicted degree counts for log-log plots (CSV).
    Plotdata(PlotdataArgs),
    /// Numerically check the extreme-value limits of an MLM parameter set.
    Tailcheck(TailcheckArgs),
}

#[derive(Debug, Args)]
pub struct DegreesArgs {
    /// Edge list: two node ids per line, `#` or `%` starts a comment.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "total")]
    pub mode: DegreeMode,
    /// Count each distinct edge once.
    #[arg(long)]
    pub dedup: bool,
    #[arg(long)]
    pub drop_self_loops: bool,
    /// Treat `u v` and `v u` as the same edge when de-duplicating.
    #[arg(long)]
    pub undirected: bool,
    /// Output CSV; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Degree histogram CSV (`degree,count`).
    pub histogram: PathBuf,
    #[arg(long, default_value = "mlm")]
    pub model: Family,
    /// MLM starting point `alpha,beta,sigma`.
    #[arg(long, default_value = "1,0,1")]
    pub init: String,
    /// Jittered restarts in addition to the starting point.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Seed of the restart jitter.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exit 0 even if the optimizer did not converge.
    #[arg(long)]
    pub allow_nonconverged: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub histogram: PathBuf,
    /// Comma-separated families, or `all`.
    #[arg(long, default_value = "all")]
    pub models: String,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    pub histogram: PathBuf,
    #[arg(long, default_value = "mlm")]
    pub model: Family,
    /// Bootstrap replicates (at least 99).
    #[arg(short = 'B', long = "replicates", default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the original estimate for every replicate instead of refitting.
    #[arg(long)]
    pub no_refit: bool,
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = MIN_EXPECTED)]
    pub min_expected: f64,
    /// Report progress on stderr.
    #[arg(long)]
    pub progress: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value = "mlm")]
    pub model: Family,
    /// Parameters as `name=value` pairs, e.g. `alpha=2,beta=0,sigma=30`.
    #[arg(long)]
    pub params: String,
    #[arg(short = 'n', long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Round to integers (half away from zero, at least 1).
    #[arg(long)]
    pub discrete: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    pub histogram: PathBuf,
    /// Fit JSON files produced by `mlm fit`.
    #[arg(required = true)]
    pub fits: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TailcheckArgs {
    /// MLM parameters `alpha=..,beta=..,sigma=..`.
    #[arg(long)]
    pub params: String,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Scale factor of the regular-variation check.
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    /// Exponential rate of the heavy-tail check.
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    /// Shift of the long-tail check.
    #[arg(long, default_value_t = 1.0)]
    pub y: f64,
    /// Monte Carlo pairs for the subexponential check.
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Failure of a subcommand, with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let meta = Meta {
        deterministic: cli.deterministic,
    };
    match &cli.command {
        Command::Degrees(a) => cmd_degrees(a, &meta, out, err),
        Command::Fit(a) => cmd_fit(a, &meta, out, err),
        Command::Compare(a) => cmd_compare(a, &meta, out, err),
        Command::Gof(a) => cmd_gof(a, &meta, out, err),
        Command::Sample(a) => cmd_sample(a, out),
        Command::Plotdata(a) => cmd_plotdata(a, &meta, out, err),
        Command::Tailcheck(a) => cmd_tailcheck(a, &meta, out),
    }
}

struct Meta {
    deterministic: bool,
}

impl Meta {
    /// Common header fields for every JSON artifact.
    fn header(&self, command: &str, config: Value, seed: Option<u64>) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert(
            "tool".into(),
            json!({ "name": TOOL_NAME, "version": env!("CARGO_PKG_VERSION") }),
        );
        m.insert("command".into(), json!(command));
        m.insert("config".into(), config);
        m.insert("seed".into(), json!(seed));
        if !self.deterministic {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            m.insert("generated_at_unix".into(), json!(secs));
        }
        m
    }

    fn write_sidecar(&self, csv_path: &Path, command: &str, config: Value, seed: Option<u64>, extra: Value) -> CliResult<()> {
        let mut m = self.header(command, config, seed);
        if let Value::Object(e) = extra {
            m.extend(e);
        }
        let mut name = csv_path.as_os_str().to_owned();
        name.push(".meta.json");
        write_json_file(Path::new(&name), &Value::Object(m))
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| {
        Error::File {
            path: path.to_owned(),
            source,
        }
        .into()
    })
}

fn write_json_file(path: &Path, v: &Value) -> CliResult<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(io::Error::other)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes JSON to `path`, or to `out` when no path is given.
fn emit_json(v: &Value, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_json_file(p, v),
        None => {
            serde_json::to_writer_pretty(&mut *out, v).map_err(io::Error::other)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

fn open_histogram(path: &Path) -> CliResult<DegreeHistogram> {
    Ok(load_histogram(path)?)
}

/// Parses `a=1,b=2` into a map.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected name=value, got '{part}'")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("'{v}' is not a number (parameter {k})")))?;
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

fn parse_init(text: &str) -> Result<MlmParams> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("--init expects alpha,beta,sigma (got '{text}')")))?;
    if v.len() != 3 {
        return Err(Error::InvalidInput(format!("--init expects three numbers (got '{text}')")));
    }
    MlmParams::new(v[0], v[1], v[2])
}

fn parse_families(text: &str) -> Result<Vec<Family>> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(Family::ALL.to_vec());
    }
    let mut out = Vec::new();
    for f in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let fam: Family = f.parse()?;
        if !out.contains(&fam) {
            out.push(fam);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("no model families given".into()));
    }
    Ok(out)
}

/// JSON form of a fit (the `fit` subcommand's payload without the header).
pub fn fit_json(fit: &FitResult) -> Value {
    let params: serde_json::Map<String, Value> = fit.model.params().into_iter().map(|(k, v)| (k, json!(v))).collect();
    let covariance = fit.covariance().map(|c| {
        (0..c.nrows())
            .map(|i| c.row(i).iter().copied().collect::<Vec<f64>>())
            .collect::<Vec<_>>()
    });
    let ci95 = fit.intervals.as_ref().map(|ci| {
        ci.iter()
            .map(|c| (c.name.to_string(), json!([c.low, c.high])))
            .collect::<serde_json::Map<_, _>>()
    });
    json!({
        "model": fit.family().name(),
        "params": params,
        "loglik": fit.loglik,
        "loglik_per_obs": fit.loglik_per_obs(),
        "n": fit.n,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "grad_norm": fit.grad_norm,
        "message": fit.message,
        "cv": fit.cv,
        "existence_ok": fit.existence_ok,
        "existence_warning": fit.existence.warning,
        "covariance": covariance,
        "condition_number": fit.inversion.as_ref().map(|i| i.condition_number),
        "pseudo_inverse": fit.inversion.as_ref().map(|i| i.pseudo_inverse),
        "singular_information": fit.inversion.as_ref().map(|i| i.singular),
        "ci95": ci95,
    })
}

/// Reads the `model` and `params` fields of a fit JSON back into a model,
/// together with the recorded sample size.
pub fn model_from_fit_json(v: &Value) -> Result<(DistributionModel, Option<u64>)> {
    let family: Family = v
        .get("model")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidInput("fit JSON lacks a 'model' string".into()))?
        .parse()?;
    let params = v
        .get("params")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInput("fit JSON lacks a 'params' object".into()))?
        .iter()
        .map(|(k, x)| {
            x.as_f64()
                .map(|f| (k.clone(), f))
                .ok_or_else(|| Error::InvalidInput(format!("parameter '{k}' is not a number")))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let model = DistributionModel::from_params(family, &params)?;
    Ok((model, v.get("n").and_then(Value::as_u64)))
}

fn cmd_degrees(a: &DegreesArgs, meta: &Meta, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let file = File::open(&a.input).map_err(|source| Error::File {
        path: a.input.clone(),
        source,
    })?;
    let opts = DegreeOptions {
        mode: a.mode,
        dedup: a.dedup,
        drop_self_loops: a.drop_self_loops,
    };
    let (h, counts) = degree_histogram_from_reader(BufReader::new(file), !a.undirected, &opts)?;
    match &a.output {
        Some(path) => {
            let mut w = create(path)?;
            h.write_csv(&mut w)?;
            w.flush()?;
            let config = json!({
                "input": a.input, "mode": a.mode, "dedup": a.dedup,
                "drop_self_loops": a.drop_self_loops, "undirected": a.undirected,
            });
            let extra = json!({
                "nodes": counts.nodes, "edges": counts.edges, "edges_counted": counts.edges_counted,
                "nodes_with_positive_degree": h.n(), "excluded_zero_degree": h.excluded_zero_degree(),
                "distinct_degrees": h.rows().len(),
            });
            meta.write_sidecar(path, "degrees", config, None, extra)?;
        }
        None => h.write_csv(&mut *out)?,
    }
    writeln!(
        err,
        "nodes: {}  edges: {}  counted edges: {}  excluded zero-degree nodes: {}  distinct degrees: {}",
        counts.nodes,
        counts.edges,
        counts.edges_counted,
        h.excluded_zero_degree(),
        h.rows().len()
    )?;
    Ok(EXIT_OK)
}

fn run_fit(s: &Sample, family: Family, init: &MlmParams, opts: &FitOptions) -> Result<FitResult> {
    match family {
        Family::Mlm => fit_mlm(s, init, opts),
        other => fit_model(s, other, opts),
    }
}

fn cmd_fit(a: &FitArgs, meta: &Meta, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let h = open_histogram(&a.histogram)?;
    let init = parse_init(&a.init)?;
    let s = Sample::from_histogram(&h)?;
    let opts = FitOptions {
        restarts: a.restarts,
        seed: a.seed,
        ..FitOptions::default()
    };
    let fit = run_fit(&s, a.model, &init, &opts)?;
    let config = json!({
        "histogram": a.histogram, "model": a.model.name(), "init": a.init,
        "restarts": a.restarts, "allow_nonconverged": a.allow_nonconverged,
    });
    let mut doc = meta.header("fit", config, Some(a.seed));
    if let Value::Object(body) = fit_json(&fit) {
        doc.extend(body);
    }
    emit_json(&Value::Object(doc), a.output.as_deref(), out)?;
    if let Some(w) = &fit.existence.warning {
        writeln!(err, "warning: {w}")?;
    }
    if !fit.converged && !a.allow_nonconverged {
        writeln!(
            err,
            "error: fit did not converge: {}",
            fit.message.as_deref().unwrap_or("unknown reason")
        )?;
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn fmt_params(p: &BTreeMap<String, f64>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v:.6}")).collect::<Vec<_>>().join(";")
}

fn cmd_compare(a: &CompareArgs, meta: &Meta, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let h = open_histogram(&a.histogram)?;
    let families = parse_families(&a.models)?;
    let opts = FitOptions {
        seed: a.seed,
        ..FitOptions::default()
    };
    let (report, _) = compare_models(&h, &families, &opts)?;
    let ok = report.rows.iter().filter(|r| r.error.is_none()).count();
    for r in report.rows.iter().filter(|r| r.error.is_some() || !r.converged) {
        let why = r.error.clone().unwrap_or_else(|| "did not converge".into());
        writeln!(err, "warning: {}: {}", r.family, why)?;
    }
    let config = json!({ "histogram": a.histogram, "models": families.iter().map(|f| f.name()).collect::<Vec<_>>() });

    let mut buf: Vec<u8> = Vec::new();
    match a.format {
        Format::Json => {
            let mut doc = meta.header("compare", config.clone(), Some(a.seed));
            doc.insert("n".into(), json!(h.n()));
            doc.insert("rows".into(), serde_json::to_value(&report.rows).map_err(io::Error::other)?);
            serde_json::to_writer_pretty(&mut buf, &Value::Object(doc)).map_err(io::Error::other)?;
            writeln!(buf)?;
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            let io = |e: csv::Error| io::Error::other(e);
            w.write_record(["family", "kld", "rmse", "mae", "loglik", "converged", "params", "error"])
                .map_err(io)?;
            for r in &report.rows {
                w.write_record([
                    r.family.name().to_string(),
                    r.kld.map_or(String::new(), |v| v.to_string()),
                    r.rmse.map_or(String::new(), |v| v.to_string()),
                    r.mae.map_or(String::new(), |v| v.to_string()),
                    r.loglik.map_or(String::new(), |v| v.to_string()),
                    r.converged.to_string(),
                    fmt_params(&r.params),
                    r.error.clone().unwrap_or_default(),
                ])
                .map_err(io)?;
            }
            w.flush()?;
        }
        Format::Table => {
            writeln!(
                buf,
                "{:<18} {:>12} {:>14} {:>12} {:>16} {:>9}  params",
                "family", "KLD", "RMSE", "MAE", "loglik", "converged"
            )?;
            for r in &report.rows {
                writeln!(
                    buf,
                    "{:<18} {:>12} {:>14} {:>12} {:>16} {:>9}  {}",
                    r.family.name(),
                    fmt_opt(r.kld),
                    fmt_opt(r.rmse),
                    fmt_opt(r.mae),
                    fmt_opt(r.loglik),
                    r.converged,
                    r.error.clone().unwrap_or_else(|| fmt_params(&r.params)),
                )?;
            }
        }
    }
    match &a.output {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(&buf)?;
            w.flush()?;
            if a.format == Format::Csv {
                meta.write_sidecar(path, "compare", config, Some(a.seed), json!({ "n": h.n() }))?;
            }
        }
        None => out.write_all(&buf)?,
    }
    Ok(if ok > 0 { EXIT_OK } else { EXIT_NUMERICAL })
}

fn cmd_gof(a: &GofArgs, meta: &Meta, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let h = open_histogram(&a.histogram)?;
    if a.replicates < crate::gof::MIN_REPLICATES {
        return Err(Error::InvalidInput(format!(
            "-B must be at least {} (got {})",
            crate::gof::MIN_REPLICATES,
            a.replicates
        ))
        .into());
    }
    let s = Sample::from_histogram(&h)?;
    let fit = run_fit(&s, a.model, &MlmParams::new(1.0, 0.0, 1.0)?, &FitOptions::default())?;
    if !fit.converged {
        return Err(CliError {
            code: EXIT_NUMERICAL,
            message: format!(
                "base fit did not converge: {}",
                fit.message.as_deref().unwrap_or("unknown reason")
            ),
        });
    }
    let opts = BootstrapOptions {
        replicates: a.replicates,
        seed: a.seed,
        refit: !a.no_refit,
        min_expected: a.min_expected,
        threads: a.threads,
    };
    let step = (a.replicates / 20).max(1);
    let total = a.replicates;
    let progress = |k: usize| {
        if k.is_multiple_of(step) || k == total {
            eprint!("\rbootstrap: {k}/{total}");
            if k == total {
                eprintln!();
            }
        }
    };
    let report = bootstrap_pvalue(&h, &fit, &opts, a.progress.then_some(&progress as &(dyn Fn(usize) + Sync)))?;
    let config = json!({
        "histogram": a.histogram, "model": a.model.name(), "replicates": a.replicates,
        "refit": !a.no_refit, "min_expected": a.min_expected, "threads": a.threads,
    });
    let mut doc = meta.header("gof", config, Some(a.seed));
    doc.insert("statistic".into(), json!(report.statistic));
    doc.insert("p_value".into(), json!(report.p_value));
    doc.insert("B".into(), json!(report.replicates));
    doc.insert("exceedances".into(), json!(report.exceedances));
    doc.insert("bins".into(), json!(report.bins));
    doc.insert("refit".into(), json!(report.refit_per_replicate));
    doc.insert("redraws".into(), json!(report.redraws));
    doc.insert("fit".into(), fit_json(&fit));
    emit_json(&Value::Object(doc), a.output.as_deref(), out)?;
    let _ = err;
    Ok(EXIT_OK)
}

fn cmd_sample(a: &SampleArgs, out: &mut dyn Write) -> CliResult<i32> {
    let params = parse_params(&a.params)?;
    let model = DistributionModel::from_params(a.model, &params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let values = model.sample(a.n, &mut rng)?;
    let write_all = |w: &mut dyn Write| -> io::Result<()> {
        for v in &values {
            if a.discrete {
                writeln!(w, "{}", discretize(*v))?;
            } else {
                writeln!(w, "{v}")?;
            }
        }
        w.flush()
    };
    match &a.output {
        Some(path) => write_all(&mut create(path)?)?,
        None => write_all(&mut BufWriter::new(out))?,
    }
    Ok(EXIT_OK)
}

fn cmd_plotdata(a: &PlotdataArgs, meta: &Meta, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let h = open_histogram(&a.histogram)?;
    let mut models = Vec::new();
    for path in &a.fits {
        let file = File::open(path).map_err(|source| Error::File {
            path: path.clone(),
            source,
        })?;
        let v: Value = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let (model, n) = model_from_fit_json(&v)?;
        if let Some(n) = n.filter(|&n| n != h.n()) {
            writeln!(
                err,
                "warning: {} was fitted on n = {n} but the histogram has n = {}",
                path.display(),
                h.n()
            )?;
        }
        models.push(model);
    }
    // Column names are the family names, suffixed when a family repeats.
    let mut headers = vec!["degree".to_string(), "observed_count".to_string()];
    for m in &models {
        let base = m.family().name().to_string();
        let mut name = base.clone();
        let mut i = 2;
        while headers.contains(&name) {
            name = format!("{base}_{i}");
            i += 1;
        }
        headers.push(name);
    }
    let n = h.n() as f64;
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let io = |e: csv::Error| io::Error::other(e);
        w.write_record(&headers).map_err(io)?;
        for &(d, c) in h.rows() {
            let mut rec = vec![d.to_string(), c.to_string()];
            rec.extend(models.iter().map(|m| (n * m.interval_pmf(d)).to_string()));
            w.write_record(&rec).map_err(io)?;
        }
        w.flush()?;
    }
    match &a.output {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(&buf)?;
            w.flush()?;
            let config = json!({ "histogram": a.histogram, "fits": a.fits });
            meta.write_sidecar(path, "plotdata", config, None, json!({ "columns": headers }))?;
        }
        None => out.write_all(&buf)?,
    }
    Ok(EXIT_OK)
}

fn cmd_tailcheck(a: &TailcheckArgs, meta: &Meta, out: &mut dyn Write) -> CliResult<i32> {
    let params = parse_params(&a.params)?;
    let DistributionModel::Mlm(p) = DistributionModel::from_params(Family::Mlm, &params)? else {
        unreachable!("MLM family always yields an MLM model")
    };
    let opts = TailCheckOptions {
        t: a.t,
        lambda: a.lambda,
        y: a.y,
        mc_pairs: a.mc_pairs,
        seed: a.seed,
    };
    let checks = run_all(&p, &opts)?;
    match a.format {
        Format::Json => {
            let config = json!({ "params": params, "t": a.t, "lambda": a.lambda, "y": a.y, "mc_pairs": a.mc_pairs });
            let mut doc = meta.header("tailcheck", config, Some(a.seed));
            doc.insert("checks".into(), serde_json::to_value(&checks).map_err(io::Error::other)?);
            emit_json(&Value::Object(doc), None, out)?;
        }
        Format::Table | Format::Csv => write_check_table(&checks, out)?,
    }
    Ok(EXIT_OK)
}

fn write_check_table(checks: &[LimitCheck], out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<24} {:>14} {:>18} {:>12} {:>10}  verdict",
        "check", "theoretical", "final value", "error", "tolerance"
    )?;
    for c in checks {
        let verdict = if c.inconclusive {
            "inconclusive"
        } else if c.converged {
            "converged"
        } else {
            "not converged"
        };
        writeln!(
            out,
            "{:<24} {:>14.6e} {:>18.10e} {:>12.3e} {:>10.1e}  {}",
            c.name,
            c.theoretical,
            c.last_value(),
            c.final_error,
            c.tolerance,
            verdict
        )?;
    }
    Ok(())
}
