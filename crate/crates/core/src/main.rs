use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use levygof::data::{Column, DataFile, Fixture};
use levygof::distributions::{levy_cdf, sample_levy};
use levygof::estimators::{estimate, EstimatorKind};
use levygof::montecarlo::{
    calibrate, normality_diagnostic, power_against, report, simulate_null, ReplicationPlan,
    DEFAULT_POWER_REPLICATES, DEFAULT_TEST_REPLICATES,
};
use levygof::{
    Alternative, Error, LevyParams, QuantileSplit, RandomStream, Sample, StatisticKind,
    StatisticSpec,
};

/// Scale estimation and goodness-of-fit tests for the one-sided Lévy law.
///
/// Results are written as one JSON object per line; `--table` switches to
/// aligned text.
#[derive(Parser)]
#[command(name = "levygof", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample, one value per line.
    Sample(SampleArgs),
    /// Estimate the scale parameter of a data set.
    Estimate(EstimateArgs),
    /// Test data against the Lévy family with simulated p-values.
    Test(TestArgs),
    /// Simulate null distributions and print two-sided thresholds.
    Calibrate(CalibrateArgs),
    /// Estimate rejection rates under alternative distributions.
    Power(PowerArgs),
    /// Null histogram and normal-fit distance of a statistic.
    Diagnose(DiagnoseArgs),
    /// PP-plot points of data against the MLE-fitted Lévy law.
    Ppplot(PpplotArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Human-readable aligned output instead of JSON lines.
    #[arg(long)]
    table: bool,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Text file with one observation per line (or a CSV with --column).
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// CSV column holding the data: a 1-based position or a header name.
    #[arg(long, requires = "input")]
    column: Option<String>,
    /// Embedded data set: vessels (tested as reciprocals) or rainfall.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct StatArgs {
    /// Statistic: vn, on, tn, cn, ran or deltan.
    #[arg(long, conflicts_with = "all")]
    stat: Option<String>,
    /// The five fixed-location statistics vn, tn, on, deltan, ran.
    #[arg(long)]
    all: bool,
    /// First quantile split "a,b" of the selected statistic.
    #[arg(long)]
    split: Option<String>,
    /// Second quantile split "a,b" (on, cn).
    #[arg(long)]
    split2: Option<String>,
    /// Tuning constant of ran.
    #[arg(long)]
    tuning: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    /// `levy` or an alternative family such as pareto, lognormal, halfnormal.
    #[arg(long, default_value = "levy")]
    dist: String,
    /// Comma-separated family parameters.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Lévy scale.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Lévy location.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// qcm, qcv, mle or cov.
    #[arg(long)]
    method: String,
    /// Quantile split "a,b" for qcm (default 0.02,0.48) or qcv (default 0.0,0.7).
    #[arg(long)]
    split: Option<String>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    stat: StatArgs,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_TEST_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    stat: StatArgs,
    /// Sample size.
    #[arg(long, conflicts_with = "n_grid")]
    n: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05")]
    level: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_POWER_REPLICATES)]
    replicates: usize,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    stat: StatArgs,
    /// Alternative as family:params, e.g. lognormal:0,1; repeatable. Defaults
    /// to the twelve reference alternatives.
    #[arg(long)]
    alt: Vec<String>,
    #[arg(long, conflicts_with = "n_grid")]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    level: Vec<f64>,
    /// Replicates for both the null calibration and each alternative.
    #[arg(long, default_value_t = DEFAULT_POWER_REPLICATES)]
    replicates: usize,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    stat: StatArgs,
    #[arg(long, conflicts_with = "n_grid")]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    replicates: usize,
    #[arg(long, default_value_t = 40)]
    bins: usize,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PpplotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Output(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(Error::Parse { .. } | Error::Io { .. }) | CliError::Output(_) => 3,
            CliError::Lib(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Output(e) => write!(f, "output error: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn parse_arg<T: std::str::FromStr<Err = Error>>(s: &str) -> CliResult<T> {
    s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn open_output(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::Lib(Error::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Collects records and writes them as JSON lines or an aligned table.
struct Emitter {
    table: bool,
    columns: Vec<&'static str>,
    rows: Vec<Map<String, Value>>,
    out: Box<dyn Write>,
}

impl Emitter {
    fn new(output: &OutputArgs, columns: &[&'static str]) -> CliResult<Self> {
        Ok(Self {
            table: output.table,
            columns: columns.to_vec(),
            rows: Vec::new(),
            out: open_output(output.out.as_ref())?,
        })
    }

    fn record(&mut self, value: Value) -> CliResult<()> {
        let Value::Object(map) = value else {
            unreachable!("records are objects")
        };
        if self.table {
            self.rows.push(map);
        } else {
            writeln!(self.out, "{}", Value::Object(map))?;
        }
        Ok(())
    }

    fn note(&mut self, text: &str) -> CliResult<()> {
        if self.table {
            writeln!(self.out, "# {text}")?;
        }
        Ok(())
    }

    fn finish(mut self) -> CliResult<()> {
        if self.table && !self.rows.is_empty() {
            let cells: Vec<Vec<String>> = self
                .rows
                .iter()
                .map(|r| self.columns.iter().map(|c| cell(r.get(*c))).collect())
                .collect();
            let widths: Vec<usize> = self
                .columns
                .iter()
                .enumerate()
                .map(|(k, c)| cells.iter().map(|r| r[k].len()).fold(c.len(), usize::max))
                .collect();
            let line = |fields: Vec<String>| {
                fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, w)| format!("{f:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(
                self.out,
                "{}",
                line(self.columns.iter().map(|c| c.to_string()).collect())
            )?;
            for row in cells {
                writeln!(self.out, "{}", line(row))?;
            }
        }
        self.out.flush()?;
        Ok(())
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => "-".into(),
        Some(Value::Number(n)) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => format_float(x),
            _ => n.to_string(),
        },
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn format_float(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:.4e}")
    } else {
        format!("{x:.4}")
    }
}

fn plan(mc: &McArgs, replicates: usize) -> CliResult<ReplicationPlan> {
    let workers = mc
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    Ok(ReplicationPlan::new(mc.seed, replicates)?.with_workers(workers))
}

fn load_sample(input: &InputArgs) -> CliResult<(String, Sample)> {
    match (&input.input, &input.fixture) {
        (Some(path), None) => {
            let column = input
                .column
                .as_deref()
                .map(parse_arg::<Column>)
                .transpose()?;
            let file = DataFile::read(path, column.as_ref())?;
            Ok((path.display().to_string(), file.sample()?))
        }
        (None, Some(name)) => {
            let fixture: Fixture = parse_arg(name)?;
            Ok((fixture.name().to_string(), fixture.case_study_sample()))
        }
        _ => usage("exactly one of --input or --fixture is required"),
    }
}

fn statistic_specs(args: &StatArgs) -> CliResult<Vec<StatisticSpec>> {
    let split = args
        .split
        .as_deref()
        .map(parse_arg::<QuantileSplit>)
        .transpose()?;
    let split2 = args
        .split2
        .as_deref()
        .map(parse_arg::<QuantileSplit>)
        .transpose()?;
    let kinds = match (&args.stat, args.all) {
        (Some(s), false) => vec![parse_arg::<StatisticKind>(s)?],
        (None, true) => {
            if split.is_some() || split2.is_some() || args.tuning.is_some() {
                return usage("--split, --split2 and --tuning need a single --stat");
            }
            StatisticKind::FIXED_LOCATION.to_vec()
        }
        _ => return usage("exactly one of --stat or --all is required"),
    };
    kinds
        .into_iter()
        .map(|kind| {
            let spec = StatisticSpec::default_for(kind).with_splits(split, split2);
            match (spec, args.tuning) {
                (StatisticSpec::Ran { .. }, Some(a)) => Ok(StatisticSpec::Ran { a }),
                (_, Some(_)) => usage("--tuning applies to ran only"),
                (spec, None) => Ok(spec),
            }
        })
        .collect()
}

fn sizes(n: Option<usize>, grid: &[usize]) -> CliResult<Vec<usize>> {
    match (n, grid.is_empty()) {
        (Some(n), true) => Ok(vec![n]),
        (None, false) => Ok(grid.to_vec()),
        _ => usage("exactly one of --n or --n-grid is required"),
    }
}

fn cmd_sample(args: &SampleArgs) -> CliResult<()> {
    let mut stream = RandomStream::new(args.seed, 0);
    let values = if args.dist.eq_ignore_ascii_case("levy") {
        if args.params.is_some() {
            return usage("levy takes --c and --mu, not --params");
        }
        let p = LevyParams::new(args.mu, args.c).map_err(|e| CliError::Usage(e.to_string()))?;
        sample_levy(&p, args.n, &mut stream)?
    } else {
        let spec = format!("{}:{}", args.dist, args.params.as_deref().unwrap_or(""));
        let alt: Alternative = parse_arg(&spec)?;
        alt.sample(args.n, &mut stream)?
    };
    let mut out = open_output(args.out.as_ref())?;
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs) -> CliResult<()> {
    let method: EstimatorKind = parse_arg(&args.method)?;
    let split = match (method, args.split.as_deref()) {
        (EstimatorKind::Qcm | EstimatorKind::Qcv, Some(s)) => Some(parse_arg::<QuantileSplit>(s)?),
        (EstimatorKind::Qcm, None) => Some(QuantileSplit::new(0.02, 0.48)?),
        (EstimatorKind::Qcv, None) => Some(QuantileSplit::new(0.0, 0.7)?),
        (_, Some(_)) => return usage("--split applies to qcm and qcv only"),
        (_, None) => None,
    };
    let (source, sample) = load_sample(&args.input)?;
    let est = estimate(method, &sample, split.as_ref())?;
    let mut em = Emitter::new(
        &args.output,
        &["source", "n", "method", "split", "estimate"],
    )?;
    em.record(json!({
        "source": source,
        "n": sample.len(),
        "method": est.method,
        "split": est.split.map(|s| s.to_string()),
        "estimate": est.value,
    }))?;
    em.finish()
}

fn cmd_test(args: &TestArgs) -> CliResult<()> {
    let specs = statistic_specs(&args.stat)?;
    let (source, sample) = load_sample(&args.input)?;
    let plan = plan(&args.mc, args.replicates)?;
    if !(args.level > 0.0 && args.level < 1.0) {
        return usage("--level must lie in (0, 1)");
    }
    let mut em = Emitter::new(
        &args.output,
        &[
            "source",
            "statistic",
            "n",
            "value",
            "p_value",
            "bound",
            "lower",
            "upper",
            "reject",
            "error",
        ],
    )?;
    if Fixture::Vessels.name() == source {
        em.note("vessels: tested on reciprocal failure times")?;
    }
    let mut last_error = None;
    let mut successes = 0;
    for spec in &specs {
        let outcome = spec
            .prepare()
            .and_then(|st| st.evaluate(&sample))
            .and_then(|value| {
                let nd = simulate_null(spec, sample.len(), &plan)?;
                report(&nd, value, args.level)
            });
        let mut record = Map::new();
        record.insert("source".into(), json!(source));
        match outcome {
            Ok(r) => {
                successes += 1;
                let Value::Object(fields) = serde_json::to_value(&r).expect("serializable") else {
                    unreachable!()
                };
                record.extend(fields);
                record.insert(
                    "bound".into(),
                    json!(if r.p_value_upper_bound { "<" } else { "=" }),
                );
            }
            Err(e) => {
                record.insert("statistic".into(), json!(spec.kind()));
                record.insert(
                    "spec".into(),
                    serde_json::to_value(spec).expect("serializable"),
                );
                record.insert("n".into(), json!(sample.len()));
                record.insert("error".into(), json!(e.to_string()));
                last_error = Some(e);
            }
        }
        em.record(Value::Object(record))?;
    }
    em.finish()?;
    match (successes, last_error) {
        (0, Some(e)) => Err(e.into()),
        _ => Ok(()),
    }
}

fn cmd_calibrate(args: &CalibrateArgs) -> CliResult<()> {
    let specs = statistic_specs(&args.stat)?;
    let ns = sizes(args.n, &args.n_grid)?;
    let plan = plan(&args.mc, args.replicates)?;
    let mut em = Emitter::new(
        &args.output,
        &[
            "statistic",
            "n",
            "level",
            "lower",
            "median",
            "upper",
            "replicates",
            "seed",
        ],
    )?;
    for spec in &specs {
        for &n in &ns {
            let nd = simulate_null(spec, n, &plan)?;
            for &level in &args.level {
                let (lower, upper) = calibrate(&nd, level)?;
                em.record(json!({
                    "statistic": spec.kind(),
                    "spec": spec,
                    "n": n,
                    "level": level,
                    "lower": lower,
                    "median": nd.quantile(0.5),
                    "upper": upper,
                    "replicates": nd.replicates(),
                    "seed": plan.master_seed,
                }))?;
            }
        }
    }
    em.finish()
}

fn cmd_power(args: &PowerArgs) -> CliResult<()> {
    let specs = statistic_specs(&args.stat)?;
    let ns = sizes(args.n, &args.n_grid)?;
    let alts: Vec<Alternative> = if args.alt.is_empty() {
        Alternative::reference_set()
    } else {
        args.alt
            .iter()
            .map(|a| parse_arg(a))
            .collect::<CliResult<_>>()?
    };
    let plan = plan(&args.mc, args.replicates)?;
    let mut em = Emitter::new(
        &args.output,
        &[
            "statistic",
            "alternative",
            "n",
            "level",
            "power",
            "standard_error",
            "failures",
        ],
    )?;
    for spec in &specs {
        for &n in &ns {
            let nd = simulate_null(spec, n, &plan)?;
            for &level in &args.level {
                for alt in &alts {
                    let cell = power_against(&nd, alt, level, &plan)?;
                    let mut value = serde_json::to_value(&cell).expect("serializable");
                    value["alternative_label"] = json!(alt.to_string());
                    if args.output.table {
                        value["alternative"] = json!(alt.to_string());
                    }
                    em.record(value)?;
                }
            }
        }
    }
    em.finish()
}

fn cmd_diagnose(args: &DiagnoseArgs) -> CliResult<()> {
    let specs = statistic_specs(&args.stat)?;
    let ns = sizes(args.n, &args.n_grid)?;
    let plan = plan(&args.mc, args.replicates)?;
    let mut em = Emitter::new(
        &args.output,
        &[
            "statistic",
            "n",
            "replicates",
            "mean",
            "std_dev",
            "ks_distance",
        ],
    )?;
    for spec in &specs {
        for &n in &ns {
            let d = normality_diagnostic(spec, n, &plan, args.bins)?;
            if args.output.table {
                let bars: Vec<String> = d
                    .counts
                    .iter()
                    .zip(d.bin_edges.windows(2))
                    .map(|(c, e)| format!("[{}, {}) {c}", format_float(e[0]), format_float(e[1])))
                    .collect();
                em.note(&format!(
                    "{} n={n} histogram: {}",
                    spec.kind(),
                    bars.join("; ")
                ))?;
            }
            em.record(serde_json::to_value(&d).expect("serializable"))?;
        }
    }
    em.finish()
}

fn cmd_ppplot(args: &PpplotArgs) -> CliResult<()> {
    let (source, sample) = load_sample(&args.input)?;
    let c = estimate(EstimatorKind::Mle, &sample, None)?.value;
    let fitted = LevyParams::new(0.0, c)?;
    let n = sample.len();
    let points: Vec<(f64, f64)> = sample
        .sorted()
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n as f64, levy_cdf(x, &fitted)))
        .collect();
    let max_deviation = points
        .iter()
        .map(|(e, t)| (e - t).abs())
        .fold(0.0, f64::max);
    let mut em = Emitter::new(&args.output, &["empirical", "theoretical"])?;
    if args.output.table {
        em.note(&format!(
            "{source}: fitted by mle, c = {c}, n = {n}, max deviation = {max_deviation:.4}"
        ))?;
    } else {
        em.record(json!({
            "source": source,
            "fit": "mle",
            "c": c,
            "n": n,
            "max_deviation": max_deviation,
        }))?;
    }
    for (empirical, theoretical) in points {
        em.record(json!({ "empirical": empirical, "theoretical": theoretical }))?;
    }
    em.finish()
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Test(a) => cmd_test(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Power(a) => cmd_power(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Ppplot(a) => cmd_ppplot(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("levygof: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
