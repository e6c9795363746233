//! `logistic-horizon` command line.
//!
//! [`run`] takes the argument vector and output streams explicitly so the
//! binary and the integration tests drive exactly the same code. Exit codes:
//! 0 success, 1 domain or parse failure, 2 usage error.

pub mod csvio;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use logistic_horizon::{
    benchmark_estimators, characteristic_level, estimate_scd, estimate_sld, eulerian_row,
    find_characteristic_point, fit_logistic_nlls, generate, higher_order_estimate, nlls_estimate,
    poly_roots, polyfit_estimate, second_diff, BenchConfig, ConstantMode, DiffKind, Error, Fixture,
    GenSpec, LogisticParams, Method, SaturationEstimate, SelectionPolicy, SeriesKind, TimeSeries,
};

use crate::format::{rounded, sig};

#[derive(Debug, Parser)]
#[command(
    name = "logistic-horizon",
    version,
    about = "Saturation-level forecasts for logistic-trend time series"
)]
struct Cli {
    /// Significant digits for numeric output.
    #[arg(long, global = true, env = "LOGISTIC_HORIZON_DIGITS", default_value_t = 10,
          value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print rows 0..=N of the Eulerian triangle.
    Eulerian {
        #[arg(long)]
        n: usize,
    },
    /// Print the roots of P_N and the characteristic levels of orders 2..N-1.
    Roots {
        #[arg(long)]
        order: usize,
    },
    /// Print the second-difference table and the detected characteristic point.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = DiffArg::Scd)]
        diff: DiffArg,
        #[arg(long, value_enum, default_value_t = PolicyArg::FirstLocalMax)]
        policy: PolicyArg,
    },
    /// Estimate the saturation level.
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        /// scd, sld, polyfit, nlls, order-n (with --n) or order-<N>.
        #[arg(long, default_value = "scd")]
        method: String,
        /// Derivative order for --method order-n.
        #[arg(long)]
        n: Option<usize>,
        /// Polynomial degree for --method polyfit.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = ConstantArg::Exact)]
        constant: ConstantArg,
        #[arg(long, value_enum, default_value_t = PolicyArg::FirstLocalMax)]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Least-squares logistic fit; prints u_max, a, c as JSON.
    Fit {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Emit a sampled logistic series as CSV.
    Simulate {
        #[arg(long)]
        umax: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t_start: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every estimator over generated series described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = BenchFormat::Csv)]
        format: BenchFormat,
    },
    /// List the embedded data sets, or print one as CSV.
    Fixtures {
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
struct InputSource {
    /// Two-column label,value CSV file.
    csv: Option<PathBuf>,
    /// Embedded data set instead of a file.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Debug, Args)]
struct InputArgs {
    #[command(flatten)]
    source: InputSource,
    /// How to interpret CSV values.
    #[arg(long, value_enum, default_value_t = KindArg::Raw)]
    kind: KindArg,
    /// Prefix-sum the values before analysis.
    #[arg(long)]
    cumulate: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Raw,
    Cumulative,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiffArg {
    Scd,
    Sld,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    FirstLocalMax,
    LastLocalMaxBeforeDecline,
    GlobalMax,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstantArg {
    Exact,
    Paper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchFormat {
    Csv,
    Json,
}

impl From<PolicyArg> for SelectionPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::FirstLocalMax => SelectionPolicy::FirstLocalMax,
            PolicyArg::LastLocalMaxBeforeDecline => SelectionPolicy::LastLocalMaxBeforeDecline,
            PolicyArg::GlobalMax => SelectionPolicy::GlobalMax,
        }
    }
}

impl From<ConstantArg> for ConstantMode {
    fn from(c: ConstantArg) -> Self {
        match c {
            ConstantArg::Exact => ConstantMode::Exact,
            ConstantArg::Paper => ConstantMode::PaperRounded,
        }
    }
}

impl From<DiffArg> for DiffKind {
    fn from(d: DiffArg) -> Self {
        match d {
            DiffArg::Scd => DiffKind::Scd,
            DiffArg::Sld => DiffKind::Sld,
        }
    }
}

/// Parses `args` (including the program name), runs the command, and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    let digits = usize::from(cli.digits);
    match cli.command {
        Command::Eulerian { n } => {
            for i in 0..=n {
                let row = eulerian_row(i)?;
                let cells: Vec<String> = row.iter().map(u128::to_string).collect();
                writeln!(out, "{}", cells.join("\t"))?;
            }
        }
        Command::Roots { order } => {
            if order < 2 {
                bail!("polynomial order must be at least 2, got {order}");
            }
            let n = order - 1;
            writeln!(out, "# roots of P_{order}")?;
            for r in poly_roots(n)? {
                writeln!(out, "{}", sig(r, digits))?;
            }
            if n >= 2 {
                writeln!(out, "# characteristic levels")?;
                for k in 2..=n {
                    writeln!(out, "{k}\t{}", sig(characteristic_level(k)?, digits))?;
                }
            }
        }
        Command::Analyze {
            input,
            diff,
            policy,
        } => {
            let ts = load_series(&input)?;
            analyze(&ts, diff.into(), policy.into(), digits, out)?;
        }
        Command::Estimate {
            input,
            method,
            n,
            degree,
            constant,
            policy,
            format,
        } => {
            let ts = load_series(&input)?;
            let method = parse_method(&method, n)?;
            let est = run_estimate(&ts, method, degree, constant.into(), policy.into())?;
            let report = EstimateReport::new(&ts, &est, digits);
            match format {
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut *out, &report)?;
                    writeln!(out)?;
                }
                OutputFormat::Text => report.write_text(out)?,
            }
        }
        Command::Fit { input } => {
            let ts = load_series(&input)?;
            let fit = fit_logistic_nlls(&ts)?;
            let mut obj = Map::new();
            obj.insert("u_max".into(), json_num(fit.params.u_max()));
            obj.insert("a".into(), json_num(fit.params.a()));
            obj.insert("c".into(), json_num(fit.params.c()));
            obj.insert("rmse".into(), json_num(fit.rmse));
            obj.insert("converged".into(), Value::Bool(fit.converged));
            serde_json::to_writer_pretty(&mut *out, &Value::Object(obj))?;
            writeln!(out)?;
        }
        Command::Simulate {
            umax,
            a,
            c,
            n,
            step,
            t_start,
            noise,
            seed,
        } => {
            let params = LogisticParams::new(umax, a, c)?;
            let spec = GenSpec::new(params, n, t_start, step, noise, seed)?;
            csvio::write_csv(&generate(&spec), out)?;
        }
        Command::Bench { config, format } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg: BenchConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            let report = benchmark_estimators(&cfg.specs, &cfg.truncations);
            match format {
                BenchFormat::Json => {
                    serde_json::to_writer_pretty(&mut *out, &report)?;
                    writeln!(out)?;
                }
                BenchFormat::Csv => {
                    let mut wtr = csv::Writer::from_writer(&mut *out);
                    wtr.write_record([
                        "spec_index",
                        "truncation",
                        "method",
                        "u_max_true",
                        "u_max_hat",
                        "relative_error",
                        "error",
                    ])?;
                    let opt = |v: Option<f64>| v.map(|x| sig(x, digits)).unwrap_or_default();
                    for row in &report.rows {
                        wtr.write_record([
                            row.spec_index.to_string(),
                            row.truncation.to_string(),
                            row.method.clone(),
                            sig(row.u_max_true, digits),
                            opt(row.u_max_hat),
                            opt(row.relative_error),
                            row.error.clone().unwrap_or_default(),
                        ])?;
                    }
                    wtr.flush()?;
                }
            }
        }
        Command::Fixtures { name } => match name {
            Some(name) => csvio::write_csv(&Fixture::by_name(&name)?.series, out)?,
            None => {
                for f in Fixture::all() {
                    let kind = match f.series.kind() {
                        SeriesKind::Raw => "raw",
                        SeriesKind::Cumulative => "cumulative",
                    };
                    writeln!(out, "{}\t{}\t{}", f.name, f.series.len(), kind)?;
                }
            }
        },
    }
    Ok(())
}

fn load_series(input: &InputArgs) -> anyhow::Result<TimeSeries> {
    let ts = match (&input.source.csv, &input.source.fixture) {
        (Some(path), None) => {
            let kind = match input.kind {
                KindArg::Raw => SeriesKind::Raw,
                KindArg::Cumulative => SeriesKind::Cumulative,
            };
            csvio::read_csv(path, kind)?
        }
        (None, Some(name)) => Fixture::by_name(name)?.series,
        _ => bail!("give either a CSV path or --fixture"),
    };
    Ok(if input.cumulate { ts.cumulate()? } else { ts })
}

fn parse_method(method: &str, n: Option<usize>) -> anyhow::Result<Method> {
    if method == "order-n" {
        let n = n.ok_or_else(|| anyhow!("--method order-n needs --n"))?;
        return Ok(Method::HigherOrder(n));
    }
    Ok(method.parse::<Method>()?)
}

fn run_estimate(
    ts: &TimeSeries,
    method: Method,
    degree: usize,
    mode: ConstantMode,
    policy: SelectionPolicy,
) -> Result<SaturationEstimate, Error> {
    match method {
        Method::Scd => estimate_scd(ts, mode, policy),
        Method::Sld => estimate_sld(ts, mode, policy),
        Method::Polyfit => polyfit_estimate(ts, degree, mode),
        Method::Nlls => nlls_estimate(ts),
        Method::HigherOrder(n) => higher_order_estimate(ts, n, mode, policy),
    }
}

fn analyze(
    ts: &TimeSeries,
    kind: DiffKind,
    policy: SelectionPolicy,
    digits: usize,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let ds = second_diff(ts, kind)?;
    writeln!(out, "label\tt\tvalue\t{kind}")?;
    for (t, (label, value)) in ts.labels().iter().zip(ts.values()).enumerate() {
        let cell = ds.get(t).map(|d| sig(d, digits)).unwrap_or_default();
        writeln!(out, "{label}\t{t}\t{}\t{cell}", sig(*value, digits))?;
    }
    match find_characteristic_point(&ds, policy) {
        Ok(p) => {
            writeln!(
                out,
                "characteristic point ({policy}): t={} label={} value={} {kind}={}",
                p.index,
                p.label,
                sig(p.series_value, digits),
                sig(p.diff_value, digits)
            )?;
            if !p.ambiguity.is_empty() {
                let rivals: Vec<String> = p
                    .ambiguity
                    .iter()
                    .map(|r| format!("{}({})", r.label, sig(r.diff_value, digits)))
                    .collect();
                writeln!(out, "rivals: {}", rivals.join(" "))?;
            }
        }
        Err(Error::NotFound { fallback }) => {
            let hint = fallback
                .map(|p| format!("; global maximum at t={} label={}", p.index, p.label))
                .unwrap_or_default();
            writeln!(out, "characteristic point ({policy}): none{hint}")?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Estimate as printed by `estimate`. Field order is part of the output
/// format.
#[derive(Debug, Serialize)]
struct EstimateReport {
    method: String,
    /// Integer part for series whose values reach 1000, otherwise rounded to
    /// the display digits.
    u_max_hat: Value,
    u_max_hat_exact: Value,
    constant_used: Value,
    char_index: Option<usize>,
    char_label: Option<String>,
    char_value: Value,
    diagnostics: Value,
}

impl EstimateReport {
    fn new(ts: &TimeSeries, est: &SaturationEstimate, digits: usize) -> Self {
        let scale = ts.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let u_max_hat = if scale >= 1000.0 && est.u_max_hat.abs() < 9.0e15 {
            Value::from(est.u_max_hat.trunc() as i64)
        } else {
            json_num(rounded(est.u_max_hat, digits))
        };
        let point = est.char_point.as_ref();
        Self {
            method: est.method.to_string(),
            u_max_hat,
            u_max_hat_exact: json_num(est.u_max_hat),
            constant_used: est.constant_used.map_or(Value::Null, json_num),
            char_index: point.map(|p| p.index),
            char_label: point.map(|p| p.label.clone()),
            char_value: point.map_or(Value::Null, |p| json_num(p.series_value)),
            diagnostics: serde_json::to_value(&est.diagnostics).unwrap_or(Value::Null),
        }
    }

    fn write_text(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let show = |v: &Value| match v {
            Value::Null => "-".to_string(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        writeln!(out, "method\t{}", self.method)?;
        writeln!(out, "u_max_hat\t{}", show(&self.u_max_hat))?;
        writeln!(out, "u_max_hat_exact\t{}", show(&self.u_max_hat_exact))?;
        writeln!(out, "constant_used\t{}", show(&self.constant_used))?;
        writeln!(
            out,
            "char_index\t{}",
            self.char_index.map_or("-".into(), |i| i.to_string())
        )?;
        writeln!(
            out,
            "char_label\t{}",
            self.char_label.as_deref().unwrap_or("-")
        )?;
        writeln!(out, "char_value\t{}", show(&self.char_value))?;
        if let Value::Object(map) = &self.diagnostics {
            for (k, v) in map {
                writeln!(out, "diagnostics.{k}\t{}", show(v))?;
            }
        }
        Ok(())
    }
}
