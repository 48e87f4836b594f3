//! Command-line front end. [`run`] parses arguments, dispatches to one
//! command and maps the outcome to an exit status.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::{certify_uckelmann, solve_monotone, solve_uckelmann, CertificateReport, PhiSpec};
use crate::costfn::{resolve, CostFunction};
use crate::error::{Error, Result};
use crate::format::{fmt_f64, read_numeric_csv, SCHEMA_VERSION};
use crate::grid::{bound, bound_sequence, CouplingRecord, GridSpec, Mode, DEFAULT_SUBSAMPLES};
use crate::lap::{brute_force_lap, solve_lap, CostMatrix, Sense};
use crate::plot::{svg_scatter, PlotOptions};
use crate::sequences::{
    avg_consecutive_distance, consecutive_distance_limit, consecutive_pairs, write_pairs_csv, write_values_csv,
    VdcParams,
};
use crate::verify::{check_cyclical_monotonicity, check_doubly_stochastic, Convention, CycleReport, StochasticReport, SupportSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "copt", version, about = "Extremal integrals over copulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grid bounds (n, lower, midpoint, upper) for a range of levels.
    Bounds(BoundsArgs),
    /// SVG plot of the optimal grid coupling's support.
    PlotSupport(PlotArgs),
    /// Closed-form optimum for phi(x+y) costs or monotone costs.
    Analytic(AnalyticArgs),
    /// Van der Corput statistics and point streams.
    Vdc(VdcArgs),
    /// Optimality checks for a coupling file.
    Check(CheckArgs),
    /// Solve an assignment problem given as a CSV matrix.
    SolveLap(SolveLapArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    /// Registry cost name.
    #[arg(long, conflicts_with = "expr")]
    pub cost: Option<String>,
    /// Cost expression in x and y.
    #[arg(long)]
    pub expr: Option<String>,
}

impl CostArgs {
    pub fn resolve(&self) -> Result<CostFunction> {
        resolve(self.cost.as_deref(), self.expr.as_deref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotFormat {
    Svg,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub cost: CostArgs,
    /// Level or inclusive range, e.g. `5` or `2..7`.
    #[arg(long, value_parser = parse_levels)]
    pub n: RangeInclusive<u32>,
    /// Restrict the table to these modes (repeatable); all three by default.
    #[arg(long)]
    pub mode: Vec<Mode>,
    #[arg(long, default_value = "max")]
    pub sense: Sense,
    #[arg(long, default_value_t = DEFAULT_SUBSAMPLES)]
    pub subsamples: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value = "midpoint")]
    pub mode: Mode,
    #[arg(long, default_value = "max")]
    pub sense: Sense,
    /// `svg` plot, `csv` support points, or `json` coupling record.
    #[arg(long, value_enum, default_value = "svg")]
    pub format: PlotFormat,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub cost: CostArgs,
    /// phi as an expression in z, for c(x, y) = phi(x + y).
    #[arg(long, conflicts_with_all = ["cost", "expr", "monotone"])]
    pub phi: Option<String>,
    /// Inflection point k of phi.
    #[arg(long, requires = "phi")]
    pub inflection: Option<f64>,
    /// Report max and min for a cost with positive cross derivative.
    #[arg(long)]
    pub monotone: bool,
    #[arg(long, default_value_t = 256)]
    pub certify_grid: usize,
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VdcStat {
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VdcEmit {
    Values,
    Pairs,
}

#[derive(Debug, Clone, Args)]
pub struct VdcArgs {
    #[arg(long, default_value_t = 2)]
    pub base: u64,
    #[arg(long = "N", default_value_t = 1000)]
    pub count: usize,
    /// First index of emitted streams (default 1; 0 includes phi(0) = 0).
    #[arg(long, default_value_t = 1)]
    pub start: u64,
    #[arg(long, value_enum)]
    pub stat: Option<VdcStat>,
    #[arg(long, value_enum, conflicts_with = "stat")]
    pub emit: Option<VdcEmit>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Coupling JSON record or CSV of support points.
    pub input: PathBuf,
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long, default_value = "max")]
    pub sense: Sense,
    #[arg(long, default_value_t = 4)]
    pub max_cycle: usize,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveLapArgs {
    /// CSV matrix; `-` reads standard input.
    pub input: PathBuf,
    #[arg(long, default_value = "min")]
    pub sense: Sense,
    /// Enumerate all permutations instead (m <= 10).
    #[arg(long)]
    pub brute_force: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parses `5` or `2..7` (inclusive).
pub fn parse_levels(text: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let bad = || format!("expected a level like `5` or a range like `2..7`, got `{}`", text);
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: u32 = lo.parse().map_err(|_| bad())?;
    let hi: u32 = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

/// Rendered output of a command and whether its checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize)]
struct BoundsRow {
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    midpoint: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<f64>,
}

#[derive(Debug, Serialize)]
struct BoundsTable {
    schema: u32,
    cost: String,
    sense: Sense,
    rows: Vec<BoundsRow>,
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<Output> {
    let c = args.cost.resolve()?;
    let modes: Vec<Mode> = [Mode::Lower, Mode::Midpoint, Mode::Upper]
        .into_iter()
        .filter(|m| args.mode.is_empty() || args.mode.contains(m))
        .collect();
    let mut rows: Vec<BoundsRow> = args
        .n
        .clone()
        .map(|n| BoundsRow { n, lower: None, midpoint: None, upper: None })
        .collect();
    for &mode in &modes {
        let template = GridSpec::new(*args.n.start(), mode).with_subsamples(args.subsamples);
        for (row, (_, v)) in rows.iter_mut().zip(bound_sequence(&c, args.n.clone(), &template, args.sense)?) {
            match mode {
                Mode::Lower => row.lower = Some(v),
                Mode::Midpoint => row.midpoint = Some(v),
                Mode::Upper => row.upper = Some(v),
            }
        }
    }
    let text = match args.format {
        TableFormat::Json => json(&BoundsTable {
            schema: SCHEMA_VERSION,
            cost: c.source().to_string(),
            sense: args.sense,
            rows,
        })?,
        TableFormat::Csv => {
            let mut s = String::from("n");
            for m in &modes {
                s.push(',');
                s.push_str(m.name());
            }
            s.push('\n');
            for row in &rows {
                s.push_str(&row.n.to_string());
                for v in [row.lower, row.midpoint, row.upper].into_iter().flatten() {
                    s.push(',');
                    s.push_str(&fmt_f64(v));
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Output::ok(text))
}

pub fn cmd_plot_support(args: &PlotArgs) -> Result<Output> {
    let c = args.cost.resolve()?;
    let spec = GridSpec::new(args.n, args.mode);
    let b = bound(&c, &spec, args.sense)?;
    let text = match args.format {
        PlotFormat::Svg => {
            let title = args.title.clone().unwrap_or_else(|| {
                format!("{} {}, n = {}, {}", args.sense, c.source(), args.n, args.mode.name())
            });
            let opts = PlotOptions {
                title: Some(title),
                ..PlotOptions::default()
            };
            svg_scatter(&b.coupling.support_points(), &opts)
        }
        PlotFormat::Csv => {
            let mut buf = Vec::new();
            b.coupling.write_support_csv(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))?
        }
        PlotFormat::Json => json(&b.coupling.to_record(b.value))?,
    };
    Ok(Output::ok(text))
}

#[derive(Debug, Serialize)]
struct MonotoneReport {
    schema: u32,
    cost: String,
    max: f64,
    min: f64,
}

#[derive(Debug, Serialize)]
struct AnalyticReport {
    schema: u32,
    phi: String,
    branch: crate::analytic::Branch,
    beta: Option<f64>,
    value: f64,
    certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateReport>,
}

pub fn cmd_analytic(args: &AnalyticArgs) -> Result<Output> {
    if args.monotone {
        let c = args.cost.resolve()?;
        let max = solve_monotone(&c, Sense::Max, 64)?;
        let min = solve_monotone(&c, Sense::Min, 64)?;
        return Ok(Output::ok(json(&MonotoneReport {
            schema: SCHEMA_VERSION,
            cost: c.source().to_string(),
            max: max.value,
            min: min.value,
        })?));
    }
    let spec = match (&args.phi, args.cost.cost.as_deref(), &args.cost.expr) {
        (Some(text), None, None) => {
            let k = args
                .inflection
                .ok_or_else(|| Error::InvalidArgument("--phi needs --inflection".into()))?;
            PhiSpec::parse(text, k)?
        }
        (None, Some("sin_sum"), None) | (None, None, None) => PhiSpec::sine(),
        _ => {
            return Err(Error::InvalidArgument(
                "analytic solves sin_sum or --phi; use --monotone for costs with positive cross derivative".into(),
            ))
        }
    };
    let sol = solve_uckelmann(&spec, args.tol)?;
    let certificate = match sol.beta {
        Some(_) => Some(certify_uckelmann(&spec, &sol, args.certify_grid)?),
        None => None,
    };
    let certified = certificate.as_ref().is_none_or(|r| r.pass);
    let report = AnalyticReport {
        schema: SCHEMA_VERSION,
        phi: spec.name().to_string(),
        branch: sol.branch,
        beta: sol.beta,
        value: sol.value,
        certified,
        certificate,
    };
    Ok(Output {
        text: json(&report)?,
        passed: certified,
    })
}

#[derive(Debug, Serialize)]
struct DistanceReport {
    schema: u32,
    base: u64,
    #[serde(rename = "N")]
    count: usize,
    distance: f64,
    limit: f64,
}

pub fn cmd_vdc(args: &VdcArgs) -> Result<Output> {
    let params = VdcParams::new(args.base, args.count).starting_at(args.start);
    let mut buf = Vec::new();
    match args.emit {
        Some(VdcEmit::Pairs) => {
            let pairs = consecutive_pairs(&params)?;
            match args.format {
                TableFormat::Csv => write_pairs_csv(&mut buf, &pairs)?,
                TableFormat::Json => buf = json(&pairs)?.into_bytes(),
            }
        }
        Some(VdcEmit::Values) => {
            let values = params.values()?;
            match args.format {
                TableFormat::Csv => write_values_csv(&mut buf, args.start, &values)?,
                TableFormat::Json => buf = json(&values)?.into_bytes(),
            }
        }
        None => {
            let distance = avg_consecutive_distance(args.base, args.count)?;
            let limit = consecutive_distance_limit(args.base);
            match args.format {
                TableFormat::Csv => {
                    writeln!(buf, "base,N,distance,limit")?;
                    writeln!(buf, "{},{},{},{}", args.base, args.count, fmt_f64(distance), fmt_f64(limit))?;
                }
                TableFormat::Json => {
                    buf = json(&DistanceReport {
                        schema: SCHEMA_VERSION,
                        base: args.base,
                        count: args.count,
                        distance,
                        limit,
                    })?
                    .into_bytes()
                }
            }
        }
    }
    Ok(Output::ok(String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))?))
}

#[derive(Debug, Serialize)]
struct CheckReport {
    schema: u32,
    pass: bool,
    cost: String,
    sense: Sense,
    points: usize,
    cyclical_monotonicity: CycleReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    doubly_stochastic: Option<StochasticReport>,
}

/// Support points of a coupling file, plus the mass matrix when the file is
/// a coupling record.
pub type LoadedCoupling = (Vec<(f64, f64)>, Option<Vec<Vec<f64>>>);

pub fn load_coupling(path: &Path) -> Result<LoadedCoupling> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let record: CouplingRecord = serde_json::from_str(&text)?;
        let coupling = record.to_coupling()?;
        return Ok((coupling.support_points(), Some(coupling.to_matrix())));
    }
    let rows = read_numeric_csv(text.as_bytes())?;
    let pts = rows
        .iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [x, y] => Ok((*x, *y)),
            _ => Err(Error::Parse(format!("support row {} must have two columns", i + 1))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((pts, None))
}

pub fn cmd_check(args: &CheckArgs) -> Result<Output> {
    let c = args.cost.resolve()?;
    let (points, matrix) = load_coupling(&args.input)?;
    let support = SupportSet::new(points, args.sense)?;
    let cycles = check_cyclical_monotonicity(&support, |x, y| c.eval(x, y), args.max_cycle, args.trials, args.seed)?;
    let stochastic = match &matrix {
        Some(m) => Some(check_doubly_stochastic(m, 1e-12, Convention::Coupling)?),
        None => None,
    };
    let pass = cycles.pass && stochastic.as_ref().is_none_or(|s| s.pass);
    let report = CheckReport {
        schema: SCHEMA_VERSION,
        pass,
        cost: c.source().to_string(),
        sense: args.sense,
        points: support.points.len(),
        cyclical_monotonicity: cycles,
        doubly_stochastic: stochastic,
    };
    Ok(Output {
        text: json(&report)?,
        passed: pass,
    })
}

#[derive(Debug, Serialize)]
struct CertificateSummary {
    passed: bool,
    duality_gap: f64,
    worst_infeasibility: f64,
    worst_slackness: f64,
}

#[derive(Debug, Serialize)]
struct LapReport {
    schema: u32,
    m: usize,
    sense: Sense,
    /// One-based column assigned to each row.
    assignment: Vec<usize>,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    row_potentials: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    col_potentials: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateSummary>,
}

pub fn cmd_solve_lap(args: &SolveLapArgs) -> Result<Output> {
    let rows = if args.input.as_os_str() == "-" {
        read_numeric_csv(std::io::stdin().lock())?
    } else {
        read_numeric_csv(fs::File::open(&args.input)?)?
    };
    let cost = CostMatrix::from_rows(rows)?;
    let a = if args.brute_force {
        brute_force_lap(&cost, args.sense)?
    } else {
        solve_lap(&cost, args.sense)?
    };
    let certificate = (!args.brute_force).then(|| {
        let check = a.check_certificate(&cost);
        CertificateSummary {
            passed: check.passed(),
            duality_gap: check.duality_gap,
            worst_infeasibility: check.worst_infeasibility,
            worst_slackness: check.worst_slackness,
        }
    });
    let passed = certificate.as_ref().is_none_or(|c| c.passed);
    let report = LapReport {
        schema: SCHEMA_VERSION,
        m: cost.dim(),
        sense: args.sense,
        assignment: a.sigma.iter().map(|j| j + 1).collect(),
        value: a.value,
        row_potentials: (!args.brute_force).then(|| a.row_potentials.clone()),
        col_potentials: (!args.brute_force).then(|| a.col_potentials.clone()),
        certificate,
    };
    Ok(Output {
        text: json(&report)?,
        passed,
    })
}

/// Exit status for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonFinite { .. }
        | Error::CellEvaluation { .. }
        | Error::NoSignChange { .. }
        | Error::NoConvergence(_)
        | Error::NonFiniteValue(_)
        | Error::InvalidQuadrature(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

pub fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::PlotSupport(a) => cmd_plot_support(a),
        Command::Analytic(a) => cmd_analytic(a),
        Command::Vdc(a) => cmd_vdc(a),
        Command::Check(a) => cmd_check(a),
        Command::SolveLap(a) => cmd_solve_lap(a),
    }
}

fn output_path(command: &Command) -> Option<&Path> {
    match command {
        Command::Bounds(a) => a.output.as_deref(),
        Command::PlotSupport(a) => a.output.as_deref(),
        Command::Analytic(a) => a.output.as_deref(),
        Command::Vdc(a) => a.output.as_deref(),
        Command::Check(a) => a.output.as_deref(),
        Command::SolveLap(a) => a.output.as_deref(),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|out| {
        match output_path(&cli.command) {
            Some(path) => fs::write(path, &out.text)?,
            None => stdout.write_all(out.text.as_bytes())?,
        }
        Ok(out.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFICATION,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            exit_code(&e)
        }
    }
}
