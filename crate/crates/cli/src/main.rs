//! `diagcount`: exact hypercube counts for diagonal equations and the bound
//! suite built on them.
//!
//! Every common flag can also be set through an environment variable with the
//! `DIAGCOUNT_` prefix (`DIAGCOUNT_BACKEND`, `DIAGCOUNT_FORMAT`,
//! `DIAGCOUNT_OUT`, `DIAGCOUNT_WORKERS`, `DIAGCOUNT_MEMORY_BUDGET`,
//! `DIAGCOUNT_PRESET`). Exit codes: 0 success, 1 usage, 2 execution failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use diagcount::report::{csv_field, Fitted};
use diagcount::{evaluate, run_suite, Fixed, Grid, Manifest, Preset, Report, SuiteOptions};
use diagcount_core::asymptotics::fit_log_log;
use diagcount_core::parametric::{family_by_name, family_count_in_cube, scaled_pythagorean_distinct};
use diagcount_core::tables::DEFAULT_MEMORY_BUDGET;
use diagcount_core::{
    even_moment, fit_exponent, Backend, Catalog, CountError, CountPoint, CountResult, CountSeries, Counter,
    DiagonalEquation, MemoryBudget,
};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "diagcount", version, about = "Exact solution counts for diagonal Diophantine equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format. Defaults to csv, or to a text table for `report` and `check`.
    #[arg(long, global = true, value_enum, env = "DIAGCOUNT_FORMAT")]
    format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true, env = "DIAGCOUNT_OUT")]
    out: Option<PathBuf>,

    /// Worker threads (0 = one per CPU).
    #[arg(long, global = true, env = "DIAGCOUNT_WORKERS", default_value_t = 0)]
    workers: usize,

    /// Memory budget in 128-bit words (a table entry is one word, a value/count pair two).
    #[arg(long, global = true, env = "DIAGCOUNT_MEMORY_BUDGET", default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: usize,

    /// Counting backend: enumerate, table or mitm.
    #[arg(long, global = true, env = "DIAGCOUNT_BACKEND", default_value = "table")]
    backend: Backend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact number of solutions in [1, N]^s.
    Count {
        #[arg(long)]
        eq: DiagonalEquation,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Print the solutions themselves (N <= 100).
        #[arg(long)]
        list: bool,
        /// Count solutions with nondecreasing right-hand variables instead.
        #[arg(long, conflicts_with = "list")]
        nondecreasing: bool,
    },
    /// Counts over a grid of cube sides.
    Sweep {
        #[arg(long)]
        eq: DiagonalEquation,
        #[arg(long)]
        grid: Grid,
    },
    /// Log-log growth exponent of a sweep or of an `N,count` CSV file.
    Fit {
        #[arg(long, required_unless_present = "input", requires = "grid")]
        eq: Option<DiagonalEquation>,
        #[arg(long)]
        grid: Option<Grid>,
        #[arg(long, conflicts_with_all = ["eq", "grid"])]
        input: Option<PathBuf>,
        /// Ignore sides below this value.
        #[arg(long, default_value_t = 1)]
        min_n: u64,
    },
    /// Catalog bound for an equation.
    Predict {
        #[arg(long)]
        eq: DiagonalEquation,
    },
    /// Sweep, fit and verdict against the catalog bound.
    Check {
        #[arg(long)]
        eq: DiagonalEquation,
        #[arg(long)]
        grid: Grid,
        /// Override the default slope tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Exact even moment: solutions of m1^k+..+mt^k = m'1^k+..+m't^k with all m <= P.
    Hua {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        t: u32,
        #[arg(long, required_unless_present = "grid", conflicts_with = "grid", value_parser = clap::value_parser!(u64).range(1..))]
        p: Option<u64>,
        #[arg(long)]
        grid: Option<Grid>,
    },
    /// Distinct members of a parametric family inside the cube |x_i| <= N.
    Parametric {
        #[arg(long, value_parser = ["cubic-unit", "pythagorean", "pythagorean-scaled"])]
        family: String,
        #[arg(long, required_unless_present = "grid", conflicts_with = "grid", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long)]
        grid: Option<Grid>,
    },
    /// Run the bundled bound suite (or a custom manifest).
    Report {
        #[arg(long, env = "DIAGCOUNT_PRESET", default_value = "small")]
        preset: Preset,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Add wall time per row (`ms`); reports are then no longer reproducible byte for byte.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Execution(String),
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        match e {
            CountError::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Execution(e.to_string()),
        }
    }
}

fn exec(e: impl std::fmt::Display) -> Failure {
    Failure::Execution(e.to_string())
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Execution(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.workers > 0 && !matches!(cli.command, Command::Report { .. }) {
        rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global().map_err(exec)?;
    }
    let counter = Counter::new(MemoryBudget(cli.memory_budget));
    let format = cli.format;
    let csv_or_json = format.unwrap_or(Format::Csv);
    let text = match cli.command {
        Command::Count { eq, n, list, nondecreasing } => {
            if list {
                let solutions = counter.list_solutions(&eq, n)?;
                match csv_or_json {
                    Format::Json => json(&solutions),
                    _ => {
                        let mut out = String::new();
                        for s in solutions {
                            let cols: Vec<String> = s.iter().map(u64::to_string).collect();
                            let _ = writeln!(out, "{}", cols.join(","));
                        }
                        out
                    }
                }
            } else {
                let (count, backend) = if nondecreasing {
                    (counter.count_nondecreasing(&eq, n)?, None)
                } else {
                    let (c, b) = with_fallback(cli.backend, |b| counter.count_in_cube(&eq, n, b))?;
                    (c, Some(b))
                };
                match csv_or_json {
                    Format::Json => {
                        #[derive(Serialize)]
                        struct Out {
                            eq: String,
                            n: u64,
                            #[serde(skip_serializing_if = "Option::is_none")]
                            backend: Option<Backend>,
                            nondecreasing: bool,
                            count: u128,
                        }
                        json(&Out { eq: eq.render(), n, backend, nondecreasing, count })
                    }
                    _ => format!("{count}\n"),
                }
            }
        }
        Command::Sweep { eq, grid } => {
            let series = sweep(&counter, &eq, &grid, cli.backend)?;
            series_output(&series, csv_or_json)
        }
        Command::Fit { eq, grid, input, min_n } => {
            let fit = match (eq, grid, input) {
                (_, _, Some(path)) => {
                    let points: Vec<(f64, f64)> = read_points(&path)?
                        .into_iter()
                        .filter(|&(n, c)| n >= min_n && c > 0)
                        .map(|(n, c)| (n as f64, c as f64))
                        .collect();
                    fit_log_log(&points).map_err(exec)?
                }
                (Some(eq), Some(grid), None) => {
                    let series = sweep(&counter, &eq, &grid, cli.backend)?;
                    fit_exponent(&series, min_n).map_err(exec)?
                }
                _ => return Err(Failure::Usage("fit needs --eq with --grid, or --input".into())),
            };
            match csv_or_json {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Out {
                        #[serde(flatten)]
                        fitted: Fitted,
                        intercept: Fixed,
                        points: usize,
                    }
                    json(&Out { fitted: Fitted::from(&fit), intercept: Fixed(fit.intercept), points: fit.points_used })
                }
                _ => format!(
                    "slope,stderr,r2,intercept,points\n{:.6},{:.6},{:.6},{:.6},{}\n",
                    fit.slope, fit.slope_stderr, fit.r_squared, fit.intercept, fit.points_used
                ),
            }
        }
        Command::Predict { eq } => predict_output(&eq, csv_or_json),
        Command::Check { eq, grid, tolerance } => {
            if tolerance.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
                return Err(Failure::Usage("--tolerance must be finite and non-negative".into()));
            }
            let row = evaluate(&eq, &grid, cli.backend, tolerance, &counter, &Catalog::bundled());
            if let Some(e) = &row.error {
                return Err(Failure::Execution(e.clone()));
            }
            match format.unwrap_or(Format::Table) {
                Format::Json => json(&row),
                Format::Csv => format!("{}\n{}\n", diagcount::ReportRow::CSV_HEADER, row.csv_line()),
                Format::Table => Report::new("check", vec![row]).to_table(),
            }
        }
        Command::Hua { k, t, p, grid } => {
            let budget = MemoryBudget(cli.memory_budget);
            match (p, grid) {
                (Some(p), _) => {
                    let m = even_moment(k, t, p, budget)?;
                    match csv_or_json {
                        Format::Json => json(&serde_json::json!({ "k": k, "t": t, "p": p, "moment": m })),
                        _ => format!("{m}\n"),
                    }
                }
                (None, Some(grid)) => {
                    let values = grid
                        .points()
                        .iter()
                        .map(|&p| even_moment(k, t, p, budget).map(|m| (p, m)))
                        .collect::<CountResult<Vec<_>>>()?;
                    pairs_output("P", "moment", &values, csv_or_json)
                }
                (None, None) => unreachable!("clap requires --p or --grid"),
            }
        }
        Command::Parametric { family, n, grid } => {
            let count = |n: u64| -> Result<u64, Failure> {
                if family == "pythagorean-scaled" {
                    return Ok(scaled_pythagorean_distinct(n));
                }
                let fam = family_by_name(&family).expect("clap restricts family names");
                family_count_in_cube(fam.as_ref(), n).map_err(exec)
            };
            match (n, grid) {
                (Some(n), _) => {
                    let c = count(n)?;
                    match csv_or_json {
                        Format::Json => json(&serde_json::json!({ "family": family, "n": n, "count": c })),
                        _ => format!("{c}\n"),
                    }
                }
                (None, Some(grid)) => {
                    let values = grid
                        .points()
                        .iter()
                        .map(|&n| count(n).map(|c| (n, c as u128)))
                        .collect::<Result<Vec<_>, _>>()?;
                    pairs_output("N", "count", &values, csv_or_json)
                }
                (None, None) => unreachable!("clap requires --n or --grid"),
            }
        }
        Command::Report { preset, manifest, timings } => {
            let manifest = match manifest {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| exec(format!("{}: {e}", path.display())))?;
                    Manifest::from_toml(&text).map_err(exec)?
                }
                None => Manifest::bundled(),
            };
            let options =
                SuiteOptions { preset, workers: cli.workers, budget: MemoryBudget(cli.memory_budget), timings };
            let report = run_suite(&manifest, &Catalog::bundled(), options).map_err(exec)?;
            let text = match (format, &cli.out) {
                (Some(Format::Json), _) | (None, Some(_)) => report.to_json(),
                (Some(Format::Csv), _) => report.to_csv(),
                (Some(Format::Table), _) | (None, None) => report.to_table(),
            };
            if format.is_none() && cli.out.is_some() {
                print!("{}", report.to_table());
            }
            emit(cli.out.as_deref(), &text)?;
            if report.summary.failed > 0 {
                return Err(Failure::Execution(format!("{} suite rows failed", report.summary.failed)));
            }
            return Ok(());
        }
    };
    emit(cli.out.as_deref(), &text)
}

fn with_fallback<T>(backend: Backend, f: impl Fn(Backend) -> CountResult<T>) -> Result<(T, Backend), Failure> {
    match f(backend) {
        Err(CountError::BackendInapplicable { reason, fallback, .. }) => {
            eprintln!("note: {backend} backend unavailable ({reason}); using {fallback}");
            Ok((f(fallback)?, fallback))
        }
        other => Ok((other?, backend)),
    }
}

fn sweep(counter: &Counter, eq: &DiagonalEquation, grid: &Grid, backend: Backend) -> Result<CountSeries, Failure> {
    with_fallback(backend, |b| counter.sweep(eq, grid.points(), b)).map(|(s, _)| s)
}

fn series_output(series: &CountSeries, format: Format) -> String {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                eq: String,
                backend: Backend,
                points: &'a [CountPoint],
            }
            json(&Out { eq: series.equation.render(), backend: series.backend, points: &series.points })
        }
        _ => {
            let pairs: Vec<(u64, u128)> = series.points.iter().map(|p| (p.side, p.count)).collect();
            pairs_output("N", "count", &pairs, format)
        }
    }
}

fn pairs_output(x: &str, y: &str, values: &[(u64, u128)], format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = values.iter().map(|&(a, b)| serde_json::json!({ x: a, y: b })).collect();
            json(&rows)
        }
        _ => {
            let mut out = format!("{x},{y}\n");
            for (a, b) in values {
                let _ = writeln!(out, "{a},{b}");
            }
            out
        }
    }
}

fn predict_output(eq: &DiagonalEquation, format: Format) -> String {
    let family = eq.classify();
    let prediction = Catalog::bundled().predict(&family);
    match format {
        Format::Json => {
            let predicted = prediction.as_ref().map(diagcount::report::Predicted::from);
            json(&serde_json::json!({ "eq": eq.render(), "family": family.to_string(), "predicted": predicted }))
        }
        _ => {
            let mut out = String::from("eq,family,row,exponent,exponent_value,eps,const,via_domination,source\n");
            let fields: Vec<String> = match &prediction {
                Some(p) => vec![
                    p.row_id.clone(),
                    p.exponent.to_string(),
                    format!("{:.6}", p.exponent_f64()),
                    p.epsilon.to_string(),
                    p.leading_constant.map(|c| format!("{c:.6}")).unwrap_or_default(),
                    p.via_domination.to_string(),
                    csv_field(&p.source),
                ],
                None => vec![String::new(); 7],
            };
            let _ =
                writeln!(out, "{},{},{}", csv_field(&eq.render()), csv_field(&family.to_string()), fields.join(","));
            out
        }
    }
}

/// Reads `N,count` lines, skipping blank lines and a header.
fn read_points(path: &Path) -> Result<Vec<(u64, u128)>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| exec(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed = line.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
        match parsed {
            Some(p) => out.push(p),
            None if i == 0 => continue,
            None => return Err(exec(format!("{}:{}: expected `N,count`", path.display(), i + 1))),
        }
    }
    Ok(out)
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| exec(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(exec)
        }
    }
}
