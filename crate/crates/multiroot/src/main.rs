//! Command-line front end: solve a single problem, reproduce the benchmark
//! error table with convergence diagnostics, render basins of attraction,
//! or list the registry.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 the iteration
//! stopped on a failed step, 3 output could not be written.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use multiroot::basins::{self, BasinConfig, BasinError, DEFAULT_PALETTE};
use multiroot::methods::{DongSign, MethodKind, MethodSpec};
use multiroot::numerics::{PrecisionConfig, Scalar};
use multiroot::problems::{builtin, Problem, BUILTIN_NAMES};
use multiroot::solver::{
    apparent_convergence_order, convergence_order, noise_floor, solve, solve_fixed, trace_to_csv,
    SolverConfig, Termination,
};

/// Precision used for the convergence-order columns of `bench`, independent
/// of the precision chosen for the error columns.
const DIAGNOSTIC_DIGITS: u32 = 320;

#[derive(Parser)]
#[command(
    name = "multiroot",
    version,
    about = "High-precision iterative solvers for multiple roots of nonlinear equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate one method on one problem and print the trace.
    Solve(SolveArgs),
    /// Tabulate per-step errors and convergence orders over the benchmark problems.
    Bench(BenchArgs),
    /// Render basins of attraction over a complex window to a PPM image.
    Basins(BasinsArgs),
    /// List the builtin problems and methods.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveFormat {
    Plain,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Md,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Minus,
    Plus,
}

impl From<SignArg> for DongSign {
    fn from(sign: SignArg) -> DongSign {
        match sign {
            SignArg::Minus => DongSign::Minus,
            SignArg::Plus => DongSign::Plus,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Problem name from the registry (see `list`).
    #[arg(long)]
    problem: String,
    /// Iteration method: ns, mns, schroder, osada, dong, or chun.
    #[arg(long, default_value = "mns")]
    method: String,
    /// Starting point as a decimal literal; defaults to the problem's seed.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Working precision in significant decimal digits.
    #[arg(long, default_value_t = 100)]
    digits: u32,
    /// Iteration budget.
    #[arg(long, default_value_t = 50)]
    max_iter: u32,
    /// Keep iterating until the step tolerance alone is met.
    #[arg(long)]
    no_residual_stop: bool,
    /// Free parameter of the chun method.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Sign choice in the dong first stage.
    #[arg(long, value_enum, default_value_t = SignArg::Minus)]
    dong_sign: SignArg,
    #[arg(long, value_enum, default_value_t = SolveFormat::Plain)]
    format: SolveFormat,
}

#[derive(Args)]
struct BenchArgs {
    /// Working precision for the error columns.
    #[arg(long, default_value_t = 100)]
    digits: u32,
    /// Fixed number of iterations feeding the error columns.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=25))]
    steps: u32,
    #[arg(long, value_enum, default_value_t = TableFormat::Md)]
    format: TableFormat,
    /// Write the table to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BasinsArgs {
    /// Polynomial problem with listed roots: p1, p2, or p3.
    #[arg(long)]
    problem: String,
    /// Iteration method: ns, mns, schroder, osada, dong, or chun.
    #[arg(long, default_value = "mns")]
    method: String,
    /// Image width and height in pixels.
    #[arg(long, default_value_t = 512)]
    size: usize,
    /// Window as re_min,re_max,im_min,im_max.
    #[arg(long, default_value = "-3,3,-3,3", allow_hyphen_values = true)]
    bounds: String,
    /// Iteration budget per pixel.
    #[arg(long, default_value_t = 100)]
    max_iter: u32,
    /// Capture radius around each root.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Output PPM path.
    #[arg(long)]
    out: PathBuf,
    /// Print per-root pixel counts and mean iterations to stdout.
    #[arg(long)]
    stats: bool,
    /// Darken each pixel by its capture iteration count.
    #[arg(long)]
    shaded: bool,
    /// Free parameter of the chun method.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Sign choice in the dong first stage.
    #[arg(long, value_enum, default_value_t = SignArg::Minus)]
    dong_sign: SignArg,
}

/// Failures carry the exit code they map to: 1 for bad requests, 3 for
/// unwritable outputs.
enum CliError {
    Usage(anyhow::Error),
    Output(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Output(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            CliError::Usage(e) | CliError::Output(e) => e,
        }
    }
}

fn usage(err: impl Into<anyhow::Error>) -> CliError {
    CliError::Usage(err.into())
}

fn output(err: impl Into<anyhow::Error>) -> CliError {
    CliError::Output(err.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Basins(args) => cmd_basins(args),
        Command::List => cmd_list(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e.error());
            ExitCode::from(e.code())
        }
    }
}

fn parse_method(name: &str) -> Result<MethodKind, CliError> {
    name.parse::<MethodKind>().map_err(usage)
}

fn parse_spec(kind: MethodKind, gamma: f64, dong_sign: SignArg) -> Result<MethodSpec, CliError> {
    if !gamma.is_finite() {
        return Err(usage(anyhow!("--gamma must be finite, got {gamma}")));
    }
    Ok(MethodSpec::new(kind)
        .with_gamma(gamma)
        .with_dong_sign(dong_sign.into()))
}

fn lookup(problem: &str) -> Result<Problem, CliError> {
    builtin(problem).map_err(usage)
}

fn precision(digits: u32) -> Result<PrecisionConfig, CliError> {
    PrecisionConfig::new(digits).map_err(usage)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, CliError> {
    let problem = lookup(&args.problem)?;
    let kind = parse_method(&args.method)?;
    let spec = parse_spec(kind, args.gamma, args.dong_sign)?;
    let cfg = precision(args.digits)?;
    let x0 = match &args.x0 {
        Some(text) => Scalar::from_decimal(text, cfg)
            .map_err(|e| usage(anyhow!("--x0 {text:?}: {e}")))?,
        None => problem.default_x0(cfg).ok_or_else(|| {
            usage(anyhow!(
                "problem {} has no default starting point; pass --x0",
                problem.name()
            ))
        })?,
    };
    let mut config = SolverConfig::with_defaults(cfg);
    config.max_iterations = args.max_iter;
    if args.no_residual_stop {
        config = config.without_residual_stop();
    }
    let trace = solve(&problem, &x0, &spec, &config).map_err(usage)?;

    match args.format {
        SolveFormat::Csv => print!("{}", trace_to_csv(&trace)),
        SolveFormat::Plain => {
            println!(
                "# {}: {}, m = {}, method {}, {} digits",
                problem.name(),
                problem.formula(),
                problem.multiplicity(),
                kind.name(),
                args.digits
            );
            let errors = trace.errors.as_deref();
            println!("{:>3}  {:<26}  {:<12}  {}", "n", "x", "|f(x)|", "|x - root|");
            for (n, x) in trace.iterates.iter().enumerate() {
                let err = errors
                    .map(|e| e[n].abs().to_shorthand(4))
                    .unwrap_or_else(|| "-".to_owned());
                println!(
                    "{n:>3}  {:<26}  {:<12}  {err}",
                    x.to_shorthand(18),
                    trace.residuals[n].abs().to_shorthand(4),
                );
            }
            println!("termination: {} after {} steps", trace.termination, trace.steps());
            println!("x = {}", trace.iterates.last().expect("trace is nonempty"));
        }
    }
    if matches!(trace.termination, Termination::StepFailure(_)) {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

/// One benchmark row: per-step error magnitudes plus convergence orders
/// measured on a separate high-precision run.
struct BenchRow {
    problem: String,
    method: &'static str,
    errors: Vec<String>,
    coc: String,
    acoc: String,
}

fn bench_row(
    problem: &Problem,
    kind: MethodKind,
    cfg: PrecisionConfig,
    steps: u32,
) -> Result<BenchRow, CliError> {
    let spec = MethodSpec::new(kind);
    let x0 = problem
        .default_x0(cfg)
        .ok_or_else(|| usage(anyhow!("problem {} has no starting point", problem.name())))?;
    let trace = solve_fixed(problem, &x0, &spec, cfg, steps).map_err(usage)?;
    let errors = trace
        .errors
        .as_ref()
        .expect("benchmark problems have known roots");
    let cells: Vec<String> = errors
        .iter()
        .skip(1)
        .map(|e| e.abs().to_shorthand(4))
        .collect();

    // Convergence orders come from a longer run at fixed high precision so
    // they are insensitive to the precision chosen for the error columns.
    let diag_cfg = precision(DIAGNOSTIC_DIGITS)?;
    let diag_x0 = problem.default_x0(diag_cfg).expect("checked above");
    let config = SolverConfig::with_defaults(diag_cfg).without_residual_stop();
    let diag = solve(problem, &diag_x0, &spec, &config).map_err(usage)?;
    let floor = noise_floor(diag_cfg);
    let fmt = |r: Result<Scalar, _>| match r {
        Ok(order) => format!("{:.4}", order.to_f64()),
        Err(_) => "-".to_owned(),
    };
    let coc = fmt(convergence_order(
        diag.errors.as_ref().expect("known root"),
        &floor,
    ));
    let acoc = fmt(apparent_convergence_order(&diag.iterates, &floor));

    Ok(BenchRow {
        problem: problem.name().to_owned(),
        method: kind.name(),
        errors: cells,
        coc,
        acoc,
    })
}

fn render_table(rows: &[BenchRow], steps: u32, format: TableFormat) -> String {
    let mut header: Vec<String> = vec!["problem".into(), "method".into()];
    for n in 1..=steps {
        header.push(format!("|x{n} - root|"));
    }
    header.push("coc".into());
    header.push("acoc".into());

    let mut table: Vec<Vec<String>> = vec![header];
    for row in rows {
        let mut cells = vec![row.problem.clone(), row.method.to_owned()];
        cells.extend(row.errors.iter().cloned());
        cells.push(row.coc.clone());
        cells.push(row.acoc.clone());
        table.push(cells);
    }

    match format {
        TableFormat::Csv => {
            let mut out = String::new();
            for row in &table {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        TableFormat::Md => {
            let columns = table[0].len();
            let widths: Vec<usize> = (0..columns)
                .map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for (r, row) in table.iter().enumerate() {
                let line: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(cell, &w)| format!("{cell:<w$}"))
                    .collect();
                out.push_str(&format!("| {} |\n", line.join(" | ")));
                if r == 0 {
                    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                    out.push_str(&format!("| {} |\n", rule.join(" | ")));
                }
            }
            out
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, CliError> {
    let cfg = precision(args.digits)?;
    let methods = [
        MethodKind::ModifiedNewtonSecant,
        MethodKind::Osada,
        MethodKind::Dong,
        MethodKind::Chun,
    ];
    let mut rows = Vec::new();
    for name in ["f1", "f2", "f3", "f4"] {
        let problem = lookup(name)?;
        for kind in methods {
            rows.push(bench_row(&problem, kind, cfg, args.steps)?);
        }
    }
    let table = render_table(&rows, args.steps, args.format);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &table)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(output)?;
            eprintln!("wrote benchmark table to {}", path.display());
        }
        None => print!("{table}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_bounds(text: &str) -> Result<[f64; 4], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(usage(anyhow!(
            "--bounds expects re_min,re_max,im_min,im_max, got {text:?}"
        )));
    }
    let mut values = [0.0f64; 4];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| usage(anyhow!("--bounds component {part:?}: {e}")))?;
    }
    Ok(values)
}

fn cmd_basins(args: BasinsArgs) -> Result<ExitCode, CliError> {
    let problem = lookup(&args.problem)?;
    let poly = problem.polynomial().ok_or_else(|| {
        usage(anyhow!(
            "problem {} is not a polynomial with listed roots; use p1, p2, or p3",
            problem.name()
        ))
    })?;
    let kind = parse_method(&args.method)?;
    let spec = parse_spec(kind, args.gamma, args.dong_sign)?;
    let [re_min, re_max, im_min, im_max] = parse_bounds(&args.bounds)?;
    let config = BasinConfig {
        re_min,
        re_max,
        im_min,
        im_max,
        width: args.size,
        height: args.size,
        max_iterations: args.max_iter,
        tolerance: args.tol,
    };

    let start = Instant::now();
    let grid = basins::render(poly, &spec, &config).map_err(usage)?;
    let elapsed = start.elapsed().as_secs_f64();

    let file = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(output)?;
    let writer = BufWriter::new(file);
    let written = if args.shaded {
        basins::write_image_shaded(&grid, &DEFAULT_PALETTE, writer)
    } else {
        basins::write_image(&grid, &DEFAULT_PALETTE, writer)
    };
    written.map_err(|e| match e {
        BasinError::Io(_) => output(anyhow::Error::new(e).context("writing image")),
        other => usage(other),
    })?;
    eprintln!(
        "rendered {}x{} basins of {} with {} in {elapsed:.1}s -> {}",
        grid.width(),
        grid.height(),
        problem.name(),
        kind.name(),
        args.out.display()
    );
    if args.stats {
        print!("{}", basins::stats(&grid).to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_list() -> Result<ExitCode, CliError> {
    println!("problems:");
    for name in BUILTIN_NAMES {
        let p = lookup(name)?;
        let root = match p.known_root_literal() {
            Some(lit) if lit.len() > 22 => format!("{}...", &lit[..19]),
            Some(lit) => lit.to_owned(),
            None => "-".to_owned(),
        };
        let x0 = p.default_x0_literal().unwrap_or("-");
        println!(
            "  {name:<13} {:<22} m={:<3} root={root:<24} x0={x0}",
            p.formula(),
            p.multiplicity()
        );
    }
    println!();
    println!("methods:");
    for kind in MethodKind::ALL {
        println!(
            "  {:<10} needs {:<8} {}",
            kind.name(),
            kind.derivative_requirements(),
            kind.description()
        );
    }
    Ok(ExitCode::SUCCESS)
}
