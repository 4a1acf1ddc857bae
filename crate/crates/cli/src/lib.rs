//! Command-line front end for `ztpgini`.
//!
//! Exit codes: 0 success, 1 runtime or accuracy failure, 2 usage or
//! validation error.

pub mod input;
pub mod svg;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ztpgini::gini;
use ztpgini::oracle::{self, IdentityReport, SuiteOptions};
use ztpgini::simulation::{self, CellOutcome, SimConfig};
use ztpgini::ztp::{self, Sample, ZtpParams};
use ztpgini::QuadSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for {flag}: {msg}"))
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "ztpgini",
    version,
    about = "Gini coefficient analysis for zero-truncated Poisson data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Population Gini coefficient G(λ).
    Pop(PopArgs),
    /// Exact expectation and bias of the sample Gini estimator.
    Expect(ExpectArgs),
    /// Estimate the Gini coefficient from a file of counts.
    Estimate(EstimateArgs),
    /// Draw a ZTP sample.
    Sample(SampleArgs),
    /// Run the Monte Carlo study and write CSV and SVG reports.
    Simulate(SimulateArgs),
    /// Check closed forms against the brute-force oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PopArgs {
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ExpectArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub n: i64,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input file: one positive integer per line or a CSV column `count`.
    /// Reads stdin when omitted or `-`.
    pub input: Option<PathBuf>,
    /// Also report the plug-in bias and the bias-corrected estimate.
    #[arg(long)]
    pub bias_correct: bool,
    /// Print a CSV header and row instead of `key value` lines.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SampleArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub n: i64,
    #[arg(long, default_value_t = simulation::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// Comma-separated λ grid.
    #[arg(long, default_value = "0.1,0.5,1,2")]
    pub lambdas: String,
    /// Comma-separated sample sizes.
    #[arg(long, default_value = "5,10,30,50")]
    pub ns: String,
    #[arg(long, default_value_t = simulation::DEFAULT_REPS as i64)]
    pub reps: i64,
    #[arg(long, default_value_t = simulation::DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, env = "ZTPGINI_THREADS")]
    pub threads: Option<i64>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for the relative-bias and MSE figures.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Logarithmic y axis in the figures.
    #[arg(long)]
    pub log_y: bool,
    /// Suppress per-cell progress on stderr.
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(long, default_value = "0.1,0.5,1,2")]
    pub lambdas: String,
    #[arg(long, default_value = "2,3,5,10,30,50")]
    pub ns: String,
    /// Golden fixture to compare against (default: the built-in one).
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Regenerate the golden fixture from the oracle and exit.
    #[arg(long)]
    pub write_golden: Option<PathBuf>,
    /// Only print failing checks.
    #[arg(long, short)]
    pub quiet: bool,
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub inject_perturbation: f64,
}

/// Formats with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

fn parse_lambda(flag: &str, v: f64) -> CliResult<ZtpParams> {
    ZtpParams::new(v).map_err(|_| usage(flag, format!("λ must be positive and finite, got {v}")))
}

fn parse_n(flag: &str, v: i64, min: i64) -> CliResult<usize> {
    if v < min {
        return Err(usage(flag, format!("must be at least {min}, got {v}")));
    }
    usize::try_from(v).map_err(|_| usage(flag, format!("out of range: {v}")))
}

/// Parses a comma-separated list; an empty list is a usage error.
pub fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> CliResult<Vec<T>> {
    let items: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(usage(flag, "empty list"));
    }
    items
        .iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| usage(flag, format!("cannot parse `{s}`")))
        })
        .collect()
}

fn parse_lambda_list(flag: &str, text: &str) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = parse_list(flag, text)?;
    for &l in &v {
        parse_lambda(flag, l)?;
    }
    Ok(v)
}

fn parse_n_list(flag: &str, text: &str) -> CliResult<Vec<usize>> {
    let v: Vec<i64> = parse_list(flag, text)?;
    v.into_iter().map(|n| parse_n(flag, n, 2)).collect()
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Pop(a) => cmd_pop(a, out),
        Command::Expect(a) => cmd_expect(a, out),
        Command::Estimate(a) => cmd_estimate(a, out, err),
        Command::Sample(a) => cmd_sample(a, out),
        Command::Simulate(a) => cmd_simulate(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn cmd_pop(a: PopArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = parse_lambda("--lambda", a.lambda)?;
    let g = gini::gini_population(&params, QuadSpec::default()).map_err(runtime)?;
    writeln!(out, "lambda {}", a.lambda)?;
    writeln!(out, "G      {}", fmt_sig(g, 12))?;
    Ok(())
}

fn cmd_expect(a: ExpectArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = parse_lambda("--lambda", a.lambda)?;
    let n = parse_n("--n", a.n, 2)?;
    let spec = QuadSpec::default();
    let g = gini::gini_population(&params, spec).map_err(runtime)?;
    let e = gini::expected_gini(&params, n, spec).map_err(runtime)?;
    writeln!(out, "lambda   {}", a.lambda)?;
    writeln!(out, "n        {n}")?;
    writeln!(out, "G        {}", fmt_sig(g, 12))?;
    writeln!(out, "E(G_hat) {}", fmt_sig(e, 12))?;
    writeln!(out, "bias     {}", fmt_sig(e - g, 12))?;
    Ok(())
}

fn read_source(path: Option<&Path>) -> CliResult<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p)
            .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn cmd_estimate(a: EstimateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let text = read_source(a.input.as_deref())?;
    let values = input::parse_counts(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    let sample = Sample::new(values).map_err(|e| CliError::Usage(e.to_string()))?;
    let g_hat = gini::gini_sample(&sample);
    let fit = ztp::mle(&sample);
    if fit.degenerate {
        writeln!(
            err,
            "warning: every observation equals 1; lambda_hat clamped to {}",
            ztp::MLE_LAMBDA_FLOOR
        )?;
    }

    let mut fields: Vec<(&str, String)> = vec![
        ("n", sample.len().to_string()),
        ("mean", fmt_sig(sample.mean(), 12)),
        ("g_hat", fmt_sig(g_hat, 12)),
        ("lambda_hat", fmt_sig(fit.lambda, 12)),
        ("lambda_degenerate", fit.degenerate.to_string()),
    ];
    if a.bias_correct {
        let report = gini::estimate(&sample, QuadSpec::default()).map_err(runtime)?;
        fields.push(("bias_hat", fmt_sig(report.bias_hat, 12)));
        fields.push(("g_hat_bc", fmt_sig(report.g_hat_bc, 12)));
    }

    if a.csv {
        let header: Vec<&str> = fields.iter().map(|f| f.0).collect();
        let row: Vec<&str> = fields.iter().map(|f| f.1.as_str()).collect();
        writeln!(out, "{}", header.join(","))?;
        writeln!(out, "{}", row.join(","))?;
    } else {
        for (k, v) in &fields {
            writeln!(out, "{k:<18}{v}")?;
        }
    }
    Ok(())
}

fn cmd_sample(a: SampleArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = parse_lambda("--lambda", a.lambda)?;
    let n = parse_n("--n", a.n, 1)?;
    let mut rng = simulation::replication_rng(a.seed, 0);
    let mut buf = io::BufWriter::new(out);
    for v in params.sample(n, &mut rng) {
        writeln!(buf, "{v}")?;
    }
    buf.flush()?;
    Ok(())
}

/// Column order of the simulation CSV.
pub const SIM_CSV_HEADER: &str =
    "lambda,n,true_g,mean_g_hat,mean_g_bc,rel_bias_std,rel_bias_bc,mse_std,mse_bc,degenerate_count,reps,seed";

/// Renders completed cells as CSV with LF line endings.
pub fn render_sim_csv(cells: &[ztpgini::SimCellSummary]) -> String {
    let mut s = String::from(SIM_CSV_HEADER);
    s.push('\n');
    for c in cells {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.lambda,
            c.n,
            c.true_g,
            c.mean_g_hat,
            c.mean_g_bc,
            c.rel_bias_std,
            c.rel_bias_bc,
            c.mse_std,
            c.mse_bc,
            c.degenerate_count,
            c.reps,
            c.cell_seed
        ));
    }
    s
}

/// The two report figures: relative bias vs n and MSE vs n.
pub fn render_figures(
    cells: &[ztpgini::SimCellSummary],
    lambdas: &[f64],
    log_y: bool,
) -> (String, String) {
    let chart = |title: &str, y_label: &str, pick: fn(&ztpgini::SimCellSummary) -> (f64, f64)| {
        let mut series = Vec::new();
        for (i, &l) in lambdas.iter().enumerate() {
            let mut rows: Vec<&ztpgini::SimCellSummary> =
                cells.iter().filter(|c| c.lambda == l).collect();
            rows.sort_by_key(|c| c.n);
            for (dashed, label) in [(false, "standard"), (true, "bias-corrected")] {
                series.push(svg::Series {
                    label: format!("λ={l} {label}"),
                    points: rows
                        .iter()
                        .map(|c| {
                            let (std, bc) = pick(c);
                            (c.n as f64, if dashed { bc } else { std })
                        })
                        .collect(),
                    color: i,
                    dashed,
                });
            }
        }
        svg::LineChart {
            title: title.into(),
            x_label: "sample size n".into(),
            y_label: y_label.into(),
            series,
            log_y,
        }
        .render()
    };
    (
        chart(
            "Relative bias of Gini estimators vs. sample size n",
            "relative bias",
            |c| (c.rel_bias_std, c.rel_bias_bc),
        ),
        chart(
            "Mean squared error of Gini estimators vs. sample size n",
            "MSE",
            |c| (c.mse_std, c.mse_bc),
        ),
    )
}

pub const RELATIVE_BIAS_SVG: &str = "relative_bias.svg";
pub const MSE_SVG: &str = "mse.svg";

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let lambdas = parse_lambda_list("--lambdas", &a.lambdas)?;
    let ns = parse_n_list("--ns", &a.ns)?;
    let reps = parse_n("--reps", a.reps, 1)?;
    let threads = a.threads.map(|t| parse_n("--threads", t, 1)).transpose()?;
    let config = SimConfig {
        lambdas: lambdas.clone(),
        ns,
        reps,
        master_seed: a.seed,
        quad: QuadSpec::default(),
        threads,
    };

    let report_progress = |p: simulation::CellProgress| {
        eprintln!(
            "[{}/{}] lambda={} n={} done",
            p.completed, p.total, p.lambda, p.n
        );
    };
    let progress: Option<&(dyn Fn(simulation::CellProgress) + Sync)> = if a.quiet {
        None
    } else {
        Some(&report_progress)
    };
    let outcomes: Vec<CellOutcome> =
        simulation::run_simulation(&config, progress).map_err(runtime)?;

    let mut cells = Vec::new();
    let mut failures = 0usize;
    for o in outcomes {
        match o {
            Ok(c) => cells.push(c),
            Err(f) => {
                failures += 1;
                writeln!(
                    err,
                    "cell lambda={} n={} seed={} failed: {}",
                    f.lambda, f.n, f.cell_seed, f.error
                )?;
            }
        }
    }

    let csv = render_sim_csv(&cells);
    match &a.out {
        Some(path) => fs::write(path, &csv)
            .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(csv.as_bytes())?,
    }
    if let Some(dir) = &a.svg {
        fs::create_dir_all(dir)?;
        let (bias, mse) = render_figures(&cells, &lambdas, a.log_y);
        fs::write(dir.join(RELATIVE_BIAS_SVG), bias)?;
        fs::write(dir.join(MSE_SVG), mse)?;
    }
    if failures > 0 {
        return Err(CliError::Runtime(format!("{failures} cell(s) failed")));
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = QuadSpec::default();
    if let Some(path) = &a.write_golden {
        let rows = oracle::golden_rows().map_err(runtime)?;
        fs::write(path, oracle::render_golden(&rows))?;
        writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        return Ok(());
    }
    let lambdas = parse_lambda_list("--lambdas", &a.lambdas)?;
    let ns = parse_n_list("--ns", &a.ns)?;
    if !a.inject_perturbation.is_finite() {
        return Err(usage("--inject-perturbation", "must be finite"));
    }
    let opts = SuiteOptions {
        perturbation: a.inject_perturbation,
        ..Default::default()
    };

    let golden_text = match &a.golden {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| runtime(format!("cannot read {}: {e}", p.display())))?,
        None => oracle::GOLDEN_CSV.to_string(),
    };
    let golden = oracle::parse_golden(&golden_text).map_err(runtime)?;

    let mut report = IdentityReport::default();
    for &l in &lambdas {
        let params = parse_lambda("--lambdas", l)?;
        for &n in &ns {
            let mut suite = oracle::identity_suite(&params, n, spec, opts);
            // population-level checks do not depend on n
            if n != ns[0] {
                suite.checks.retain(|c| c.n.is_some());
            }
            report.extend(suite);
        }
    }
    report.extend(oracle::marcum_identity_checks(spec, opts));
    report.extend(oracle::compare_golden(&golden, spec, a.inject_perturbation));

    for c in &report.checks {
        if !a.quiet || !c.passed {
            writeln!(out, "{c}")?;
        }
    }
    let failed = report.failures().count();
    writeln!(out, "{} checks, {} failed", report.checks.len(), failed)?;
    if !report.all_passed() {
        let first = report
            .failures()
            .next()
            .map(|c| {
                format!(
                    "; first: {} (residual {:.3e}, tol {:.0e})",
                    c.name, c.residual, c.tolerance
                )
            })
            .unwrap_or_default();
        return Err(CliError::Runtime(format!(
            "{failed} of {} checks failed{first}",
            report.checks.len()
        )));
    }
    Ok(())
}
