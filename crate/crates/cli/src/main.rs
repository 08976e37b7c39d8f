//! Command-line front end: builds reflectors, verifies them against exact
//! diagonalization and writes JSON or CSV reports.
//!
//! Exit status is 0 when every check embedded in a report passes, 2 when one
//! fails and 1 for usage errors (bad flags, out-of-range values, unwritable output).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::Serialize;

use eigenreflect::accounting::{b_hat_footprint, compare_scaling, ResourceLedger, ScalingTable};
use eigenreflect::grover::{grover_benchmark, GroverReport};
use eigenreflect::kernel::{
    alpha_coeffs, kernel_sup_over_gap, kernel_value, psi_amplitudes, select_params, KernelParams,
    DEFAULT_KERNEL_CONSTANT,
};
use eigenreflect::lcu::{QftMode, ReflectorA};
use eigenreflect::pea::{choose_pea_params, PeaParams, PeaReflector};
use eigenreflect::prep::{build_b_hat, QftSpec};
use eigenreflect::sim::ResourceFootprint;
use eigenreflect::spectral::synth_unitary;
use eigenreflect::suite::{run_all, Criterion, THRESHOLD_CONSTANT};
use eigenreflect::verify::{verify_reflection, VerifyReport};

/// Largest register the dense simulator is allowed to allocate (2^25 amplitudes).
const MAX_SIMULATED_QUBITS: usize = 25;

#[derive(Parser, Debug)]
#[command(name = "eigenreflect", version, about = "Approximate reflections over eigenvectors of unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gaussian kernel parameters, coefficient table and sup over the gap region.
    Kernel(KernelArgs),
    /// Coefficient-state preparation: weights, distance to the ideal state, gate counts.
    Prep(PrepArgs),
    /// Build a reflector for a random gapped unitary and verify it.
    #[command(subcommand)]
    Reflect(ReflectCommand),
    /// Ancilla, query and gate counts of both constructions over an (ε, Δ) grid.
    Compare(CompareArgs),
    /// One approximate reflection on the search unitary.
    Grover(GroverArgs),
    /// Every acceptance check at desk scale.
    VerifySuite(OutputArgs),
}

#[derive(Subcommand, Debug)]
enum ReflectCommand {
    /// Gaussian LCU with amplitude amplification.
    Lcu(ReflectArgs),
    /// Phase-estimation reflector.
    Pea(ReflectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Report format. Defaults to csv for `kernel` and `compare`, json otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Target accuracy, in (0, 0.2].
    #[arg(long, value_parser = parse_kernel_eps)]
    eps: f64,
    /// Spectral gap, in (0, π].
    #[arg(long, value_parser = parse_gap)]
    gap: f64,
    /// Kernel constant c.
    #[arg(long, default_value_t = DEFAULT_KERNEL_CONSTANT, value_parser = parse_positive)]
    c: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PrepArgs {
    /// Target accuracy, in (0, 0.2].
    #[arg(long, value_parser = parse_kernel_eps)]
    eps: f64,
    /// Spectral gap, in (0, π].
    #[arg(long, value_parser = parse_gap)]
    gap: f64,
    /// Kernel constant c.
    #[arg(long, default_value_t = DEFAULT_KERNEL_CONSTANT, value_parser = parse_positive)]
    c: f64,
    /// Fraction of ε spent on QFT truncation, in (0, 1).
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    qft_split: f64,
    /// Use the exact Fourier transform.
    #[arg(long)]
    exact_qft: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ReflectArgs {
    /// System dimension, a power of two ≥ 2.
    #[arg(long, value_parser = parse_dim)]
    dim: usize,
    /// Spectral gap, in (0, π].
    #[arg(long, value_parser = parse_gap)]
    gap: f64,
    /// Target accuracy: (0, 0.2] for lcu, (0, 1) for pea.
    #[arg(long, value_parser = parse_unit_open)]
    eps: f64,
    /// Seed of the instance; trial states use seed + 1.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Haar trial states.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..=100_000))]
    trials: u64,
    /// Kernel constant c (lcu only).
    #[arg(long, default_value_t = DEFAULT_KERNEL_CONSTANT, value_parser = parse_positive)]
    c: f64,
    /// Fraction of ε spent on QFT truncation, in (0, 1).
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    qft_split: f64,
    /// Use exact Fourier transforms.
    #[arg(long)]
    exact_qft: bool,
    /// The report passes when the largest trial error is at most this multiple of ε.
    #[arg(long, default_value_t = THRESHOLD_CONSTANT, value_parser = parse_positive)]
    error_factor: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Accuracies, comma separated, each in (0, 0.2].
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-4, 1e-8], value_parser = parse_kernel_eps)]
    eps: Vec<f64>,
    /// Gaps, comma separated, each in (0, π].
    #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2], value_parser = parse_gap)]
    gap: Vec<f64>,
    /// Kernel constant c.
    #[arg(long, default_value_t = DEFAULT_KERNEL_CONSTANT, value_parser = parse_positive)]
    c: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct GroverArgs {
    /// Search-space size, a power of two in [16, 1024].
    #[arg(long, value_parser = parse_grover_dim)]
    dim: usize,
    /// Target accuracy, in (0, 0.2].
    #[arg(long, value_parser = parse_kernel_eps)]
    eps: f64,
    /// Seed of the marked item.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))
}

fn parse_kernel_eps(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 && x <= 0.2 {
        Ok(x)
    } else {
        Err(format!("{x} is outside (0, 0.2]"))
    }
}

fn parse_unit_open(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(format!("{x} is outside (0, 1)"))
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    parse_unit_open(s)
}

fn parse_gap(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 && x <= std::f64::consts::PI {
        Ok(x)
    } else {
        Err(format!("{x} is outside (0, pi]"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x = parse_f64(s)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{x} must be positive"))
    }
}

fn parse_dim(s: &str) -> Result<usize, String> {
    let d: usize = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if d >= 2 && d.is_power_of_two() && d <= 1 << 12 {
        Ok(d)
    } else {
        Err(format!("{d} must be a power of two in [2, 4096]"))
    }
}

fn parse_grover_dim(s: &str) -> Result<usize, String> {
    let d = parse_dim(s)?;
    if (16..=1024).contains(&d) {
        Ok(d)
    } else {
        Err(format!("{d} must be in [16, 1024]"))
    }
}

/// How a run failed: bad input or a report whose checks did not hold.
#[derive(Debug, thiserror::Error)]
enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("checks failed")]
    Failed,
}

impl From<eigenreflect::Error> for RunError {
    fn from(e: eigenreflect::Error) -> Self {
        RunError::Usage(e.to_string())
    }
}

type RunResult<T> = Result<T, RunError>;

/// One named check recorded in a report.
#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
}

fn check(name: impl Into<String>, passed: bool) -> Check {
    Check { name: name.into(), passed }
}

fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn to_json<T: Serialize>(value: &T) -> RunResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| RunError::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> RunResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| RunError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| RunError::Usage(e.to_string()))
}

fn emit(output: &OutputArgs, body: &str) -> RunResult<()> {
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|e| RunError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| RunError::Usage(e.to_string()))
        }
    }
}

fn finish(passed: bool) -> RunResult<()> {
    if passed {
        Ok(())
    } else {
        Err(RunError::Failed)
    }
}

fn guard_width(qubits: usize) -> RunResult<()> {
    if qubits > MAX_SIMULATED_QUBITS {
        return Err(RunError::Usage(format!(
            "instance needs {qubits} simulated qubits, more than the {MAX_SIMULATED_QUBITS} allowed"
        )));
    }
    Ok(())
}

// kernel

#[derive(Serialize)]
struct AlphaRow {
    l: i64,
    alpha: f64,
}

#[derive(Serialize)]
struct KernelReport {
    command: &'static str,
    params: KernelParams,
    alpha: Vec<AlphaRow>,
    alpha_sum: f64,
    kernel_at_zero_deviation: f64,
    sup_over_gap: f64,
    sup_argmax: f64,
    checks: Vec<Check>,
    passed: bool,
}

fn kernel_cmd(args: &KernelArgs) -> RunResult<()> {
    let params = select_params(args.eps, args.gap, args.c)?;
    let table = alpha_coeffs::<f64>(&params);
    let alpha_sum = table.sum();
    let at_zero = (kernel_value(0.0f64, &params) - Complex::new(1.0, 0.0)).norm();
    let (sup, argmax) = kernel_sup_over_gap(&params);
    let eps = params.epsilon;
    let checks = vec![
        check("alpha sum within eps of 1", (alpha_sum - 1.0).abs() <= eps),
        check("|K(0) - 1| <= eps", at_zero <= eps),
        check("sup over gap <= eps", sup <= eps),
    ];
    let passed = all_pass(&checks);
    let alpha: Vec<AlphaRow> = table.iter().map(|(l, alpha)| AlphaRow { l, alpha }).collect();
    let body = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&alpha)?,
        Format::Json => to_json(&KernelReport {
            command: "kernel",
            params,
            alpha,
            alpha_sum,
            kernel_at_zero_deviation: at_zero,
            sup_over_gap: sup,
            sup_argmax: argmax,
            checks,
            passed,
        })?,
    };
    emit(&args.output, &body)?;
    finish(passed)
}

// prep

#[derive(Serialize)]
struct BetaRow {
    l: i64,
    beta_abs: f64,
}

#[derive(Serialize)]
struct PrepReport {
    command: &'static str,
    params: KernelParams,
    qft: QftSpec,
    beta: Vec<BetaRow>,
    beta_sum: f64,
    psi_distance: f64,
    footprint: ResourceFootprint,
    checks: Vec<Check>,
    passed: bool,
}

fn prep_cmd(args: &PrepArgs) -> RunResult<()> {
    let params = select_params(args.eps, args.gap, args.c)?;
    let spec = if args.exact_qft {
        QftSpec::exact(params.m)
    } else {
        QftSpec::with_budget(params.m, args.eps * args.qft_split)?
    };
    let b_hat = build_b_hat::<f64>(&params, spec)?;
    let psi = psi_amplitudes::<f64>(&params);
    let psi_distance =
        psi.iter().zip(b_hat.state.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let beta_sum: f64 = b_hat.beta.iter().sum();
    let allowed = if args.exact_qft { args.eps } else { args.eps * (1.0 + args.qft_split) };
    let checks = vec![
        check("distance to ideal state within budget", psi_distance <= allowed),
        check("weights sum to 2", (beta_sum - 2.0).abs() <= 1e-10),
    ];
    let passed = all_pass(&checks);
    let half = params.l as i64;
    let beta: Vec<BetaRow> =
        b_hat.beta.iter().enumerate().map(|(i, b)| BetaRow { l: i as i64 - half, beta_abs: b.abs() }).collect();
    let body = match args.output.format.unwrap_or(Format::Json) {
        Format::Csv => to_csv(&beta)?,
        Format::Json => to_json(&PrepReport {
            command: "prep",
            footprint: b_hat_footprint(&params, &spec),
            params,
            qft: spec,
            beta,
            beta_sum,
            psi_distance,
            checks,
            passed,
        })?,
    };
    emit(&args.output, &body)?;
    finish(passed)
}

// reflect

/// Shared by both constructions so the two reports line up key for key.
#[derive(Serialize)]
struct ReflectReport {
    command: &'static str,
    method: &'static str,
    dimension: usize,
    gap: f64,
    epsilon: f64,
    seed: u64,
    trials: usize,
    qft: QftMode,
    kernel: Option<KernelParams>,
    pea: Option<PeaParams>,
    s: Option<f64>,
    ancilla_qubits: usize,
    queries: u64,
    max_error: f64,
    threshold: f64,
    verify: VerifyReport,
    ledger: ResourceLedger,
    checks: Vec<Check>,
    passed: bool,
}

#[derive(Serialize)]
struct TrialRow {
    trial: usize,
    error: f64,
}

fn reflect_cmd(args: &ReflectArgs, lcu: bool) -> RunResult<()> {
    if lcu && args.eps > 0.2 {
        return Err(RunError::Usage(format!("--eps {} is outside (0, 0.2] for lcu", args.eps)));
    }
    let qft = if args.exact_qft { QftMode::Exact } else { QftMode::Budget(args.eps * args.qft_split) };
    let sys = args.dim.trailing_zeros() as usize;
    let (kernel, pea) = if lcu {
        let p = select_params(args.eps, args.gap, args.c)?;
        guard_width(sys + p.m + 2)?;
        (Some(p), None)
    } else {
        let p = choose_pea_params(args.eps, args.gap)?;
        guard_width(sys + p.ancilla_qubits())?;
        (None, Some(p))
    };

    let u = synth_unitary(args.dim, args.gap, args.seed)?;
    let trials = args.trials as usize;
    let trial_seed = args.seed.wrapping_add(1);
    let (verify, ledger, s, ancilla_qubits, queries) = if let Some(p) = &kernel {
        let rf = ReflectorA::with_params(&u, p.clone(), qft)?;
        let v = verify_reflection(&rf.a, &rf.layout, &u, trials, trial_seed)?;
        (v, rf.ledger.clone(), Some(rf.s()), rf.layout.ancilla_qubits, rf.normalized_queries())
    } else {
        let p = pea.expect("pea parameters chosen above");
        let rf = PeaReflector::with_params(&u, p, qft)?;
        let v = verify_reflection(&rf.a, &rf.layout, &u, trials, trial_seed)?;
        (v, rf.ledger.clone(), None, rf.layout.ancilla_qubits, p.queries())
    };

    let threshold = args.error_factor * args.eps;
    let checks = vec![
        check(format!("max error <= {} eps", args.error_factor), verify.max_error <= threshold),
        check("simulated columns stay normalized", verify.column_norm_deviation <= 1e-10),
    ];
    let passed = all_pass(&checks);
    let body = match args.output.format.unwrap_or(Format::Json) {
        Format::Csv => to_csv(verify.trial_errors.iter().enumerate().map(|(trial, &error)| TrialRow { trial, error }))?,
        Format::Json => to_json(&ReflectReport {
            command: "reflect",
            method: if lcu { "lcu" } else { "pea" },
            dimension: args.dim,
            gap: args.gap,
            epsilon: args.eps,
            seed: args.seed,
            trials,
            qft,
            kernel,
            pea,
            s,
            ancilla_qubits,
            queries,
            max_error: verify.max_error,
            threshold,
            verify,
            ledger,
            checks,
            passed,
        })?,
    };
    emit(&args.output, &body)?;
    finish(passed)
}

// compare

#[derive(Serialize)]
struct CompareRow {
    epsilon: f64,
    delta: f64,
    n_lcu: u64,
    n_pea: u64,
    cu_lcu: u64,
    cu_pea: u64,
    cb_lcu_model: u64,
    cb_pea_model: u64,
}

#[derive(Serialize)]
struct CompareReport {
    command: &'static str,
    table: ScalingTable,
    checks: Vec<Check>,
    passed: bool,
}

fn compare_cmd(args: &CompareArgs) -> RunResult<()> {
    let table = compare_scaling(&args.eps, &args.gap, args.c)?;
    let mut checks: Vec<Check> = table.checks().into_iter().map(|(n, p)| check(n, p)).collect();
    for r in &table.rows {
        let ratio = r.cu_lcu as f64 / r.cu_pea as f64;
        checks.push(check(
            format!("eps={} delta={}: C_U ratio {ratio:.3} within [1/8, 8]", r.epsilon, r.delta),
            (0.125..=8.0).contains(&ratio),
        ));
    }
    let passed = all_pass(&checks);
    let body = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(table.rows.iter().map(|r| CompareRow {
            epsilon: r.epsilon,
            delta: r.delta,
            n_lcu: r.n_lcu,
            n_pea: r.n_pea,
            cu_lcu: r.cu_lcu,
            cu_pea: r.cu_pea,
            cb_lcu_model: r.cb_lcu_model,
            cb_pea_model: r.cb_pea_model,
        }))?,
        Format::Json => to_json(&CompareReport { command: "compare", table, checks, passed })?,
    };
    emit(&args.output, &body)?;
    finish(passed)
}

// grover

#[derive(Serialize)]
struct GroverCsvRow {
    dimension: usize,
    marked: usize,
    epsilon: f64,
    seed: u64,
    gap: f64,
    s: f64,
    nu: f64,
    nu_bound: f64,
    success_probability: f64,
    success_bound: f64,
    passed: bool,
}

#[derive(Serialize)]
struct GroverJson {
    command: &'static str,
    #[serde(flatten)]
    report: GroverReport,
    success_probability: f64,
    success_bound: f64,
}

fn grover_cmd(args: &GroverArgs) -> RunResult<()> {
    let report = grover_benchmark(args.dim, args.eps, args.seed)?;
    let passed = report.passed;
    let success_probability = 1.0 - report.nu;
    // 1 − (1/√D + 10ε)², the leading-order envelope without the safety factor of 4
    let success_bound = (1.0 - report.nu_bound / 4.0).max(0.0);
    let body = match args.output.format.unwrap_or(Format::Json) {
        Format::Csv => to_csv([GroverCsvRow {
            dimension: report.dimension,
            marked: report.marked,
            epsilon: report.epsilon,
            seed: report.seed,
            gap: report.gap,
            s: report.s,
            nu: report.nu,
            nu_bound: report.nu_bound,
            success_probability,
            success_bound,
            passed,
        }])?,
        Format::Json => to_json(&GroverJson { command: "grover", report, success_probability, success_bound })?,
    };
    emit(&args.output, &body)?;
    finish(passed)
}

// verify-suite

#[derive(Serialize)]
struct SuiteReport {
    command: &'static str,
    criteria: Vec<Criterion>,
    passed: bool,
}

fn suite_cmd(args: &OutputArgs) -> RunResult<()> {
    let criteria = run_all();
    for c in &criteria {
        eprintln!("{}", c.line());
    }
    let passed = criteria.iter().all(|c| c.passed);
    let body = match args.format.unwrap_or(Format::Json) {
        Format::Csv => to_csv(&criteria)?,
        Format::Json => to_json(&SuiteReport { command: "verify-suite", criteria, passed })?,
    };
    emit(args, &body)?;
    finish(passed)
}

/// Rejects an output path whose directory does not exist, before any work is done.
fn check_output(output: &OutputArgs) -> RunResult<()> {
    let Some(path) = &output.out else { return Ok(()) };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => std::path::Path::new("."),
    };
    if !dir.is_dir() {
        return Err(RunError::Usage(format!("cannot write {}: {} is not a directory", path.display(), dir.display())));
    }
    if path.is_dir() {
        return Err(RunError::Usage(format!("cannot write {}: it is a directory", path.display())));
    }
    Ok(())
}

fn run(cli: &Cli) -> RunResult<()> {
    let output = match &cli.command {
        Command::Kernel(a) => &a.output,
        Command::Prep(a) => &a.output,
        Command::Reflect(ReflectCommand::Lcu(a) | ReflectCommand::Pea(a)) => &a.output,
        Command::Compare(a) => &a.output,
        Command::Grover(a) => &a.output,
        Command::VerifySuite(a) => a,
    };
    check_output(output)?;
    match &cli.command {
        Command::Kernel(a) => kernel_cmd(a),
        Command::Prep(a) => prep_cmd(a),
        Command::Reflect(ReflectCommand::Lcu(a)) => reflect_cmd(a, true),
        Command::Reflect(ReflectCommand::Pea(a)) => reflect_cmd(a, false),
        Command::Compare(a) => compare_cmd(a),
        Command::Grover(a) => grover_cmd(a),
        Command::VerifySuite(a) => suite_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Failed) => {
            eprintln!("eigenreflect: checks failed");
            ExitCode::from(2)
        }
        Err(RunError::Usage(msg)) => {
            eprintln!("eigenreflect: {msg}");
            ExitCode::from(1)
        }
    }
}
