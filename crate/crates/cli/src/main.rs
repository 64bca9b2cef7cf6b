//! Command-line front end: state analysis, duality verification sweeps, and
//! local filtering, with reproducible seeds and machine-readable output.
//!
//! Exit codes: 0 success, 1 sweep violation, 2 invalid state file,
//! 3 bad parameters, 4 rank-deficient marginal (filtering impossible).

use clap::{Args, Parser, Subcommand, ValueEnum};
use qduality::bell::{bell_max, normal_form};
use qduality::filtering::{filter_to_bell_diagonal, FilterError};
use qduality::harness::{
    duality_trial, same_meter_sweep, same_meter_trial, sweep_random, AxisMode, SweepSummary,
};
use qduality::knowledge::distinguishability_excess;
use qduality::linalg::{rotation_of_unitary, Matrix2};
use qduality::measurement::MeasurementAxis;
use qduality::states::{
    bell_mixture, bell_weights, depolarized_state, pure_schmidt, werner, StateError, TwoQubitState,
};
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VIOLATION: u8 = 1;
const EXIT_BAD_FILE: u8 = 2;
const EXIT_BAD_PARAMS: u8 = 3;
const EXIT_SINGULAR: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qduality",
    about = "Two-qubit knowledge-excess duality toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Bloch data, normal form, Bell factor and distinguishability
    /// excesses of a state.
    Analyze(AnalyzeArgs),
    /// Run the duality Monte Carlo sweeps and exit nonzero on any violation.
    Verify(VerifyArgs),
    /// Filter a state to Bell-diagonal form.
    Filter(FilterArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// RNG seed; falls back to QDUALITY_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trials per sweep.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Convergence target on the sum of marginal Bloch norms.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct StateArgs {
    /// State family: werner | depolarized | bell-mixture | pure | file.
    #[arg(long)]
    state: String,
    /// Werner mixing parameter (werner).
    #[arg(long = "R")]
    r: Option<f64>,
    /// First depolarization parameter (depolarized).
    #[arg(long = "R1")]
    r1: Option<f64>,
    /// Second depolarization parameter (depolarized).
    #[arg(long = "R2")]
    r2: Option<f64>,
    /// Bell-state weights p1,p2,p3,p4 (bell-mixture).
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Schmidt weight of sqrt(1-s)|VH> - sqrt(s)|HV> (pure).
    #[arg(long)]
    schmidt: Option<f64>,
    /// Path to a JSON density matrix {re: [[..;4];4], im: [[..;4];4]} (file).
    #[arg(long)]
    path: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

/// An error carrying its process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_BAD_PARAMS),
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Filter(args) => cmd_filter(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn resolve_seed(common: &CommonArgs) -> Result<u64, CliError> {
    if let Some(seed) = common.seed {
        return Ok(seed);
    }
    match std::env::var("QDUALITY_SEED") {
        Ok(text) => text.parse().map_err(|_| {
            CliError::new(
                EXIT_BAD_PARAMS,
                format!("QDUALITY_SEED is not a valid integer: {text:?}"),
            )
        }),
        Err(_) => Ok(1),
    }
}

fn resolve_state(args: &StateArgs) -> Result<(TwoQubitState, String), CliError> {
    let bad = |m: String| CliError::new(EXIT_BAD_PARAMS, m);
    let state_err = |e: StateError| CliError::new(EXIT_BAD_PARAMS, e.to_string());
    match args.state.as_str() {
        "werner" => {
            let r = args.r.ok_or_else(|| bad("werner requires --R".into()))?;
            Ok((werner(r).map_err(state_err)?, format!("werner(R={r})")))
        }
        "depolarized" => {
            let r1 = args
                .r1
                .ok_or_else(|| bad("depolarized requires --R1".into()))?;
            let r2 = args
                .r2
                .ok_or_else(|| bad("depolarized requires --R2".into()))?;
            Ok((
                depolarized_state(r1, r2).map_err(state_err)?,
                format!("depolarized(R1={r1}, R2={r2})"),
            ))
        }
        "bell-mixture" => {
            let p = args
                .p
                .as_ref()
                .ok_or_else(|| bad("bell-mixture requires --p p1,p2,p3,p4".into()))?;
            let p: [f64; 4] = p
                .clone()
                .try_into()
                .map_err(|_| bad("--p takes exactly four weights".into()))?;
            Ok((
                bell_mixture(&p).map_err(state_err)?,
                format!("bell-mixture(p={p:?})"),
            ))
        }
        "pure" => {
            let lambda = args
                .schmidt
                .ok_or_else(|| bad("pure requires --schmidt".into()))?;
            Ok((
                pure_schmidt(lambda).map_err(state_err)?,
                format!("pure(schmidt={lambda})"),
            ))
        }
        "file" => {
            let path = args
                .path
                .as_ref()
                .ok_or_else(|| bad("file requires --path".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::new(EXIT_BAD_FILE, format!("cannot read {}: {e}", path.display()))
            })?;
            let state = TwoQubitState::from_json(&text)
                .map_err(|e| CliError::new(EXIT_BAD_FILE, e.to_string()))?;
            Ok((state, format!("file({})", path.display())))
        }
        other => Err(bad(format!(
            "unknown state family {other:?} (expected werner, depolarized, bell-mixture, pure or file)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// JSON with 17 significant digits (lossless f64 round-trip)
// ---------------------------------------------------------------------------

struct Sci17;

impl serde_json::ser::Formatter for Sci17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sci17);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeReport {
    state: String,
    n: [f64; 3],
    m: [f64; 3],
    t: [[f64; 3]; 3],
    /// Normal-form diagonal in slot order (t33, t11, t22), magnitudes
    /// descending.
    tbar: [f64; 3],
    /// System axes realizing the two dominant normal-form correlations.
    axis_s: [f64; 3],
    axis_s_prime: [f64; 3],
    b_max: f64,
    delta_d: f64,
    delta_d_prime: f64,
    entangled: bool,
    violates_bell: bool,
    rho: TwoQubitState,
}

fn analyze(state: &TwoQubitState, label: &str) -> AnalyzeReport {
    let b = state.bloch();
    let nf = normal_form(state);
    let rot_s = rotation_of_unitary(&nf.u_s);
    let axis_s = MeasurementAxis::new(rot_s.0[2]).expect("rotation row");
    let axis_s_prime = MeasurementAxis::new(rot_s.0[0]).expect("rotation row");
    let b_max = bell_max(state);
    AnalyzeReport {
        state: label.to_string(),
        n: b.n,
        m: b.m,
        t: b.t.0,
        tbar: nf.tbar,
        axis_s: axis_s.direction(),
        axis_s_prime: axis_s_prime.direction(),
        b_max,
        delta_d: distinguishability_excess(state, &axis_s),
        delta_d_prime: distinguishability_excess(state, &axis_s_prime),
        entangled: state.is_entangled(),
        violates_bell: b_max > 2.0 + 1e-9,
        rho: state.clone(),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8, CliError> {
    let (state, label) = resolve_state(&args.state)?;
    let report = analyze(&state, &label);
    match args.common.format {
        Format::Json => println!("{}", to_json(&report)),
        Format::Csv => {
            println!(
                "state,b_max,delta_d,delta_d_prime,tbar_33,tbar_11,tbar_22,entangled,violates_bell"
            );
            println!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                report.state,
                report.b_max,
                report.delta_d,
                report.delta_d_prime,
                report.tbar[0],
                report.tbar[1],
                report.tbar[2],
                report.entangled,
                report.violates_bell
            );
        }
        Format::Pretty => {
            println!("state: {}", report.state);
            println!(
                "  n = [{:+.6}, {:+.6}, {:+.6}]",
                report.n[0], report.n[1], report.n[2]
            );
            println!(
                "  m = [{:+.6}, {:+.6}, {:+.6}]",
                report.m[0], report.m[1], report.m[2]
            );
            for (i, row) in report.t.iter().enumerate() {
                let head = if i == 1 { "T =" } else { "   " };
                println!("  {head} [{:+.6}, {:+.6}, {:+.6}]", row[0], row[1], row[2]);
            }
            println!(
                "  normal form diag (t33, t11, t22) = [{:+.6}, {:+.6}, {:+.6}]",
                report.tbar[0], report.tbar[1], report.tbar[2]
            );
            println!("  B_max = {:.10}", report.b_max);
            println!(
                "  distinguishability excess = {:.10} (axis [{:+.4}, {:+.4}, {:+.4}])",
                report.delta_d, report.axis_s[0], report.axis_s[1], report.axis_s[2]
            );
            println!(
                "  complementary excess      = {:.10} (axis [{:+.4}, {:+.4}, {:+.4}])",
                report.delta_d_prime,
                report.axis_s_prime[0],
                report.axis_s_prime[1],
                report.axis_s_prime[2]
            );
            println!("  entangled: {}", report.entangled);
            println!("  violates Bell inequality: {}", report.violates_bell);
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    trials: u64,
    random_axes: SweepSummary,
    optimal_axes: SweepSummary,
    same_meter: SweepSummary,
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    if args.trials < 1 {
        return Err(CliError::new(EXIT_BAD_PARAMS, "--trials must be at least 1"));
    }
    let seed = resolve_seed(&args.common)?;

    if args.common.format == Format::Csv {
        // Row per trial for plotting.
        let mut out = std::io::stdout().lock();
        writeln!(
            out,
            "sweep,trial,dk,dk_prime,lhs,b_max,rhs,slack,holds,saturated"
        )
        .expect("stdout");
        for trial in 0..args.trials {
            for (name, mode) in [
                ("random_axes", AxisMode::RandomAxes),
                ("optimal_axes", AxisMode::OptimalAxes),
            ] {
                let r = duality_trial(seed, trial, mode);
                writeln!(
                    out,
                    "{name},{trial},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                    r.dk, r.dk_prime, r.lhs, r.b_max, r.rhs, r.slack, r.holds, r.saturated
                )
                .expect("stdout");
            }
            let r = same_meter_trial(seed, trial);
            writeln!(
                out,
                "same_meter,{trial},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                r.dk, r.dk_prime, r.lhs, r.b_max, r.rhs, r.slack, r.holds, r.saturated
            )
            .expect("stdout");
        }
    }

    let report = VerifyReport {
        seed,
        trials: args.trials,
        random_axes: sweep_random(args.trials, seed, AxisMode::RandomAxes),
        optimal_axes: sweep_random(args.trials, seed, AxisMode::OptimalAxes),
        same_meter: same_meter_sweep(args.trials, seed),
    };
    let violations = report.random_axes.violations
        + report.optimal_axes.violations
        + report.same_meter.violations;

    match args.common.format {
        Format::Json => println!("{}", to_json(&report)),
        Format::Csv => {}
        Format::Pretty => {
            println!(
                "duality verification: seed {}, {} trials per sweep",
                seed, args.trials
            );
            for (name, s) in [
                ("random meter axes ", &report.random_axes),
                ("optimal meter axes", &report.optimal_axes),
                ("same-meter bound  ", &report.same_meter),
            ] {
                println!(
                    "  {name}: violations {}, min slack {:+.3e}, max lhs {:.6}, saturation hits {}",
                    s.violations, s.min_slack, s.max_lhs, s.saturation_hits
                );
            }
            println!(
                "  result: {}",
                if violations == 0 { "OK" } else { "VIOLATION" }
            );
        }
    }

    if violations > 0 {
        for s in [&report.random_axes, &report.optimal_axes, &report.same_meter] {
            if s.violations > 0 {
                if let Some(worst) = &s.worst_case {
                    eprintln!("violation: {}", to_json(worst));
                }
            }
        }
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Mat2Json {
    re: [[f64; 2]; 2],
    im: [[f64; 2]; 2],
}

impl From<&Matrix2> for Mat2Json {
    fn from(m: &Matrix2) -> Self {
        let mut re = [[0.0; 2]; 2];
        let mut im = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                re[i][j] = m.0[i][j].re;
                im[i][j] = m.0[i][j].im;
            }
        }
        Mat2Json { re, im }
    }
}

#[derive(Serialize)]
struct FilterReport {
    state: String,
    converged: bool,
    iterations: usize,
    success_prob: f64,
    b_max_before: f64,
    b_max_after: f64,
    filter_s: Mat2Json,
    filter_m: Mat2Json,
    /// Bell-basis weights of the filtered state (Psi-, Phi-, Psi+, Phi+).
    bell_weights: [f64; 4],
    rho: TwoQubitState,
}

fn cmd_filter(args: FilterArgs) -> Result<u8, CliError> {
    if !args.tol.is_finite() || args.tol <= 0.0 || args.max_iter == 0 {
        return Err(CliError::new(
            EXIT_BAD_PARAMS,
            "--tol must be positive and --max-iter at least 1",
        ));
    }
    let (state, label) = resolve_state(&args.state)?;
    let before = bell_max(&state);
    let outcome = filter_to_bell_diagonal(&state, args.tol, args.max_iter).map_err(|e| match e {
        FilterError::SingularMarginal { .. } => CliError::new(EXIT_SINGULAR, e.to_string()),
        FilterError::State(inner) => CliError::new(EXIT_BAD_PARAMS, inner.to_string()),
    })?;
    let report = FilterReport {
        state: label,
        converged: outcome.converged,
        iterations: outcome.iterations,
        success_prob: outcome.success_prob,
        b_max_before: before,
        b_max_after: bell_max(&outcome.state),
        filter_s: Mat2Json::from(outcome.total_filter_s.matrix()),
        filter_m: Mat2Json::from(outcome.total_filter_m.matrix()),
        bell_weights: bell_weights(&outcome.state),
        rho: outcome.state.clone(),
    };
    match args.common.format {
        Format::Json => println!("{}", to_json(&report)),
        Format::Csv => {
            println!(
                "state,converged,iterations,success_prob,b_max_before,b_max_after,p1,p2,p3,p4"
            );
            println!(
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                report.state,
                report.converged,
                report.iterations,
                report.success_prob,
                report.b_max_before,
                report.b_max_after,
                report.bell_weights[0],
                report.bell_weights[1],
                report.bell_weights[2],
                report.bell_weights[3]
            );
        }
        Format::Pretty => {
            println!("state: {}", report.state);
            println!(
                "  converged: {} after {} iterations, success probability {:.10}",
                report.converged, report.iterations, report.success_prob
            );
            println!(
                "  B_max: {:.10} -> {:.10}",
                report.b_max_before, report.b_max_after
            );
            let print_mat = |name: &str, m: &Mat2Json| {
                println!("  {name}:");
                for i in 0..2 {
                    println!(
                        "    [{:+.6}{:+.6}i, {:+.6}{:+.6}i]",
                        m.re[i][0], m.im[i][0], m.re[i][1], m.im[i][1]
                    );
                }
            };
            print_mat("filter on S", &report.filter_s);
            print_mat("filter on M", &report.filter_m);
            println!(
                "  Bell weights (Psi-, Phi-, Psi+, Phi+) = [{:.6}, {:.6}, {:.6}, {:.6}]",
                report.bell_weights[0],
                report.bell_weights[1],
                report.bell_weights[2],
                report.bell_weights[3]
            );
        }
    }
    Ok(0)
}
