//! `clocksync`: figure sweeps, single-point evaluation and the oracle
//! self-test for the relativistic clock synchronization model.
//!
//! Exit codes: 0 success, 1 parameter or I/O error, 2 self-test failure.

use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use clocksync::protocol::{
    bipartite_channel_state, concurrence_x_state, estimate_delta, optimal_k, prob_pos_bipartite, prob_pos_w,
    prob_pos_z, Family,
};
use clocksync::selftest::{run_selftest, SelftestConfig};
use clocksync::sweep::{self, format_sig, round_sig, OutputFormat, Param, SweepSpec};

#[derive(Parser)]
#[command(
    name = "clocksync",
    version,
    about = "Quantum clock synchronization with an accelerated atom"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// W and optimal-Z probability against the number of atoms
    Fig1(Fig1Args),
    /// Bipartite probability and concurrence against the state angle θ
    Fig2(Fig2Args),
    /// Bipartite, W and optimal-Z probability against q
    Fig3(Fig3Args),
    /// Bipartite, W and optimal-Z probability against ν
    Fig4(Fig4Args),
    /// Evaluate one parameter point, optionally inverting an observed probability
    Eval(EvalArgs),
    /// Run the seeded oracle-equivalence suite
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Z,
    W,
    Bipartite,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Z => Family::Z,
            FamilyArg::W => Family::W,
            FamilyArg::Bipartite => Family::Bipartite,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct Fig1Args {
    /// Largest atom number (sweep covers 2..=n)
    #[arg(long, default_value_t = sweep::DEFAULT_N_MAX)]
    n: usize,
    /// Fix the Z excitation number instead of optimizing it per n
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = sweep::DEFAULT_Q)]
    q: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_NU)]
    nu: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_OMEGA_DELTA, allow_negative_numbers = true)]
    omega_delta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Fig2Args {
    /// θ grid points on [0, π/2]
    #[arg(long, default_value_t = sweep::DEFAULT_THETA_STEPS)]
    steps: usize,
    #[arg(long, default_value_t = sweep::DEFAULT_Q)]
    q: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_NU)]
    nu: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_OMEGA_DELTA, allow_negative_numbers = true)]
    omega_delta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Fig3Args {
    /// q grid points on [0, q_max]
    #[arg(long, default_value_t = sweep::DEFAULT_STEPS)]
    steps: usize,
    /// Atom number of the W and Z families
    #[arg(long, default_value_t = sweep::DEFAULT_N_MULTI)]
    n: usize,
    #[arg(long, default_value_t = sweep::DEFAULT_NU)]
    nu: f64,
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_Q_MAX)]
    q_max: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_OMEGA_DELTA, allow_negative_numbers = true)]
    omega_delta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Fig4Args {
    /// ν grid points on [0, nu_max]
    #[arg(long, default_value_t = sweep::DEFAULT_STEPS)]
    steps: usize,
    /// Atom number of the W and Z families
    #[arg(long, default_value_t = sweep::DEFAULT_N_MULTI)]
    n: usize,
    #[arg(long, default_value_t = sweep::FIG4_Q)]
    q: f64,
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_NU_MAX)]
    nu_max: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_OMEGA_DELTA, allow_negative_numbers = true)]
    omega_delta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum, default_value = "z")]
    family: FamilyArg,
    #[arg(long, default_value_t = sweep::DEFAULT_N_MULTI)]
    n: usize,
    /// Z excitation number; optimized when omitted
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = sweep::DEFAULT_Q)]
    q: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_NU)]
    nu: f64,
    #[arg(long, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_OMEGA_DELTA, allow_negative_numbers = true)]
    omega_delta: f64,
    /// Observed |pos⟩ probability to invert into clock-offset candidates
    #[arg(long)]
    estimate: Option<f64>,
    /// Energy gap Ω used to turn phases into time offsets
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random draws per parameter cell
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Closed-form vs pipeline tolerance
    #[arg(long, default_value_t = clocksync::protocol::PIPELINE_TOL)]
    tol: f64,
}

#[derive(Debug)]
enum Failure {
    Param(String),
    Selftest,
}

impl From<clocksync::Error> for Failure {
    fn from(e: clocksync::Error) -> Self {
        Failure::Param(e.to_string())
    }
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Param(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Selftest) => ExitCode::from(2),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Fig1(a) => {
            let mut spec = sweep::fig1_spec(a.n);
            spec.set(Param::Q, a.q)
                .set(Param::Nu, a.nu)
                .set(Param::OmegaDelta, a.omega_delta);
            if let Some(k) = a.k {
                spec.set(Param::K, k as f64);
            }
            emit_sweep(spec, &a.output)
        }
        Command::Fig2(a) => {
            let mut spec = sweep::fig2_spec(a.steps);
            spec.set(Param::Q, a.q)
                .set(Param::Nu, a.nu)
                .set(Param::OmegaDelta, a.omega_delta);
            emit_sweep(spec, &a.output)
        }
        Command::Fig3(a) => {
            let mut spec = sweep::fig3_spec(a.steps, a.n);
            spec.range.stop = a.q_max;
            spec.set(Param::Nu, a.nu)
                .set(Param::Theta, a.theta)
                .set(Param::OmegaDelta, a.omega_delta);
            emit_sweep(spec, &a.output)
        }
        Command::Fig4(a) => {
            let mut spec = sweep::fig4_spec(a.steps, a.n);
            spec.range.stop = a.nu_max;
            spec.set(Param::Q, a.q)
                .set(Param::Theta, a.theta)
                .set(Param::OmegaDelta, a.omega_delta);
            emit_sweep(spec, &a.output)
        }
        Command::Eval(a) => {
            let text = eval_point(&a)?;
            write_output(&text, &a.output)
        }
        Command::Selftest(a) => {
            let mut config = SelftestConfig {
                seed: a.seed,
                samples: a.samples,
                ..SelftestConfig::default()
            };
            config.tolerances.pipeline = a.tol;
            let report = run_selftest(&config)?;
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Selftest)
            }
        }
    }
}

fn emit_sweep(mut spec: SweepSpec, output: &Output) -> Result<(), Failure> {
    spec.format = output.format.into();
    let result = sweep::run_sweep(&spec)?;
    write_output(&result.render(), output)
}

fn write_output(text: &str, output: &Output) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Param(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn eval_point(a: &EvalArgs) -> Result<String, Failure> {
    let family = Family::from(a.family);
    let mut fields: Vec<(&str, Field)> = Vec::new();
    let result = match family {
        Family::Z => {
            let best = optimal_k(a.n, a.q, a.nu)?;
            let k = a.k.unwrap_or(best.k_opt);
            fields.push(("n", Field::Int(a.n)));
            fields.push(("k", Field::Int(k)));
            fields.push(("k_opt", Field::Int(best.k_opt)));
            fields.push(("y_formula_k", Field::Int(best.y_formula_k)));
            prob_pos_z(a.n, k, a.q, a.nu, a.omega_delta)?
        }
        Family::W => {
            fields.push(("n", Field::Int(a.n)));
            prob_pos_w(a.n, a.q, a.nu, a.omega_delta)?
        }
        Family::Bipartite => {
            let c = concurrence_x_state(&bipartite_channel_state(a.theta, a.q, a.nu)?)?;
            fields.push(("theta", Field::Real(a.theta)));
            fields.push(("concurrence", Field::Real(c)));
            prob_pos_bipartite(a.theta, a.q, a.nu, a.omega_delta)?
        }
    };
    fields.insert(0, ("family", Field::Text(family.label())));
    fields.extend([
        ("q", Field::Real(a.q)),
        ("nu", Field::Real(a.nu)),
        ("omega_delta", Field::Real(a.omega_delta)),
        ("p_pos", Field::Real(result.p_pos)),
        ("p_neg", Field::Real(result.p_neg)),
        ("amplitude", Field::Real(result.amplitude)),
    ]);
    if let Some(p_obs) = a.estimate {
        let candidates = estimate_delta(p_obs, result.amplitude, a.omega)?;
        fields.push(("p_obs", Field::Real(p_obs)));
        fields.push(("omega", Field::Real(a.omega)));
        fields.push(("delta_candidates", Field::List(candidates)));
    }
    Ok(match a.output.format {
        Format::Csv => {
            let mut out = String::from("field,value\n");
            for (name, value) in &fields {
                let _ = writeln!(out, "{name},{}", value.csv());
            }
            out
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .iter()
                .map(|(name, value)| (name.to_string(), value.json()))
                .collect();
            let mut s = serde_json::to_string_pretty(&map).expect("object serializes");
            s.push('\n');
            s
        }
    })
}

enum Field {
    Int(usize),
    Real(f64),
    Text(&'static str),
    List(Vec<f64>),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Real(v) => format_sig(*v),
            Field::Text(s) => s.to_string(),
            // ';' keeps the list in one CSV cell
            Field::List(v) => v.iter().map(|x| format_sig(*x)).collect::<Vec<_>>().join(";"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Field::Int(v) => (*v).into(),
            Field::Real(v) => round_sig(*v).into(),
            Field::Text(s) => (*s).into(),
            Field::List(v) => v.iter().map(|x| round_sig(*x)).collect::<Vec<f64>>().into(),
        }
    }
}
