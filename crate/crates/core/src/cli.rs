//! Command-line front end: `run`, `verify`, `sweep` and `netsim`.
//!
//! Results go to stdout as JSON (sweeps write CSV or JSON files). Exit codes:
//! 0 success, 1 invalid input, 2 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::Result;
use crate::format::to_json_string;
use crate::metrics::MetricKind;
use crate::netsim::run_hierarchy;
use crate::parallel::{threads_from_env, with_threads};
use crate::spec_io::{
    branch_summary_value, branches_value, certificate_value, ensemble_value, load_switch_spec, load_topology,
};
use crate::sweep::{export, run_sweep, ExportFormat, SweepPlan, DEFAULT_STEPS};
use crate::switch::{run, Protocol};
use crate::verify::{certify, CONDITION_TOL};

macro_rules! spec_schema {
    () => {
        r#"Switch spec (--spec):
  {
    "version": 1,                          optional, must be 1
    "protocol": "single|bell|ghz|w",
    "n": 3,                                required for ghz (>= 2) and w (>= 3)
    "pairs": [{"u": GATE, "u_tilde": GATE}, ...],   one per target
    "input": {"alpha": 0.5} | {"states": [[a0, a1], ...]},
    "control": "even" | [amp, ...]        optional, default "even"
  }
  GATE:  pauli_x | pauli_y | pauli_z | ry(EXPR) | matrix([[a, b], [c, d]])
  EXPR:  arithmetic over numbers, pi, sqrt(..), e.g. "pi/2", "1/sqrt(2)"
  amp:   number | "0.6+0.8i" | [re, im]"#
    };
}

macro_rules! topology_schema {
    () => {
        r#"Topology (--topology):
  {
    "version": 1,                                 optional
    "coordinator": "e0",                          optional
    "coordinator_state": "ghz" | "product_plus",  optional, default "ghz"
    "entanglers": [{"id": "e1", "clients": 3, "gates"?: {...}, "alpha"?: 0.5, "link_noise"?: 0}, ...],
    "gates": {"u": GATE, "u_tilde": GATE},        default for every entangler
    "alpha": 0.5                                  default for every entangler
  }
  At most 12 qubits in total (clients plus one control per entangler)."#
    };
}

macro_rules! env_help {
    () => {
        "Environment:\n  SWITCH_THREADS  maximum number of worker threads (default: one per core)"
    };
}

const SPEC_SCHEMA: &str = spec_schema!();
const TOPOLOGY_SCHEMA: &str = topology_schema!();
const ENV_HELP: &str = env_help!();
const ROOT_HELP: &str = concat!(spec_schema!(), "\n\n", topology_schema!(), "\n\n", env_help!());

/// Fidelity deficit tolerated by the `every_branch_ghz` summary flag.
const GHZ_FIDELITY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "qswitch",
    version,
    about = "Entanglement generation with superposed causal orders"
)]
#[command(after_help = ROOT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a switch spec and print every control outcome.
    #[command(after_help = SPEC_SCHEMA)]
    Run {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Check the generation conditions and certify every outcome.
    #[command(after_help = SPEC_SCHEMA)]
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Overlap magnitude below which a qubit counts as orthogonal.
        #[arg(long, default_value_t = CONDITION_TOL)]
        tol: f64,
    },
    /// Sweep the (σ_z, R_y(2λ)) family over λ ∈ [0, π/2] and α ∈ [0, 1].
    #[command(after_help = ENV_HELP)]
    Sweep {
        /// bell, ghz<n> or w<n>
        #[arg(long)]
        protocol: Protocol,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        lambda_steps: usize,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        alpha_steps: usize,
        #[arg(long, value_enum, default_value_t = MetricArg::Auto)]
        metric: MetricArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Overrides SWITCH_THREADS.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a coordinator/entangler hierarchy.
    #[command(after_help = TOPOLOGY_SCHEMA)]
    Netsim {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportArg::Branches)]
        report: ReportArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Auto,
    Concurrence,
    #[value(name = "gme_concurrence", alias = "gme")]
    GmeConcurrence,
}

impl MetricArg {
    fn kind(self) -> Option<MetricKind> {
        match self {
            MetricArg::Auto => None,
            MetricArg::Concurrence => Some(MetricKind::Concurrence),
            MetricArg::GmeConcurrence => Some(MetricKind::GmeConcurrence),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportArg {
    Branches,
    Summary,
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    let value: Value = match command {
        Command::Run { spec } => {
            let spec = load_switch_spec(&spec)?;
            ensemble_value(&spec, &run(&spec))
        }
        Command::Verify { spec, tol } => certificate_value(&certify(&load_switch_spec(&spec)?, tol)?),
        Command::Sweep {
            protocol,
            lambda_steps,
            alpha_steps,
            metric,
            out,
            format,
            threads,
        } => {
            let plan = SweepPlan::uniform(protocol, lambda_steps, alpha_steps, metric.kind())?;
            let records = with_threads(threads.or_else(threads_from_env), || run_sweep(&plan))?;
            let format = match format {
                FormatArg::Csv => ExportFormat::Csv,
                FormatArg::Json => ExportFormat::Json,
            };
            export(&records, format, &out)?;
            return Ok(());
        }
        Command::Netsim { topology, report } => {
            let topo = load_topology(&topology)?;
            let branches = with_threads(threads_from_env(), || run_hierarchy(&topo))?;
            match report {
                ReportArg::Branches => branches_value(&branches),
                ReportArg::Summary => branch_summary_value(&topo, &branches, GHZ_FIDELITY_TOL),
            }
        }
    };
    writeln!(stdout, "{}", to_json_string(value)).map_err(|source| crate::Error::Io {
        path: "<stdout>".into(),
        source,
    })
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    1
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
