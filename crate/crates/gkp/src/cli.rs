//! Argument parsing and the subcommand implementations.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags or parameters
//! outside their domain), 1 for numerical failures. Results go to standard
//! output or `--output`; diagnostics go to standard error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gkp_core::error_model::{
    default_p_quadrature, find_delta_with_quadrature, p_no_error_with, shift_distribution, DEFAULT_RESOLUTION,
};
use gkp_core::montecarlo::{lower_bound_from, RunConfig, RunStats};
use gkp_core::numerics::QuadratureSpec;
use gkp_core::oracle::{draw_trial, run_drawn, AgreementReport, OracleConfig, ShiftSampling};
use gkp_core::shift::{worst_case_check_with_budget, BoundCheck, Quadrature, DEFAULT_BUDGET};
use gkp_core::states::{mean_photons_crude, misid_probability_approx};
use gkp_core::{GkpState, LogicalLabel, StateParams, ThresholdMode, CORRECTABLE_SHIFT};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::formats::{self, FormatError};
use crate::parallel::{oracle_check_parallel, simulate_parallel};
use crate::report::{col, CsvTable, Envelope};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Bisection tolerance on Δ for `find-delta` and `photons`.
const DELTA_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<gkp_core::Error> for CliError {
    fn from(e: gkp_core::Error) -> Self {
        use gkp_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::GridSize(_) | E::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(io) => CliError::Io(io),
            FormatError::Csv(e) if e.is_io_error() => match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::Io(io),
                other => CliError::Numerical(format!("{other:?}")),
            },
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        FormatError::from(e).into()
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "gkp", version, about = "Shift-error analysis of GKP-encoded qubits")]
pub struct Cli {
    /// Quadrature tolerance: absolute for P_no-error and photon numbers,
    /// relative for misidentification [default: 1e-12 absolute, 1e-10 relative]
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Master seed for sampled computations
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Write results to this file instead of standard output
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct StateArgs {
    /// Peak width Δ
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Envelope parameter k [default: same as --delta]
    #[arg(long)]
    pub kappa: Option<f64>,
}

impl StateArgs {
    fn params(&self) -> CliResult<StateParams> {
        Ok(StateParams::new(self.delta, self.kappa.unwrap_or(self.delta))?)
    }

    /// Both parameters with the default for k filled in.
    fn resolved(&self) -> serde_json::Value {
        json!({ "delta": self.delta, "kappa": self.kappa.unwrap_or(self.delta) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Run every round and record flips in the Pauli frame
    Track,
    /// Stop a trial at its first flip
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Circuit {
    X,
    P,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Shift sums below 0.45·√π
    Success,
    /// Shift sums on both sides of √π/2
    Straddling,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("range must satisfy LO < HI, got {lo},{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a codeword wavefunction on a uniform grid (CSV)
    Wavefunction {
        #[command(flatten)]
        state: StateArgs,
        /// Logical label
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        label: u8,
        #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
        xmin: f64,
        #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
        xmax: f64,
        /// Number of sample points
        #[arg(long, default_value_t = 801, value_parser = clap::value_parser!(u64).range(1..=10_000_000))]
        points: u64,
    },
    /// Probability that x-homodyne misreads the codeword (JSON)
    Misid {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        label: u8,
        /// Report only the erfc approximation and skip the quadrature
        #[arg(long)]
        approx: bool,
    },
    /// Tabulate the shift density P(u,v) over the fundamental cell
    Puv {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        label: u8,
        /// Cells along u
        #[arg(long, default_value_t = 128)]
        nu: usize,
        /// Cells along v
        #[arg(long, default_value_t = 64)]
        nv: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// P_no-error against Δ = k (CSV)
    Pnoerror {
        /// Δ range as LO,HI
        #[arg(long, default_value = "0.1,0.5", value_parser = parse_range)]
        delta_range: (f64, f64),
        #[arg(long, default_value_t = 41, value_parser = clap::value_parser!(u64).range(2..=100_000))]
        steps: u64,
        /// Half-width of the acceptance square
        #[arg(long, default_value_t = CORRECTABLE_SHIFT)]
        threshold: f64,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        label: u8,
    },
    /// Δ = k at which P_no-error reaches a target (JSON)
    FindDelta {
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = CORRECTABLE_SHIFT)]
        threshold: f64,
    },
    /// Mean photon number against the error probability (CSV)
    Photons {
        /// P_no-error range as LO,HI
        #[arg(long, default_value = "0.5,0.999", value_parser = parse_range)]
        pnoerror_range: (f64, f64),
        #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(2..=10_000))]
        steps: u64,
    },
    /// Worst-case check that shifts below t never flip the qubit (JSON)
    VerifyBound {
        /// t in units of √π/6
        #[arg(long)]
        t_over_threshold: f64,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        /// Maximum number of sign patterns to enumerate
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Monte Carlo of repeated correction rounds (JSON, or histogram CSV)
    Simulate {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        rounds: u32,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Mode::Track)]
        mode: Mode,
        /// Cells along u of the sampled distribution
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        nu: usize,
        /// Cells along v of the sampled distribution
        #[arg(long, default_value_t = DEFAULT_RESOLUTION / 2)]
        nv: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Grid simulation of the circuits against the shift algebra (JSON)
    OracleCheck {
        #[command(flatten)]
        state: StateArgs,
        /// Grid points per mode; a power of two
        #[arg(long, default_value_t = 1024)]
        grid_n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Circuit::Both)]
        circuit: Circuit,
        #[arg(long, value_enum, default_value_t = Sampling::Success)]
        sampling: Sampling,
        /// Also write the corrected state of trial 0 (binary grid format)
        #[arg(long)]
        dump_state: Option<PathBuf>,
        /// Include every trial in the report
        #[arg(long)]
        details: bool,
    },
}

fn label(bit: u8) -> CliResult<LogicalLabel> {
    Ok(LogicalLabel::from_bit(bit)?)
}

fn quadrature(cli: &Cli) -> CliResult<QuadratureSpec> {
    match cli.tolerance {
        None => Ok(default_p_quadrature()),
        Some(t) => Ok(QuadratureSpec::new(t, 40)?),
    }
}

fn misid_quadrature(cli: &Cli) -> CliResult<QuadratureSpec> {
    let rel = cli.tolerance.unwrap_or(1e-10);
    if !(rel > 0.0 && rel < 1.0) {
        return Err(CliError::Usage(format!("tolerance must lie in (0, 1), got {rel}")));
    }
    Ok(QuadratureSpec::new(1e-60, 40)?.with_rel_tol(rel))
}

fn check_threshold(t: f64) -> CliResult<()> {
    if !(t > 0.0 && t <= 0.5 * gkp_core::SQRT_PI) {
        return Err(CliError::Usage(format!("threshold must lie in (0, sqrt(pi)/2], got {t}")));
    }
    Ok(())
}

fn linspace(lo: f64, hi: f64, steps: u64) -> impl Iterator<Item = f64> {
    let n = steps.max(2) - 1;
    (0..=n).map(move |i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
}

/// Parses arguments and runs the command, writing results to `stdout`
/// unless `--output` names a file.
pub fn run<W: Write>(cli: &Cli, stdout: W) -> CliResult<()> {
    match &cli.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            dispatch(cli, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => dispatch(cli, stdout),
    }
}

fn dispatch<W: Write>(cli: &Cli, mut out: W) -> CliResult<()> {
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {t}")));
        }
    }
    match &cli.command {
        Command::Wavefunction { state, label: l, xmin, xmax, points } => {
            if !(xmin.is_finite() && xmax.is_finite() && xmin < xmax) {
                return Err(CliError::Usage(format!("need xmin < xmax, got {xmin} and {xmax}")));
            }
            let s = GkpState::new(state.params()?, label(*l)?);
            let mut t = CsvTable::new(&mut out, &[col("x", "1"), col("amplitude", "1")])?;
            let xs: Vec<f64> = if *points == 1 { vec![*xmin] } else { linspace(*xmin, *xmax, *points).collect() };
            for x in xs {
                t.row(&[x, s.wavefunction(x)])?;
            }
            t.finish()?;
        }
        Command::Misid { state, label: l, approx } => {
            let params = state.params()?;
            let exact = if *approx {
                None
            } else {
                Some(GkpState::new(params, label(*l)?).misid_probability(&misid_quadrature(cli)?)?)
            };
            let outputs = json!({ "exact": exact, "approx": misid_probability_approx(params) });
            Envelope::new(json!({ "state": state.resolved(), "label": l, "approx_only": approx }), outputs)
                .write(out)?;
        }
        Command::Puv { state, label: l, nu, nv, format } => {
            let dist = shift_distribution(state.params()?, label(*l)?, *nu, *nv)?;
            match format {
                Format::Csv => formats::write_distribution_csv(out, &dist)?,
                Format::Json => {
                    let inputs = json!({ "state": state.resolved(), "label": l, "nu": nu, "nv": nv });
                    Envelope::new(inputs, &dist).write(out)?;
                }
            }
        }
        Command::Pnoerror { delta_range, steps, threshold, label: l } => {
            check_threshold(*threshold)?;
            let quad = quadrature(cli)?;
            let lab = label(*l)?;
            let mut t = CsvTable::new(&mut out, &[col("delta", "1"), col("p_no_error", "probability")])?;
            for d in linspace(delta_range.0, delta_range.1, *steps) {
                t.row(&[d, p_no_error_with(StateParams::symmetric(d)?, lab, *threshold, &quad)?])?;
            }
            t.finish()?;
        }
        Command::FindDelta { target, threshold } => {
            check_threshold(*threshold)?;
            let quad = quadrature(cli)?;
            let delta = find_delta_with_quadrature(*target, *threshold, DELTA_TOL, &quad)?;
            let achieved = p_no_error_with(StateParams::symmetric(delta)?, LogicalLabel::Zero, *threshold, &quad)?;
            let inputs = json!({ "target": target, "threshold": threshold, "delta_tolerance": DELTA_TOL });
            Envelope::new(inputs, json!({ "delta": delta, "p_no_error": achieved })).write(out)?;
        }
        Command::Photons { pnoerror_range, steps } => {
            let (lo, hi) = *pnoerror_range;
            if !(lo > 0.0 && hi < 1.0) {
                return Err(CliError::Usage(format!("P_no-error range must lie inside (0, 1), got {lo},{hi}")));
            }
            let quad = quadrature(cli)?;
            let columns = [
                col("p_error", "probability"),
                col("n_exact", "photons"),
                col("n_crude", "photons"),
                col("delta", "1"),
            ];
            let mut t = CsvTable::new(&mut out, &columns)?;
            for p in linspace(lo, hi, *steps) {
                let d = find_delta_with_quadrature(p, CORRECTABLE_SHIFT, DELTA_TOL, &quad)?;
                let params = StateParams::symmetric(d)?;
                let exact = GkpState::new(params, LogicalLabel::Zero).mean_photons(&quad)?;
                t.row(&[1.0 - p, exact, mean_photons_crude(params), d])?;
            }
            t.finish()?;
        }
        Command::VerifyBound { t_over_threshold, rounds, budget } => {
            if !(*t_over_threshold >= 0.0 && t_over_threshold.is_finite()) {
                return Err(CliError::Usage(format!("t must be nonnegative, got {t_over_threshold}")));
            }
            let t = t_over_threshold * CORRECTABLE_SHIFT;
            let check: BoundCheck = worst_case_check_with_budget(t, *rounds, *budget)?;
            let inputs = json!({ "t_over_threshold": t_over_threshold, "t": t, "rounds": rounds, "budget": budget });
            Envelope::new(inputs, check).write(out)?;
        }
        Command::Simulate { state, rounds, trials, mode, nu, nv, format } => {
            let params = state.params()?;
            let threshold_mode = match mode {
                Mode::Track => ThresholdMode::TrackOnly,
                Mode::Abort => ThresholdMode::AbortOnFlip,
            };
            let config = RunConfig::new(params, *rounds, *trials, cli.seed)?.with_mode(threshold_mode);
            let dist0 = shift_distribution(params, LogicalLabel::Zero, *nu, *nv)?;
            let dist_plus = dist0.transposed();
            let stats: RunStats = simulate_parallel(config, &dist0, &dist_plus)?;
            match format {
                Format::Csv => formats::write_histogram_csv(out, &stats.residual_histogram)?,
                Format::Json => {
                    let quad = quadrature(cli)?;
                    let pne = p_no_error_with(params, LogicalLabel::Zero, CORRECTABLE_SHIFT, &quad)?;
                    let bound = lower_bound_from(pne, config.states_consumed());
                    let inputs = json!({
                        "state": state.resolved(), "rounds": rounds, "trials": trials, "seed": cli.seed,
                        "mode": mode, "nu": nu, "nv": nv,
                    });
                    let outputs = json!({
                        "stats": stats,
                        "success_rate": stats.success_rate(),
                        "p_no_error": pne,
                        "states_consumed": config.states_consumed(),
                        "lower_bound_success": bound,
                    });
                    Envelope::new(inputs, outputs).write(out)?;
                }
            }
        }
        Command::OracleCheck { state, grid_n, trials, circuit, sampling, dump_state, details } => {
            if *trials == 0 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            let config = OracleConfig::new(state.params()?, *grid_n)?;
            let shift_sampling = match sampling {
                Sampling::Success => ShiftSampling::SuccessBranch,
                Sampling::Straddling => ShiftSampling::Straddling,
            };
            let circuits: &[Quadrature] = match circuit {
                Circuit::X => &[Quadrature::X],
                Circuit::P => &[Quadrature::P],
                Circuit::Both => &[Quadrature::X, Quadrature::P],
            };
            let mut reports = Vec::new();
            for q in circuits {
                let mut r: AgreementReport = oracle_check_parallel(&config, *q, shift_sampling, *trials, cli.seed)?;
                let summary = json!({
                    "circuit": q,
                    "trials": r.trials,
                    "compared": r.compared,
                    "skipped": r.skipped,
                    "dx": r.dx,
                    "dp": r.dp,
                    "max_residual_discrepancy": r.max_corrected_error,
                    "max_residual_discrepancy_over_dx": r.max_corrected_error / r.dx,
                    "max_spectator_discrepancy": r.max_spectator_error,
                    "flip_agreements": r.flip_agreements,
                    "within_3dx": r.passes(3.0),
                    "details": if *details { Some(std::mem::take(&mut r.details)) } else { None },
                });
                reports.push(summary);
            }
            if let Some(path) = dump_state {
                let mut draw = draw_trial(circuits[0], shift_sampling, cli.seed, 0);
                let run = run_drawn(&config, circuits[0], &mut draw)?;
                formats::write_grid_binary(BufWriter::new(File::create(path)?), &run.corrected)?;
                eprintln!("wrote corrected state of trial 0 to {}", path.display());
            }
            let inputs = json!({
                "state": state.resolved(), "grid_n": grid_n, "trials": trials, "seed": cli.seed,
                "circuit": circuit, "sampling": sampling,
            });
            Envelope::new(inputs, json!({ "reports": reports })).write(out)?;
        }
    }
    Ok(())
}
