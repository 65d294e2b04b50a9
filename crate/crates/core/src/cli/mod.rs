//! The `vanhove` command line: `renorm-flow`, `spectrum`, `multisource` and
//! `identities`, each driven by a [`RunConfig`].
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure
//! (non-convergence, hypothesis not met), 4 internal-consistency failure.

pub mod config;
pub mod identities;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

pub use config::{OutputFormat, RunConfig, SourceSpec, Syntax};
pub use identities::{run_identity_suites, IdentityReport, SuiteResult};

use crate::error::Error;
use crate::fock::FockBasis;
use crate::multisource::{
    check_bounded_below, ground_energy_report, point_interaction_eigenvalues, s_matrix, BoundedBelowReport,
    PointEigenvalue,
};
use crate::radial_grid::build_radial_grid;
use crate::renorm::{ibc_spectrum_check, renorm_flow, FlowRow, SpectrumReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Exit code for an error surfaced by a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::CutoffExceedsGrid { .. }
        | Error::UnsupportedParameter(_)
        | Error::UnknownSource(_)
        | Error::InvalidParams { .. }
        | Error::InvalidConfig(_)
        | Error::ResourceLimit(_) => EXIT_CONFIG,
        Error::Precondition(_) | Error::NotInRange { .. } | Error::WidenInterval { .. } => EXIT_NUMERICAL,
        Error::InvalidOperator { .. } | Error::InternalConsistency(_) => EXIT_INTERNAL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "vanhove", version, about = "Cutoff van Hove models, IBC checks and point interactions")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// TOML or JSON run configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides solver.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Suppress the summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground state of H_Λ − E_Λ for each cutoff in flow.lambda_list.
    RenormFlow,
    /// Lowest eigenvalues at Λ = lambda_max against the IBC spectrum.
    Spectrum,
    /// S(λ), φ(e0), C(φ) and point-interaction eigenvalues for [[sources]].
    Multisource,
    /// Randomized identity suites.
    Identities {
        /// Trials per suite; overrides identities.trials.
        #[arg(long)]
        trials: Option<usize>,
    },
}

/// Rendered command output and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub code: i32,
    /// One-line summary for stderr.
    pub summary: String,
}

const FLOW_COLUMNS: &str =
    "lambda,e_shift_closed,e_shift_quad,e0_computed,e1_computed,renormalized_ground,gap,ground_overlap,dim,iters,tail_budget";

/// CSV with 17 significant digits per float.
pub fn flow_csv(rows: &[FlowRow]) -> String {
    let mut s = String::from(FLOW_COLUMNS);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
            r.lambda_cut,
            r.e_shift_closed,
            r.e_shift_quad,
            r.e0_computed,
            r.e1_computed,
            r.renormalized_ground,
            r.gap,
            r.ground_overlap,
            r.dim,
            r.iters,
            r.tail_budget
        );
    }
    s
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn json_only(format: OutputFormat, cmd: &str) -> Result<(), Error> {
    if format == OutputFormat::Csv {
        return Err(Error::InvalidConfig(format!("output.format: {cmd} writes JSON only")));
    }
    Ok(())
}

pub fn cmd_renorm_flow(cfg: &RunConfig, format: OutputFormat) -> Result<Outcome, Error> {
    let rows = renorm_flow(&cfg.flow_config())?;
    let body = match format {
        OutputFormat::Csv => flow_csv(&rows),
        OutputFormat::Json => json(&rows),
    };
    let stalled: Vec<String> = rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| r.lambda_cut.to_string())
        .collect();
    let (code, summary) = if stalled.is_empty() {
        (EXIT_OK, format!("{} rows, dim {}", rows.len(), rows[0].dim))
    } else {
        (
            EXIT_NUMERICAL,
            format!("solver did not converge for lambda = {}", stalled.join(", ")),
        )
    };
    Ok(Outcome { body, code, summary })
}

pub fn cmd_spectrum(cfg: &RunConfig, format: OutputFormat) -> Result<Outcome, Error> {
    json_only(format, "spectrum")?;
    let grid = build_radial_grid(cfg.lambda_max, cfg.nodes, cfg.scheme)?;
    let basis = FockBasis::new(cfg.nodes, cfg.max_particles)?;
    let r: SpectrumReport = ibc_spectrum_check(&grid, &basis, cfg.g, cfg.e0, cfg.spectrum_k, &cfg.solver)?;
    let code = if !r.converged {
        EXIT_NUMERICAL
    } else if r.energy_ok && r.gap_ok && r.simple {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    };
    let summary = format!(
        "E_min computed {:.12} predicted {:.12}; gap {:.6} (grid edge {:.6})",
        r.e_min_computed, r.e_min_predicted, r.gap_computed, r.gap_predicted
    );
    Ok(Outcome {
        body: json(&r),
        code,
        summary,
    })
}

#[derive(Debug, Serialize)]
struct MultisourceOutput {
    e0: f64,
    /// S(e0) as rows of [re, im].
    s_matrix: Vec<Vec<Complex64>>,
    phi_coeffs: Option<Vec<Complex64>>,
    ground_energy: Option<f64>,
    im_part: Option<f64>,
    ground_energy_error: Option<String>,
    search_interval: (f64, f64),
    eigenvalues: Option<Vec<PointEigenvalue>>,
    eigenvalues_error: Option<String>,
    bounded_below: BoundedBelowReport,
}

pub fn cmd_multisource(cfg: &RunConfig, format: OutputFormat) -> Result<Outcome, Error> {
    json_only(format, "multisource")?;
    let sc = cfg.source_config()?;
    let s = s_matrix(&sc, sc.e0())?;
    let mut code = EXIT_OK;
    let mut notes = Vec::new();

    let ground = ground_energy_report(&sc);
    let eigen = point_interaction_eigenvalues(&sc, cfg.search_interval);
    for e in [ground.as_ref().err(), eigen.as_ref().err()].into_iter().flatten() {
        code = code.max(exit_code(e));
        notes.push(e.to_string());
    }
    let out = MultisourceOutput {
        e0: sc.e0(),
        s_matrix: s.row_iter().map(|r| r.iter().copied().collect()).collect(),
        phi_coeffs: ground.as_ref().ok().map(|g| g.dressing.coeffs.clone()),
        ground_energy: ground.as_ref().ok().map(|g| g.energy),
        im_part: ground.as_ref().ok().map(|g| g.im_part),
        ground_energy_error: ground.as_ref().err().map(|e| e.to_string()),
        search_interval: cfg.search_interval,
        eigenvalues: eigen.as_ref().ok().cloned(),
        eigenvalues_error: eigen.as_ref().err().map(|e| e.to_string()),
        bounded_below: check_bounded_below(&sc),
    };
    let summary = match (&out.ground_energy, notes.is_empty()) {
        (Some(e), true) => format!("{} sources, C(phi) = {e:.15}", sc.len()),
        _ => notes.join("; "),
    };
    Ok(Outcome {
        body: json(&out),
        code,
        summary,
    })
}

pub fn cmd_identities(seed: u64, trials: usize, format: OutputFormat) -> Result<Outcome, Error> {
    json_only(format, "identities")?;
    let r = run_identity_suites(seed, trials);
    let failed: Vec<&str> = r.suites.iter().filter(|s| !s.pass).map(|s| s.name).collect();
    let (code, summary) = if failed.is_empty() {
        (EXIT_OK, format!("{} suites passed", r.suites.len()))
    } else {
        (EXIT_INTERNAL, format!("failed suites: {}", failed.join(", ")))
    };
    Ok(Outcome {
        body: json(&r),
        code,
        summary,
    })
}

/// Parses arguments, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let quiet = args.quiet;
    match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            if !quiet || exit_code(&e) != EXIT_OK {
                eprintln!("error: {e}");
            }
            exit_code(&e)
        }
    }
}

fn execute(args: &Args) -> Result<i32, Error> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.solver.seed = seed;
    }
    let default_format = match args.command {
        Command::RenormFlow => OutputFormat::Csv,
        _ => OutputFormat::Json,
    };
    let format = match args.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cfg.format.unwrap_or(default_format),
    };
    let outcome = match &args.command {
        Command::RenormFlow => cmd_renorm_flow(&cfg, format)?,
        Command::Spectrum => cmd_spectrum(&cfg, format)?,
        Command::Multisource => cmd_multisource(&cfg, format)?,
        Command::Identities { trials } => cmd_identities(cfg.solver.seed, trials.unwrap_or(cfg.trials), format)?,
    };
    match args.out.as_ref().or(cfg.out.as_ref()) {
        Some(path) => std::fs::write(path, &outcome.body)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", outcome.body),
    }
    if !args.quiet {
        eprintln!("{}", outcome.summary);
    }
    Ok(outcome.code)
}
