//! Command-line front end: configuration, subcommand dispatch and
//! deterministic CSV/JSON/text emission.
//!
//! Precedence is flags over config-file values over defaults. Exit codes:
//! 0 success, 1 usage or configuration error, 2 numerical non-convergence.
//! Emission is byte-stable: fixed field order, floats rounded to the
//! configured significant-digit count and printed in their shortest form,
//! LF line endings.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kinematics::yukawa_potential;
use crate::report::{
    compare_with_reference, derive_parameters, DerivedReport, DeviationTable, ReferenceSet,
};
use crate::solver::{
    figure1_curve, figure2_curves, find_bound_states_with, BoundStateSolution, BranchLabel,
    SolverSettings,
};
use crate::units::{UnitOverrides, UnitSystem};

pub const DEFAULT_R_MIN: f64 = 1e-3;
pub const DEFAULT_R_MAX: f64 = 1e3;
pub const DEFAULT_P_MIN: f64 = 1e-3;
pub const DEFAULT_P_MAX: f64 = 10.0;
pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_PRECISION: usize = 12;
pub const DEFAULT_WARN_THRESHOLD: f64 = 0.10;

/// Emission format. Each subcommand accepts a subset: `solve` is JSON only,
/// the curve and potential sweeps emit CSV or JSON, `table` emits aligned
/// text or JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

impl OutputFormat {
    fn parse_key(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            "text" => Some(OutputFormat::Text),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Text => "text",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchArg {
    Nonrelativistic,
    Relativistic,
}

impl From<BranchArg> for BranchLabel {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Nonrelativistic => BranchLabel::Nonrelativistic,
            BranchArg::Relativistic => BranchLabel::Relativistic,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "epbound",
    version,
    about = "Self-consistent electron-proton bound states under recoil-corrected uncertainty relations"
)]
struct Cli {
    /// Override the fine-structure constant
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// JSON config file; command-line flags take precedence over its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format (default depends on the subcommand)
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write output to this path instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Significant digits for emitted floats (6..=17)
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Root residual tolerance |F(beta)|
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: CommandKind,
}

#[derive(Subcommand, Debug)]
enum CommandKind {
    /// Solve the self-consistency equation and emit both bound states
    Solve,
    /// Sample the recoil factor beta(r) on a logarithmic radius grid
    CurveBeta(RadiusGridArgs),
    /// Sample orbit radius and position-uncertainty curves over momentum
    CurveIntersect(MomentumGridArgs),
    /// Derived parameter table and reference deviations for one branch
    Table(TableArgs),
    /// Sample the screened Coulomb potential on a radius grid
    Potential(PotentialArgs),
}

#[derive(Args, Debug)]
struct RadiusGridArgs {
    /// Lower radius bound in r_C units
    #[arg(long)]
    r_min: Option<f64>,
    /// Upper radius bound in r_C units
    #[arg(long)]
    r_max: Option<f64>,
    /// Number of grid samples
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct MomentumGridArgs {
    /// Lower momentum bound in m_e c units
    #[arg(long)]
    p_min: Option<f64>,
    /// Upper momentum bound in m_e c units
    #[arg(long)]
    p_max: Option<f64>,
    /// Number of grid samples
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Which bound-state branch to report
    #[arg(long, value_enum)]
    branch: BranchArg,
    /// Reference-value file (JSON map: name -> { value, source })
    #[arg(long)]
    refs: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PotentialArgs {
    /// Lower radius bound in r_C units
    #[arg(long)]
    r_min: Option<f64>,
    /// Upper radius bound in r_C units
    #[arg(long)]
    r_max: Option<f64>,
    /// Number of grid samples
    #[arg(long)]
    samples: Option<usize>,
    /// Mediating photon inertial mass in m_e units (0 gives pure Coulomb)
    #[arg(long)]
    photon_mass: Option<f64>,
}

/// Config-file schema: snake_case keys mirroring the kebab-case flags.
/// Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    alpha: Option<f64>,
    proton_electron_mass_ratio: Option<f64>,
    electron_compton_length_cm: Option<f64>,
    electron_rest_energy_ev: Option<f64>,
    tolerance: Option<f64>,
    bracket_tolerance: Option<f64>,
    grid_points: Option<usize>,
    r_min: Option<f64>,
    r_max: Option<f64>,
    p_min: Option<f64>,
    p_max: Option<f64>,
    samples: Option<usize>,
    format: Option<String>,
    out: Option<PathBuf>,
    precision: Option<usize>,
    warn_threshold: Option<f64>,
    photon_mass: Option<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub units: UnitSystem,
    pub solver: SolverSettings,
    pub r_min: f64,
    pub r_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub precision: usize,
    pub warn_threshold: f64,
    pub photon_mass: f64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } | Error::RecoilNoBracket { .. } => {
                CliError::Numerical(e.to_string())
            }
            Error::InvalidField { .. } | Error::Domain { .. } => CliError::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Entry point used by `main`; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (config, requested_format) = resolve_config(&cli)?;
    let format = resolve_format(requested_format, &cli.command)?;
    let output = match &cli.command {
        CommandKind::Solve => emit_solve(&config, format)?,
        CommandKind::CurveBeta(_) => emit_curve_beta(&config, format)?,
        CommandKind::CurveIntersect(_) => emit_curve_intersect(&config, format)?,
        CommandKind::Table(args) => emit_table(&config, args, format)?,
        CommandKind::Potential(_) => emit_potential(&config, format)?,
    };
    match &config.out {
        Some(path) => fs::write(path, output)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn load_config_file(cli: &Cli) -> Result<ConfigFile, CliError> {
    match &cli.config {
        None => Ok(ConfigFile::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| usage(format!("config file {}: {e}", path.display())))
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<(RunConfig, Option<OutputFormat>), CliError> {
    let file = load_config_file(cli)?;

    let file_format = match &file.format {
        None => None,
        Some(s) => Some(
            OutputFormat::parse_key(s)
                .ok_or_else(|| usage(format!("config file: unknown format {s:?}")))?,
        ),
    };
    let requested_format = cli.format.or(file_format);

    let overrides = UnitOverrides {
        alpha: cli.alpha.or(file.alpha),
        proton_electron_mass_ratio: file.proton_electron_mass_ratio,
        electron_compton_length_cm: file.electron_compton_length_cm,
        electron_rest_energy_ev: file.electron_rest_energy_ev,
    };
    let units = UnitSystem::new(&overrides).map_err(CliError::from)?;

    // subcommand grid flags shadow the shared config keys
    let (flag_r_min, flag_r_max, flag_p_min, flag_p_max, flag_samples, flag_photon_mass) =
        match &cli.command {
            CommandKind::CurveBeta(g) => (g.r_min, g.r_max, None, None, g.samples, None),
            CommandKind::CurveIntersect(g) => (None, None, g.p_min, g.p_max, g.samples, None),
            CommandKind::Potential(g) => (g.r_min, g.r_max, None, None, g.samples, g.photon_mass),
            _ => (None, None, None, None, None, None),
        };

    let config = RunConfig {
        units,
        solver: SolverSettings {
            grid_points: file
                .grid_points
                .unwrap_or(crate::solver::DEFAULT_GRID_POINTS),
            residual_tolerance: cli
                .tolerance
                .or(file.tolerance)
                .unwrap_or(crate::solver::DEFAULT_RESIDUAL_TOLERANCE),
            bracket_tolerance: file
                .bracket_tolerance
                .unwrap_or(crate::solver::DEFAULT_BRACKET_TOLERANCE),
        },
        r_min: flag_r_min.or(file.r_min).unwrap_or(DEFAULT_R_MIN),
        r_max: flag_r_max.or(file.r_max).unwrap_or(DEFAULT_R_MAX),
        p_min: flag_p_min.or(file.p_min).unwrap_or(DEFAULT_P_MIN),
        p_max: flag_p_max.or(file.p_max).unwrap_or(DEFAULT_P_MAX),
        samples: flag_samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
        out: cli.out.clone().or(file.out),
        precision: cli
            .precision
            .or(file.precision)
            .unwrap_or(DEFAULT_PRECISION),
        warn_threshold: file.warn_threshold.unwrap_or(DEFAULT_WARN_THRESHOLD),
        photon_mass: flag_photon_mass.or(file.photon_mass).unwrap_or(0.0),
    };
    validate_config(&config)?;
    Ok((config, requested_format))
}

fn validate_config(config: &RunConfig) -> Result<(), CliError> {
    if !(6..=17).contains(&config.precision) {
        return Err(usage(format!(
            "precision must lie in [6, 17] (got {})",
            config.precision
        )));
    }
    let tol = config.solver.residual_tolerance;
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(usage(format!(
            "tolerance must lie in (0, 1e-3] (got {tol:e})"
        )));
    }
    let btol = config.solver.bracket_tolerance;
    if !(btol > 0.0 && btol <= 1e-3) {
        return Err(usage(format!(
            "bracket_tolerance must lie in (0, 1e-3] (got {btol:e})"
        )));
    }
    if config.solver.grid_points < 100 {
        return Err(usage(format!(
            "grid_points must be at least 100 (got {})",
            config.solver.grid_points
        )));
    }
    for (name, min, max) in [
        ("r", config.r_min, config.r_max),
        ("p", config.p_min, config.p_max),
    ] {
        if !(min.is_finite() && max.is_finite() && min > 0.0 && min < max) {
            return Err(usage(format!(
                "{name} grid requires 0 < {name}-min < {name}-max (got [{min:e}, {max:e}])"
            )));
        }
    }
    if config.samples < 2 {
        return Err(usage(format!(
            "samples must be at least 2 (got {})",
            config.samples
        )));
    }
    if !(config.warn_threshold > 0.0 && config.warn_threshold.is_finite()) {
        return Err(usage(format!(
            "warn_threshold must be positive (got {})",
            config.warn_threshold
        )));
    }
    if !(config.photon_mass >= 0.0 && config.photon_mass.is_finite()) {
        return Err(usage(format!(
            "photon-mass must be non-negative (got {})",
            config.photon_mass
        )));
    }
    Ok(())
}

fn resolve_format(
    requested: Option<OutputFormat>,
    command: &CommandKind,
) -> Result<OutputFormat, CliError> {
    let (default, allowed): (OutputFormat, &[OutputFormat]) = match command {
        CommandKind::Solve => (OutputFormat::Json, &[OutputFormat::Json]),
        CommandKind::CurveBeta(_) | CommandKind::CurveIntersect(_) | CommandKind::Potential(_) => {
            (OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])
        }
        CommandKind::Table(_) => (
            OutputFormat::Text,
            &[OutputFormat::Text, OutputFormat::Json],
        ),
    };
    let format = requested.unwrap_or(default);
    if !allowed.contains(&format) {
        return Err(usage(format!(
            "format {} is not supported by this subcommand",
            format.name()
        )));
    }
    Ok(format)
}

// ---------------------------------------------------------------------------
// float formatting

/// Rounds to `sig` significant digits by decimal round-trip.
pub fn round_sig(x: f64, sig: usize) -> f64 {
    debug_assert!((1..=17).contains(&sig));
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", sig - 1, x)
        .parse()
        .expect("decimal round-trip always parses")
}

/// Shortest decimal form of `x` rounded to `sig` significant digits.
/// Plain notation inside [1e-4, 1e15), scientific outside.
pub fn format_float(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded = round_sig(x, sig);
    let magnitude = rounded.abs();
    if (1e-4..1e15).contains(&magnitude) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output structs always serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// solve

#[derive(Serialize)]
struct SolveOutput {
    alpha: f64,
    solutions: Vec<SolutionOut>,
}

#[derive(Serialize)]
struct SolutionOut {
    branch: &'static str,
    beta: f64,
    gamma: f64,
    speed: f64,
    momentum: f64,
    lorentz_factor: f64,
    radius_rc: f64,
    radius_cm: f64,
    photon_energy: f64,
    photon_momentum: f64,
    photon_mass: f64,
    residual: f64,
    iterations: u64,
}

fn solution_out(
    solution: &BoundStateSolution,
    units: &UnitSystem,
    sig: usize,
) -> Result<SolutionOut, CliError> {
    let r = |x: f64| round_sig(x, sig);
    Ok(SolutionOut {
        branch: solution.branch().as_str(),
        beta: r(solution.beta()),
        gamma: r(solution.recoil().gamma_at_solution().value()),
        speed: r(solution.particle().speed()),
        momentum: r(solution.particle().momentum()),
        lorentz_factor: r(solution.particle().lorentz_factor()),
        radius_rc: r(solution.radius()),
        radius_cm: r(units
            .length_to_cm(solution.radius())
            .map_err(CliError::from)?),
        photon_energy: r(solution.photon().energy()),
        photon_momentum: r(solution.photon().momentum()),
        photon_mass: r(solution.photon().inertial_mass()),
        residual: r(solution.residual()),
        iterations: solution.iterations() as u64,
    })
}

fn solve_states(config: &RunConfig) -> Result<Vec<BoundStateSolution>, CliError> {
    let solutions = find_bound_states_with(&config.units, &config.solver)?;
    if solutions.is_empty() {
        return Err(CliError::Numerical(
            "no sign change of the consistency residual on (alpha, 1]; \
             no bound states at this grid resolution"
                .to_string(),
        ));
    }
    Ok(solutions)
}

fn emit_solve(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    debug_assert_eq!(format, OutputFormat::Json);
    let solutions = solve_states(config)?;
    let out = SolveOutput {
        alpha: round_sig(config.units.alpha(), config.precision),
        solutions: solutions
            .iter()
            .map(|s| solution_out(s, &config.units, config.precision))
            .collect::<Result<_, _>>()?,
    };
    Ok(json_pretty(&out))
}

// ---------------------------------------------------------------------------
// curves

#[derive(Serialize)]
struct Fig1Row {
    r_over_rc: f64,
    beta: Option<f64>,
    converged: bool,
}

#[derive(Serialize)]
struct Fig2Row {
    p_over_mec: f64,
    r_orbit: f64,
    dr_beta1: f64,
    dr_recoil: Option<f64>,
    converged: bool,
}

#[derive(Serialize)]
struct PotentialRow {
    r_over_rc: f64,
    phi: f64,
}

fn finite_or_none(x: f64, sig: usize) -> Option<f64> {
    x.is_finite().then(|| round_sig(x, sig))
}

fn emit_curve_beta(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    let samples = figure1_curve(config.r_min, config.r_max, config.samples, &config.units)?;
    let sig = config.precision;
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("r_over_rc,beta,converged\n");
            for s in &samples {
                writeln!(
                    out,
                    "{},{},{}",
                    format_float(s.abscissa, sig),
                    format_float(s.values["beta"], sig),
                    s.converged
                )
                .expect("string writes cannot fail");
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let rows: Vec<Fig1Row> = samples
                .iter()
                .map(|s| Fig1Row {
                    r_over_rc: round_sig(s.abscissa, sig),
                    beta: finite_or_none(s.values["beta"], sig),
                    converged: s.converged,
                })
                .collect();
            Ok(json_pretty(&rows))
        }
        OutputFormat::Text => unreachable!("rejected by resolve_format"),
    }
}

fn emit_curve_intersect(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    let samples = figure2_curves(config.p_min, config.p_max, config.samples, &config.units)?;
    let sig = config.precision;
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("p_over_mec,r_orbit,dr_beta1,dr_recoil,converged\n");
            for s in &samples {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    format_float(s.abscissa, sig),
                    format_float(s.values["r_orbit"], sig),
                    format_float(s.values["dr_beta1"], sig),
                    format_float(s.values["dr_recoil"], sig),
                    s.converged
                )
                .expect("string writes cannot fail");
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let rows: Vec<Fig2Row> = samples
                .iter()
                .map(|s| Fig2Row {
                    p_over_mec: round_sig(s.abscissa, sig),
                    r_orbit: round_sig(s.values["r_orbit"], sig),
                    dr_beta1: round_sig(s.values["dr_beta1"], sig),
                    dr_recoil: finite_or_none(s.values["dr_recoil"], sig),
                    converged: s.converged,
                })
                .collect();
            Ok(json_pretty(&rows))
        }
        OutputFormat::Text => unreachable!("rejected by resolve_format"),
    }
}

fn emit_potential(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    // reuse the curve grid machinery by sampling yukawa on the r grid
    let samples = potential_samples(config)?;
    let sig = config.precision;
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("r_over_rc,phi\n");
            for (r, phi) in &samples {
                writeln!(out, "{},{}", format_float(*r, sig), format_float(*phi, sig))
                    .expect("string writes cannot fail");
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let rows: Vec<PotentialRow> = samples
                .iter()
                .map(|&(r, phi)| PotentialRow {
                    r_over_rc: round_sig(r, sig),
                    phi: round_sig(phi, sig),
                })
                .collect();
            Ok(json_pretty(&rows))
        }
        OutputFormat::Text => unreachable!("rejected by resolve_format"),
    }
}

fn potential_samples(config: &RunConfig) -> Result<Vec<(f64, f64)>, CliError> {
    // same logarithmic grid shape as the curve sweeps; bounds already
    // validated by resolve_config
    let n = config.samples;
    let (ln_min, ln_max) = (config.r_min.ln(), config.r_max.ln());
    (0..n)
        .map(|i| {
            let r = if i == 0 {
                config.r_min
            } else if i == n - 1 {
                config.r_max
            } else {
                (ln_min + (ln_max - ln_min) * i as f64 / (n - 1) as f64).exp()
            };
            let phi = yukawa_potential(r, config.photon_mass, &config.units)?;
            Ok((r, phi))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// table

#[derive(Serialize)]
struct TableOutput {
    branch: &'static str,
    report: ReportOut,
    deviations: DeviationsOut,
}

#[derive(Serialize)]
struct ReportOut {
    speed: f64,
    radius_cm: f64,
    binding_energy_mec2: f64,
    binding_energy_ev: f64,
    orbital_angular_momentum: f64,
    magnetic_moment_rest_mass: f64,
    magnetic_moment_relativistic_mass: f64,
    combined_moment_rest: f64,
    combined_moment_rel: f64,
    relativistic_mass: f64,
    total_mass_excess: f64,
    photon_energy: f64,
    photon_mass: f64,
    photon_range_cm: f64,
    decay_energy: f64,
}

#[derive(Serialize)]
struct DeviationsOut {
    warn_threshold: f64,
    rows: Vec<DeviationRowOut>,
    missing: Vec<String>,
}

#[derive(Serialize)]
struct DeviationRowOut {
    quantity: String,
    computed: f64,
    reference: f64,
    source: &'static str,
    relative_deviation: f64,
    flagged: bool,
}

fn report_out(report: &DerivedReport, sig: usize) -> ReportOut {
    let r = |x: f64| round_sig(x, sig);
    ReportOut {
        speed: r(report.speed),
        radius_cm: r(report.radius_cm),
        binding_energy_mec2: r(report.binding_energy_mec2),
        binding_energy_ev: r(report.binding_energy_ev),
        orbital_angular_momentum: r(report.orbital_angular_momentum),
        magnetic_moment_rest_mass: r(report.magnetic_moment_rest_mass),
        magnetic_moment_relativistic_mass: r(report.magnetic_moment_relativistic_mass),
        combined_moment_rest: r(report.combined_moment_rest),
        combined_moment_rel: r(report.combined_moment_rel),
        relativistic_mass: r(report.relativistic_mass),
        total_mass_excess: r(report.total_mass_excess),
        photon_energy: r(report.photon_energy),
        photon_mass: r(report.photon_mass),
        photon_range_cm: r(report.photon_range_cm),
        decay_energy: r(report.decay_energy),
    }
}

fn emit_table(
    config: &RunConfig,
    args: &TableArgs,
    format: OutputFormat,
) -> Result<String, CliError> {
    let wanted: BranchLabel = args.branch.into();
    let solutions = solve_states(config)?;
    let solution = solutions
        .iter()
        .find(|s| s.branch() == wanted)
        .ok_or_else(|| {
            CliError::Numerical(format!(
                "branch {wanted} not present among the {} computed solutions",
                solutions.len()
            ))
        })?;

    let refs = match &args.refs {
        None => ReferenceSet::builtin(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            ReferenceSet::from_json(&text)
                .map_err(|e| usage(format!("references {}: {e}", path.display())))?
        }
    };

    let report = derive_parameters(solution, &config.units, &refs)?;
    let table = compare_with_reference(&report, &refs, config.warn_threshold)?;
    match format {
        OutputFormat::Json => {
            let out = TableOutput {
                branch: wanted.as_str(),
                report: report_out(&report, config.precision),
                deviations: DeviationsOut {
                    warn_threshold: round_sig(config.warn_threshold, config.precision),
                    rows: table
                        .rows
                        .iter()
                        .map(|row| DeviationRowOut {
                            quantity: row.quantity.clone(),
                            computed: round_sig(row.computed, config.precision),
                            reference: round_sig(row.reference, config.precision),
                            source: row.source.as_str(),
                            relative_deviation: round_sig(row.relative_deviation, config.precision),
                            flagged: row.flagged,
                        })
                        .collect(),
                    missing: table.missing.clone(),
                },
            };
            Ok(json_pretty(&out))
        }
        OutputFormat::Text => Ok(render_table_text(wanted, &report, &table, config.precision)),
        OutputFormat::Csv => unreachable!("rejected by resolve_format"),
    }
}

fn render_table_text(
    branch: BranchLabel,
    report: &DerivedReport,
    table: &DeviationTable,
    sig: usize,
) -> String {
    let mut out = String::new();
    let rows = [
        ("speed (c)", report.speed),
        ("radius (cm)", report.radius_cm),
        ("binding energy (m_e c^2)", report.binding_energy_mec2),
        ("binding energy (eV)", report.binding_energy_ev),
        (
            "orbital angular momentum (hbar)",
            report.orbital_angular_momentum,
        ),
        (
            "magnetic moment, rest mass (mu_N)",
            report.magnetic_moment_rest_mass,
        ),
        (
            "magnetic moment, relativistic mass (mu_N)",
            report.magnetic_moment_relativistic_mass,
        ),
        (
            "combined moment, rest mass (mu_N)",
            report.combined_moment_rest,
        ),
        (
            "combined moment, relativistic mass (mu_N)",
            report.combined_moment_rel,
        ),
        ("relativistic mass (m_e)", report.relativistic_mass),
        ("total mass excess (m_e)", report.total_mass_excess),
        ("photon energy (m_e c^2)", report.photon_energy),
        ("photon inertial mass (m_e)", report.photon_mass),
        ("photon range (cm)", report.photon_range_cm),
        ("decay energy (m_e c^2)", report.decay_energy),
    ];

    let _ = writeln!(out, "bound-state parameters ({branch} branch)");
    let _ = writeln!(out);
    for (label, value) in rows {
        let _ = writeln!(out, "  {label:<44} {}", format_float(value, sig));
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "deviations vs references (flagged beyond {:.1}%)",
        table.warn_threshold * 100.0
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "  {:<36} {:>18} {:>14} {:<14} {:>10} flag",
        "quantity", "computed", "reference", "source", "deviation"
    );
    for row in &table.rows {
        let _ = writeln!(
            out,
            "  {:<36} {:>18} {:>14} {:<14} {:>+9.2}% {}",
            row.quantity,
            format_float(row.computed, sig),
            format_float(row.reference, sig),
            row.source.as_str(),
            row.relative_deviation * 100.0,
            if row.flagged { "*" } else { "" }
        );
    }
    if !table.missing.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "missing references: {}", table.missing.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sig_truncates_to_significant_digits() {
        assert_eq!(round_sig(137.00315643938269, 12), 137.003156439);
        assert_eq!(round_sig(0.5, 12), 0.5);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(round_sig(1.0748470444917037e-13, 6), 1.07485e-13);
    }

    #[test]
    fn format_float_choices() {
        assert_eq!(format_float(0.5, 12), "0.5");
        assert_eq!(format_float(137.003156439, 12), "137.003156439");
        assert_eq!(
            format_float(1.0748470444917037e-13, 12),
            "1.07484704449e-13"
        );
        assert_eq!(format_float(f64::NAN, 12), "nan");
        assert_eq!(format_float(0.0, 12), "0");
        assert_eq!(format_float(-2.0002156539, 6), "-2.00022");
    }

    #[test]
    fn config_precedence_flag_over_file_over_default() {
        let dir = std::env::temp_dir().join("epbound-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.json");
        std::fs::write(&path, r#"{ "alpha": 0.008, "samples": 16 }"#).unwrap();

        let cli = Cli::try_parse_from([
            "epbound",
            "--config",
            path.to_str().unwrap(),
            "--alpha",
            "0.0073",
            "solve",
        ])
        .unwrap();
        let (config, _) = resolve_config(&cli).unwrap();
        assert_eq!(config.units.alpha(), 0.0073);
        assert_eq!(config.samples, 16);
        assert_eq!(config.precision, DEFAULT_PRECISION);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = std::env::temp_dir().join("epbound-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{ "alhpa": 0.008 }"#).unwrap();
        let cli =
            Cli::try_parse_from(["epbound", "--config", path.to_str().unwrap(), "solve"]).unwrap();
        let err = resolve_config(&cli).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn grid_invariants_are_usage_errors() {
        let cli = Cli::try_parse_from(["epbound", "curve-beta", "--r-min", "0"]).unwrap();
        assert!(matches!(
            resolve_config(&cli).unwrap_err(),
            CliError::Usage(_)
        ));

        let cli =
            Cli::try_parse_from(["epbound", "curve-beta", "--r-min", "5", "--r-max", "5"]).unwrap();
        assert!(matches!(
            resolve_config(&cli).unwrap_err(),
            CliError::Usage(_)
        ));

        let cli = Cli::try_parse_from(["epbound", "--precision", "3", "solve"]).unwrap();
        assert!(matches!(
            resolve_config(&cli).unwrap_err(),
            CliError::Usage(_)
        ));

        let cli = Cli::try_parse_from(["epbound", "--tolerance", "0.5", "solve"]).unwrap();
        assert!(matches!(
            resolve_config(&cli).unwrap_err(),
            CliError::Usage(_)
        ));
    }

    #[test]
    fn formats_are_gated_per_subcommand() {
        let solve = CommandKind::Solve;
        assert!(resolve_format(Some(OutputFormat::Csv), &solve).is_err());
        assert_eq!(resolve_format(None, &solve).unwrap(), OutputFormat::Json);

        let table = CommandKind::Table(TableArgs {
            branch: BranchArg::Relativistic,
            refs: None,
        });
        assert_eq!(resolve_format(None, &table).unwrap(), OutputFormat::Text);
        assert!(resolve_format(Some(OutputFormat::Csv), &table).is_err());
    }

    #[test]
    fn curve_beta_two_sample_csv() {
        let cli = Cli::try_parse_from([
            "epbound",
            "curve-beta",
            "--samples",
            "2",
            "--r-min",
            "1",
            "--r-max",
            "1000",
        ])
        .unwrap();
        let (config, _) = resolve_config(&cli).unwrap();
        let out = emit_curve_beta(&config, OutputFormat::Csv).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "r_over_rc,beta,converged");
        assert!(lines[1].starts_with("1,"));
        assert!(lines[2].starts_with("1000,"));
        assert!(out.ends_with('\n'));
        assert!(!out.contains('\r'));
    }

    #[test]
    fn solve_json_contains_relativistic_beta() {
        let cli = Cli::try_parse_from(["epbound", "solve"]).unwrap();
        let (config, _) = resolve_config(&cli).unwrap();
        let out = emit_solve(&config, OutputFormat::Json).unwrap();
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        let solutions = value["solutions"].as_array().unwrap();
        assert_eq!(solutions.len(), 2);
        assert_eq!(solutions[1]["branch"], "relativistic");
        let beta = solutions[1]["beta"].as_f64().unwrap();
        assert!((beta - 0.00774).abs() < 1e-4);
    }

    #[test]
    fn table_text_nonrelativistic_binding() {
        let cli = Cli::try_parse_from(["epbound", "table", "--branch", "nonrelativistic"]).unwrap();
        let (config, _) = resolve_config(&cli).unwrap();
        let args = TableArgs {
            branch: BranchArg::Nonrelativistic,
            refs: None,
        };
        let out = emit_table(&config, &args, OutputFormat::Text).unwrap();
        // binding 13.6 eV within 0.1%
        let line = out
            .lines()
            .find(|l| l.contains("binding energy (eV)"))
            .unwrap();
        let value: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!((value / 13.6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rounded_alpha_table_matches_book_usage() {
        let cli = Cli::try_parse_from([
            "epbound",
            "--alpha",
            "0.0073",
            "table",
            "--branch",
            "relativistic",
        ])
        .unwrap();
        let (config, _) = resolve_config(&cli).unwrap();
        assert_eq!(config.units.alpha(), 0.0073);
        let args = TableArgs {
            branch: BranchArg::Relativistic,
            refs: None,
        };
        let out = emit_table(&config, &args, OutputFormat::Json).unwrap();
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        let beta = value["report"]["orbital_angular_momentum"]
            .as_f64()
            .unwrap();
        assert!((beta - 0.00776).abs() < 1e-4);
    }
}
