//! Command-line front end.
//!
//! Every command writes `report.json` and `report.txt` to the output
//! directory, plus command-specific CSV files. Exit codes: 0 all checks pass,
//! 1 a check failed, 2 invalid expression, 3 configuration error, 4 I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{
    boosted_basis, embed_alpha_basis, mass_shell_eigencheck, polar_basis, standard_basis,
    time_factor_residual, verify_basis, BoostContext, CliffordError, Signature, BOOSTED_TOL,
    CONSTANT_TOL,
};
use crate::expr::{parse, EvalError, OneForm, ParseError};
use crate::hamjac::{
    characteristic_flow, dw_along_curve_check, is_exact, survey_obstruction, FlowParams,
    FlowStatus, HamJacError, IntegratingFactorVerdict, SampleBox,
};
use crate::report::{Check, Metadata, VerificationReport};
use crate::suite::{run_suite, SuiteError};
use crate::wavekin::{dalembert_evolve, transport_check, PacketSpec, WaveConfig, WaveError};
use crate::zitter::{
    de_broglie_frequency, evolve_expectation, make_packet, mean_group_velocity, si,
    uniform_times, zb_frequency, BranchMix, DiracConfig, ZbStatus, ZitterError,
};

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "DUALITY_OUT";
pub const DEFAULT_OUT: &str = "duality-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid expression: {0}")]
    Expression(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Expression(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Parser diagnostics with a caret under the offending offset.
fn expression_error(text: &str, err: &ParseError) -> CliError {
    let offset = match err {
        ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
            Some(*offset)
        }
        _ => None,
    };
    let mut msg = format!("{err}\n  {text}");
    if let Some(o) = offset {
        let col = text[..o.min(text.len())].chars().count();
        msg.push_str(&format!("\n  {}^", " ".repeat(col)));
    }
    CliError::Expression(msg)
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Expression(e.to_string())
    }
}

impl From<HamJacError> for CliError {
    fn from(e: HamJacError) -> Self {
        match e {
            HamJacError::Eval(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<CliffordError> for CliError {
    fn from(e: CliffordError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<WaveError> for CliError {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::Eval(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ZitterError> for CliError {
    fn from(e: ZitterError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "duality", version, about = "Clifford, Hamilton-Jacobi, wave and Dirac packet checks")]
pub struct Cli {
    /// Output directory (overridden by DUALITY_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gamma-matrix identities, boosted basis and mass-shell spectrum.
    VerifyClifford(CliffordArgs),
    /// Exactness and integrating-factor analysis of a 1-form.
    AnalyzeHj(AnalyzeArgs),
    /// Integrate the characteristic curve of a potential W.
    Curves(CurveArgs),
    /// 1D leapfrog transport of a Gaussian packet.
    WaveSim(WaveArgs),
    /// Spectral Dirac packet and zitterbewegung frequency.
    ZitterSim(ZitterArgs),
    /// Full verification battery.
    Suite,
    /// Run a command described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CliffordArgs {
    /// Particle speed (natural units).
    #[arg(long, default_value_t = CliffordArgs::default().v)]
    pub v: f64,
    /// Light speed.
    #[arg(long, default_value_t = CliffordArgs::default().c)]
    pub c: f64,
    /// Polar angle for the (r, θ) pair.
    #[arg(long, default_value_t = CliffordArgs::default().theta)]
    pub theta: f64,
    /// Rest mass for the mass-shell check.
    #[arg(long, default_value_t = CliffordArgs::default().m)]
    pub m: f64,
    /// Spatial momentum `px,py,pz`; the energy component is put on shell.
    #[arg(long, default_value = "0.75,0,0")]
    pub p: String,
}

impl Default for CliffordArgs {
    fn default() -> Self {
        Self {
            v: 0.6,
            c: 1.0,
            theta: 0.7,
            m: 1.0,
            p: "0.75,0,0".into(),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AnalyzeArgs {
    /// Comma-separated coefficients, e.g. "-y, x, 1".
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
    /// Coordinate names; inferred from the component count when omitted.
    #[arg(long)]
    pub coords: Option<String>,
    #[arg(long, default_value_t = AnalyzeArgs::default().samples)]
    pub samples: usize,
    #[arg(long, default_value_t = AnalyzeArgs::default().tol)]
    pub tol: f64,
    /// Half-width of the sampling box.
    #[arg(long = "box", default_value_t = AnalyzeArgs::default().half_width)]
    #[serde(rename = "box")]
    pub half_width: f64,
}

impl Default for AnalyzeArgs {
    fn default() -> Self {
        Self {
            form: String::new(),
            coords: None,
            samples: 256,
            tol: 1e-9,
            half_width: 2.0,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CurveArgs {
    /// Potential W.
    #[arg(long = "W", visible_alias = "w", allow_hyphen_values = true)]
    #[serde(rename = "W", alias = "w")]
    pub w: String,
    /// Starting point, comma separated.
    #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
    pub start: String,
    #[arg(long, default_value_t = CurveArgs::default().steps)]
    pub steps: usize,
    /// RK4 step in arc length; negative follows the other branch.
    #[arg(long, allow_hyphen_values = true, default_value_t = CurveArgs::default().step)]
    pub step: f64,
    /// Metric signature, e.g. "+,+"; Euclidean when omitted.
    #[arg(long)]
    pub signature: Option<String>,
    #[arg(long)]
    pub coords: Option<String>,
    /// Expected first integral of the family, checked for drift.
    #[arg(long, allow_hyphen_values = true)]
    pub invariant: Option<String>,
    /// Light speed in `m = ρ/c` for the λ column.
    #[arg(long, default_value_t = CurveArgs::default().c)]
    pub c: f64,
}

impl Default for CurveArgs {
    fn default() -> Self {
        Self {
            w: String::new(),
            start: "0,1".into(),
            steps: 5000,
            step: 1e-3,
            signature: None,
            coords: None,
            invariant: None,
            c: 1.0,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct WaveArgs {
    #[arg(long, default_value_t = WaveArgs::default().v)]
    pub v: f64,
    #[arg(long, default_value_t = WaveArgs::default().c)]
    pub c: f64,
    /// Packet width σ.
    #[arg(long, default_value_t = WaveArgs::default().sigma)]
    pub sigma: f64,
    /// Initial packet center.
    #[arg(long, default_value_t = WaveArgs::default().x0)]
    pub x0: f64,
    #[arg(long, default_value_t = WaveArgs::default().dx)]
    pub dx: f64,
    #[arg(long, default_value_t = WaveArgs::default().nx)]
    pub nx: usize,
    #[arg(long, default_value_t = WaveArgs::default().duration)]
    pub duration: f64,
    /// Upper bound on the Courant number v·dt/dx.
    #[arg(long, default_value_t = WaveArgs::default().courant)]
    pub courant: f64,
    #[arg(long, default_value_t = WaveArgs::default().snapshot_every)]
    pub snapshot_every: usize,
    /// Shape-error tolerance; 1e-12 at unit Courant number, 5e-3 otherwise.
    #[arg(long)]
    pub shape_tol: Option<f64>,
}

impl Default for WaveArgs {
    fn default() -> Self {
        Self {
            v: 0.5,
            c: 1.0,
            sigma: 10.0,
            x0: 100.0,
            dx: 1.0,
            nx: 400,
            duration: 200.0,
            courant: 0.9,
            snapshot_every: 20,
            shape_tol: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixArg {
    EqualMix,
    PositiveOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    Natural,
    Si,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ZitterArgs {
    #[arg(long, default_value_t = ZitterArgs::default().m)]
    pub m: f64,
    #[arg(long, default_value_t = ZitterArgs::default().c)]
    pub c: f64,
    #[arg(long, default_value_t = ZitterArgs::default().hbar)]
    pub hbar: f64,
    /// Packet center wavenumber; the grid is centered on it.
    #[arg(long, allow_hyphen_values = true, default_value_t = ZitterArgs::default().k0)]
    pub k0: f64,
    #[arg(long, default_value_t = ZitterArgs::default().sigma_k)]
    pub sigma_k: f64,
    #[arg(long, value_enum, default_value_t = MixArg::EqualMix)]
    pub mix: MixArg,
    /// Momentum modes (power of two).
    #[arg(long, default_value_t = ZitterArgs::default().modes)]
    pub modes: usize,
    #[arg(long, default_value_t = ZitterArgs::default().dk)]
    pub dk: f64,
    /// Number of output times.
    #[arg(long, default_value_t = ZitterArgs::default().samples)]
    pub samples: usize,
    #[arg(long, default_value_t = ZitterArgs::default().dt)]
    pub dt: f64,
    /// Units for the rest frequency only.
    #[arg(long, value_enum, default_value_t = Units::Natural)]
    pub units: Units,
    /// Rest mass in kg, used with `--units si`.
    #[arg(long, default_value_t = si::ELECTRON_MASS)]
    pub rest_mass: f64,
}

impl Default for ZitterArgs {
    fn default() -> Self {
        Self {
            m: 1.0,
            c: 1.0,
            hbar: 1.0,
            k0: 0.0,
            sigma_k: 0.01,
            mix: MixArg::EqualMix,
            modes: 4096,
            dk: 1e-4,
            samples: 1024,
            dt: 0.25,
            units: Units::Natural,
            rest_mass: si::ELECTRON_MASS,
        }
    }
}

/// Contents of a `run --config` file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub command: String,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub parameters: toml::Table,
}

/// A resolved command with its parameters.
#[derive(Debug, Clone)]
pub enum Job {
    VerifyClifford(CliffordArgs),
    AnalyzeHj(AnalyzeArgs),
    Curves(CurveArgs),
    WaveSim(WaveArgs),
    ZitterSim(ZitterArgs),
    Suite,
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::VerifyClifford(_) => "verify-clifford",
            Job::AnalyzeHj(_) => "analyze-hj",
            Job::Curves(_) => "curves",
            Job::WaveSim(_) => "wave-sim",
            Job::ZitterSim(_) => "zitter-sim",
            Job::Suite => "suite",
        }
    }

    fn config_echo(&self) -> serde_json::Value {
        let v = match self {
            Job::VerifyClifford(a) => serde_json::to_value(a),
            Job::AnalyzeHj(a) => serde_json::to_value(a),
            Job::Curves(a) => serde_json::to_value(a),
            Job::WaveSim(a) => serde_json::to_value(a),
            Job::ZitterSim(a) => serde_json::to_value(a),
            Job::Suite => Ok(serde_json::json!({})),
        };
        v.unwrap_or(serde_json::Value::Null)
    }

    fn from_file(file: RunFile) -> Result<Self, CliError> {
        fn params<T: serde::de::DeserializeOwned>(table: toml::Table) -> Result<T, CliError> {
            toml::Value::Table(table)
                .try_into()
                .map_err(|e| CliError::Config(format!("parameters: {e}")))
        }
        let p = file.parameters;
        Ok(match file.command.as_str() {
            "verify-clifford" => Job::VerifyClifford(params(p)?),
            "analyze-hj" => Job::AnalyzeHj(params(p)?),
            "curves" => Job::Curves(params(p)?),
            "wave-sim" => Job::WaveSim(params(p)?),
            "zitter-sim" => Job::ZitterSim(params(p)?),
            "suite" if p.is_empty() => Job::Suite,
            "suite" => {
                return Err(CliError::Config("suite takes no parameters".into()));
            }
            other => return Err(CliError::Config(format!("command: unknown command '{other}'"))),
        })
    }
}

/// Output of one command: the report plus extra files by name.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: VerificationReport,
    pub files: Vec<(String, String)>,
}

fn list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{what}: '{}' is not a number", s.trim())))
        })
        .collect()
}

fn default_coords(n: usize) -> Result<Vec<String>, CliError> {
    let names: &[&str] = match n {
        1 => &["x"],
        2 => &["x", "y"],
        3 => &["x", "y", "z"],
        4 => &["t", "x", "y", "z"],
        _ => return Err(CliError::Config(format!("cannot infer coordinates for {n} components"))),
    };
    Ok(names.iter().map(|s| s.to_string()).collect())
}

fn coords_for(explicit: &Option<String>, n: usize) -> Result<Vec<String>, CliError> {
    match explicit {
        Some(text) => Ok(text.split(',').map(|s| s.trim().to_string()).collect()),
        None => default_coords(n),
    }
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn check_finite(pairs: &[(&str, f64)]) -> Result<(), CliError> {
    for (k, v) in pairs {
        if !v.is_finite() {
            return Err(CliError::Config(format!("{k}: must be finite, got {v}")));
        }
    }
    Ok(())
}

pub fn verify_clifford(args: &CliffordArgs) -> Result<Outcome, CliError> {
    check_finite(&[("v", args.v), ("c", args.c), ("theta", args.theta), ("m", args.m)])?;
    let dirac = standard_basis(4, &Signature::minkowski())?;
    let ctx = BoostContext::new(args.v, args.c)?;
    let primed = boosted_basis(&dirac, &ctx)?;
    let mut report = verify_basis(&dirac, CONSTANT_TOL);
    report.extend(verify_basis(&primed, BOOSTED_TOL));
    report.push(Check::new("time_factor", time_factor_residual(&dirac, &ctx)?, CONSTANT_TOL));
    let alphas = standard_basis(2, &Signature::euclidean(3))?;
    let embedded = embed_alpha_basis(&alphas, &ctx)?;
    let gap = embedded
        .gammas()
        .iter()
        .zip(primed.gammas())
        .map(|(a, b)| (a - b).max_abs())
        .fold(0.0, f64::max);
    report.push(Check::new("embedded_matches_boosted", gap, BOOSTED_TOL));
    report.extend(verify_basis(&polar_basis(args.theta), CONSTANT_TOL));

    let space = list(&args.p, "p")?;
    if space.len() != 3 {
        return Err(CliError::Config(format!("p: need 3 components, got {}", space.len())));
    }
    let mc = args.m * args.c;
    let mut p = vec![(mc * mc + space.iter().map(|x| x * x).sum::<f64>()).sqrt()];
    p.extend(space);
    report.extend(mass_shell_eigencheck(&dirac, &p, args.m, args.c)?);
    report.note("dtau_dt", ctx.dtau_dt());
    report.note("momentum", &p);
    Ok(Outcome {
        report,
        files: Vec::new(),
    })
}

pub fn analyze_hj(args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let n = args.form.split(',').count();
    let coords = coords_for(&args.coords, n)?;
    let form =
        OneForm::parse(&args.form, &as_strs(&coords)).map_err(|e| expression_error(&args.form, &e))?;
    if !(args.half_width > 0.0) || args.samples == 0 {
        return Err(CliError::Config("box and samples must be positive".into()));
    }
    let domain = SampleBox::cube(form.len(), -args.half_width, args.half_width);
    let exact = is_exact(&form, &domain, args.samples, args.tol, 0)?;
    let mut report = VerificationReport::new();
    report.note("form", form.to_string());
    report.note("exactness", &exact);
    let verdict = if exact.exact {
        "exact".to_string()
    } else if form.len() == 3 {
        let survey = survey_obstruction(&form, &domain, args.samples, args.tol, 0)?;
        report.note("obstruction", &survey);
        match survey.verdict {
            IntegratingFactorVerdict::NoIntegratingFactor => {
                format!("no integrating factor (obstruction {})", survey.representative)
            }
            IntegratingFactorVerdict::AdmitsNecessaryConditionMet => {
                "not exact; integrating factor not excluded".to_string()
            }
        }
    } else if form.len() == 2 {
        "not exact; integrating factor exists locally".to_string()
    } else {
        "not exact".to_string()
    };
    report.note("verdict", verdict);
    Ok(Outcome {
        report,
        files: Vec::new(),
    })
}

pub fn curves(args: &CurveArgs) -> Result<Outcome, CliError> {
    let start = list(&args.start, "start")?;
    let coords = coords_for(&args.coords, start.len())?;
    let names = as_strs(&coords);
    let w = parse(&args.w, &names).map_err(|e| expression_error(&args.w, &e))?;
    let invariant = args
        .invariant
        .as_ref()
        .map(|k| parse(k, &names).map_err(|e| expression_error(k, &e)))
        .transpose()?;
    let signature = match &args.signature {
        Some(s) => Signature::parse(s)?,
        None => Signature::euclidean(names.len()),
    };
    check_finite(&[("step", args.step), ("c", args.c)])?;
    let params = FlowParams {
        step: args.step,
        n_steps: args.steps,
    };
    let flow = characteristic_flow(&w, &start, &params, &signature, invariant.as_ref())?;
    let residual = dw_along_curve_check(&w, &flow.trajectory, &signature)?;

    let mut report = VerificationReport::new();
    report.push(Check::flag("flow_completed", flow.status == FlowStatus::Completed));
    report.push(Check::new("tangent_unit", flow.tangent_defect, 1e-8));
    report.push(Check::new("dW_equals_rho_ds", residual, 1e-6));
    if invariant.is_some() {
        report.push(Check::new("invariant_drift", flow.invariant_drift, 1e-6));
    }
    report.note("status", &flow.status);
    report.note("samples", flow.trajectory.len());
    report.note("end", flow.trajectory.points().last());

    let lambda = flow.lambda(args.c);
    let mut csv = String::from("s");
    for c in &coords {
        csv.push(',');
        csv.push_str(c);
    }
    csv.push_str(",rho,lambda\n");
    for (i, (s, p)) in flow.trajectory.s().iter().zip(flow.trajectory.points()).enumerate() {
        csv.push_str(&s.to_string());
        for x in p {
            csv.push(',');
            csv.push_str(&x.to_string());
        }
        csv.push_str(&format!(",{},{}\n", flow.rho_along[i], lambda[i]));
    }
    report.note("trajectory_file", "trajectory.csv");
    Ok(Outcome {
        report,
        files: vec![("trajectory.csv".into(), csv)],
    })
}

pub fn wave_sim(args: &WaveArgs) -> Result<Outcome, CliError> {
    let spec = PacketSpec::gaussian(args.x0, args.sigma, args.v);
    let cfg = WaveConfig {
        origin: 0.0,
        dx: args.dx,
        nx: args.nx,
        courant: args.courant,
        c: args.c,
        snapshot_every: args.snapshot_every,
    };
    let field = dalembert_evolve(&spec, &cfg, args.duration)?;
    let errors = transport_check(&field, &spec)?;
    let shape_tol = args
        .shape_tol
        .unwrap_or(if field.courant == 1.0 { 1e-12 } else { 5e-3 });
    let mut report = VerificationReport::new();
    report.push(Check::flag(
        "run_completed",
        field.status == crate::wavekin::EvolutionStatus::Completed,
    ));
    report.push(Check::new("peak_error", errors.peak_error, args.dx));
    report.push(Check::new("shape_error", errors.shape_error, shape_tol));
    report.push(Check::new("energy_drift", field.energy_drift, 1e-6));
    report.push(Check::new("left_moving_fraction", errors.left_fraction, 1e-3));
    report.note("courant", field.courant);
    report.note("dt", field.dt);
    report.note("status", &field.status);
    report.note("peak_trajectory", field.peak_trajectory());
    report.note("snapshot_file", "wave.csv");
    Ok(Outcome {
        report,
        files: vec![("wave.csv".into(), field.to_csv())],
    })
}

pub fn zitter_sim(args: &ZitterArgs) -> Result<Outcome, CliError> {
    let cfg = DiracConfig {
        m: args.m,
        c: args.c,
        hbar: args.hbar,
        n: args.modes,
        dk: args.dk,
        k_center: args.k0,
    };
    check_finite(&[("dt", args.dt), ("k0", args.k0)])?;
    if !(args.dt > 0.0) {
        return Err(CliError::Config("dt: must be positive".into()));
    }
    let mix = match args.mix {
        MixArg::EqualMix => BranchMix::EqualMix,
        MixArg::PositiveOnly => BranchMix::PositiveOnly,
    };
    let state = make_packet(&cfg, args.k0, args.sigma_k, mix)?;
    let series = evolve_expectation(&state, &uniform_times(args.samples, args.dt))?;
    let zb = zb_frequency(&series)?;

    let mut report = VerificationReport::new();
    report.push(Check::new("norm_drift", series.norm_drift(), 1e-12));
    report.push(Check::new("energy_drift", series.energy_drift(), 1e-12));
    let width = 1.0 / (2.0 * args.sigma_k);
    match mix {
        BranchMix::EqualMix => {
            let expected = 2.0 * cfg.energy(args.k0) / cfg.hbar;
            report.push(Check::flag("oscillating", zb.status == ZbStatus::Oscillating));
            report.push(Check::new("omega_vs_2E", (zb.omega - expected).abs(), zb.bin_width));
            report.note("expected_omega", expected);
        }
        BranchMix::PositiveOnly => {
            let vg = mean_group_velocity(&state);
            report.push(Check::new(
                "residual_over_width",
                series.max_abs_residual() / width,
                1e-6,
            ));
            let rel = if vg == 0.0 {
                series.drift_v.abs()
            } else {
                ((series.drift_v - vg) / vg).abs()
            };
            report.push(Check::new("drift_vs_group_velocity", rel, 0.01));
            report.note("group_velocity", vg);
        }
    }
    let nu = match args.units {
        Units::Natural => {
            de_broglie_frequency(args.m, args.c, 2.0 * std::f64::consts::PI * args.hbar)?
        }
        Units::Si => de_broglie_frequency(args.rest_mass, si::SPEED_OF_LIGHT, si::PLANCK)?,
    };
    report.note("drift_k", series.drift_k);
    report.note("drift_v", series.drift_v);
    report.note("zb", &zb);
    report.note("rest_frequency", nu);
    report.note("series_file", "zb.csv");
    Ok(Outcome {
        report,
        files: vec![("zb.csv".into(), series.to_csv())],
    })
}

pub fn suite(seed: u64) -> Result<Outcome, CliError> {
    let report = run_suite(seed).map_err(|e: SuiteError| CliError::Config(e.to_string()))?;
    Ok(Outcome {
        report,
        files: Vec::new(),
    })
}

pub fn execute(job: &Job, seed: u64) -> Result<Outcome, CliError> {
    let mut outcome = match job {
        Job::VerifyClifford(a) => verify_clifford(a),
        Job::AnalyzeHj(a) => analyze_hj(a),
        Job::Curves(a) => curves(a),
        Job::WaveSim(a) => wave_sim(a),
        Job::ZitterSim(a) => zitter_sim(a),
        Job::Suite => suite(seed),
    }?;
    outcome.report.metadata = Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        command: job.name().to_string(),
        config: job.config_echo(),
    };
    Ok(outcome)
}

/// Writes `report.json`, `report.txt` and any extra files into `dir`.
pub fn emit_report(outcome: &Outcome, dir: &Path) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("report.json"), outcome.report.to_json()).map_err(io)?;
    std::fs::write(dir.join("report.txt"), outcome.report.to_text()).map_err(io)?;
    for (name, body) in &outcome.files {
        std::fs::write(dir.join(name), body).map_err(io)?;
    }
    Ok(())
}

fn resolve(cli: Cli) -> Result<(Job, u64, PathBuf), CliError> {
    let mut out = cli.out;
    let mut seed = cli.seed;
    let job = match cli.command {
        Command::VerifyClifford(a) => Job::VerifyClifford(a),
        Command::AnalyzeHj(a) => Job::AnalyzeHj(a),
        Command::Curves(a) => Job::Curves(a),
        Command::WaveSim(a) => Job::WaveSim(a),
        Command::ZitterSim(a) => Job::ZitterSim(a),
        Command::Suite => Job::Suite,
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
            let file: RunFile = toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            seed = file.seed;
            out = out.or_else(|| file.output_dir.clone());
            Job::from_file(file)?
        }
    };
    let dir = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .or(out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    Ok((job, seed, dir))
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let run = || -> Result<bool, CliError> {
        let (job, seed, dir) = resolve(cli)?;
        let outcome = execute(&job, seed)?;
        emit_report(&outcome, &dir)?;
        print!("{}", outcome.report.to_text());
        Ok(outcome.report.passed())
    };
    match run() {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
