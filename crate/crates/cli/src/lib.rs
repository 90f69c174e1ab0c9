//! Experiment configuration and dispatch for the `debranges` binary.
//!
//! A run parses a JSON [`ExperimentConfig`], validates every field, performs the
//! computation, and only then writes `<prefix>.csv` and `<prefix>.json`, so a failed
//! run leaves no files behind.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use debranges_core::airy::{self, ZeroKind};
use debranges_core::kernels::{self, KernelEval, TaperWeight};
use debranges_core::reconstruct::{self, Grid, Method, NoiseMode, NoiseSpec, PExponent, SampleSource};
use debranges_core::spectrum::{self, AsymptoticModel};
use debranges_core::{GenericSolver, Hamiltonian, Segment, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Spectrum,
    Kernel,
    Reconstruct,
    Stability,
    Airy,
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Kernel => "kernel",
            Command::Reconstruct => "reconstruct",
            Command::Stability => "stability",
            Command::Airy => "airy",
            Command::Calibrate => "calibrate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaperConfig {
    pub a: f64,
    /// Defaults to the midpoint of `[a, b]`.
    pub c: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Random,
    Adversarial,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub p: PExponent,
    pub epsilon: f64,
    pub mode: NoiseKind,
    #[serde(default)]
    pub seed: u64,
    /// Worst-case point for adversarial noise.
    #[serde(default = "default_z0")]
    pub z0: C64,
}

fn default_z0() -> C64 {
    C64::new(0.5, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Sampling,
    Oversampling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Reproducing,
    Oversampling,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kind: KernelKind,
    /// Second argument of the kernel; the first runs over the grid.
    pub w: C64,
    /// Length for `K_l`; defaults to `b`.
    pub l: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AiryConfig {
    pub b: f64,
    pub n_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PwConfig {
    pub a: f64,
    pub b: f64,
}

/// A batch experiment. Fields not needed by a command are ignored by it.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// When present it must agree with the command given on the command line.
    pub command: Option<Command>,
    #[serde(default)]
    pub hamiltonian: Vec<Segment>,
    #[serde(default)]
    pub gamma: f64,
    pub taper: Option<TaperConfig>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    pub noise: Option<NoiseConfig>,
    pub output: Option<PathBuf>,
    pub method: Option<MethodKind>,
    pub source: Option<SampleSource>,
    pub kernel: Option<KernelConfig>,
    pub airy: Option<AiryConfig>,
    pub pw: Option<PwConfig>,
}

fn default_truncation() -> usize {
    200
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{command} failed: {source}")]
    Numerical { command: &'static str, source: debranges_core::Error },
    #[error("{command} failed: non-finite value in summary field {field}")]
    NonFinite { command: &'static str, field: String },
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } | CliError::NonFinite { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// CSV body plus JSON summary of a finished run.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub csv: String,
    pub summary: Value,
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Output prefix: `--out`, else `output` from the config, else the config path without extension.
pub fn output_prefix(config: &ExperimentConfig, out: Option<&Path>, config_path: &Path) -> PathBuf {
    out.map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| config_path.with_extension(""))
}

/// Writes `<prefix>.csv` and `<prefix>.json`.
pub fn write_artifacts(prefix: &Path, artifacts: &Artifacts) -> Result<(), CliError> {
    let with_ext = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    let json = serde_json::to_string_pretty(&artifacts.summary).expect("summary serializes") + "\n";
    for (path, body) in [(with_ext(".csv"), artifacts.csv.as_str()), (with_ext(".json"), json.as_str())] {
        std::fs::write(&path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    Ok(())
}

/// Validated inputs shared by the commands.
struct Plan {
    command: Command,
    config: ExperimentConfig,
    hamiltonian: Option<Hamiltonian>,
    taper: Option<TaperWeight>,
}

impl Plan {
    fn new(command: Command, config: ExperimentConfig) -> Result<Self, CliError> {
        if let Some(c) = config.command {
            if c != command {
                return Err(CliError::Config(format!("config is for `{}` but `{}` was requested", c.name(), command.name())));
            }
        }
        config.grid.validate().map_err(config_err)?;
        if !config.gamma.is_finite() || !(0.0..std::f64::consts::PI).contains(&config.gamma) {
            return Err(CliError::Config(format!("gamma = {} must lie in [0, pi)", config.gamma)));
        }
        let needs_h = matches!(command, Command::Spectrum | Command::Kernel | Command::Reconstruct | Command::Stability);
        let hamiltonian = if needs_h {
            if config.hamiltonian.is_empty() {
                return Err(CliError::Config(format!("`{}` needs a hamiltonian segment list", command.name())));
            }
            Some(Hamiltonian::new(config.hamiltonian.clone()).map_err(config_err)?)
        } else {
            None
        };
        let taper = match (&hamiltonian, config.taper) {
            (Some(h), Some(t)) => {
                let b = h.length();
                let w = match t.c {
                    Some(c) => TaperWeight::new(t.a, c, b),
                    None => TaperWeight::midpoint(t.a, b),
                }
                .map_err(config_err)?;
                w.check_against(h).map_err(config_err)?;
                Some(w)
            }
            _ => None,
        };
        if let Some(n) = config.noise {
            if !(n.p.0 > 2.0) {
                return Err(CliError::Config(format!("noise exponent p = {} must lie in (2, inf]", n.p.0)));
            }
            if n.mode == NoiseKind::Adversarial && n.p.0.is_finite() {
                return Err(CliError::Config("adversarial noise needs p = \"inf\"".into()));
            }
            if !(n.epsilon >= 0.0 && n.epsilon.is_finite()) {
                return Err(CliError::Config(format!("noise epsilon = {} must be finite and >= 0", n.epsilon)));
            }
        }
        Ok(Self { command, config, hamiltonian, taper })
    }

    fn h(&self) -> &Hamiltonian {
        self.hamiltonian.as_ref().expect("validated")
    }

    fn n(&self) -> i64 {
        self.config.truncation as i64
    }

    fn num(&self, e: debranges_core::Error) -> CliError {
        CliError::Numerical { command: self.command.name(), source: e }
    }

    fn method(&self) -> Result<Method, CliError> {
        let kind = self.config.method.unwrap_or(if self.taper.is_some() { MethodKind::Oversampling } else { MethodKind::Sampling });
        match kind {
            MethodKind::Sampling => Ok(Method::Sampling),
            MethodKind::Oversampling => self
                .taper
                .map(Method::Oversampling)
                .ok_or_else(|| CliError::Config("oversampling needs a taper".into())),
        }
    }

    fn source(&self) -> SampleSource {
        self.config.source.clone().unwrap_or(SampleSource::KernelSection {
            l: self.taper.map_or(self.h().length(), |t| t.a),
            w0: C64::new(0.3, 0.1),
        })
    }
}

/// Validates `config` for `command` and runs it.
pub fn run(command: Command, config: ExperimentConfig) -> Result<Artifacts, CliError> {
    let plan = Plan::new(command, config)?;
    let artifacts = match command {
        Command::Spectrum => run_spectrum(&plan),
        Command::Kernel => run_kernel(&plan),
        Command::Reconstruct => run_reconstruct(&plan),
        Command::Stability => run_stability(&plan),
        Command::Airy => run_airy(&plan),
        Command::Calibrate => run_calibrate(&plan),
    }?;
    check_finite(&artifacts.summary, "").map_err(|field| CliError::NonFinite { command: command.name(), field })?;
    Ok(artifacts)
}

/// Floats enter summaries through [`finite`], which maps non-finite values to `null`;
/// any `null` therefore marks a leak and is reported with its path.
fn check_finite(v: &Value, path: &str) -> Result<(), String> {
    match v {
        Value::Null => Err(path.to_string()),
        Value::Array(items) => items.iter().enumerate().try_for_each(|(i, x)| check_finite(x, &format!("{path}[{i}]"))),
        Value::Object(map) => map.iter().try_for_each(|(k, x)| check_finite(x, &format!("{path}.{k}"))),
        _ => Ok(()),
    }
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn optional(x: Option<f64>) -> Value {
    x.map_or_else(|| json!("n/a"), finite)
}

fn run_spectrum(plan: &Plan) -> Result<Artifacts, CliError> {
    let h = plan.h();
    let solver = GenericSolver::new(h.clone());
    let sp = spectrum::eigenvalues_with(&solver, plan.config.gamma, -plan.n(), plan.n()).map_err(|e| plan.num(e))?;
    let counting = spectrum::counting_check(&sp, AsymptoticModel::Linear).ok();
    let lambdas = sp.lambdas();
    let exp_type = h.exponential_type(h.length()).map_err(|e| plan.num(e))?;
    Ok(Artifacts {
        csv: sp.to_csv(),
        summary: json!({
            "command": "spectrum",
            "gamma": finite(plan.config.gamma),
            "b": finite(sp.b),
            "count": sp.entries.len(),
            "lambda_min": finite(lambdas.first().copied().unwrap_or(0.0)),
            "lambda_max": finite(lambdas.last().copied().unwrap_or(0.0)),
            "exponential_type": finite(exp_type),
            "linear_counting_slope": optional(counting.as_ref().and_then(|c| c.slope)),
            "linear_counting_max_residual": optional(counting.as_ref().map(|c| c.max_residual)),
        }),
    })
}

fn run_kernel(plan: &Plan) -> Result<Artifacts, CliError> {
    let kc = plan.config.kernel.ok_or_else(|| CliError::Config("`kernel` needs a kernel section {kind, w}".into()))?;
    let solver = GenericSolver::new(plan.h().clone());
    let grid = plan.config.grid.points();
    let evals: debranges_core::Result<Vec<KernelEval>> = match kc.kind {
        KernelKind::Reproducing => {
            let l = kc.l.unwrap_or(plan.h().length());
            if !(l > 0.0 && l <= plan.h().length()) {
                return Err(CliError::Config(format!("kernel length l = {l} outside (0, b]")));
            }
            grid.par_iter().map(|&z| kernels::reproducing_kernel(&solver, l, z, kc.w)).collect()
        }
        KernelKind::Oversampling => {
            let taper = plan.taper.ok_or_else(|| CliError::Config("oversampling kernel needs a taper".into()))?;
            grid.par_iter().map(|&z| kernels::oversampling_kernel(&solver, &taper, z, kc.w)).collect()
        }
    };
    let evals = evals.map_err(|e| plan.num(e))?;
    let max_abs = evals.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
    let integral = evals.iter().filter(|e| e.form_used == kernels::KernelForm::Integral).count();
    Ok(Artifacts {
        csv: kernels::kernel_csv(&evals),
        summary: json!({
            "command": "kernel",
            "kind": match kc.kind { KernelKind::Reproducing => "reproducing", KernelKind::Oversampling => "oversampling" },
            "w": [finite(kc.w.re), finite(kc.w.im)],
            "points": evals.len(),
            "max_abs": finite(max_abs),
            "integral_form_points": integral,
        }),
    })
}

fn report_json(plan: &Plan, r: &reconstruct::ReconstructionReport) -> Value {
    let s = r.summary();
    json!({
        "method": match r.method { Method::Sampling => "sampling", Method::Oversampling(_) => "oversampling" },
        "N": plan.config.truncation,
        "sup_error": finite(s.sup_error),
        "tail_sum": finite(s.tail_sum),
        "stability_constant": finite(s.stability_constant),
        "decay_exponent": optional(s.decay_exponent),
        "tail_sums": r.tail_sums.iter().map(|&x| finite(x)).collect::<Vec<_>>(),
    })
}

fn run_reconstruct(plan: &Plan) -> Result<Artifacts, CliError> {
    let solver = GenericSolver::new(plan.h().clone());
    let method = plan.method()?;
    let sp = spectrum::eigenvalues_with(&solver, plan.config.gamma, -plan.n(), plan.n()).map_err(|e| plan.num(e))?;
    let samples = reconstruct::make_samples(&solver, &sp, plan.source()).map_err(|e| plan.num(e))?;
    let report = reconstruct::reconstruct(&solver, &method, &samples, &plan.config.grid.points(), plan.config.truncation)
        .map_err(|e| plan.num(e))?;
    let mut summary = report_json(plan, &report);
    summary["command"] = json!("reconstruct");
    Ok(Artifacts { csv: report.to_csv(), summary })
}

fn run_stability(plan: &Plan) -> Result<Artifacts, CliError> {
    let nc = plan.config.noise.ok_or_else(|| CliError::Config("`stability` needs a noise section".into()))?;
    let solver = GenericSolver::new(plan.h().clone());
    let method = plan.method()?;
    let sp = spectrum::eigenvalues_with(&solver, plan.config.gamma, -plan.n(), plan.n()).map_err(|e| plan.num(e))?;
    let exact = reconstruct::make_samples(&solver, &sp, plan.source()).map_err(|e| plan.num(e))?;
    let mode = match nc.mode {
        NoiseKind::Random => NoiseMode::Random { seed: nc.seed },
        NoiseKind::Adversarial => NoiseMode::Adversarial { z0: nc.z0 },
    };
    let noise = NoiseSpec { p: nc.p, epsilon: nc.epsilon, mode };
    let noisy = reconstruct::perturb(&solver, &method, &exact, noise).map_err(|e| plan.num(e))?;
    let grid = plan.config.grid.points();
    let n = plan.config.truncation;
    let clean = reconstruct::reconstruct(&solver, &method, &exact, &grid, n).map_err(|e| plan.num(e))?;
    let report = reconstruct::reconstruct(&solver, &method, &noisy, &grid, n).map_err(|e| plan.num(e))?;
    let tail = reconstruct::tail_diagnostic(&solver, &method, &sp, nc.z0, nc.p.dual()).map_err(|e| plan.num(e))?;
    let mut summary = report_json(plan, &report);
    summary["command"] = json!("stability");
    summary["p"] = serde_json::to_value(nc.p).expect("exponent serializes");
    summary["epsilon"] = finite(nc.epsilon);
    summary["exact_sup_error"] = finite(clean.sup_error);
    summary["error_over_epsilon"] = if nc.epsilon > 0.0 { finite(report.sup_error / nc.epsilon) } else { json!("n/a") };
    summary["q"] = finite(tail.q);
    summary["tail_total_at_z0"] = finite(tail.total());
    summary["tail_decay_exponent_at_z0"] = optional(tail.decay_exponent);
    summary["tail_remainder_estimate_at_z0"] = optional(tail.extrapolated_remainder());
    Ok(Artifacts { csv: report.to_csv(), summary })
}

fn run_airy(plan: &Plan) -> Result<Artifacts, CliError> {
    let ac = plan.config.airy.ok_or_else(|| CliError::Config("`airy` needs an airy section {b, n_max}".into()))?;
    if !(ac.b > 0.0 && ac.b.is_finite()) || ac.n_max == 0 {
        return Err(CliError::Config("airy needs b > 0 and n_max >= 1".into()));
    }
    let gamma = plan.config.gamma;
    let (kind, beta) = if gamma == 0.0 { (ZeroKind::Wi, 0.0) } else { (ZeroKind::WBeta, gamma.cos() / gamma.sin() / ac.b.sqrt()) };
    let table = airy::zeros(kind, beta, ac.n_max).map_err(|e| plan.num(e))?;
    let branch = airy::branch_check(airy::X_SWITCH).map_err(|e| plan.num(e))?;
    let max_residual = table.entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(Artifacts {
        csv: table.to_csv(),
        summary: json!({
            "command": "airy",
            "kind": match kind { ZeroKind::Wi => "wi", ZeroKind::WBeta => "w_beta" },
            "b": finite(ac.b),
            "gamma": finite(gamma),
            "beta": finite(beta),
            "n_max": ac.n_max,
            "max_residual": finite(max_residual),
            "branch_difference": finite(branch),
            "c0": finite(airy::c0()),
        }),
    })
}

fn run_calibrate(plan: &Plan) -> Result<Artifacts, CliError> {
    let pw = plan.config.pw.ok_or_else(|| CliError::Config("`calibrate` needs a pw section {a, b}".into()))?;
    if !(pw.a > 0.0 && pw.b > pw.a && pw.b.is_finite()) {
        return Err(CliError::Config(format!("pw needs 0 < a < b, got a = {}, b = {}", pw.a, pw.b)));
    }
    let cal = kernels::calibrate_pw_normalization(pw.a, pw.b).map_err(|e| plan.num(e))?;
    let zero = C64::new(0.0, 0.0);
    let evals: Vec<KernelEval> = plan
        .config
        .grid
        .points()
        .into_iter()
        .map(|z| KernelEval { z, w: zero, value: cal.calibrated_gab(z, zero), form_used: kernels::KernelForm::Quotient })
        .collect();
    Ok(Artifacts {
        csv: kernels::kernel_csv(&evals),
        summary: json!({
            "command": "calibrate",
            "a_pw": finite(pw.a),
            "b_pw": finite(pw.b),
            "calibration_factor": finite(cal.factor),
            "variation": finite(cal.variation),
            "n_terms": cal.n_terms,
            "n_points": cal.n_points,
        }),
    })
}

/// `--help` text describing the CSV columns of each command.
pub const CSV_HELP: &str = "\
CSV columns by command:
  spectrum     n, lambda, k_diag
  kernel       re_z, im_z, re_val, im_val
  reconstruct  z_re, z_im, ref_re, ref_im, rec_re, rec_im, abs_err
  stability    z_re, z_im, ref_re, ref_im, rec_re, rec_im, abs_err  (rec = noisy reconstruction)
  airy         n, value, residual
  calibrate    re_z, im_z, re_val, im_val  (calibrated G_ab(z, 0))

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Environment: SAMPLER_THREADS caps the number of worker threads.";
