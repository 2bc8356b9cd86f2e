//! Config-driven experiments: run the variational integrator and the
//! baselines on one system, compare with the exact or reference solution and
//! write CSV output.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Deserialize;

use super::estimators::{self, HamiltonianSeries};
use super::{reference, rk2};
use crate::continuous::{ThermoState, Trajectory};
use crate::discrete::{midpoint_discretize, DiscretePath};
use crate::error::{Error, Result};
use crate::solve::{self, InitMode, NewtonConfig};
use crate::systems::{self, ExampleSystem};

/// Tolerance of the adaptive reference solution.
pub const REFERENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Variational,
    Rk2,
    Reference,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Variational, Method::Rk2, Method::Reference];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Variational => "variational",
            Method::Rk2 => "rk2",
            Method::Reference => "reference",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Initial data `(q0, v0, S0)`, optionally with an explicit second point
/// `q1` that bypasses the init mode.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub q: Vec<f64>,
    #[serde(default)]
    pub v: Option<Vec<f64>>,
    #[serde(default)]
    pub q1: Option<Vec<f64>>,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub h: f64,
    /// Defaults to the system's horizon.
    #[serde(default)]
    pub t_final: Option<f64>,
    /// Defaults to the system's initial data.
    #[serde(default)]
    pub initial: Option<InitialData>,
    #[serde(default)]
    pub init_mode: Option<String>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Entropy errors are additionally reported over the first this many
    /// steps.
    #[serde(default)]
    pub entropy_window: Option<usize>,
    /// Directory for CSV output; nothing is written when absent.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Keep per-step series in the outcome. Turning this off bounds memory
    /// on long runs; they are kept anyway when `out_dir` is set.
    #[serde(default = "default_keep_runs")]
    pub keep_runs: bool,
}

fn default_keep_runs() -> bool {
    true
}

fn default_methods() -> Vec<Method> {
    vec![Method::Variational, Method::Rk2]
}

impl ExperimentConfig {
    /// A config with the system's defaults and the given step.
    pub fn new(system: &str, h: f64) -> Self {
        Self {
            system: system.to_string(),
            params: BTreeMap::new(),
            h,
            t_final: None,
            initial: None,
            init_mode: None,
            methods: default_methods(),
            entropy_window: None,
            out_dir: None,
            keep_runs: true,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    /// Resolves defaults against the named system and checks invariants.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let system = systems::by_name(&self.system, &self.params)?;
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::Config(format!("h must be positive, got {}", self.h)));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods list is empty".to_string()));
        }
        let t_final = self.t_final.unwrap_or_else(|| system.default_t_final());
        if !t_final.is_finite() || t_final < 0.0 {
            return Err(Error::Config(format!("t_final must be nonnegative, got {t_final}")));
        }
        if t_final > 0.0 && t_final < self.h {
            return Err(Error::Config(format!("t_final {t_final} is shorter than h {}", self.h)));
        }
        let n = system.dim();
        let (initial, q1) = match &self.initial {
            None => (system.default_initial(), None),
            Some(data) => {
                let vec = |name: &str, x: &[f64]| {
                    if x.len() == n {
                        Ok(DVector::from_column_slice(x))
                    } else {
                        Err(Error::Config(format!(
                            "initial {name} has {} entries, {} expects {n}",
                            x.len(),
                            self.system
                        )))
                    }
                };
                let q = vec("q", &data.q)?;
                let v = match &data.v {
                    Some(v) => vec("v", v)?,
                    None => DVector::zeros(n),
                };
                let q1 = data.q1.as_deref().map(|x| vec("q1", x)).transpose()?;
                (ThermoState::new(q, v, data.s), q1)
            }
        };
        let init_mode = match &self.init_mode {
            Some(m) => m.parse()?,
            None => system.default_init_mode(),
        };
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        Ok(ResolvedExperiment {
            system,
            h: self.h,
            steps: (t_final / self.h).round() as usize,
            initial,
            q1,
            init_mode,
            methods,
            entropy_window: self.entropy_window,
            keep_runs: self.keep_runs || self.out_dir.is_some(),
        })
    }
}

pub struct ResolvedExperiment {
    pub system: Box<dyn ExampleSystem>,
    pub h: f64,
    pub steps: usize,
    pub initial: ThermoState,
    pub q1: Option<DVector<f64>>,
    pub init_mode: InitMode,
    pub methods: Vec<Method>,
    pub entropy_window: Option<usize>,
    pub keep_runs: bool,
}

/// Output of one method: positions, velocities, entropies and Hamiltonian
/// estimates on the grid `t_k = k h`.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub method: Method,
    pub h: f64,
    pub qs: Vec<DVector<f64>>,
    pub vs: Vec<DVector<f64>>,
    pub ss: Vec<f64>,
    pub hamiltonian: HamiltonianSeries,
    /// Largest momentum-matching residual (variational runs only).
    pub max_residual: Option<f64>,
}

/// Error statistics of one method. All entries are nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub system: String,
    pub method: Method,
    pub h: f64,
    pub steps: usize,
    pub max_pos_err: f64,
    pub max_s_err: f64,
    /// Entropy error over the configured window.
    pub max_s_err_window: Option<f64>,
    /// Deviation of the method's primary Hamiltonian estimate from `H(0)`:
    /// `H^+` for the variational method, the energy otherwise.
    pub max_h_dev: f64,
    pub max_h_plus_dev: Option<f64>,
    pub max_h_minus_dev: Option<f64>,
    pub max_h_vel_dev: f64,
    pub max_h_plus_minus_diff: Option<f64>,
    pub max_residual: Option<f64>,
    pub runtime_secs: f64,
}

/// A method that aborted; `step` is the index of the state being computed.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodFailure {
    pub method: Method,
    pub step: Option<usize>,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub system: String,
    pub h: f64,
    pub reports: Vec<ErrorReport>,
    pub runs: Vec<MethodRun>,
    pub failures: Vec<MethodFailure>,
}

impl ExperimentOutcome {
    pub fn report(&self, method: Method) -> Option<&ErrorReport> {
        self.reports.iter().find(|r| r.method == method)
    }

    pub fn run(&self, method: Method) -> Option<&MethodRun> {
        self.runs.iter().find(|r| r.method == method)
    }
}

/// Runs every configured method, compares with the exact solution when the
/// system has one and with the adaptive reference otherwise, and writes
/// CSV files when `out_dir` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let exp = cfg.resolve()?;
    let outcome = run_resolved(&exp)?;
    if let Some(dir) = &cfg.out_dir {
        super::output::write_outcome(dir, &outcome, exp.system.dim())?;
    }
    Ok(outcome)
}

pub fn run_resolved(exp: &ResolvedExperiment) -> Result<ExperimentOutcome> {
    let sys = exp.system.as_ref();
    let exact = sys.exact_solution(&exp.initial);
    let times: Vec<f64> = (0..=exp.steps).map(|k| k as f64 * exp.h).collect();
    let t_final = times[exp.steps];

    let mut reference_run = None;
    let truth: Vec<ThermoState> = match &exact {
        Some(sol) => sol.states(&times),
        None => {
            let start = Instant::now();
            let traj = reference::reference_integrate(
                sys,
                &exp.initial,
                t_final,
                exp.h,
                REFERENCE_TOL,
                REFERENCE_TOL,
            )?;
            let states = traj.states.clone();
            reference_run = Some((continuous_run(sys, Method::Reference, traj), start.elapsed()));
            states
        }
    };
    let h0 = sys.hamiltonian(&exp.initial.q, &exp.initial.v, exp.initial.s);

    let mut outcome = ExperimentOutcome {
        system: sys.name().to_string(),
        h: exp.h,
        reports: Vec::new(),
        runs: Vec::new(),
        failures: Vec::new(),
    };
    for &method in &exp.methods {
        let start = Instant::now();
        let run = match method {
            Method::Variational => variational_run(exp, exact.as_deref()),
            Method::Rk2 => rk2::rk2_integrate(sys, &exp.initial, exp.h, exp.steps)
                .map(|traj| continuous_run(sys, Method::Rk2, traj)),
            Method::Reference => match reference_run.take() {
                Some((run, _)) => Ok(run),
                None => reference::reference_integrate(
                    sys,
                    &exp.initial,
                    t_final,
                    exp.h,
                    REFERENCE_TOL,
                    REFERENCE_TOL,
                )
                .map(|traj| continuous_run(sys, Method::Reference, traj)),
            },
        };
        let elapsed = start.elapsed().as_secs_f64();
        match run {
            Ok(run) => {
                outcome
                    .reports
                    .push(error_report(sys.name(), &run, &truth, h0, exp, elapsed));
                if exp.keep_runs {
                    outcome.runs.push(run);
                }
            }
            Err(error) => outcome.failures.push(MethodFailure {
                method,
                step: error.step(),
                error,
            }),
        }
    }
    Ok(outcome)
}

/// Consumes the trajectory so long runs are not held twice.
fn continuous_run(sys: &dyn ExampleSystem, method: Method, traj: Trajectory) -> MethodRun {
    let len = traj.len();
    let velocity = estimators::trajectory_energy(sys, &traj);
    let ss = traj.states.iter().map(|x| x.s).collect();
    let (qs, vs) = traj.states.into_iter().map(|x| (x.q, x.v)).unzip();
    MethodRun {
        method,
        h: traj.h,
        qs,
        vs,
        ss,
        hamiltonian: HamiltonianSeries {
            plus: vec![f64::NAN; len],
            minus: vec![f64::NAN; len],
            velocity,
            velocity_endpoint: vec![f64::NAN; len],
        },
        max_residual: None,
    }
}

fn variational_run(
    exp: &ResolvedExperiment,
    exact: Option<&dyn systems::ExactSolution>,
) -> Result<MethodRun> {
    let sys = exp.system.as_ref();
    let d = midpoint_discretize(sys, exp.h)?;
    let first = match &exp.q1 {
        Some(q1) => crate::discrete::DiscreteTriple::new(exp.initial.q.clone(), q1.clone(), exp.initial.s),
        None => {
            let exact_q = exact.map(|sol| move |t: f64| sol.position(t));
            let handle = exact_q.as_ref().map(|f| f as &dyn Fn(f64) -> DVector<f64>);
            solve::initialize(sys, &exp.initial, exp.h, exp.init_mode, handle)?
        }
    };
    let integration = solve::integrate(
        &d,
        first.q0,
        first.q1,
        first.s0,
        exp.steps,
        &NewtonConfig::default(),
    )?;
    let path: DiscretePath = integration.path;
    let hamiltonian = estimators::hamiltonian_estimates(sys, &d, &path);
    let vs = estimators::path_velocities(&d, &path);
    Ok(MethodRun {
        method: Method::Variational,
        h: exp.h,
        max_residual: Some(integration.reports.iter().map(|r| r.residual).fold(0.0, f64::max)),
        qs: path.qs,
        vs,
        ss: path.ss,
        hamiltonian,
    })
}

fn error_report(
    system: &str,
    run: &MethodRun,
    truth: &[ThermoState],
    h0: f64,
    exp: &ResolvedExperiment,
    runtime_secs: f64,
) -> ErrorReport {
    let ham = &run.hamiltonian;
    let variational = run.method == Method::Variational;
    let plus = estimators::max_deviation(&ham.plus, h0);
    let vel = estimators::max_deviation(&ham.velocity, h0);
    ErrorReport {
        system: system.to_string(),
        method: run.method,
        h: run.h,
        steps: run.qs.len().saturating_sub(1),
        max_pos_err: estimators::max_position_error(&run.qs, truth, None),
        max_s_err: estimators::max_entropy_error(&run.ss, truth, None),
        max_s_err_window: exp
            .entropy_window
            .map(|w| estimators::max_entropy_error(&run.ss, truth, Some(w))),
        max_h_dev: if variational { plus } else { vel },
        max_h_plus_dev: variational.then_some(plus),
        max_h_minus_dev: variational.then(|| estimators::max_deviation(&ham.minus, h0)),
        max_h_vel_dev: vel,
        max_h_plus_minus_diff: variational
            .then(|| estimators::max_difference(&ham.plus, &ham.minus)),
        max_residual: run.max_residual,
        runtime_secs,
    }
}

/// Runs independent experiments in parallel; results keep the input order.
pub fn run_sweep(cfgs: &[ExperimentConfig]) -> Vec<Result<ExperimentOutcome>> {
    cfgs.par_iter().map(run_experiment).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub method: Method,
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub order: f64,
}

/// Fits the order of `method` from its max position errors over `hs`.
pub fn convergence_study(base: &ExperimentConfig, method: Method, hs: &[f64]) -> Result<ConvergenceStudy> {
    if hs.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two step sizes".to_string()));
    }
    let cfgs: Vec<ExperimentConfig> = hs
        .iter()
        .map(|&h| ExperimentConfig {
            h,
            methods: vec![method],
            out_dir: None,
            ..base.clone()
        })
        .collect();
    let mut errors = Vec::with_capacity(hs.len());
    for outcome in run_sweep(&cfgs) {
        let outcome = outcome?;
        if let Some(f) = outcome.failures.into_iter().next() {
            return Err(f.error);
        }
        let report = outcome
            .reports
            .iter()
            .find(|r| r.method == method)
            .ok_or_else(|| Error::Config(format!("no {method} report")))?;
        errors.push(report.max_pos_err);
    }
    Ok(ConvergenceStudy {
        method,
        hs: hs.to_vec(),
        order: estimators::loglog_slope(hs, &errors),
        errors,
    })
}
