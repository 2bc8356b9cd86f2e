//! Newton solver, step driver and initialization policies for the implicit
//! discrete scheme.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::bench::reference;
use crate::continuous::{LagrangianSystem, ThermoState};
use crate::discrete::{self, DiscreteLagrangian, DiscretePath, DiscreteTriple};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Absolute tolerance on the max-norm of the residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative step of the finite-difference Jacobian fallback.
    pub fd_step: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            fd_step: f64::EPSILON.sqrt(),
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || !(self.fd_step > 0.0) {
            return Err(Error::Config(format!("invalid newton settings {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iterations: usize,
    pub residual: f64,
    /// Tolerance actually applied: `tol`, raised to the resolution floor
    /// when one ulp of the unknowns moves the residual by more than `tol`.
    pub tolerance: f64,
    pub converged: bool,
}

/// Residual change caused by perturbing `x` by a few ulps: `4 ε ‖J‖_∞ ‖x‖_∞`.
fn resolution_floor(jac: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let row_sum = jac
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    4.0 * f64::EPSILON * row_sum * linalg::max_abs_vec(x)
}

/// Newton–Raphson on `residual(x) = 0`, stopping when `‖residual‖_∞ ≤ tol`.
///
/// When the residual cannot be resolved to `tol` in floating point (large
/// `‖x‖` against a steep residual) the tolerance is raised to the
/// resolution floor of the last Jacobian; the report records which one
/// applied.
///
/// At least one correction is applied unless the initial residual is exactly
/// zero: a warm start already inside `tol` still carries an error of order
/// `tol / ‖J‖`, which accumulates over long runs.
///
/// Without an analytic `jacobian` a forward finite-difference Jacobian with
/// relative step `cfg.fd_step` is used.
pub fn newton_solve<R, J>(
    mut residual: R,
    mut jacobian: Option<J>,
    x0: DVector<f64>,
    cfg: &NewtonConfig,
) -> Result<(DVector<f64>, StepReport)>
where
    R: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
    J: FnMut(&DVector<f64>) -> Result<DMatrix<f64>>,
{
    cfg.validate()?;
    let mut x = x0;
    let mut r = residual(&x)?;
    let mut tolerance = cfg.tol;
    for iterations in 0..=cfg.max_iter {
        let norm = linalg::max_abs_vec(&r);
        if !norm.is_finite() {
            return Err(Error::NewtonDiverged {
                iterations,
                residual: norm,
            });
        }
        if norm <= tolerance && (iterations > 0 || norm == 0.0) {
            let report = StepReport {
                iterations,
                residual: norm,
                tolerance,
                converged: true,
            };
            return Ok((x, report));
        }
        if iterations == cfg.max_iter {
            return Err(Error::NewtonDiverged {
                iterations,
                residual: norm,
            });
        }
        let jac = match jacobian.as_mut() {
            Some(j) => j(&x)?,
            None => forward_jacobian(&mut residual, &x, &r, cfg.fd_step)?,
        };
        tolerance = cfg.tol.max(resolution_floor(&jac, &x));
        x -= linalg::solve(&jac, &r, "newton jacobian")?;
        r = residual(&x)?;
    }
    unreachable!("loop returns on its last iteration")
}

fn forward_jacobian<R>(
    residual: &mut R,
    x: &DVector<f64>,
    r: &DVector<f64>,
    rel_step: f64,
) -> Result<DMatrix<f64>>
where
    R: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut jac = DMatrix::zeros(r.len(), x.len());
    let mut xp = x.clone();
    for j in 0..x.len() {
        let h = rel_step * (1.0 + x[j].abs());
        xp[j] = x[j] + h;
        let col = (residual(&xp)? - r) / h;
        xp[j] = x[j];
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// Newton without an analytic Jacobian.
pub fn newton_solve_fd<R>(
    residual: R,
    x0: DVector<f64>,
    cfg: &NewtonConfig,
) -> Result<(DVector<f64>, StepReport)>
where
    R: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    newton_solve(
        residual,
        None::<fn(&DVector<f64>) -> Result<DMatrix<f64>>>,
        x0,
        cfg,
    )
}

/// A discrete path together with the Newton report of every implicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub path: DiscretePath,
    pub reports: Vec<StepReport>,
}

impl Integration {
    /// Largest final momentum-matching residual over all steps.
    pub fn max_residual(&self) -> f64 {
        self.reports.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Iterates the discrete flow for `steps` steps starting from `(q0, q1, S0)`.
///
/// The returned path has `steps + 1` points. Failures are wrapped in
/// [`Error::Step`] carrying the index of the point being computed.
pub fn integrate<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    q0: DVector<f64>,
    q1: DVector<f64>,
    s0: f64,
    steps: usize,
    cfg: &NewtonConfig,
) -> Result<Integration> {
    cfg.validate()?;
    if q0.len() != d.dim() || q1.len() != d.dim() {
        return Err(Error::Config(format!(
            "initial positions must have dimension {}",
            d.dim()
        )));
    }
    if steps == 0 {
        return Ok(Integration {
            path: DiscretePath::from_parts_unchecked(d.step(), vec![q0], vec![s0]),
            reports: Vec::new(),
        });
    }
    let mut qs = Vec::with_capacity(steps + 1);
    let mut ss = Vec::with_capacity(steps + 1);
    let mut reports = Vec::with_capacity(steps.saturating_sub(1));
    let mut t = DiscreteTriple::new(q0, q1, s0);
    d.check_domain(&t).map_err(|e| e.at_step(1))?;
    qs.push(t.q0.clone());
    ss.push(t.s0);
    for k in 2..=steps {
        let (next, report) = discrete::discrete_flow(d, &t, cfg).map_err(|e| e.at_step(k))?;
        qs.push(next.q0.clone());
        ss.push(next.s0);
        reports.push(report);
        t = next;
    }
    let s_last = discrete::entropy_update(d, &t).map_err(|e| e.at_step(steps))?;
    qs.push(t.q1);
    ss.push(s_last);
    Ok(Integration {
        path: DiscretePath::from_parts_unchecked(d.step(), qs, ss),
        reports,
    })
}

/// How the second point `q1` of a discrete path is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitMode {
    /// `q1 = q(h)` from a closed-form solution.
    Exact,
    /// One high-accuracy adaptive step to `t = h`.
    Reference,
    /// `q1 = q0`.
    Hold,
    /// `q1 = q0 + h v0 + h²/2 a(q0, v0, S0)`.
    Taylor,
}

impl InitMode {
    pub const ALL: [InitMode; 4] = [
        InitMode::Exact,
        InitMode::Reference,
        InitMode::Hold,
        InitMode::Taylor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InitMode::Exact => "exact",
            InitMode::Reference => "reference",
            InitMode::Hold => "hold",
            InitMode::Taylor => "taylor",
        }
    }
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InitMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown init mode `{s}`")))
    }
}

/// Closed-form position `q(t)` for the initial data being integrated.
pub type ExactPosition<'a> = &'a dyn Fn(f64) -> DVector<f64>;

/// Tolerance of the adaptive step used by [`InitMode::Reference`].
pub const REFERENCE_INIT_TOL: f64 = 1e-10;

/// Produces the first discrete triple `(q0, q1, S0)` from continuous initial
/// data `(q0, v0, S0)`.
pub fn initialize<L: LagrangianSystem + ?Sized>(
    sys: &L,
    initial: &ThermoState,
    h: f64,
    mode: InitMode,
    exact: Option<ExactPosition<'_>>,
) -> Result<DiscreteTriple> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {h}")));
    }
    sys.check_domain(initial)?;
    let q1 = match mode {
        InitMode::Exact => match exact {
            Some(q) => q(h),
            None => {
                return Err(Error::ModeUnavailable {
                    mode: mode.to_string(),
                    system: sys.name().to_string(),
                })
            }
        },
        InitMode::Reference => {
            let traj = reference::reference_integrate(
                sys,
                initial,
                h,
                h,
                REFERENCE_INIT_TOL,
                REFERENCE_INIT_TOL,
            )?;
            traj.states[traj.len() - 1].q.clone()
        }
        InitMode::Hold => initial.q.clone(),
        InitMode::Taylor => {
            let a = sys.acceleration(initial)?;
            &initial.q + &initial.v * h + a * (0.5 * h * h)
        }
    };
    Ok(DiscreteTriple::new(initial.q.clone(), q1, initial.s))
}
