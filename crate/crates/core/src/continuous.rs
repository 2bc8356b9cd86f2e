//! Continuous Lagrangian thermodynamic systems on `TQ × R` with `Q = R^n`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// A point `(q, v, S)` of `TQ × R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoState {
    pub q: DVector<f64>,
    pub v: DVector<f64>,
    pub s: f64,
}

impl ThermoState {
    pub fn new(q: DVector<f64>, v: DVector<f64>, s: f64) -> Self {
        Self { q, v, s }
    }

    pub fn scalar(q: f64, v: f64, s: f64) -> Self {
        Self::new(DVector::from_element(1, q), DVector::from_element(1, v), s)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.q.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

/// Second partial derivatives of `L` at a state. `qv[(i, j)] = ∂²L/∂q^i∂v^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondPartials {
    pub qq: DMatrix<f64>,
    pub qv: DMatrix<f64>,
    pub vv: DMatrix<f64>,
    pub qs: DVector<f64>,
    pub vs: DVector<f64>,
    pub ss: f64,
}

/// Derivatives of a covector-valued force `F_i(q, v, S)`:
/// `dq[(i, j)] = ∂F_i/∂q^j`, likewise for `v`; `ds[i] = ∂F_i/∂S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceJacobian {
    pub dq: DMatrix<f64>,
    pub dv: DMatrix<f64>,
    pub ds: DVector<f64>,
}

/// A Lagrangian thermodynamic system `(L, F̃^fr, F̃^ext)`.
///
/// Only `L` and the friction force are mandatory. First and second partials
/// default to central finite differences with step `eps^(1/3) (1 + |x|)`;
/// concrete systems override them with analytic expressions.
pub trait LagrangianSystem: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> &str;

    fn lagrangian(&self, x: &ThermoState) -> f64;

    /// Friction covector `F̃^fr_i(q, v, S)`.
    fn friction(&self, x: &ThermoState) -> DVector<f64>;

    fn external_force(&self, _x: &ThermoState) -> DVector<f64> {
        DVector::zeros(self.dim())
    }

    /// Rejects states outside the physical domain (e.g. negative volume).
    fn check_domain(&self, _x: &ThermoState) -> Result<()> {
        Ok(())
    }

    fn dl_dq(&self, x: &ThermoState) -> DVector<f64> {
        fd_gradient(|y| self.lagrangian(y), x, Slot::Q)
    }

    fn dl_dv(&self, x: &ThermoState) -> DVector<f64> {
        fd_gradient(|y| self.lagrangian(y), x, Slot::V)
    }

    fn dl_ds(&self, x: &ThermoState) -> f64 {
        let h = linalg::fd_step(x.s);
        let mut y = x.clone();
        y.s = x.s + h;
        let up = self.lagrangian(&y);
        y.s = x.s - h;
        (up - self.lagrangian(&y)) / (2.0 * h)
    }

    fn second_partials(&self, x: &ThermoState) -> SecondPartials {
        fd_second_partials(self, x)
    }

    fn friction_jacobian(&self, x: &ThermoState) -> ForceJacobian {
        fd_force_jacobian(|y| self.friction(y), x)
    }

    /// Accelerations solving the first thermodynamic Euler–Lagrange
    /// equation. The default solves the velocity-Hessian system.
    fn acceleration(&self, x: &ThermoState) -> Result<DVector<f64>> {
        generic_acceleration(self, x)
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Q,
    V,
}

fn slot_mut(x: &mut ThermoState, slot: Slot) -> &mut DVector<f64> {
    match slot {
        Slot::Q => &mut x.q,
        Slot::V => &mut x.v,
    }
}

fn slot_ref(x: &ThermoState, slot: Slot) -> &DVector<f64> {
    match slot {
        Slot::Q => &x.q,
        Slot::V => &x.v,
    }
}

fn fd_gradient<F: Fn(&ThermoState) -> f64>(f: F, x: &ThermoState, slot: Slot) -> DVector<f64> {
    let n = x.dim();
    let mut y = x.clone();
    DVector::from_fn(n, |i, _| {
        let x0 = slot_ref(x, slot)[i];
        let h = linalg::fd_step(x0);
        slot_mut(&mut y, slot)[i] = x0 + h;
        let up = f(&y);
        slot_mut(&mut y, slot)[i] = x0 - h;
        let down = f(&y);
        slot_mut(&mut y, slot)[i] = x0;
        (up - down) / (2.0 * h)
    })
}

/// Derivative of a vector-valued function along one coordinate slot.
fn fd_directional<F>(f: &F, x: &ThermoState, slot: Option<(Slot, usize)>) -> DVector<f64>
where
    F: Fn(&ThermoState) -> DVector<f64>,
{
    let mut y = x.clone();
    type Setter = Box<dyn Fn(&mut ThermoState, f64)>;
    let (x0, set): (f64, Setter) = match slot {
        Some((s, j)) => (
            slot_ref(x, s)[j],
            Box::new(move |st: &mut ThermoState, val| slot_mut(st, s)[j] = val),
        ),
        None => (x.s, Box::new(|st: &mut ThermoState, val| st.s = val)),
    };
    let h = linalg::fd_step(x0);
    set(&mut y, x0 + h);
    let up = f(&y);
    set(&mut y, x0 - h);
    let down = f(&y);
    (up - down) / (2.0 * h)
}

fn fd_force_jacobian<F>(f: F, x: &ThermoState) -> ForceJacobian
where
    F: Fn(&ThermoState) -> DVector<f64>,
{
    let n = x.dim();
    let cols = |slot: Slot| -> DMatrix<f64> {
        if n == 0 {
            return DMatrix::zeros(0, 0);
        }
        let cols: Vec<_> = (0..n)
            .map(|j| fd_directional(&f, x, Some((slot, j))))
            .collect();
        DMatrix::from_columns(&cols)
    };
    ForceJacobian {
        dq: cols(Slot::Q),
        dv: cols(Slot::V),
        ds: fd_directional(&f, x, None),
    }
}

fn fd_second_partials<L: LagrangianSystem + ?Sized>(sys: &L, x: &ThermoState) -> SecondPartials {
    let gq = |y: &ThermoState| sys.dl_dq(y);
    let gv = |y: &ThermoState| sys.dl_dv(y);
    let jq = fd_force_jacobian(gq, x);
    let jv = fd_force_jacobian(gv, x);
    let h = linalg::fd_step(x.s);
    let mut y = x.clone();
    y.s = x.s + h;
    let up = sys.dl_ds(&y);
    y.s = x.s - h;
    let ss = (up - sys.dl_ds(&y)) / (2.0 * h);
    SecondPartials {
        qq: jq.dq,
        qv: jq.dv,
        vv: jv.dv,
        qs: jq.ds,
        vs: jv.ds,
        ss,
    }
}

/// Entropy rate `(v · F̃^fr) / (∂L/∂S)`.
pub fn entropy_rate<L: LagrangianSystem + ?Sized>(sys: &L, x: &ThermoState) -> Result<f64> {
    let ls = sys.dl_ds(x);
    if ls == 0.0 || !ls.is_finite() {
        return Err(Error::ZeroTemperature(-ls));
    }
    Ok(x.v.dot(&sys.friction(x)) / ls)
}

/// Accelerations from `L_vv a = L_q + F^fr + F^ext - L_vq v - L_vS Ṡ`.
pub fn generic_acceleration<L: LagrangianSystem + ?Sized>(
    sys: &L,
    x: &ThermoState,
) -> Result<DVector<f64>> {
    let sdot = entropy_rate(sys, x)?;
    let d2 = sys.second_partials(x);
    // d/dt ∂L/∂v^i = Σ_j (∂²L/∂v^i∂q^j v^j + ∂²L/∂v^i∂v^j a^j) + ∂²L/∂v^i∂S Ṡ
    let rhs = sys.dl_dq(x) + sys.friction(x) + sys.external_force(x)
        - d2.qv.tr_mul(&x.v)
        - &d2.vs * sdot;
    linalg::solve(&d2.vv, &rhs, "velocity Hessian")
}

/// Right-hand side `(q̇, v̇, Ṡ)` of the thermodynamic Euler–Lagrange equations.
pub fn continuous_rhs<L: LagrangianSystem + ?Sized>(
    sys: &L,
    x: &ThermoState,
) -> Result<(DVector<f64>, DVector<f64>, f64)> {
    sys.check_domain(x)?;
    let sdot = entropy_rate(sys, x)?;
    let a = sys.acceleration(x)?;
    Ok((x.v.clone(), a, sdot))
}

/// Lagrangian energy `E_L = v · ∂L/∂v - L`.
pub fn energy<L: LagrangianSystem + ?Sized>(sys: &L, x: &ThermoState) -> f64 {
    x.v.dot(&sys.dl_dv(x)) - sys.lagrangian(x)
}

/// Temperature `T = -∂L/∂S`.
pub fn temperature<L: LagrangianSystem + ?Sized>(sys: &L, x: &ThermoState) -> f64 {
    -sys.dl_ds(x)
}

/// Legendre transform `(q, v, S) ↦ (q, ∂L/∂v, S)`.
pub fn legendre<L: LagrangianSystem + ?Sized>(
    sys: &L,
    x: &ThermoState,
) -> (DVector<f64>, DVector<f64>, f64) {
    (x.q.clone(), sys.dl_dv(x), x.s)
}

/// Inverts the Legendre transform by Newton iteration on `∂L/∂v = p`,
/// starting from `v = p`.
pub fn inverse_legendre<L: LagrangianSystem + ?Sized>(
    sys: &L,
    q: &DVector<f64>,
    p: &DVector<f64>,
    s: f64,
) -> Result<ThermoState> {
    let mut x = ThermoState::new(q.clone(), p.clone(), s);
    for _ in 0..50 {
        let r = sys.dl_dv(&x) - p;
        if linalg::max_abs_vec(&r) <= 1e-14 * (1.0 + linalg::max_abs_vec(p)) {
            return Ok(x);
        }
        let dv = linalg::solve(&sys.second_partials(&x).vv, &r, "velocity Hessian")?;
        x.v -= dv;
    }
    let r = sys.dl_dv(&x) - p;
    if linalg::max_abs_vec(&r) <= 1e-10 * (1.0 + linalg::max_abs_vec(p)) {
        Ok(x)
    } else {
        Err(Error::NewtonDiverged {
            iterations: 50,
            residual: linalg::max_abs_vec(&r),
        })
    }
}

/// A vector field on `Q` together with its Jacobian `∂X^i/∂q^j`.
pub trait VectorField: Send + Sync {
    fn value(&self, q: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, q: &DVector<f64>) -> DMatrix<f64>;
}

/// A constant (translation) field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantField(pub DVector<f64>);

impl VectorField for ConstantField {
    fn value(&self, _q: &DVector<f64>) -> DVector<f64> {
        self.0.clone()
    }

    fn jacobian(&self, q: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(q.len(), q.len())
    }
}

/// Noether defect `X^C(L) + (F̃^fr + F̃^ext)(X)` at one state.
pub fn noether_defect<L: LagrangianSystem + ?Sized>(
    sys: &L,
    field: &dyn VectorField,
    x: &ThermoState,
) -> f64 {
    let xq = field.value(&x.q);
    let xv = field.jacobian(&x.q) * &x.v;
    let complete_lift = xq.dot(&sys.dl_dq(x)) + xv.dot(&sys.dl_dv(x));
    complete_lift + (sys.friction(x) + sys.external_force(x)).dot(&xq)
}

/// True when the Noether condition holds at every sample to `1e-10`, in
/// which case `X^V(L)` ([`vertical_lift_quantity`]) is conserved.
pub fn noether_lift_check<L: LagrangianSystem + ?Sized>(
    sys: &L,
    field: &dyn VectorField,
    samples: &[ThermoState],
) -> bool {
    samples
        .iter()
        .all(|x| noether_defect(sys, field, x).abs() <= 1e-10)
}

/// `X^V(L) = ∂L/∂v · X(q)`.
pub fn vertical_lift_quantity<L: LagrangianSystem + ?Sized>(
    sys: &L,
    field: &dyn VectorField,
    x: &ThermoState,
) -> f64 {
    sys.dl_dv(x).dot(&field.value(&x.q))
}

/// A uniformly sampled trajectory of the continuous system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub times: Vec<f64>,
    pub states: Vec<ThermoState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `max_t |g(x_t) - g(x_0)|` along a trajectory.
pub fn conserved_along<G: Fn(&ThermoState) -> f64>(trajectory: &Trajectory, g: G) -> f64 {
    let Some(first) = trajectory.states.first() else {
        return 0.0;
    };
    let g0 = g(first);
    trajectory
        .states
        .iter()
        .map(|x| (g(x) - g0).abs())
        .fold(0.0, f64::max)
}
