//! Discrete variational machinery on `Q × Q × R` with `Q = R^n`.
//!
//! A step is described by a triple `(q0, q1, S0)`. Friction covectors
//! `f^{fr,-}` and `f^{fr,+}` act on `dq0` and `dq1` respectively; with linear
//! coordinates the pairing `f · q` is the plain dot product.

use nalgebra::{DMatrix, DVector};

use crate::continuous::{LagrangianSystem, ThermoState, VectorField};
use crate::error::{Error, Result};
use crate::linalg;
use crate::solve::{self, NewtonConfig, StepReport};

/// A point `(q0, q1, S0)` of `Q × Q × R`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTriple {
    pub q0: DVector<f64>,
    pub q1: DVector<f64>,
    pub s0: f64,
}

impl DiscreteTriple {
    pub fn new(q0: DVector<f64>, q1: DVector<f64>, s0: f64) -> Self {
        Self { q0, q1, s0 }
    }

    pub fn scalar(q0: f64, q1: f64, s0: f64) -> Self {
        Self::new(DVector::from_element(1, q0), DVector::from_element(1, q1), s0)
    }

    pub fn dim(&self) -> usize {
        self.q0.len()
    }

    /// Flattens to `(q0, q1, S0)` coordinates.
    pub fn to_coords(&self) -> DVector<f64> {
        let n = self.dim();
        let mut z = DVector::zeros(2 * n + 1);
        z.rows_mut(0, n).copy_from(&self.q0);
        z.rows_mut(n, n).copy_from(&self.q1);
        z[2 * n] = self.s0;
        z
    }

    pub fn from_coords(z: &DVector<f64>) -> Self {
        let n = z.len() / 2;
        Self {
            q0: z.rows(0, n).into_owned(),
            q1: z.rows(n, n).into_owned(),
            s0: z[2 * n],
        }
    }
}

/// Second derivatives of `L_d` and of the friction covectors at a triple.
///
/// `d1d2[(i, j)] = ∂²L_d/∂q0^i∂q1^j`, `d1d1[(i, j)] = ∂²L_d/∂q0^i∂q0^j`, and so
/// on; friction Jacobians follow `fm_q1[(i, j)] = ∂f^-_i/∂q1^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSecondPartials {
    pub d1d1: DMatrix<f64>,
    pub d1d2: DMatrix<f64>,
    pub d2d2: DMatrix<f64>,
    pub d1s: DVector<f64>,
    pub d2s: DVector<f64>,
    pub fm_q0: DMatrix<f64>,
    pub fm_q1: DMatrix<f64>,
    pub fm_s: DVector<f64>,
    pub fp_q0: DMatrix<f64>,
    pub fp_q1: DMatrix<f64>,
    pub fp_s: DVector<f64>,
}

impl DiscreteSecondPartials {
    /// `∂(D2 L_d)_i/∂q0^j`.
    pub fn d2d1(&self) -> DMatrix<f64> {
        self.d1d2.transpose()
    }
}

/// A simple discrete thermodynamic system `(L_d, f^fr_d)` with time step `h`.
pub trait DiscreteLagrangian: Send + Sync {
    fn dim(&self) -> usize;

    fn step(&self) -> f64;

    fn check_domain(&self, _t: &DiscreteTriple) -> Result<()> {
        Ok(())
    }

    fn ld(&self, t: &DiscreteTriple) -> f64;

    /// `D1 L_d`, derivative in `q0`.
    fn d1(&self, t: &DiscreteTriple) -> DVector<f64>;

    /// `D2 L_d`, derivative in `q1`.
    fn d2(&self, t: &DiscreteTriple) -> DVector<f64>;

    /// `D_S L_d`, derivative in `S0`.
    fn ds(&self, t: &DiscreteTriple) -> f64;

    fn friction_minus(&self, t: &DiscreteTriple) -> DVector<f64>;

    fn friction_plus(&self, t: &DiscreteTriple) -> DVector<f64>;

    fn second_partials(&self, t: &DiscreteTriple) -> DiscreteSecondPartials {
        fd_discrete_second_partials(self, t)
    }
}

fn fd_discrete_second_partials<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> DiscreteSecondPartials {
    let n = d.dim();
    let z = t.to_coords();
    // Jacobian of a covector-valued function of (q0, q1, S0): n × (2n+1).
    let jac = |f: &dyn Fn(&DiscreteTriple) -> DVector<f64>| -> DMatrix<f64> {
        let mut out = DMatrix::zeros(n, 2 * n + 1);
        let mut zp = z.clone();
        for j in 0..2 * n + 1 {
            let h = linalg::fd_step(z[j]);
            zp[j] = z[j] + h;
            let up = f(&DiscreteTriple::from_coords(&zp));
            zp[j] = z[j] - h;
            let down = f(&DiscreteTriple::from_coords(&zp));
            zp[j] = z[j];
            out.set_column(j, &((up - down) / (2.0 * h)));
        }
        out
    };
    let j1 = jac(&|x| d.d1(x));
    let j2 = jac(&|x| d.d2(x));
    let jm = jac(&|x| d.friction_minus(x));
    let jp = jac(&|x| d.friction_plus(x));
    let cols = |m: &DMatrix<f64>, start: usize| m.columns(start, n).into_owned();
    DiscreteSecondPartials {
        d1d1: cols(&j1, 0),
        d1d2: cols(&j1, n),
        d2d2: cols(&j2, n),
        d1s: j1.column(2 * n).into_owned(),
        d2s: j2.column(2 * n).into_owned(),
        fm_q0: cols(&jm, 0),
        fm_q1: cols(&jm, n),
        fm_s: jm.column(2 * n).into_owned(),
        fp_q0: cols(&jp, 0),
        fp_q1: cols(&jp, n),
        fp_s: jp.column(2 * n).into_owned(),
    }
}

/// Midpoint-rule discretization of a continuous system:
/// `L_d(q0, q1, S0) = L((q0+q1)/2, (q1-q0)/h, S0)` with both friction
/// covectors equal to `F̃^fr` at that midpoint state.
pub struct MidpointDiscretization<'a, L: ?Sized> {
    sys: &'a L,
    h: f64,
}

pub fn midpoint_discretize<L: LagrangianSystem + ?Sized>(
    sys: &L,
    h: f64,
) -> Result<MidpointDiscretization<'_, L>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Config(format!("time step must be positive, got {h}")));
    }
    Ok(MidpointDiscretization { sys, h })
}

impl<L: LagrangianSystem + ?Sized> MidpointDiscretization<'_, L> {
    pub fn system(&self) -> &L {
        self.sys
    }

    pub fn midpoint_state(&self, t: &DiscreteTriple) -> ThermoState {
        ThermoState {
            q: (&t.q0 + &t.q1) * 0.5,
            v: (&t.q1 - &t.q0) / self.h,
            s: t.s0,
        }
    }
}

impl<L: LagrangianSystem + ?Sized> DiscreteLagrangian for MidpointDiscretization<'_, L> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn step(&self) -> f64 {
        self.h
    }

    fn check_domain(&self, t: &DiscreteTriple) -> Result<()> {
        self.sys.check_domain(&self.midpoint_state(t))
    }

    fn ld(&self, t: &DiscreteTriple) -> f64 {
        self.sys.lagrangian(&self.midpoint_state(t))
    }

    fn d1(&self, t: &DiscreteTriple) -> DVector<f64> {
        let x = self.midpoint_state(t);
        self.sys.dl_dq(&x) * 0.5 - self.sys.dl_dv(&x) / self.h
    }

    fn d2(&self, t: &DiscreteTriple) -> DVector<f64> {
        let x = self.midpoint_state(t);
        self.sys.dl_dq(&x) * 0.5 + self.sys.dl_dv(&x) / self.h
    }

    fn ds(&self, t: &DiscreteTriple) -> f64 {
        self.sys.dl_ds(&self.midpoint_state(t))
    }

    fn friction_minus(&self, t: &DiscreteTriple) -> DVector<f64> {
        self.sys.friction(&self.midpoint_state(t))
    }

    fn friction_plus(&self, t: &DiscreteTriple) -> DVector<f64> {
        self.sys.friction(&self.midpoint_state(t))
    }

    fn second_partials(&self, t: &DiscreteTriple) -> DiscreteSecondPartials {
        let x = self.midpoint_state(t);
        let l = self.sys.second_partials(&x);
        let f = self.sys.friction_jacobian(&x);
        let h = self.h;
        let lvq = l.qv.transpose();
        // ∂q_mid/∂q0 = ∂q_mid/∂q1 = 1/2, ∂v/∂q0 = -1/h, ∂v/∂q1 = 1/h.
        let d1d1 = &l.qq * 0.25 - (&l.qv + &lvq) * (0.5 / h) + &l.vv / (h * h);
        let d1d2 = &l.qq * 0.25 + (&l.qv - &lvq) * (0.5 / h) - &l.vv / (h * h);
        let d2d2 = &l.qq * 0.25 + (&l.qv + &lvq) * (0.5 / h) + &l.vv / (h * h);
        let f_q0 = &f.dq * 0.5 - &f.dv / h;
        let f_q1 = &f.dq * 0.5 + &f.dv / h;
        DiscreteSecondPartials {
            d1d1,
            d1d2,
            d2d2,
            d1s: &l.qs * 0.5 - &l.vs / h,
            d2s: &l.qs * 0.5 + &l.vs / h,
            fm_q0: f_q0.clone(),
            fm_q1: f_q1.clone(),
            fm_s: f.ds.clone(),
            fp_q0: f_q0,
            fp_q1: f_q1,
            fp_s: f.ds,
        }
    }
}

/// Entropy update `S1 = S0 + (f^+ · q1 - f^- · q0) / D_S L_d`.
pub fn entropy_update<D: DiscreteLagrangian + ?Sized>(d: &D, t: &DiscreteTriple) -> Result<f64> {
    let ds = d.ds(t);
    if ds == 0.0 || !ds.is_finite() {
        return Err(Error::ZeroTemperature(-ds));
    }
    let work = d.friction_plus(t).dot(&t.q1) - d.friction_minus(t).dot(&t.q0);
    Ok(t.s0 + work / ds)
}

/// Residual of the discrete thermodynamic Euler–Lagrange equation at `q_curr`.
pub fn del_residual<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    q_prev: &DVector<f64>,
    q_curr: &DVector<f64>,
    s_prev: f64,
    q_next: &DVector<f64>,
    s_curr: f64,
) -> DVector<f64> {
    let back = DiscreteTriple::new(q_prev.clone(), q_curr.clone(), s_prev);
    let fwd = DiscreteTriple::new(q_curr.clone(), q_next.clone(), s_curr);
    d.d1(&fwd) + d.friction_minus(&fwd) * 0.5 + d.d2(&back) + d.friction_plus(&back) * 0.5
}

/// The map `D_DEL L_d` pairing with interior variations `δq_k`; identical to
/// [`del_residual`].
pub fn ddel_map<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    q_prev: &DVector<f64>,
    q_curr: &DVector<f64>,
    q_next: &DVector<f64>,
    s_prev: f64,
    s_curr: f64,
) -> DVector<f64> {
    del_residual(d, q_prev, q_curr, s_prev, q_next, s_curr)
}

/// `F^{f-} L_d (q0, q1, S0) = (q0, -D1 L_d - f^-/2, S0)`.
pub fn legendre_minus<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> (DVector<f64>, DVector<f64>, f64) {
    let p = -(d.d1(t) + d.friction_minus(t) * 0.5);
    (t.q0.clone(), p, t.s0)
}

/// `F^{f+} L_d (q0, q1, S0) = (q1, D2 L_d + f^+/2, S1)`.
pub fn legendre_plus<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> Result<(DVector<f64>, DVector<f64>, f64)> {
    let s1 = entropy_update(d, t)?;
    let p = d.d2(t) + d.friction_plus(t) * 0.5;
    Ok((t.q1.clone(), p, s1))
}

/// The `h`-scaled discrete momenta `(p^-, p^+)`.
pub fn discrete_momenta<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> (DVector<f64>, DVector<f64>) {
    let h = d.step();
    let minus = -(d.d1(t) * h + d.friction_minus(t) * (0.5 * h));
    let plus = d.d2(t) * h + d.friction_plus(t) * (0.5 * h);
    (minus, plus)
}

/// `-D2 D1 L_d - ½ D2 f^-`; `F^{f-}` is a local diffeomorphism iff this is
/// invertible.
pub fn semiregularity_matrix<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> DMatrix<f64> {
    let sp = d.second_partials(t);
    -(sp.d1d2 + sp.fm_q1 * 0.5)
}

pub fn is_semiregular<D: DiscreteLagrangian + ?Sized>(d: &D, t: &DiscreteTriple) -> bool {
    linalg::is_invertible(&semiregularity_matrix(d, t))
}

/// Solves for `q2` so that `(q1, q2, S1)` follows `(q0, q1, S0)`.
///
/// The Newton residual is the momentum mismatch `p^+_d(q0, q1, S0) -
/// p^-_d(q1, q2, S1)`, i.e. `h` times [`del_residual`], warm-started at
/// `2 q1 - q0`.
pub fn discrete_flow<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
    cfg: &NewtonConfig,
) -> Result<(DiscreteTriple, StepReport)> {
    d.check_domain(t)?;
    let h = d.step();
    let s1 = entropy_update(d, t)?;
    let (_, p_plus) = discrete_momenta(d, t);
    let guess = &t.q1 * 2.0 - &t.q0;
    let trial = |x: &DVector<f64>| DiscreteTriple::new(t.q1.clone(), x.clone(), s1);
    let residual = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let next = trial(x);
        d.check_domain(&next)?;
        Ok(&p_plus + (d.d1(&next) + d.friction_minus(&next) * 0.5) * h)
    };
    let jacobian = |x: &DVector<f64>| -> Result<DMatrix<f64>> {
        let sp = d.second_partials(&trial(x));
        Ok((sp.d1d2 + sp.fm_q1 * 0.5) * h)
    };
    let (q2, report) = solve::newton_solve(residual, Some(jacobian), guess, cfg)?;
    Ok((DiscreteTriple::new(t.q1.clone(), q2, s1), report))
}

/// Coefficient matrices of `ω^± = -W^± dq0 ∧ dq1`:
/// `W^+ = D1D2 L_d + ½ D1 f^+` and `W^- = D1D2 L_d + ½ D2 f^-`.
pub fn omega_matrices<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let sp = d.second_partials(t);
    let plus = &sp.d1d2 + sp.fp_q0.transpose() * 0.5;
    let minus = &sp.d1d2 + &sp.fm_q1 * 0.5;
    (plus, minus)
}

/// Embeds `-W dq0 ∧ dq1` as an antisymmetric matrix on `(q0, q1, S0)`
/// coordinates, with a zero `S` row and column.
pub fn embed_omega(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    let mut m = DMatrix::zeros(2 * n + 1, 2 * n + 1);
    m.view_mut((0, n), (n, n)).copy_from(&(-w));
    m.view_mut((n, 0), (n, n)).copy_from(&w.transpose());
    m
}

/// Jacobians of the position and momentum parts of `F^{f-}` and `F^{f+}`
/// with respect to `(q0, q1, S0)`.
fn legendre_jacobians<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> [(DMatrix<f64>, DMatrix<f64>); 2] {
    let n = d.dim();
    let sp = d.second_partials(t);
    let select = |offset: usize| {
        let mut m = DMatrix::zeros(n, 2 * n + 1);
        m.view_mut((0, offset), (n, n)).fill_with_identity();
        m
    };
    let assemble = |a: DMatrix<f64>, b: DMatrix<f64>, c: DVector<f64>| {
        let mut m = DMatrix::zeros(n, 2 * n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&a);
        m.view_mut((0, n), (n, n)).copy_from(&b);
        m.set_column(2 * n, &c);
        m
    };
    let minus = assemble(
        -(&sp.d1d1 + &sp.fm_q0 * 0.5),
        -(&sp.d1d2 + &sp.fm_q1 * 0.5),
        -(&sp.d1s + &sp.fm_s * 0.5),
    );
    let plus = assemble(
        sp.d2d1() + &sp.fp_q0 * 0.5,
        &sp.d2d2 + &sp.fp_q1 * 0.5,
        &sp.d2s + &sp.fp_s * 0.5,
    );
    [(select(0), minus), (select(n), plus)]
}

/// Full pullbacks `(F^{f+})^* ω` and `(F^{f-})^* ω` on `(q0, q1, S0)`,
/// including the `dS0` terms that appear when `L_d` depends on entropy.
pub fn pullback_two_forms<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let [(qm, pm), (qp, pp)] = legendre_jacobians(d, t);
    let form = |jq: &DMatrix<f64>, jp: &DMatrix<f64>| jq.tr_mul(jp) - jp.tr_mul(jq);
    (form(&qp, &pp), form(&qm, &pm))
}

/// Step of the fourth-order stencil used for the flow Jacobian. Larger steps
/// lose to truncation on the steep Van der Waals potential, smaller ones to
/// rounding.
const FLOW_FD_STEP: f64 = 1e-4;

/// Fourth-order central finite-difference Jacobian of the discrete flow.
pub fn flow_jacobian_fd<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
    cfg: &NewtonConfig,
) -> Result<DMatrix<f64>> {
    let z = t.to_coords();
    let dim = z.len();
    let phi = |zz: &DVector<f64>| -> Result<DVector<f64>> {
        Ok(discrete_flow(d, &DiscreteTriple::from_coords(zz), cfg)?
            .0
            .to_coords())
    };
    let mut jac = DMatrix::zeros(dim, dim);
    let mut zp = z.clone();
    for j in 0..dim {
        let step = FLOW_FD_STEP;
        let mut eval = |k: f64| -> Result<DVector<f64>> {
            zp[j] = z[j] + k * step;
            let out = phi(&zp);
            zp[j] = z[j];
            out
        };
        let col = (eval(-2.0)? - eval(2.0)? + (eval(1.0)? - eval(-1.0)?) * 8.0) / (12.0 * step);
        jac.set_column(j, &col);
    }
    Ok(jac)
}

/// `max |Jᵀ Ω^-(Φ(t)) J - Ω^+(t)|` with `J` the finite-difference Jacobian
/// of the flow. Vanishes (up to truncation) when `Φ^* ω^- = ω^+`.
pub fn pullback_check<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
    cfg: &NewtonConfig,
) -> Result<f64> {
    let (image, _) = discrete_flow(d, t, cfg)?;
    let jac = flow_jacobian_fd(d, t, cfg)?;
    let (omega_plus, _) = pullback_two_forms(d, t);
    let (_, omega_minus_image) = pullback_two_forms(d, &image);
    let pulled = jac.tr_mul(&(omega_minus_image * &jac));
    Ok(linalg::max_abs(&(pulled - omega_plus)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Discrete momentum map `⟨p^±, ξ_Q⟩` evaluated at `q1` (plus) or `q0` (minus).
pub fn momentum_map<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
    xi: &dyn VectorField,
    side: Side,
) -> f64 {
    let (minus, plus) = discrete_momenta(d, t);
    match side {
        Side::Plus => plus.dot(&xi.value(&t.q1)),
        Side::Minus => minus.dot(&xi.value(&t.q0)),
    }
}

/// `ξ(L_d) + ½ f_d(ξ)` for the diagonal lift `(ξ_Q(q0), ξ_Q(q1), 0)`.
///
/// The friction enters with the same `½` weights as in the discrete
/// momenta, so `J^+ - J^- = h · defect` holds identically.
pub fn noether_defect<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    xi: &dyn VectorField,
    t: &DiscreteTriple,
) -> f64 {
    let x0 = xi.value(&t.q0);
    let x1 = xi.value(&t.q1);
    d.d1(t).dot(&x0)
        + d.d2(t).dot(&x1)
        + 0.5 * (d.friction_minus(t).dot(&x0) + d.friction_plus(t).dot(&x1))
}

pub fn noether_condition<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    xi: &dyn VectorField,
    samples: &[DiscreteTriple],
) -> bool {
    samples
        .iter()
        .all(|t| noether_defect(d, xi, t).abs() <= 1e-10)
}

/// A discrete path `(q_k, S_k)`, `k = 0..N`, in the discrete thermodynamic
/// path space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    pub h: f64,
    pub qs: Vec<DVector<f64>>,
    pub ss: Vec<f64>,
}

/// Relative tolerance on the entropy constraint for path membership.
pub const PATH_CONSTRAINT_RTOL: f64 = 1e-12;

impl DiscretePath {
    /// Validates the entropy constraint at every step.
    pub fn new<D: DiscreteLagrangian + ?Sized>(
        d: &D,
        qs: Vec<DVector<f64>>,
        ss: Vec<f64>,
    ) -> Result<Self> {
        let path = Self {
            h: d.step(),
            qs,
            ss,
        };
        path.validate(d)?;
        Ok(path)
    }

    pub(crate) fn from_parts_unchecked(h: f64, qs: Vec<DVector<f64>>, ss: Vec<f64>) -> Self {
        Self { h, qs, ss }
    }

    pub fn len(&self) -> usize {
        self.qs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qs.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.qs.len().saturating_sub(1)
    }

    pub fn triple(&self, k: usize) -> DiscreteTriple {
        DiscreteTriple::new(self.qs[k].clone(), self.qs[k + 1].clone(), self.ss[k])
    }

    pub fn validate<D: DiscreteLagrangian + ?Sized>(&self, d: &D) -> Result<()> {
        if self.qs.len() != self.ss.len() {
            return Err(Error::Config(format!(
                "path has {} positions but {} entropies",
                self.qs.len(),
                self.ss.len()
            )));
        }
        for k in 0..self.steps() {
            let want = entropy_update(d, &self.triple(k))?;
            let residual = (self.ss[k + 1] - want).abs();
            if residual > PATH_CONSTRAINT_RTOL * (1.0 + want.abs()) {
                return Err(Error::PathConstraint {
                    index: k + 1,
                    residual,
                });
            }
        }
        Ok(())
    }
}

/// Discrete action `Σ L_d(q_{k-1}, q_k, S_{k-1})` of a path in the discrete
/// thermodynamic path space.
pub fn discrete_action<D: DiscreteLagrangian + ?Sized>(d: &D, path: &DiscretePath) -> Result<f64> {
    path.validate(d)?;
    Ok((0..path.steps()).map(|k| d.ld(&path.triple(k))).sum())
}

/// Boundary one-forms `(Θ^-, Θ^+)` on `dq0` and `dq1` respectively.
pub fn boundary_forms<D: DiscreteLagrangian + ?Sized>(
    d: &D,
    t: &DiscreteTriple,
) -> (DVector<f64>, DVector<f64>) {
    let theta_minus = -(d.d1(t) + d.friction_minus(t) * 0.5);
    let theta_plus = d.d2(t) + d.friction_plus(t) * 0.5;
    (theta_minus, theta_plus)
}
