//! The example systems with analytic derivatives: a damped harmonic
//! oscillator, an ideal gas and a Van der Waals gas behind a piston, and a
//! cylinder with two pistons.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::RngCore;

use crate::bench::quadrature;
use crate::continuous::{ForceJacobian, LagrangianSystem, SecondPartials, ThermoState};
use crate::error::{Error, Result};
use crate::geometry::HamiltonianPoint;
use crate::solve::InitMode;

/// A closed-form solution of a system for fixed initial data.
pub trait ExactSolution: Send + Sync {
    fn position(&self, t: f64) -> DVector<f64>;

    fn velocity(&self, t: f64) -> DVector<f64>;

    /// States on a sorted time grid starting at `0`.
    fn states(&self, times: &[f64]) -> Vec<ThermoState>;
}

/// A catalog system: Lagrangian data plus its Hamiltonian counterpart.
///
/// All example Lagrangians have kinetic energy `|v|²/2`, so the Legendre
/// transform is `p = v` and the Hamiltonian is the energy `E_L` with `v`
/// replaced by `p`.
pub trait ExampleSystem: LagrangianSystem {
    /// Potential part `U(q, S)` with `L = |v|²/2 - U`.
    fn potential(&self, q: &DVector<f64>, s: f64) -> f64;

    /// `(∂U/∂q, ∂U/∂S)`.
    fn potential_gradient(&self, q: &DVector<f64>, s: f64) -> (DVector<f64>, f64);

    /// Friction coefficient `γ` of the Rayleigh force `-γ v`.
    fn gamma(&self) -> f64;

    fn params(&self) -> BTreeMap<String, f64>;

    fn default_initial(&self) -> ThermoState;

    fn default_t_final(&self) -> f64;

    fn default_init_mode(&self) -> InitMode;

    fn exact_solution(&self, _initial: &ThermoState) -> Option<Box<dyn ExactSolution>> {
        None
    }

    /// Draws a state inside the physical domain, for property tests.
    fn sample_state(&self, rng: &mut dyn RngCore) -> ThermoState;

    fn hamiltonian(&self, q: &DVector<f64>, p: &DVector<f64>, s: f64) -> f64 {
        0.5 * p.norm_squared() + self.potential(q, s)
    }

    /// `(∂H/∂q, ∂H/∂p, ∂H/∂S)`.
    fn hamiltonian_gradient(&self, q: &DVector<f64>, p: &DVector<f64>, s: f64) -> DVector<f64> {
        let n = q.len();
        let (uq, us) = self.potential_gradient(q, s);
        let mut dh = DVector::zeros(2 * n + 1);
        dh.rows_mut(0, n).copy_from(&uq);
        dh.rows_mut(n, n).copy_from(p);
        dh[2 * n] = us;
        dh
    }

    /// Friction in Hamiltonian variables, `F^fr = -γ p`.
    fn hamiltonian_friction(&self, _q: &DVector<f64>, p: &DVector<f64>, _s: f64) -> DVector<f64> {
        -p * self.gamma()
    }

    fn hamiltonian_point(&self, q: &DVector<f64>, p: &DVector<f64>, s: f64) -> HamiltonianPoint {
        HamiltonianPoint {
            q: q.clone(),
            p: p.clone(),
            s,
            dh: self.hamiltonian_gradient(q, p, s),
            friction: self.hamiltonian_friction(q, p, s),
            external: DVector::zeros(q.len()),
        }
    }
}

fn rayleigh(gamma: f64, x: &ThermoState) -> DVector<f64> {
    -&x.v * gamma
}

fn rayleigh_jacobian(gamma: f64, n: usize) -> ForceJacobian {
    ForceJacobian {
        dq: DMatrix::zeros(n, n),
        dv: DMatrix::identity(n, n) * -gamma,
        ds: DVector::zeros(n),
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("gamma must be finite and nonnegative, got {gamma}")))
    }
}

fn domain_error(system: &str, reason: String) -> Error {
    Error::Domain {
        system: system.to_string(),
        reason,
    }
}

/// Implements the `LagrangianSystem` boilerplate shared by all examples in
/// terms of `potential`, `potential_gradient` and `potential_hessian`.
macro_rules! lagrangian_from_potential {
    ($ty:ty, $name:expr) => {
        impl LagrangianSystem for $ty {
            fn dim(&self) -> usize {
                Self::DIM
            }

            fn name(&self) -> &str {
                $name
            }

            fn lagrangian(&self, x: &ThermoState) -> f64 {
                0.5 * x.v.norm_squared() - self.potential(&x.q, x.s)
            }

            fn friction(&self, x: &ThermoState) -> DVector<f64> {
                rayleigh(self.gamma, x)
            }

            fn check_domain(&self, x: &ThermoState) -> Result<()> {
                self.domain(&x.q)?;
                if x.is_finite() {
                    Ok(())
                } else {
                    Err(domain_error($name, "non-finite state".to_string()))
                }
            }

            fn dl_dq(&self, x: &ThermoState) -> DVector<f64> {
                -self.potential_gradient(&x.q, x.s).0
            }

            fn dl_dv(&self, x: &ThermoState) -> DVector<f64> {
                x.v.clone()
            }

            fn dl_ds(&self, x: &ThermoState) -> f64 {
                -self.potential_gradient(&x.q, x.s).1
            }

            fn second_partials(&self, x: &ThermoState) -> SecondPartials {
                let (uqq, uqs, uss) = self.potential_hessian(&x.q, x.s);
                SecondPartials {
                    qq: -uqq,
                    qv: DMatrix::zeros(Self::DIM, Self::DIM),
                    vv: DMatrix::identity(Self::DIM, Self::DIM),
                    qs: -uqs,
                    vs: DVector::zeros(Self::DIM),
                    ss: -uss,
                }
            }

            fn friction_jacobian(&self, _x: &ThermoState) -> ForceJacobian {
                rayleigh_jacobian(self.gamma, Self::DIM)
            }

            fn acceleration(&self, x: &ThermoState) -> Result<DVector<f64>> {
                Ok(-self.potential_gradient(&x.q, x.s).0 - &x.v * self.gamma)
            }
        }
    };
}

/// Damped harmonic oscillator `L = v²/2 - q²/2 - γS`, friction `-γv dq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub gamma: f64,
}

impl Oscillator {
    const DIM: usize = 1;

    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma })
    }

    fn domain(&self, _q: &DVector<f64>) -> Result<()> {
        Ok(())
    }

    fn potential_hessian(&self, _q: &DVector<f64>, _s: f64) -> (DMatrix<f64>, DVector<f64>, f64) {
        (DMatrix::identity(1, 1), DVector::zeros(1), 0.0)
    }

    /// Coefficients `(a, b)` of the closed-form midpoint update
    /// `q_{k+1} = a q_k - b q_{k-1}`.
    pub fn recurrence_coefficients(&self, h: f64) -> (f64, f64) {
        let den = 4.0 + h * (h + 2.0 * self.gamma);
        let a = 2.0 * (4.0 - h * h) / den;
        let b = (4.0 + h * h - 2.0 * h * self.gamma) / den;
        (a, b)
    }

    /// Damped frequency `sqrt(1 - γ²/4)`; `None` unless underdamped.
    pub fn damped_frequency(&self) -> Option<f64> {
        let w2 = 1.0 - 0.25 * self.gamma * self.gamma;
        (w2 > 0.0).then(|| w2.sqrt())
    }
}

lagrangian_from_potential!(Oscillator, "oscillator");

impl ExampleSystem for Oscillator {
    fn potential(&self, q: &DVector<f64>, s: f64) -> f64 {
        0.5 * q[0] * q[0] + self.gamma * s
    }

    fn potential_gradient(&self, q: &DVector<f64>, _s: f64) -> (DVector<f64>, f64) {
        (q.clone(), self.gamma)
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("gamma".to_string(), self.gamma)])
    }

    fn default_initial(&self) -> ThermoState {
        ThermoState::scalar(0.0, 1.0, 0.0)
    }

    fn default_t_final(&self) -> f64 {
        1000.0
    }

    fn default_init_mode(&self) -> InitMode {
        InitMode::Exact
    }

    fn exact_solution(&self, initial: &ThermoState) -> Option<Box<dyn ExactSolution>> {
        let omega = self.damped_frequency()?;
        let half = 0.5 * self.gamma;
        let a = initial.q[0];
        let b = (initial.v[0] + half * a) / omega;
        Some(Box::new(OscillatorExact {
            half,
            omega,
            a,
            b,
            s0: initial.s,
        }))
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> ThermoState {
        ThermoState::scalar(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-5.0..5.0),
        )
    }
}

/// `q(t) = e^{-γt/2} (A cos ω̃t + B sin ω̃t)`, with entropy
/// `S(t) = S0 + ∫₀ᵗ q̇² dτ` evaluated by adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorExact {
    half: f64,
    omega: f64,
    a: f64,
    b: f64,
    s0: f64,
}

/// Absolute tolerance of the entropy quadrature on each grid interval.
pub const ENTROPY_QUADRATURE_TOL: f64 = 1e-12;

impl OscillatorExact {
    pub fn q(&self, t: f64) -> f64 {
        let (s, c) = (self.omega * t).sin_cos();
        (-self.half * t).exp() * (self.a * c + self.b * s)
    }

    pub fn qdot(&self, t: f64) -> f64 {
        let (s, c) = (self.omega * t).sin_cos();
        let w = self.omega;
        (-self.half * t).exp()
            * ((self.b * w - self.half * self.a) * c - (self.a * w + self.half * self.b) * s)
    }
}

impl ExactSolution for OscillatorExact {
    fn position(&self, t: f64) -> DVector<f64> {
        DVector::from_element(1, self.q(t))
    }

    fn velocity(&self, t: f64) -> DVector<f64> {
        DVector::from_element(1, self.qdot(t))
    }

    fn states(&self, times: &[f64]) -> Vec<ThermoState> {
        let mut s = self.s0;
        let mut prev = 0.0;
        times
            .iter()
            .map(|&t| {
                s += quadrature::adaptive_gk15(
                    |tau| self.qdot(tau).powi(2),
                    prev,
                    t,
                    ENTROPY_QUADRATURE_TOL,
                );
                prev = t;
                ThermoState::scalar(self.q(t), self.qdot(t), s)
            })
            .collect()
    }
}

/// Ideal gas behind a piston, `L = v²/2 - e^S x^{-1/c}`, friction `-γv dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGas {
    pub gamma: f64,
    pub c: f64,
}

impl IdealGas {
    const DIM: usize = 1;

    pub fn new(gamma: f64, c: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Config(format!("heat capacity must be positive, got {c}")));
        }
        Ok(Self { gamma, c })
    }

    fn domain(&self, q: &DVector<f64>) -> Result<()> {
        if q[0] > 0.0 {
            Ok(())
        } else {
            Err(domain_error("ideal-gas", format!("volume x = {} is not positive", q[0])))
        }
    }

    fn potential_hessian(&self, q: &DVector<f64>, s: f64) -> (DMatrix<f64>, DVector<f64>, f64) {
        let k = 1.0 / self.c;
        let x = q[0];
        let u = s.exp() * x.powf(-k);
        let ux = -k * u / x;
        let uxx = k * (k + 1.0) * u / (x * x);
        (
            DMatrix::from_element(1, 1, uxx),
            DVector::from_element(1, ux),
            u,
        )
    }
}

lagrangian_from_potential!(IdealGas, "ideal-gas");

impl ExampleSystem for IdealGas {
    fn potential(&self, q: &DVector<f64>, s: f64) -> f64 {
        s.exp() * q[0].powf(-1.0 / self.c)
    }

    fn potential_gradient(&self, q: &DVector<f64>, s: f64) -> (DVector<f64>, f64) {
        let u = self.potential(q, s);
        (DVector::from_element(1, -u / (self.c * q[0])), u)
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("c".to_string(), self.c), ("gamma".to_string(), self.gamma)])
    }

    fn default_initial(&self) -> ThermoState {
        ThermoState::scalar(1.0, 0.0, 10.0)
    }

    fn default_t_final(&self) -> f64 {
        10.0
    }

    fn default_init_mode(&self) -> InitMode {
        InitMode::Hold
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> ThermoState {
        ThermoState::scalar(
            rng.gen_range(0.2..5.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-2.0..3.0),
        )
    }
}

/// Van der Waals gas behind a piston,
/// `L = v²/2 - e^S (x - b̂)^{-2/3} + â/x`, friction `-γv dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerWaals {
    pub gamma: f64,
    pub a_hat: f64,
    pub b_hat: f64,
}

impl VanDerWaals {
    const DIM: usize = 1;
    const EXPONENT: f64 = 2.0 / 3.0;

    pub fn new(gamma: f64, a_hat: f64, b_hat: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !a_hat.is_finite() || !(b_hat >= 0.0) || !b_hat.is_finite() {
            return Err(Error::Config(format!(
                "invalid Van der Waals constants a = {a_hat}, b = {b_hat}"
            )));
        }
        Ok(Self {
            gamma,
            a_hat,
            b_hat,
        })
    }

    fn domain(&self, q: &DVector<f64>) -> Result<()> {
        if q[0] > self.b_hat && q[0] > 0.0 {
            Ok(())
        } else {
            Err(domain_error(
                "van-der-waals",
                format!("volume x = {} does not exceed b = {}", q[0], self.b_hat),
            ))
        }
    }

    fn potential_hessian(&self, q: &DVector<f64>, s: f64) -> (DMatrix<f64>, DVector<f64>, f64) {
        let k = Self::EXPONENT;
        let x = q[0];
        let d = x - self.b_hat;
        let g = s.exp() * d.powf(-k);
        let uxx = k * (k + 1.0) * g / (d * d) - 2.0 * self.a_hat / (x * x * x);
        (
            DMatrix::from_element(1, 1, uxx),
            DVector::from_element(1, -k * g / d),
            g,
        )
    }
}

lagrangian_from_potential!(VanDerWaals, "van-der-waals");

impl ExampleSystem for VanDerWaals {
    fn potential(&self, q: &DVector<f64>, s: f64) -> f64 {
        s.exp() * (q[0] - self.b_hat).powf(-Self::EXPONENT) - self.a_hat / q[0]
    }

    fn potential_gradient(&self, q: &DVector<f64>, s: f64) -> (DVector<f64>, f64) {
        let x = q[0];
        let d = x - self.b_hat;
        let g = s.exp() * d.powf(-Self::EXPONENT);
        let ux = -Self::EXPONENT * g / d + self.a_hat / (x * x);
        (DVector::from_element(1, ux), g)
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("a_hat".to_string(), self.a_hat),
            ("b_hat".to_string(), self.b_hat),
            ("gamma".to_string(), self.gamma),
        ])
    }

    fn default_initial(&self) -> ThermoState {
        ThermoState::scalar(1.0, 0.0, 10.0)
    }

    fn default_t_final(&self) -> f64 {
        10.0
    }

    fn default_init_mode(&self) -> InitMode {
        InitMode::Hold
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> ThermoState {
        ThermoState::scalar(
            rng.gen_range(self.b_hat + 0.2..5.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-2.0..3.0),
        )
    }
}

/// Cylinder with two pistons,
/// `L = (v_x² + v_y²)/2 - e^S (x + y)^{-1/c}`, friction `-γ v_x dx - γ v_y dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPistons {
    pub gamma: f64,
    pub c: f64,
}

impl TwoPistons {
    const DIM: usize = 2;

    pub fn new(gamma: f64, c: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Config(format!("heat capacity must be positive, got {c}")));
        }
        Ok(Self { gamma, c })
    }

    /// The same cylinder without friction.
    pub fn frictionless(c: f64) -> Result<Self> {
        Self::new(0.0, c)
    }

    fn domain(&self, q: &DVector<f64>) -> Result<()> {
        let vol = q[0] + q[1];
        if vol > 0.0 {
            Ok(())
        } else {
            Err(domain_error("two-pistons", format!("volume x + y = {vol} is not positive")))
        }
    }

    fn potential_hessian(&self, q: &DVector<f64>, s: f64) -> (DMatrix<f64>, DVector<f64>, f64) {
        let k = 1.0 / self.c;
        let vol = q[0] + q[1];
        let u = s.exp() * vol.powf(-k);
        let uvv = k * (k + 1.0) * u / (vol * vol);
        (
            DMatrix::from_element(2, 2, uvv),
            DVector::from_element(2, -k * u / vol),
            u,
        )
    }

    /// Cartan quantity `γ(x - y) + v_x - v_y`, conserved with friction.
    pub fn cartan_quantity(&self, x: &ThermoState) -> f64 {
        self.gamma * (x.q[0] - x.q[1]) + x.v[0] - x.v[1]
    }
}

lagrangian_from_potential!(TwoPistons, "two-pistons");

impl ExampleSystem for TwoPistons {
    fn potential(&self, q: &DVector<f64>, s: f64) -> f64 {
        s.exp() * (q[0] + q[1]).powf(-1.0 / self.c)
    }

    fn potential_gradient(&self, q: &DVector<f64>, s: f64) -> (DVector<f64>, f64) {
        let u = self.potential(q, s);
        let ux = -u / (self.c * (q[0] + q[1]));
        (DVector::from_element(2, ux), u)
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("c".to_string(), self.c), ("gamma".to_string(), self.gamma)])
    }

    fn default_initial(&self) -> ThermoState {
        ThermoState::new(
            DVector::from_column_slice(&[1.0, 2.0]),
            DVector::from_column_slice(&[0.5, -0.3]),
            0.0,
        )
    }

    fn default_t_final(&self) -> f64 {
        10.0
    }

    fn default_init_mode(&self) -> InitMode {
        InitMode::Reference
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> ThermoState {
        ThermoState::new(
            DVector::from_fn(2, |_, _| rng.gen_range(0.2..3.0)),
            DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0)),
            rng.gen_range(-2.0..2.0),
        )
    }
}

pub const DEFAULT_GAMMA: f64 = 0.1;
pub const DEFAULT_HEAT_CAPACITY: f64 = 1.5;
pub const DEFAULT_A_HAT: f64 = 1e3;
pub const DEFAULT_B_HAT: f64 = 0.1;

/// Names accepted by [`by_name`].
pub const SYSTEM_NAMES: [&str; 4] = ["oscillator", "ideal-gas", "van-der-waals", "two-pistons"];

/// Builds a catalog system by name. `params` may override `gamma`, `c`,
/// `a_hat` and `b_hat` where the system has them.
pub fn by_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Box<dyn ExampleSystem>> {
    let allowed: &[&str] = match name {
        "oscillator" => &["gamma"],
        "ideal-gas" | "two-pistons" => &["gamma", "c"],
        "van-der-waals" => &["gamma", "a_hat", "b_hat"],
        _ => return Err(Error::UnknownSystem(name.to_string())),
    };
    if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Config(format!("parameter `{key}` does not apply to {name}")));
    }
    let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
    let gamma = get("gamma", DEFAULT_GAMMA);
    Ok(match name {
        "oscillator" => Box::new(Oscillator::new(gamma)?),
        "ideal-gas" => Box::new(IdealGas::new(gamma, get("c", DEFAULT_HEAT_CAPACITY))?),
        "van-der-waals" => Box::new(VanDerWaals::new(
            gamma,
            get("a_hat", DEFAULT_A_HAT),
            get("b_hat", DEFAULT_B_HAT),
        )?),
        _ => Box::new(TwoPistons::new(gamma, get("c", DEFAULT_HEAT_CAPACITY))?),
    })
}
