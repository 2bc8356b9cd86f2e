#![allow(dead_code)]

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thermovi::continuous::{LagrangianSystem, ThermoState};
use thermovi::discrete::{DiscreteLagrangian, DiscreteTriple};
use thermovi::systems::{self, ExampleSystem};

pub fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn catalog() -> Vec<Box<dyn ExampleSystem>> {
    systems::SYSTEM_NAMES
        .iter()
        .map(|n| systems::by_name(n, &Default::default()).unwrap())
        .collect()
}

/// Exposes only `L` and the friction of a system, so every derivative falls
/// back to finite differences.
pub struct FdOnly<'a>(pub &'a dyn ExampleSystem);

impl LagrangianSystem for FdOnly<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn name(&self) -> &str {
        "fd-only"
    }

    fn lagrangian(&self, x: &ThermoState) -> f64 {
        self.0.lagrangian(x)
    }

    fn friction(&self, x: &ThermoState) -> DVector<f64> {
        self.0.friction(x)
    }
}

/// Forwards a discrete system but drops its analytic second partials.
pub struct FdDiscrete<'a, D: ?Sized>(pub &'a D);

impl<D: DiscreteLagrangian + ?Sized> DiscreteLagrangian for FdDiscrete<'_, D> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn step(&self) -> f64 {
        self.0.step()
    }
    fn ld(&self, t: &DiscreteTriple) -> f64 {
        self.0.ld(t)
    }
    fn d1(&self, t: &DiscreteTriple) -> DVector<f64> {
        self.0.d1(t)
    }
    fn d2(&self, t: &DiscreteTriple) -> DVector<f64> {
        self.0.d2(t)
    }
    fn ds(&self, t: &DiscreteTriple) -> f64 {
        self.0.ds(t)
    }
    fn friction_minus(&self, t: &DiscreteTriple) -> DVector<f64> {
        self.0.friction_minus(t)
    }
    fn friction_plus(&self, t: &DiscreteTriple) -> DVector<f64> {
        self.0.friction_plus(t)
    }
}

/// `|a - b| / (1 + max(|a|, |b|))`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
