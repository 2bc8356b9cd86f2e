//! Variational integrators for adiabatically closed simple thermodynamic
//! systems.
//!
//! The crate covers the partially cosymplectic geometry of the Hamiltonian
//! side ([`geometry`]), the continuous Lagrangian equations
//! ([`continuous`]), their midpoint discretization and discrete flow
//! ([`discrete`], [`solve`]), the example systems ([`systems`]) and the
//! benchmark harness ([`bench`]).

// Negated comparisons such as `!(h > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod solve;
pub mod systems;

pub use continuous::{LagrangianSystem, ThermoState, Trajectory};
pub use discrete::{DiscreteLagrangian, DiscretePath, DiscreteTriple, MidpointDiscretization};
pub use error::{Error, Result};
pub use solve::{InitMode, NewtonConfig, StepReport};
pub use systems::{ExampleSystem, IdealGas, Oscillator, TwoPistons, VanDerWaals};
