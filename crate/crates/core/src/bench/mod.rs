//! Benchmark harness: baseline integrators, estimators and experiments.

pub mod checks;
pub mod estimators;
pub mod experiment;
pub mod output;
pub mod quadrature;
pub mod reference;
pub mod rk2;
