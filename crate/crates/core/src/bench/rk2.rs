//! Explicit midpoint rule (second-order Runge–Kutta) on `(q, v, S)`.

use crate::continuous::{self, LagrangianSystem, ThermoState, Trajectory};
use crate::error::{Error, Result};

fn shifted(x: &ThermoState, h: f64, rate: &(nalgebra::DVector<f64>, nalgebra::DVector<f64>, f64)) -> ThermoState {
    ThermoState {
        q: &x.q + &rate.0 * h,
        v: &x.v + &rate.1 * h,
        s: x.s + rate.2 * h,
    }
}

/// `x1 = x + h f(x + h/2 f(x))`.
pub fn rk2_midpoint<L: LagrangianSystem + ?Sized>(
    sys: &L,
    x: &ThermoState,
    h: f64,
) -> Result<ThermoState> {
    let k1 = continuous::continuous_rhs(sys, x)?;
    let mid = shifted(x, 0.5 * h, &k1);
    let k2 = continuous::continuous_rhs(sys, &mid)?;
    let x1 = shifted(x, h, &k2);
    sys.check_domain(&x1)?;
    Ok(x1)
}

/// `steps` midpoint steps from `initial`; failures carry the index of the
/// state being computed.
pub fn rk2_integrate<L: LagrangianSystem + ?Sized>(
    sys: &L,
    initial: &ThermoState,
    h: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !(h > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {h}")));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    for k in 1..=steps {
        let next = rk2_midpoint(sys, &states[k - 1], h).map_err(|e| e.at_step(k))?;
        states.push(next);
    }
    Ok(Trajectory {
        h,
        times: (0..=steps).map(|k| k as f64 * h).collect(),
        states,
    })
}
