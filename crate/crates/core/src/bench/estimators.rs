//! Hamiltonian estimates along variational paths and error metrics.

use nalgebra::DVector;

use crate::continuous::{ThermoState, Trajectory};
use crate::discrete::{self, DiscreteLagrangian, DiscretePath};
use crate::systems::ExampleSystem;

/// Hamiltonian estimates indexed by time step; entries are `NaN` where an
/// estimator is undefined.
///
/// * `plus[k] = H(q_k, p^+(q_{k-1}, q_k, S_{k-1}), S_k)` for `k ≥ 1`;
/// * `minus[k] = H(q_k, p^-(q_k, q_{k+1}, S_k), S_k)` for `k < N`;
/// * `velocity[k] = H((q_{k-1}+q_k)/2, (q_k - q_{k-1})/h, S_k)` for `k ≥ 1`;
/// * `velocity_endpoint[k]` is the same with `q_k` in place of the midpoint.
///
/// With this indexing `plus[k]` and `minus[k]` are evaluated at the same
/// point of `T*Q × R` whenever momentum matching holds.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSeries {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub velocity: Vec<f64>,
    pub velocity_endpoint: Vec<f64>,
}

pub fn hamiltonian_estimates<S, D>(sys: &S, d: &D, path: &DiscretePath) -> HamiltonianSeries
where
    S: ExampleSystem + ?Sized,
    D: DiscreteLagrangian + ?Sized,
{
    let len = path.len();
    let mut out = HamiltonianSeries {
        plus: vec![f64::NAN; len],
        minus: vec![f64::NAN; len],
        velocity: vec![f64::NAN; len],
        velocity_endpoint: vec![f64::NAN; len],
    };
    for k in 0..path.steps() {
        let t = path.triple(k);
        let (p_minus, p_plus) = discrete::discrete_momenta(d, &t);
        let (q0, q1) = (&path.qs[k], &path.qs[k + 1]);
        let s1 = path.ss[k + 1];
        out.minus[k] = sys.hamiltonian(q0, &p_minus, path.ss[k]);
        out.plus[k + 1] = sys.hamiltonian(q1, &p_plus, s1);
        let v = (q1 - q0) / path.h;
        let mid = (q0 + q1) * 0.5;
        out.velocity[k + 1] = sys.hamiltonian(&mid, &v, s1);
        out.velocity_endpoint[k + 1] = sys.hamiltonian(q1, &v, s1);
    }
    out
}

/// Velocities along a variational path recovered from the discrete momenta
/// through `p = v`: `p^-` at the first point, `p^+` afterwards.
pub fn path_velocities<D: DiscreteLagrangian + ?Sized>(d: &D, path: &DiscretePath) -> Vec<DVector<f64>> {
    let mut vs = Vec::with_capacity(path.len());
    for k in 0..path.steps() {
        let (p_minus, p_plus) = discrete::discrete_momenta(d, &path.triple(k));
        if k == 0 {
            vs.push(p_minus);
        }
        vs.push(p_plus);
    }
    if path.steps() == 0 {
        vs.push(DVector::from_element(path.qs[0].len(), f64::NAN));
    }
    vs
}

/// Energy `H(q, v, S)` along a continuous-state trajectory.
pub fn trajectory_energy<S: ExampleSystem + ?Sized>(sys: &S, traj: &Trajectory) -> Vec<f64> {
    traj.states
        .iter()
        .map(|x| sys.hamiltonian(&x.q, &x.v, x.s))
        .collect()
}

/// `max_k |series[k] - h0|` over the defined entries.
pub fn max_deviation(series: &[f64], h0: f64) -> f64 {
    series
        .iter()
        .filter(|x| !x.is_nan())
        .map(|x| (x - h0).abs())
        .fold(0.0, f64::max)
}

/// `max_k |a[k] - b[k]|` over entries defined in both series.
pub fn max_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_nan() && !y.is_nan())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Max absolute position error against `truth` over the first `limit`
/// points (all points when `None`).
pub fn max_position_error(qs: &[DVector<f64>], truth: &[ThermoState], limit: Option<usize>) -> f64 {
    let n = limit.unwrap_or(usize::MAX).min(qs.len()).min(truth.len());
    (0..n)
        .map(|k| (&qs[k] - &truth[k].q).amax())
        .fold(0.0, f64::max)
}

pub fn max_entropy_error(ss: &[f64], truth: &[ThermoState], limit: Option<usize>) -> f64 {
    let n = limit.unwrap_or(usize::MAX).min(ss.len()).min(truth.len());
    (0..n)
        .map(|k| (ss[k] - truth[k].s).abs())
        .fold(0.0, f64::max)
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn loglog_slope(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let hs = [0.1, 0.01, 0.001];
        let errs: Vec<f64> = hs.iter().map(|h: &f64| 3.0 * h.powi(2)).collect();
        assert!((loglog_slope(&hs, &errs) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deviation_skips_undefined_entries() {
        assert_eq!(max_deviation(&[f64::NAN, 1.5, 0.25], 1.0), 0.75);
        assert_eq!(max_difference(&[f64::NAN, 1.0], &[2.0, 1.5]), 0.5);
    }
}
