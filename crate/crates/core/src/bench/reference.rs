//! Dormand–Prince 5(4) adaptive integrator with dense output, used as the
//! high-accuracy reference for systems without a closed-form solution.

use nalgebra::DVector;

use crate::continuous::{self, LagrangianSystem, ThermoState, Trajectory};
use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order solution minus the embedded fourth-order one.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Coefficients of the fourth-order continuous extension.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const MAX_STEPS: usize = 50_000_000;

fn pack(x: &ThermoState) -> DVector<f64> {
    let n = x.dim();
    let mut y = DVector::zeros(2 * n + 1);
    y.rows_mut(0, n).copy_from(&x.q);
    y.rows_mut(n, n).copy_from(&x.v);
    y[2 * n] = x.s;
    y
}

fn unpack(y: &DVector<f64>) -> ThermoState {
    let n = y.len() / 2;
    ThermoState::new(y.rows(0, n).into_owned(), y.rows(n, n).into_owned(), y[2 * n])
}

fn rhs<L: LagrangianSystem + ?Sized>(sys: &L, y: &DVector<f64>) -> Result<DVector<f64>> {
    let (qd, vd, sd) = continuous::continuous_rhs(sys, &unpack(y))?;
    let mut ydot = DVector::zeros(y.len());
    let n = qd.len();
    ydot.rows_mut(0, n).copy_from(&qd);
    ydot.rows_mut(n, n).copy_from(&vd);
    ydot[2 * n] = sd;
    Ok(ydot)
}

/// One accepted step's dense-output polynomial.
struct Dense {
    t0: f64,
    h: f64,
    r: [DVector<f64>; 5],
}

impl Dense {
    fn eval(&self, t: f64) -> DVector<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let inner = &self.r[3] + &self.r[4] * th1;
        let inner = &self.r[2] + inner * th;
        let inner = &self.r[1] + inner * th1;
        &self.r[0] + inner * th
    }
}

/// Integrates the thermodynamic Euler–Lagrange equations on `[0, t_final]`
/// and returns the solution sampled at `t_k = k · sample_h`.
///
/// Each step keeps the weighted RMS local error below one, with weights
/// `atol + rtol · max(|y0|, |y1|)`.
pub fn reference_integrate<L: LagrangianSystem + ?Sized>(
    sys: &L,
    initial: &ThermoState,
    t_final: f64,
    sample_h: f64,
    rtol: f64,
    atol: f64,
) -> Result<Trajectory> {
    if !(rtol > 0.0) || !(atol > 0.0) {
        return Err(Error::Config("tolerances must be positive".to_string()));
    }
    if !(sample_h > 0.0) || !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::Config(format!(
            "invalid sampling: h = {sample_h}, t_final = {t_final}"
        )));
    }
    let samples = (t_final / sample_h).round() as usize;
    let grid: Vec<f64> = (0..=samples).map(|k| k as f64 * sample_h).collect();
    let end = grid[samples];

    let mut y = pack(initial);
    sys.check_domain(initial)?;
    let mut k1 = rhs(sys, &y)?;
    let mut t = 0.0;
    let mut states = Vec::with_capacity(samples + 1);
    states.push(initial.clone());
    let mut next = 1;
    let mut h = (0.01 * sample_h).max(1e-6).min(end.max(1e-6));
    let mut steps = 0;

    while next <= samples {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepSizeUnderflow(t));
        }
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::StepSizeUnderflow(t));
        }
        let h_step = h.min(end - t);
        let trial = attempt(sys, &y, &k1, h_step);
        let (y1, k7, err, stages) = match trial {
            Ok(v) => v,
            Err(Error::Domain { .. }) | Err(Error::ZeroTemperature(_)) | Err(Error::Singular(_))
                if h_step > 1e-10 =>
            {
                h = 0.25 * h_step;
                continue;
            }
            Err(e) => return Err(e),
        };
        let scale = y
            .iter()
            .zip(y1.iter())
            .map(|(a, b)| atol + rtol * a.abs().max(b.abs()));
        let norm = (err
            .iter()
            .zip(scale)
            .map(|(e, s)| (e / s).powi(2))
            .sum::<f64>()
            / y.len() as f64)
            .sqrt();
        if !norm.is_finite() {
            h = 0.25 * h_step;
            continue;
        }
        let factor = if norm == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        if norm > 1.0 {
            h = h_step * factor.min(1.0);
            continue;
        }
        let t1 = if end - t <= h_step { end } else { t + h_step };
        let ydiff = &y1 - &y;
        let bspl = &k1 * h_step - &ydiff;
        let mut r5 = DVector::zeros(y.len());
        for (d, k) in D.iter().zip(stages.iter()) {
            if *d != 0.0 {
                r5 += k * (*d * h_step);
            }
        }
        let dense = Dense {
            t0: t,
            h: h_step,
            r: [
                y.clone(),
                ydiff.clone(),
                bspl.clone(),
                &ydiff - &k7 * h_step - &bspl,
                r5,
            ],
        };
        while next <= samples && grid[next] <= t1 {
            let yi = if next == samples && t1 == end {
                y1.clone()
            } else {
                dense.eval(grid[next])
            };
            states.push(unpack(&yi));
            next += 1;
        }
        t = t1;
        y = y1;
        k1 = k7;
        h = h_step * factor;
    }
    Ok(Trajectory {
        h: sample_h,
        times: grid,
        states,
    })
}

type Attempt = (DVector<f64>, DVector<f64>, DVector<f64>, Vec<DVector<f64>>);

/// One Dormand–Prince step: `(y1, f(y1), error estimate, stages)`.
fn attempt<L: LagrangianSystem + ?Sized>(
    sys: &L,
    y: &DVector<f64>,
    k1: &DVector<f64>,
    h: f64,
) -> Result<Attempt> {
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
    k.push(k1.clone());
    for (i, row) in A.iter().enumerate().skip(1) {
        let mut yi = y.clone();
        for (a, kj) in row.iter().zip(k.iter()) {
            if *a != 0.0 {
                yi += kj * (h * a);
            }
        }
        k.push(rhs(sys, &yi)?);
        if i == 6 {
            let mut err = DVector::zeros(y.len());
            for (e, kj) in E.iter().zip(k.iter()) {
                err += kj * (h * e);
            }
            return Ok((yi, k[6].clone(), err, k));
        }
    }
    unreachable!("the seventh stage returns")
}
