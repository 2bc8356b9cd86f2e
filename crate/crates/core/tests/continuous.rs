mod common;

use common::{catalog, rel, rng, v};
use thermovi::bench::reference::reference_integrate;
use thermovi::continuous::{self, ConstantField, ThermoState};
use thermovi::systems::{ExampleSystem, IdealGas, Oscillator, TwoPistons};
use thermovi::Error;

const TOL: f64 = 1e-10;

#[test]
fn energies_and_temperatures() {
    let osc = Oscillator::new(0.1).unwrap();
    let x = ThermoState::scalar(0.0, 1.0, 0.0);
    assert_eq!(continuous::energy(&osc, &x), 0.5);
    assert!((continuous::temperature(&osc, &x) - 0.1).abs() <= 1e-15);
    let gas = IdealGas::new(0.1, 1.5).unwrap();
    let x = ThermoState::scalar(1.0, 0.0, 10.0);
    let e10 = 10f64.exp();
    assert!(rel(continuous::energy(&gas, &x), e10) <= 1e-15);
    assert!(rel(continuous::temperature(&gas, &x), e10) <= 1e-15);
    // At rest the energy is the potential.
    let mut r = rng(40);
    for sys in catalog() {
        for _ in 0..20 {
            let mut x = sys.sample_state(&mut r);
            x.v.fill(0.0);
            assert!(rel(continuous::energy(sys.as_ref(), &x), sys.potential(&x.q, x.s)) <= 1e-14);
            let (_, u_s) = sys.potential_gradient(&x.q, x.s);
            assert!(rel(continuous::temperature(sys.as_ref(), &x), u_s) <= 1e-14);
        }
    }
}

#[test]
fn right_hand_sides() {
    let osc = Oscillator::new(0.1).unwrap();
    let (qd, vd, sd) = continuous::continuous_rhs(&osc, &ThermoState::scalar(1.0, 0.0, 0.0)).unwrap();
    assert_eq!((qd[0], vd[0], sd), (0.0, -1.0, 0.0));
    let gas = IdealGas::new(0.1, 1.5).unwrap();
    let (_, vd, sd) = continuous::continuous_rhs(&gas, &ThermoState::scalar(1.0, 0.0, 10.0)).unwrap();
    assert!(rel(vd[0], 10f64.exp() / 1.5) <= 1e-14);
    assert_eq!(sd, 0.0);
    let mut r = rng(41);
    for sys in catalog() {
        for _ in 0..20 {
            let mut x = sys.sample_state(&mut r);
            x.v.fill(0.0);
            assert_eq!(continuous::entropy_rate(sys.as_ref(), &x).unwrap(), 0.0);
        }
    }
}

#[test]
fn legendre_round_trip() {
    let tp = TwoPistons::new(0.1, 1.5).unwrap();
    let x = ThermoState::new(v(&[1.0, 2.0]), v(&[1.0, 2.0]), 0.0);
    assert_eq!(continuous::legendre(&tp, &x).1, v(&[1.0, 2.0]));
    let mut r = rng(42);
    for sys in catalog() {
        for _ in 0..20 {
            let x = sys.sample_state(&mut r);
            let (q, p, s) = continuous::legendre(sys.as_ref(), &x);
            assert_eq!(p, x.v);
            let back = continuous::inverse_legendre(sys.as_ref(), &q, &p, s).unwrap();
            assert!((back.v - &x.v).amax() <= 1e-14);
        }
    }
}

#[test]
fn zero_temperature_is_an_error() {
    let osc = Oscillator::new(0.0).unwrap();
    let err = continuous::continuous_rhs(&osc, &ThermoState::scalar(0.0, 1.0, 0.0));
    assert!(matches!(err, Err(Error::ZeroTemperature(_))));
}

#[test]
fn noether_lifts() {
    let free = TwoPistons::frictionless(1.5).unwrap();
    let damped = Oscillator::new(0.1).unwrap();
    let xi = ConstantField(v(&[1.0, -1.0]));
    let mut r = rng(43);
    let samples: Vec<_> = (0..50).map(|_| free.sample_state(&mut r)).collect();
    assert!(continuous::noether_lift_check(&free, &xi, &samples));
    let x = &samples[0];
    assert_eq!(continuous::vertical_lift_quantity(&free, &xi, x), x.v[0] - x.v[1]);
    let samples: Vec<_> = (0..50).map(|_| damped.sample_state(&mut r)).collect();
    assert!(!continuous::noether_lift_check(&damped, &ConstantField(v(&[1.0])), &samples));
}

#[test]
fn conserved_quantities_along_reference() {
    let osc = Oscillator::new(0.1).unwrap();
    let traj = reference_integrate(&osc, &ThermoState::scalar(0.0, 1.0, 0.0), 100.0, 0.1, TOL, TOL).unwrap();
    let drift = continuous::conserved_along(&traj, |x| continuous::energy(&osc, x));
    assert!(drift <= 1e-7, "energy drift {drift}");
    assert_eq!(continuous::conserved_along(&traj, |_| 3.0), 0.0);

    let tp = TwoPistons::new(0.1, 1.5).unwrap();
    let traj = reference_integrate(&tp, &tp.default_initial(), 10.0, 0.01, TOL, TOL).unwrap();
    let g = continuous::conserved_along(&traj, |x| tp.cartan_quantity(x));
    assert!(g <= 1e-7, "Cartan drift {g}");
    assert!(traj.states.windows(2).all(|w| w[1].s >= w[0].s));

    let free = TwoPistons::frictionless(1.5).unwrap();
    let traj = reference_integrate(&free, &free.default_initial(), 10.0, 0.01, TOL, TOL).unwrap();
    assert!(continuous::conserved_along(&traj, |x| x.v[0] - x.v[1]) <= 1e-7);
    assert!(continuous::conserved_along(&traj, |x| continuous::energy(&free, x)) <= 1e-7);

    let gas = IdealGas::new(0.0, 1.5).unwrap();
    let x0 = ThermoState::scalar(1.0, 0.0, 10.0);
    let traj = reference_integrate(&gas, &x0, 10.0, 0.01, TOL, TOL).unwrap();
    let h0 = continuous::energy(&gas, &x0);
    let drift = continuous::conserved_along(&traj, |x| gas.hamiltonian(&x.q, &x.v, x.s));
    assert!(drift <= 1e-7 * h0, "relative drift {}", drift / h0);
}

#[test]
fn symmetric_pistons_stay_symmetric() {
    let tp = TwoPistons::new(0.1, 1.5).unwrap();
    let x0 = ThermoState::new(v(&[1.5, 1.5]), v(&[0.4, 0.4]), 0.2);
    let traj = reference_integrate(&tp, &x0, 5.0, 0.01, TOL, TOL).unwrap();
    for x in &traj.states {
        assert_eq!(x.q[0], x.q[1]);
        assert_eq!(x.v[0], x.v[1]);
    }
}
