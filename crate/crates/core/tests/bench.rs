mod common;

use std::fs;

use common::v;
use nalgebra::DVector;
use thermovi::bench::estimators;
use thermovi::bench::experiment::{self, ExperimentConfig, InitialData, Method};
use thermovi::bench::output::{self, SUMMARY_HEADER};
use thermovi::bench::reference::reference_integrate;
use thermovi::bench::rk2::{rk2_integrate, rk2_midpoint};
use thermovi::continuous::{LagrangianSystem, ThermoState};
use thermovi::systems::{ExampleSystem, Oscillator, TwoPistons};
use thermovi::Error;

/// `L = v²/2 - k q²/2 - S` without friction: `q̈ = -k q`, `Ṡ = 0`.
struct Spring(f64);

impl LagrangianSystem for Spring {
    fn dim(&self) -> usize {
        1
    }
    fn name(&self) -> &str {
        "spring"
    }
    fn lagrangian(&self, x: &ThermoState) -> f64 {
        0.5 * x.v[0] * x.v[0] - 0.5 * self.0 * x.q[0] * x.q[0] - x.s
    }
    fn friction(&self, _x: &ThermoState) -> DVector<f64> {
        v(&[0.0])
    }
}

#[test]
fn rk2_leaves_equilibrium_unchanged() {
    let x = ThermoState::scalar(0.0, 0.0, 1.5);
    let y = rk2_midpoint(&Spring(0.0), &x, 0.1).unwrap();
    assert_eq!(y, x);
    let y = rk2_midpoint(&Spring(4.0), &x, 0.1).unwrap();
    assert_eq!(y, x);
}

#[test]
fn rk2_local_error_is_third_order() {
    let sys = Spring(1.0);
    let x = ThermoState::scalar(0.7, -0.2, 0.0);
    let err = |h: f64| {
        let y = rk2_midpoint(&sys, &x, h).unwrap();
        let (c, s) = (h.cos(), h.sin());
        let q = 0.7 * c - 0.2 * s;
        let p = -0.7 * s - 0.2 * c;
        (y.q[0] - q).abs().max((y.v[0] - p).abs())
    };
    let ratio = err(0.02) / err(0.01);
    assert!((ratio - 8.0).abs() < 0.2, "ratio {ratio}");
    assert!(err(0.01) <= 1e-6);
    let traj = rk2_integrate(&sys, &x, 0.01, 5).unwrap();
    assert_eq!(traj.len(), 6);
    assert!(rk2_integrate(&sys, &x, 0.0, 5).is_err());
}

#[test]
fn reference_tracks_exact_oscillator() {
    let osc = Oscillator::new(0.1).unwrap();
    let x0 = ThermoState::scalar(0.0, 1.0, 0.0);
    let exact = osc.exact_solution(&x0).unwrap();
    let traj = reference_integrate(&osc, &x0, 1000.0, 0.1, 1e-10, 1e-10).unwrap();
    assert_eq!(traj.len(), 10_001);
    let worst = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, x)| (x.q[0] - exact.position(t)[0]).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-7, "{worst}");
}

#[test]
fn reference_conserves_frictionless_energy() {
    let tp = TwoPistons::frictionless(1.5).unwrap();
    let x0 = tp.default_initial();
    let traj = reference_integrate(&tp, &x0, 20.0, 0.05, 1e-10, 1e-10).unwrap();
    let e = estimators::trajectory_energy(&tp, &traj);
    assert!(estimators::max_deviation(&e, e[0]) <= 1e-7);
}

#[test]
fn reference_edge_cases() {
    let osc = Oscillator::new(0.1).unwrap();
    let x0 = ThermoState::scalar(0.3, 1.0, 0.0);
    let traj = reference_integrate(&osc, &x0, 0.0, 0.1, 1e-10, 1e-10).unwrap();
    assert_eq!(traj.states, vec![x0.clone()]);
    assert!(reference_integrate(&osc, &x0, 1.0, 0.1, 0.0, 1e-10).is_err());
    assert!(reference_integrate(&osc, &x0, -1.0, 0.1, 1e-10, 1e-10).is_err());
}

fn short_oscillator(dir: Option<&std::path::Path>) -> ExperimentConfig {
    ExperimentConfig {
        t_final: Some(20.0),
        entropy_window: Some(500),
        out_dir: dir.map(|d| d.to_path_buf()),
        ..ExperimentConfig::new("oscillator", 0.01)
    }
}

#[test]
fn csv_output_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    experiment::run_experiment(&short_oscillator(Some(a.path()))).unwrap();
    experiment::run_experiment(&short_oscillator(Some(b.path()))).unwrap();
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3);
    for name in &names {
        let (x, y) = (fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
        assert_eq!(x, y, "{name:?}");
    }
    let traj = fs::read_to_string(a.path().join("oscillator_variational_h0.01.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next().unwrap(), "t,q_1,v_1,S,H_plus,H_minus,H_vel");
    assert_eq!(traj.lines().count(), 2002);
    let row: Vec<&str> = traj.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    let mantissa = row[1].split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    assert!(row[1].parse::<f64>().is_ok());
    let summary = fs::read_to_string(a.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().next().unwrap(), SUMMARY_HEADER);
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.contains("oscillator,variational,") && summary.contains("oscillator,rk2,"));
}

#[test]
fn two_piston_header() {
    assert_eq!(output::trajectory_header(2), "t,q_1,q_2,v_1,v_2,S,H_plus,H_minus,H_vel");
    assert_eq!(output::fmt_f64(0.1), "1.0000000000000001e-1");
    assert_eq!(output::fmt_f64(f64::NAN), "");
}

#[test]
fn hamiltonian_estimators_on_oscillator() {
    let out = experiment::run_experiment(&ExperimentConfig {
        t_final: Some(200.0),
        methods: vec![Method::Variational],
        ..ExperimentConfig::new("oscillator", 0.01)
    })
    .unwrap();
    let r = out.report(Method::Variational).unwrap();
    assert!(r.max_h_plus_minus_diff.unwrap() <= 1e-12);
    assert!(r.max_h_vel_dev >= 10.0 * r.max_h_plus_dev.unwrap());
    assert_eq!(r.max_h_dev, r.max_h_plus_dev.unwrap());
    assert!(r.max_residual.unwrap() <= 1e-12);
    for x in [r.max_pos_err, r.max_s_err, r.max_h_dev, r.max_h_vel_dev, r.runtime_secs] {
        assert!(x >= 0.0);
    }
}

#[test]
fn conservative_estimators_stay_close() {
    let cfg = ExperimentConfig {
        t_final: Some(10.0),
        methods: vec![Method::Variational],
        ..ExperimentConfig::new("two-pistons", 0.01)
    };
    let mut cfg = cfg;
    cfg.params.insert("gamma".into(), 0.0);
    // Frictionless: the temperature is e^S (x+y)^{-1/c} / c > 0, so the
    // entropy update is defined and stays constant.
    let out = experiment::run_experiment(&cfg).unwrap();
    let run = out.run(Method::Variational).unwrap();
    assert!(run.ss.iter().all(|&s| s == run.ss[0]));
    let h0 = run.hamiltonian.minus[0];
    for series in [&run.hamiltonian.plus, &run.hamiltonian.minus, &run.hamiltonian.velocity] {
        assert!(estimators::max_deviation(series, h0) <= 1e-2 * (1.0 + h0.abs()));
    }
}

#[test]
fn gas_entropy_is_nondecreasing_for_every_method() {
    for system in ["ideal-gas", "van-der-waals"] {
        let out = experiment::run_experiment(&ExperimentConfig {
            t_final: Some(2.0),
            methods: vec![Method::Variational, Method::Rk2, Method::Reference],
            ..ExperimentConfig::new(system, 0.01)
        })
        .unwrap();
        assert!(out.failures.is_empty());
        for run in &out.runs {
            assert!(run.ss.windows(2).all(|w| w[1] >= w[0]), "{system} {}", run.method);
        }
    }
}

#[test]
fn config_errors() {
    let empty = ExperimentConfig { methods: vec![], ..ExperimentConfig::new("oscillator", 0.01) };
    assert!(matches!(experiment::run_experiment(&empty), Err(Error::Config(_))));
    let bad_h = ExperimentConfig::new("oscillator", -0.01);
    assert!(bad_h.resolve().is_err());
    let short = ExperimentConfig { t_final: Some(0.001), ..ExperimentConfig::new("oscillator", 0.01) };
    assert!(short.resolve().is_err());
    let wrong_dim = ExperimentConfig {
        initial: Some(InitialData { q: vec![1.0], v: None, q1: None, s: 0.0 }),
        ..ExperimentConfig::new("two-pistons", 0.01)
    };
    assert!(wrong_dim.resolve().is_err());
    assert!(matches!(
        ExperimentConfig::new("pendulum", 0.01).resolve(),
        Err(Error::UnknownSystem(_))
    ));
    let base = ExperimentConfig::new("oscillator", 0.01);
    assert!(experiment::convergence_study(&base, Method::Variational, &[0.01]).is_err());
}

#[test]
fn zero_horizon_keeps_initial_state() {
    let out = experiment::run_experiment(&ExperimentConfig {
        t_final: Some(0.0),
        ..ExperimentConfig::new("oscillator", 0.01)
    })
    .unwrap();
    for run in &out.runs {
        assert_eq!(run.qs, vec![v(&[0.0])]);
        assert_eq!(run.ss, vec![0.0]);
    }
}

#[test]
fn toml_configuration() {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
        system = "van-der-waals"
        h = 0.005
        t_final = 1.0
        init_mode = "taylor"
        methods = ["variational", "reference"]
        entropy_window = 10

        [params]
        gamma = 0.2
        a_hat = 500.0

        [initial]
        q = [1.0]
        v = [0.5]
        s = 9.0
        "#,
    )
    .unwrap();
    assert_eq!(cfg.params["a_hat"], 500.0);
    assert_eq!(cfg.methods, vec![Method::Variational, Method::Reference]);
    let exp = cfg.resolve().unwrap();
    assert_eq!(exp.steps, 200);
    assert_eq!(exp.initial, ThermoState::scalar(1.0, 0.5, 9.0));
    assert_eq!(exp.system.gamma(), 0.2);
    assert!(ExperimentConfig::from_toml_str("system = \"oscillator\"\nh = 0.1\nbogus = 1").is_err());
    assert!(ExperimentConfig::from_toml_str("system = \"oscillator\"\nh = 0.1\nmethods = [\"euler\"]").is_err());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "system = \"oscillator\"\nh = 0.1\nt_final = 1.0\n").unwrap();
    let cfg = ExperimentConfig::from_file(&path).unwrap();
    assert_eq!(cfg.methods, vec![Method::Variational, Method::Rk2]);
}

#[test]
fn domain_failures_are_recorded_with_step() {
    let out = experiment::run_experiment(&ExperimentConfig {
        t_final: Some(5.0),
        initial: Some(InitialData { q: vec![0.3], v: Some(vec![-5.0]), q1: None, s: -5.0 }),
        init_mode: Some("taylor".into()),
        methods: vec![Method::Variational, Method::Rk2],
        ..ExperimentConfig::new("van-der-waals", 0.01)
    })
    .unwrap();
    assert_eq!(out.failures.len(), 2);
    for f in &out.failures {
        let step = f.step.expect("step index");
        assert!(step >= 1, "{f:?}");
        assert_eq!(f.error.step(), Some(step));
    }
}

#[test]
fn second_order_convergence() {
    let base = ExperimentConfig { t_final: Some(100.0), ..ExperimentConfig::new("oscillator", 0.1) };
    for method in [Method::Variational, Method::Rk2] {
        let study = experiment::convergence_study(&base, method, &[0.1, 0.01, 0.001]).unwrap();
        assert!((1.9..=2.1).contains(&study.order), "{method}: {}", study.order);
        assert_eq!(study.errors.len(), 3);
    }
}

#[test]
fn sweeps_keep_input_order() {
    let cfgs: Vec<_> = [0.1, 0.05, 0.02]
        .iter()
        .map(|&h| ExperimentConfig { t_final: Some(5.0), ..ExperimentConfig::new("oscillator", h) })
        .collect();
    let outs = experiment::run_sweep(&cfgs);
    for (cfg, out) in cfgs.iter().zip(outs) {
        assert_eq!(out.unwrap().h, cfg.h);
    }
}

#[test]
fn metric_helpers() {
    assert_eq!(estimators::max_deviation(&[1.0, f64::NAN, 3.5], 1.0), 2.5);
    assert_eq!(estimators::max_difference(&[1.0, 2.0], &[1.5, 2.0]), 0.5);
    let hs = [0.1, 0.01, 0.001];
    let errs: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
    assert!((estimators::loglog_slope(&hs, &errs) - 2.0).abs() <= 1e-12);
    let truth = [ThermoState::scalar(1.0, 0.0, 0.5), ThermoState::scalar(2.0, 0.0, 0.7)];
    let qs = [v(&[1.1]), v(&[1.0])];
    assert!((estimators::max_position_error(&qs, &truth, None) - 1.0).abs() <= 1e-15);
    assert!((estimators::max_position_error(&qs, &truth, Some(1)) - 0.1).abs() <= 1e-15);
    assert!((estimators::max_entropy_error(&[0.5, 1.0], &truth, None) - 0.3).abs() <= 1e-15);
}

#[test]
fn dropping_runs_keeps_reports() {
    let kept = experiment::run_experiment(&ExperimentConfig {
        t_final: Some(5.0),
        ..ExperimentConfig::new("van-der-waals", 0.01)
    })
    .unwrap();
    let dropped = experiment::run_experiment(&ExperimentConfig {
        t_final: Some(5.0),
        keep_runs: false,
        ..ExperimentConfig::new("van-der-waals", 0.01)
    })
    .unwrap();
    assert!(dropped.runs.is_empty());
    assert_eq!(kept.runs.len(), 2);
    let strip = |o: &experiment::ExperimentOutcome| {
        o.reports.iter().map(|r| (r.method, r.max_pos_err, r.max_s_err, r.max_h_dev)).collect::<Vec<_>>()
    };
    assert_eq!(strip(&kept), strip(&dropped));

    let dir = tempfile::tempdir().unwrap();
    let written = experiment::run_experiment(&ExperimentConfig {
        t_final: Some(1.0),
        keep_runs: false,
        out_dir: Some(dir.path().to_path_buf()),
        ..ExperimentConfig::new("oscillator", 0.01)
    })
    .unwrap();
    assert_eq!(written.runs.len(), 2);
}
