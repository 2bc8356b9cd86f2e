//! Command-line front end for the thermodynamic variational integrators.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use thermovi::bench::checks;
use thermovi::bench::experiment::{
    convergence_study, run_experiment, run_sweep, ExperimentConfig, ExperimentOutcome, Method,
};
use thermovi::bench::output;
use thermovi::systems;
use thermovi::Error;

/// Exit status for invalid input or I/O problems.
const EXIT_CONFIG: u8 = 1;
/// Exit status when an integration aborts; the step index goes to stderr.
const EXIT_STEP_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "thermovi", version, about = "Variational integrators for simple thermodynamic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one system with the selected methods and write CSV files.
    Simulate(RunArgs),
    /// Sweep several step sizes and write a combined summary.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Step sizes to sweep.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.01, 0.001])]
        hs: Vec<f64>,
    },
    /// Reproduce the damped-oscillator error tables.
    Table {
        #[arg(long, value_enum, default_value_t = Grid::Standard)]
        grid: Grid,
        /// Include the h = 1e-4 cell (ten million steps).
        #[arg(long)]
        slow: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized checks of the evolution/Reeb fields and the pullback property.
    GeometryCheck {
        /// Restrict to one catalog system.
        #[arg(long)]
        system: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Step of the discrete flow used in the pullback check.
        #[arg(long, default_value_t = 0.01)]
        h: f64,
    },
    /// Fit the order of convergence of one method.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.01, 0.001])]
        hs: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    /// h = 0.1, 0.01, 0.001 (and 1e-4 with --slow).
    Standard,
    /// h = 0.1, 0.01, 1e-4 (and 1e-5 with --slow).
    Caption,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML experiment file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// oscillator, ideal-gas, van-der-waals or two-pistons.
    #[arg(long)]
    system: Option<String>,
    /// Time step.
    #[arg(long)]
    h: Option<f64>,
    /// Integration horizon; defaults to the system's own.
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Friction coefficient.
    #[arg(long)]
    gamma: Option<f64>,
    /// exact, reference, hold or taylor.
    #[arg(long = "init-mode")]
    init_mode: Option<String>,
    /// variational, rk2 or reference; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::new(self.system.as_deref().unwrap_or("oscillator"), 0.01),
        };
        if let Some(system) = &self.system {
            cfg.system = system.clone();
        }
        if let Some(h) = self.h {
            cfg.h = h;
        }
        if self.t_final.is_some() {
            cfg.t_final = self.t_final;
        }
        if let Some(gamma) = self.gamma {
            cfg.params.insert("gamma".to_string(), gamma);
        }
        if self.init_mode.is_some() {
            cfg.init_mode = self.init_mode.clone();
        }
        if !self.method.is_empty() {
            cfg.methods = self
                .method
                .iter()
                .map(|m| m.parse())
                .collect::<Result<_, _>>()?;
        }
        if self.out.is_some() {
            cfg.out_dir = self.out.clone();
        }
        Ok(cfg)
    }
}

enum Failure {
    Config(Error),
    Step(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.step() {
            Some(_) => Failure::Step(e.to_string()),
            None => Failure::Config(e),
        }
    }
}

fn print_reports(outcome: &ExperimentOutcome) {
    print!("{}", output::summary_csv(&outcome.reports));
}

/// Turns per-method failures into a step failure after printing what ran.
fn check_failures(outcome: &ExperimentOutcome) -> Result<(), Failure> {
    let msgs: Vec<String> = outcome
        .failures
        .iter()
        .map(|f| format!("{} {}: {}", outcome.system, f.method, f.error))
        .collect();
    if msgs.is_empty() {
        Ok(())
    } else {
        Err(Failure::Step(msgs.join("\n")))
    }
}

fn simulate(run: &RunArgs) -> Result<(), Failure> {
    let mut cfg = run.config()?;
    if cfg.out_dir.is_none() {
        cfg.out_dir = Some(PathBuf::from("out"));
    }
    let outcome = run_experiment(&cfg)?;
    print_reports(&outcome);
    check_failures(&outcome)
}

fn bench(run: &RunArgs, hs: &[f64]) -> Result<(), Failure> {
    let base = run.config()?;
    let cfgs: Vec<ExperimentConfig> = hs
        .iter()
        .map(|&h| ExperimentConfig {
            h,
            out_dir: base.out_dir.as_ref().map(|d| d.join(format!("h{h}"))),
            ..base.clone()
        })
        .collect();
    let mut reports = Vec::new();
    let mut failures = Ok(());
    for outcome in run_sweep(&cfgs) {
        let outcome = outcome?;
        reports.extend(outcome.reports.iter().cloned());
        if failures.is_ok() {
            failures = check_failures(&outcome);
        }
    }
    let summary = output::summary_csv(&reports);
    if let Some(dir) = &base.out_dir {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        std::fs::write(dir.join("summary.csv"), &summary).map_err(Error::from)?;
    }
    print!("{summary}");
    failures
}

fn table(grid: Grid, slow: bool, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut hs = match grid {
        Grid::Standard => vec![0.1, 0.01, 0.001],
        Grid::Caption => vec![0.1, 0.01, 1e-4],
    };
    if slow {
        hs.push(match grid {
            Grid::Standard => 1e-4,
            Grid::Caption => 1e-5,
        });
    }
    let cfgs: Vec<ExperimentConfig> = hs
        .iter()
        .map(|&h| ExperimentConfig {
            t_final: Some(1000.0),
            init_mode: Some("exact".to_string()),
            methods: vec![Method::Variational, Method::Rk2],
            entropy_window: Some(1501),
            keep_runs: false,
            ..ExperimentConfig::new("oscillator", h)
        })
        .collect();
    let outcomes = run_sweep(&cfgs)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    for o in &outcomes {
        check_failures(o)?;
    }
    let get = |o: &ExperimentOutcome, m| o.report(m).expect("both methods ran").clone();
    println!("position: max |q - q_exact| over t in [0, 1000]");
    println!("{:>8}  {:>12}  {:>12}", "h", "variational", "midpoint");
    for o in &outcomes {
        let (v, r) = (get(o, Method::Variational), get(o, Method::Rk2));
        println!("{:>8}  {:>12.3e}  {:>12.3e}", o.h, v.max_pos_err, r.max_pos_err);
    }
    println!("\nentropy: max |S - S_exact| over the first 1500 steps");
    println!("{:>8}  {:>12}  {:>12}", "h", "variational", "midpoint");
    for o in &outcomes {
        let (v, r) = (get(o, Method::Variational), get(o, Method::Rk2));
        println!(
            "{:>8}  {:>12.3e}  {:>12.3e}",
            o.h,
            v.max_s_err_window.unwrap_or(f64::NAN),
            r.max_s_err_window.unwrap_or(f64::NAN)
        );
    }
    println!("\nhamiltonian: max |H - H(0)|");
    println!(
        "{:>8}  {:>12}  {:>12}  {:>12}  {:>12}",
        "h", "p+", "p-", "var (v)", "midpoint (v)"
    );
    for o in &outcomes {
        let (v, r) = (get(o, Method::Variational), get(o, Method::Rk2));
        println!(
            "{:>8}  {:>12.3e}  {:>12.3e}  {:>12.3e}  {:>12.3e}",
            o.h,
            v.max_h_plus_dev.unwrap_or(f64::NAN),
            v.max_h_minus_dev.unwrap_or(f64::NAN),
            v.max_h_vel_dev,
            r.max_h_vel_dev
        );
    }
    if let Some(dir) = out {
        let reports: Vec<_> = outcomes.iter().flat_map(|o| o.reports.iter().cloned()).collect();
        std::fs::create_dir_all(&dir).map_err(Error::from)?;
        std::fs::write(dir.join("summary.csv"), output::summary_csv(&reports)).map_err(Error::from)?;
    }
    Ok(())
}

fn geometry_check(system: Option<String>, samples: usize, seed: u64, h: f64) -> Result<(), Failure> {
    let names: Vec<String> = match system {
        Some(name) => vec![name],
        None => systems::SYSTEM_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    println!("system,evolution,eta_of_evolution,reeb,contact,pullback");
    for name in names {
        let sys = systems::by_name(&name, &Default::default())?;
        let g = checks::geometry_check(sys.as_ref(), samples, seed)?;
        let pullback = checks::pullback_sweep(sys.as_ref(), h, samples.min(50), seed)?;
        println!(
            "{name},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e}",
            g.evolution, g.eta_of_evolution, g.reeb, g.contact, pullback
        );
    }
    Ok(())
}

fn convergence(run: &RunArgs, hs: &[f64]) -> Result<(), Failure> {
    let base = ExperimentConfig {
        out_dir: None,
        ..run.config()?
    };
    let method = match base.methods.as_slice() {
        [m] => *m,
        _ if run.method.is_empty() => Method::Variational,
        _ => {
            return Err(Failure::Config(Error::Config(
                "convergence takes a single --method".to_string(),
            )))
        }
    };
    let study = convergence_study(&base, method, hs)?;
    println!("h,max_pos_err");
    for (h, e) in study.hs.iter().zip(&study.errors) {
        println!("{},{}", output::fmt_f64(*h), output::fmt_f64(*e));
    }
    println!("order {:.4}", study.order);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(run) => simulate(&run),
        Command::Bench { run, hs } => bench(&run, &hs),
        Command::Table { grid, slow, out } => table(grid, slow, out),
        Command::GeometryCheck {
            system,
            samples,
            seed,
            h,
        } => geometry_check(system, samples, seed, h),
        Command::Convergence { run, hs } => convergence(&run, &hs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("thermovi: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Step(msg)) => {
            eprintln!("thermovi: {msg}");
            ExitCode::from(EXIT_STEP_FAILURE)
        }
    }
}
