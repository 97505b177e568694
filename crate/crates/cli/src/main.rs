//! `effham`: effective Hamiltonians and the experiments around them.

mod commands;
mod grid;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use effham_core::experiments::{lookup, run_experiment, Params, EXPERIMENTS};
use effham_core::report::Report;
use serde_json::{json, Value};

use commands::{CellArgs, Failure, Outcome};

const DEFAULT_POTENTIAL: &str = r#"{"type":"sawtooth","s":0.5}"#;
const DEFAULT_HAMILTONIAN: &str = r#"{"type":"quadratic"}"#;

#[derive(Parser, Debug)]
#[command(name = "effham", version, about = "Effective Hamiltonians of periodic Hamilton-Jacobi equations")]
struct Cli {
    /// Output directory; each run writes into a subdirectory named after it.
    #[arg(long, global = true, env = "EFFHAM_OUT", default_value = "effham-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Problem {
    /// Hamiltonian descriptor, e.g. '{"type":"abs"}' or '{"type":"nonconvexF","theta1":2,"theta2":1.5}'.
    #[arg(long, default_value = DEFAULT_HAMILTONIAN)]
    hamiltonian: String,
    /// Potential descriptor, e.g. '{"type":"sawtooth","s":0.3}'.
    #[arg(long, default_value = DEFAULT_POTENTIAL)]
    potential: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact 1D effective Hamiltonian of a quasi-convex H.
    Effective1d {
        #[command(flatten)]
        problem: Problem,
        /// Momentum grid as a:b:step or a comma list.
        #[arg(long, default_value = "-2:2:0.1", allow_hyphen_values = true)]
        p_grid: String,
    },
    /// Flat-piece edges for the nonconvex profile F(|p|).
    Pplus {
        #[arg(long, default_value_t = 2.0)]
        theta1: f64,
        #[arg(long, default_value_t = 1.5)]
        theta2: f64,
        /// Piecewise-linear potential descriptor.
        #[arg(long)]
        potential: Option<String>,
        /// Sawtooth parameters, comma separated.
        #[arg(long)]
        s: Option<String>,
    },
    /// Viscous effective Hamiltonian via the Hill discriminant, or a
    /// discriminant scan when a λ range is given.
    Hill {
        #[arg(long, default_value = DEFAULT_POTENTIAL)]
        potential: String,
        #[arg(long, default_value = "0:3:0.1", allow_hyphen_values = true)]
        p_grid: String,
        /// Diffusion coefficient.
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, requires = "lambda_max", allow_hyphen_values = true)]
        lambda_min: Option<f64>,
        #[arg(long, requires = "lambda_min", allow_hyphen_values = true)]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Large-momentum expansion coefficients along a Diophantine direction.
    Asympt {
        /// Fourier potential descriptor in any dimension up to 3.
        #[arg(long, default_value = r#"{"type":"preset","name":"mathieu"}"#)]
        potential: String,
        #[arg(long = "Q-preset", alias = "q-preset", default_value = "golden")]
        q_preset: String,
        /// Spectral truncation |k|∞ ≤ K.
        #[arg(long = "K", alias = "k", default_value_t = 32)]
        k: i64,
        #[arg(long, default_value = "5:50:5")]
        lambda_grid: String,
    },
    /// Distribution function of a potential, optionally against a second one.
    Cdf {
        #[arg(long, default_value = DEFAULT_POTENTIAL)]
        potential: String,
        #[arg(long)]
        compare: Option<String>,
        /// Sampling resolution for Fourier potentials.
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
    },
    /// Numeric effective Hamiltonian from the time-dependent cell problem.
    Cellpde {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value = "0:2:0.5", allow_hyphen_values = true)]
        p_grid: String,
        /// Second momentum component for 2D potentials.
        #[arg(long, default_value_t = 0.0)]
        p2: f64,
        #[arg(long = "N", alias = "n", default_value_t = 200)]
        n: usize,
        #[arg(long = "T", alias = "t", default_value_t = 60.0)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        d: f64,
    },
    /// Runs a registered experiment, or all of them.
    Verify {
        /// Experiment name or `all`.
        experiment: String,
        /// Sawtooth parameters, comma separated.
        #[arg(long)]
        s: Option<String>,
        /// Grid nodes per axis for cell-problem runs.
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        /// Final time for cell-problem runs.
        #[arg(long = "T", alias = "t")]
        t: Option<f64>,
        /// Spectral truncation |k|∞ ≤ K.
        #[arg(long = "K", alias = "k")]
        k: Option<i64>,
        /// λ grid as a:b:step or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        lambda_grid: Option<String>,
        /// Momentum grid as a:b:step or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        p_grid: Option<String>,
    },
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn grid(text: &str) -> Result<Vec<f64>, Failure> {
    grid::parse_grid(text).map_err(usage)
}

fn optional_grid(text: &Option<String>) -> Result<Option<Vec<f64>>, Failure> {
    text.as_deref().map(grid).transpose()
}

/// Writes the artifacts and prints the checks; returns whether all passed.
fn emit(report: &Report, dir: &Path, extra: BTreeMap<String, Value>) -> Result<bool, Failure> {
    let manifest = report.write(dir, &extra).map_err(|e| Failure::Numeric(e.to_string()))?;
    for c in &report.checks {
        println!("  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.describe());
    }
    println!(
        "{}: {} -> {}",
        report.name,
        if report.passed() { "pass" } else { "FAIL" },
        manifest.data.parent().unwrap_or(dir).display()
    );
    Ok(report.passed())
}

fn run_one(out: &Path, outcome: Outcome, args: Value) -> Result<bool, Failure> {
    let report = outcome?;
    let dir = out.join(&report.name);
    emit(&report, &dir, BTreeMap::from([("arguments".to_string(), args)]))
}

fn verify(out: &Path, name: &str, params: Params) -> Result<bool, Failure> {
    let names: Vec<&str> = if name == "all" {
        EXPERIMENTS.iter().map(|e| e.name).collect()
    } else if lookup(name).is_some() {
        vec![name]
    } else {
        let known: Vec<&str> = EXPERIMENTS.iter().map(|e| e.name).collect();
        return Err(usage(format!("unknown experiment '{name}'; known: all, {}", known.join(", "))));
    };
    let mut all_passed = true;
    let mut results = Vec::new();
    for n in names {
        let passed = match run_experiment(n, &params) {
            Ok(report) => emit(&report, &out.join(n), BTreeMap::new())?,
            Err(e) => {
                println!("{n}: FAIL ({e})");
                false
            }
        };
        all_passed &= passed;
        results.push(json!({ "experiment": n, "passed": passed }));
    }
    if name == "all" {
        std::fs::create_dir_all(out).map_err(|e| Failure::Numeric(e.to_string()))?;
        let text = serde_json::to_string_pretty(&json!({ "passed": all_passed, "experiments": results }))
            .map_err(|e| Failure::Numeric(e.to_string()))?;
        std::fs::write(out.join("verify-all.json"), text + "\n").map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    Ok(all_passed)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let out = cli.out;
    match cli.command {
        Command::Effective1d { problem, p_grid } => {
            let ps = grid(&p_grid)?;
            let args = json!({ "hamiltonian": problem.hamiltonian, "potential": problem.potential, "p_grid": p_grid });
            run_one(&out, commands::effective1d(&problem.hamiltonian, &problem.potential, &ps), args)
        }
        Command::Pplus { theta1, theta2, potential, s } => {
            let ss = s.as_deref().map(|x| grid::parse_list(x).map_err(usage)).transpose()?;
            let args = json!({ "theta1": theta1, "theta2": theta2, "potential": potential, "s": s });
            run_one(&out, commands::pplus(theta1, theta2, potential.as_deref(), ss.as_deref()), args)
        }
        Command::Hill { potential, p_grid, d, lambda_min, lambda_max, steps } => match (lambda_min, lambda_max) {
            (Some(lo), Some(hi)) => {
                let args = json!({ "potential": potential, "lambda_min": lo, "lambda_max": hi, "steps": steps });
                run_one(&out, commands::hill_scan(&potential, lo, hi, steps), args)
            }
            _ => {
                let ps = grid(&p_grid)?;
                let args = json!({ "potential": potential, "p_grid": p_grid, "d": d });
                run_one(&out, commands::hill_curve(&potential, &ps, d), args)
            }
        },
        Command::Asympt { potential, q_preset, k, lambda_grid } => {
            let lambdas = grid(&lambda_grid)?;
            if lambdas.iter().any(|&l| l <= 0.0) {
                return Err(usage("λ grid must be positive"));
            }
            let args = json!({ "potential": potential, "Q_preset": q_preset, "K": k, "lambda_grid": lambda_grid });
            run_one(&out, commands::asympt(&potential, &q_preset, k, &lambdas), args)
        }
        Command::Cdf { potential, compare, resolution } => {
            if resolution < 2 {
                return Err(usage("resolution must be at least 2"));
            }
            let args = json!({ "potential": potential, "compare": compare, "resolution": resolution });
            run_one(&out, commands::cdf(&potential, compare.as_deref(), resolution), args)
        }
        Command::Cellpde { problem, p_grid, p2, n, t, d } => {
            let ps = grid(&p_grid)?;
            if n < 16 || t < 10.0 {
                return Err(usage("cellpde needs --N ≥ 16 and --T ≥ 10"));
            }
            let args = json!({
                "hamiltonian": problem.hamiltonian, "potential": problem.potential,
                "p_grid": p_grid, "p2": p2, "N": n, "T": t, "d": d,
            });
            let a = CellArgs { h_json: &problem.hamiltonian, v_json: &problem.potential, ps: &ps, p2, n, t, d };
            run_one(&out, commands::cellpde(&a), args)
        }
        Command::Verify { experiment, s, n, t, k, lambda_grid, p_grid } => {
            let params = Params {
                n,
                t,
                s: s.as_deref().map(|x| grid::parse_list(x).map_err(usage)).transpose()?,
                k,
                lambdas: optional_grid(&lambda_grid)?,
                p_grid: optional_grid(&p_grid)?,
            };
            verify(&out, &experiment, params)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(1)
        }
    }
}
