//! `sperner-eq`: batch front end for the equilibrium engine.
//!
//! Exit codes: 0 success, 1 solver did not converge, 2 bad input, 3 the
//! equivalence certificate failed.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use sperner_eq::economy::EconomySpec;
use sperner_eq::equivalence::{sperner_via_equilibrium, EquivalenceError};
use sperner_eq::labeling::Labeling;
use sperner_eq::simplex_grid::Subdivision;
use sperner_eq::solver::{slnc_diagnostic, solve, SolverConfig};
use sperner_eq::sperner_search::{enumerate_fully_labeled, path_follow, SearchError};

use output::Mode;

const DEFAULT_SEED: u64 = 20240601;

#[derive(Parser)]
#[command(name = "sperner-eq", version, about = "Walrasian equilibria by Sperner labeling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Enumerate,
    Path,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long)]
    m_start: Option<u32>,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long)]
    growth: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(x) = self.m_start {
            cfg.m_start = x;
        }
        if let Some(x) = self.m_max {
            cfg.m_max = x;
        }
        if let Some(x) = self.growth {
            cfg.growth = x;
        }
        if let Some(x) = self.tol {
            cfg.tol = x;
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Approximate equilibrium of an economy config.
    Solve {
        economy: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "float")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
        /// also write (m, residual, walras, tail_diameter) rows here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Fully labeled cells of a labeling file.
    Sperner {
        labeling: PathBuf,
        #[arg(long, value_enum, default_value = "enumerate")]
        strategy: StrategyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified fully labeled cell via the induced economy.
    Equivalence {
        labeling: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "rational")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster report on near-equilibria of an economy config.
    Diagnose {
        economy: PathBuf,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value = "float")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A random proper labeling file.
    RandomLabeling {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An exit code with the JSON document to write.
struct Outcome {
    code: u8,
    report: serde_json::Value,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> Outcome {
    eprintln!("error: {msg}");
    Outcome {
        code,
        report: json!({ "error": msg.to_string() }),
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn load_economy(path: &Path) -> Result<EconomySpec, Outcome> {
    EconomySpec::from_json(&read(path)?).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn load_labeling(path: &Path) -> Result<Labeling, Outcome> {
    Labeling::from_json(&read(path)?).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn improper(violations: &[sperner_eq::labeling::Violation]) -> Outcome {
    for v in violations {
        eprintln!("violation: {v}");
    }
    Outcome {
        code: 2,
        report: json!({
            "error": "labeling is not proper",
            "violations": violations.iter().map(to_value).collect::<Vec<_>>(),
        }),
    }
}

fn run(command: Command) -> (Outcome, Option<PathBuf>, Mode) {
    match command {
        Command::Solve {
            economy,
            solver,
            mode,
            out,
            csv,
        } => {
            let outcome = (|| {
                let econ = load_economy(&economy)?;
                let report = solve(&econ, &solver.config()).map_err(|e| fail(2, e))?;
                if let Some(csv) = csv {
                    fs::write(&csv, report.to_csv()).map_err(|e| fail(2, format!("{}: {e}", csv.display())))?;
                }
                Ok(Outcome {
                    code: if report.converged { 0 } else { 1 },
                    report: to_value(&report),
                })
            })();
            (outcome.unwrap_or_else(|e| e), out, mode)
        }
        Command::Sperner { labeling, strategy, out } => {
            let outcome = (|| {
                let lab = load_labeling(&labeling)?;
                let result = match strategy {
                    StrategyArg::Enumerate => enumerate_fully_labeled(&lab),
                    StrategyArg::Path => path_follow(&lab),
                };
                match result {
                    Ok(r) => Ok(Outcome {
                        code: if r.cells.is_empty() { 1 } else { 0 },
                        report: to_value(&r),
                    }),
                    Err(SearchError::ImproperLabeling(v)) => Err(improper(&v)),
                    Err(e) => Err(fail(3, e)),
                }
            })();
            (outcome.unwrap_or_else(|e| e), out, Mode::Float)
        }
        Command::Equivalence {
            labeling,
            solver,
            mode,
            out,
        } => {
            let outcome = (|| {
                if mode != Mode::Rational {
                    return Err(fail(2, "the equivalence command requires --mode rational"));
                }
                let lab = load_labeling(&labeling)?;
                match sperner_via_equilibrium(&lab, &solver.config()) {
                    Ok(cert) => Ok(Outcome {
                        code: 0,
                        report: to_value(&cert),
                    }),
                    Err(EquivalenceError::ImproperLabeling(v)) => Err(improper(&v)),
                    Err(e) => Err(fail(3, e)),
                }
            })();
            (outcome.unwrap_or_else(|e| e), out, Mode::Rational)
        }
        Command::Diagnose {
            economy,
            eta,
            epsilon,
            mode,
            out,
        } => {
            let outcome = (|| {
                let econ = load_economy(&economy)?;
                let mut cfg = SolverConfig::default();
                if let Some(x) = eta {
                    cfg.slnc_eta = x;
                }
                if let Some(x) = epsilon {
                    cfg.slnc_epsilon = x;
                }
                let report = slnc_diagnostic(&econ, &cfg).map_err(|e| fail(2, e))?;
                Ok(Outcome {
                    code: 0,
                    report: to_value(&report),
                })
            })();
            (outcome.unwrap_or_else(|e| e), out, mode)
        }
        Command::RandomLabeling { n, m, seed, out } => {
            let outcome = match Subdivision::new(n, m) {
                Ok(sub) => {
                    let lab = Labeling::random_proper(sub, &mut ChaCha8Rng::seed_from_u64(seed));
                    Outcome {
                        code: 0,
                        report: to_value(&lab.to_file()),
                    }
                }
                Err(e) => fail(2, e),
            };
            (outcome, out, Mode::Float)
        }
    }
}

fn configure_threads() {
    let threads = match std::env::var("SPERNER_EQ_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) => t,
            Err(_) => {
                eprintln!("warning: ignoring SPERNER_EQ_THREADS={s:?}");
                0
            }
        },
        Err(_) => 0,
    };
    if threads > 0 {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (outcome, out, mode) = run(cli.command);
    let text = output::render(outcome.report, mode);
    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::from(outcome.code)
}
