//! Command-line front end: evaluate theta series, run verification suites,
//! benchmark lattice-sum strategies, and list bundled scenarios.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or an evaluation errored,
//! 2 configuration or usage error.

#![allow(clippy::needless_range_loop)]

mod bench;
mod runner;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "conetheta",
    version,
    about = "Theta series on symmetric cones: certified evaluation and identity verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the theta series at the scenario's points.
    Eval {
        /// Bundled scenario name, a path, or a name in CONETHETA_SCENARIO_DIR.
        #[arg(long)]
        scenario: String,
        /// Absolute evaluation tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Seed override for sampled points.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the scenario's identity checks and emit a verification report.
    Verify {
        /// Bundled scenario name, a path, a name in CONETHETA_SCENARIO_DIR,
        /// or "all" for every bundled scenario.
        #[arg(long)]
        scenario: String,
        /// Override for the theta-identity tolerance class.
        #[arg(long)]
        tol: Option<f64>,
        /// Concurrent check kinds.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compare lattice-sum strategies (ellipsoid vs bounding box).
    Bench {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// List bundled scenarios.
    ListScenarios,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Eval {
            scenario,
            tol,
            seed,
            out,
            format,
        } => {
            let mut scn = scenario::resolve_scenario(&scenario).map_err(|e| e.to_string())?;
            if let Some(s) = seed {
                scn.spec.seed = s;
            }
            let report = runner::eval_scenario(&scn, tol);
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => runner::eval_to_csv(&report),
            };
            emit(&text, out.as_ref())?;
            Ok(if report.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Verify {
            scenario,
            tol,
            jobs,
            seed,
            out,
            format,
        } => {
            let names: Vec<String> = if scenario == "all" {
                scenario::BUNDLED
                    .iter()
                    .map(|(n, _)| n.to_string())
                    .collect()
            } else {
                vec![scenario]
            };
            let mut reports = Vec::new();
            for name in &names {
                let mut scn = scenario::resolve_scenario(name).map_err(|e| e.to_string())?;
                if let Some(s) = seed {
                    scn.spec.seed = s;
                }
                if let Some(t) = tol {
                    scn.spec.tolerances.identity = t;
                    scn.spec.tolerances.certification = t;
                }
                reports.push(runner::verify_scenario(&scn, jobs));
            }
            let all_pass = reports.iter().all(|r| r.all_pass());
            let text = match format {
                Format::Json => {
                    if reports.len() == 1 {
                        reports[0].to_json()
                    } else {
                        serde_json::to_string_pretty(&reports).expect("reports serialize")
                    }
                }
                Format::Csv => reports
                    .iter()
                    .map(|r| r.to_csv())
                    .collect::<Vec<_>>()
                    .join(""),
            };
            emit(&text, out.as_ref())?;
            for r in &reports {
                eprintln!(
                    "{}: {}/{} checks passed",
                    r.meta.scenario, r.summary.passed, r.summary.total
                );
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Bench { out, format } => {
            let rows = bench::run_bench();
            let text = match format {
                Format::Csv => bench::to_csv(&rows),
                Format::Json => {
                    let vals: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| {
                            serde_json::json!({
                                "config": r.config,
                                "strategy": r.strategy,
                                "tol": format!("{:e}", r.tol),
                                "terms_visited": r.terms_visited,
                                "terms_summed": r.terms_summed,
                                "wall_ms": r.wall_ms,
                                "tail_bound": format!("{:e}", r.tail_bound),
                                "value": [r.value.re, r.value.im],
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&vals).expect("bench serializes")
                }
            };
            emit(&text, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ListScenarios => {
            println!("bundled scenarios:");
            for (name, _) in scenario::BUNDLED {
                println!("  {name}");
            }
            if let Ok(dir) = std::env::var("CONETHETA_SCENARIO_DIR") {
                println!("scenario directory ({dir}):");
                if let Ok(entries) = std::fs::read_dir(&dir) {
                    let mut names: Vec<String> = entries
                        .filter_map(|e| e.ok())
                        .filter_map(|e| {
                            let p = e.path();
                            if p.extension().is_some_and(|x| x == "toml") {
                                p.file_stem().map(|s| s.to_string_lossy().into_owned())
                            } else {
                                None
                            }
                        })
                        .collect();
                    names.sort();
                    for n in names {
                        println!("  {n}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
