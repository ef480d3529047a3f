//! `sigmax`: Monte Carlo tracking experiments, config validation and
//! sequential classification.
//!
//! Exit codes: 0 success, 2 configuration or parse error, 3 more than 5% of
//! Monte Carlo runs excluded after numerical failures, 1 anything else.

mod classify;
mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ConfigError;

#[derive(Debug, Parser)]
#[command(name = "sigmax", version, about = "IMM and hybrid IMM tracking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run Monte Carlo comparisons and write CSV results.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Experiment group 1-4; repeatable. Overrides `run.groups`.
        #[arg(long = "group")]
        groups: Vec<u8>,
        /// Scenario 1 or 2; repeatable. Overrides `run.scenarios`.
        #[arg(long = "scenario")]
        scenarios: Vec<u8>,
        /// imm, himm, kalman-baseline or imm-maxout-baseline; repeatable.
        #[arg(long = "method")]
        methods: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mc_runs: Option<usize>,
    },
    /// Check every matrix and distribution in a config.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured classifiers over a file of measurement symbols.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;

fn fail(e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    if e.chain().any(|c| c.downcast_ref::<ConfigError>().is_some()) {
        ExitCode::from(EXIT_CONFIG)
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let _ = e.print();
            return if informational { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CONFIG) };
        }
    };
    match cli.command {
        Command::Run {
            config,
            out,
            groups,
            scenarios,
            methods,
            seed,
            mc_runs,
        } => {
            let config = match config::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let manifest = run::RunManifest {
                config,
                out: out.clone(),
                groups,
                scenarios,
                methods,
                seed,
                mc_runs,
            };
            match run::cmd_run(&manifest) {
                Ok(summary) => {
                    print!("{}", summary.table);
                    for r in &summary.reports {
                        eprintln!("{} {}: {:.2} s", r.scenario, r.group, r.runtime_secs);
                    }
                    eprintln!("wrote {} files to {}", summary.files.len(), out.display());
                    let over = summary.threshold_exceeded();
                    if over.is_empty() {
                        ExitCode::SUCCESS
                    } else {
                        for r in over {
                            eprintln!(
                                "error: {} {}: {} of {} runs excluded ({:.1}% > {:.0}%)",
                                r.scenario,
                                r.group,
                                r.excluded_runs.len(),
                                r.runs_requested,
                                100.0 * r.excluded_fraction(),
                                100.0 * run::EXCLUDED_THRESHOLD
                            );
                            for (run, reason) in &r.excluded_runs {
                                eprintln!("  run {run}: {reason}");
                            }
                        }
                        ExitCode::from(EXIT_THRESHOLD)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate { config } => {
            let config = match config::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let violations = config.violations();
            if violations.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                eprintln!("{} violation(s)", violations.len());
                ExitCode::from(EXIT_CONFIG)
            }
        }
        Command::Classify { config, input, out } => {
            let config = match config::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match classify::cmd_classify(&config, &input, &out) {
                Ok(results) => {
                    for r in results {
                        let map = r.decisions.last().expect("prior decision present");
                        let belief: Vec<String> = r.final_belief.iter().map(|w| format!("{w:.6}")).collect();
                        println!("{}: {map} [{}]", r.classifier.name(), belief.join(", "));
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
