//! The splitfold command line.
//!
//! Exit codes: 0 success, 2 parse or validation failure, 3 resource
//! limit, 4 property violation.

use clap::{Parser, Subcommand};
use serde::Serialize;
use splitfold_cli::commands::{self, CliError};
use splitfold_cli::report::{OracleReport, Report};
use splitfold_cli::{envelope_from_env, fixture, oracle};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "splitfold", version, about = "Filling paths, folds and train track maps for free splittings of free groups")]
struct Cli {
    /// Machine output: one line of canonical JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a path fills its splitting.
    FillCheck {
        fixture: PathBuf,
        #[arg(long)]
        path: String,
    },
    /// Filling support and Kurosh rank of a path (or subgroup support).
    FillingSupport {
        fixture: PathBuf,
        #[arg(long, conflicts_with = "subgroup")]
        path: Option<String>,
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Overlap generators of a path.
    OverlapGens {
        fixture: PathBuf,
        #[arg(long)]
        path: String,
    },
    /// Stallings fold factorization of a map, emitted in fixture form.
    FoldFactorize {
        fixture: PathBuf,
        #[arg(long)]
        map: String,
    },
    /// Kurosh rank ledger of a natural edge pushed along the folds.
    KrTrace {
        fixture: PathBuf,
        #[arg(long)]
        map: String,
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 1)]
        iterate: usize,
    },
    /// Exponent report of a train track map.
    TtAnalyze {
        fixture: PathBuf,
        #[arg(long)]
        map: String,
        /// Quasicomparability parameter as a rational, e.g. 1 or 3/2.
        #[arg(long)]
        nu: Option<String>,
    },
    /// Collapse invariant forests and remove valence-two vertices.
    TtImprove {
        fixture: PathBuf,
        #[arg(long)]
        map: String,
    },
    /// Nested tile trace of a natural edge under a train track map.
    TileNesting {
        fixture: PathBuf,
        #[arg(long)]
        map: String,
        #[arg(long)]
        edge: String,
    },
    /// Enumerate expansions with bounded extra natural edges.
    ExpansionSearch {
        fixture: PathBuf,
        #[arg(long)]
        splitting: String,
        #[arg(long, default_value_t = 1)]
        budget: usize,
    },
    /// Construct a verified non-filling witness.
    BlowupWitness {
        fixture: PathBuf,
        #[arg(long)]
        path: String,
    },
    /// Exhaustive Boolean matrix exponent table entry.
    BoolExponent {
        #[arg(long)]
        m: usize,
    },
    /// Round-trip a fixture through the parser and emitter.
    Normalize { fixture: PathBuf },
    /// Randomized oracle batches; exits nonzero on any violation.
    OracleSuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        len: usize,
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// One of: all, filling, overlap, monotone, cancellation.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn emit<T: Serialize>(json: bool, command: &str, result: T, started: Instant) -> i32 {
    let report = Report {
        command: command.to_string(),
        result,
        warnings: Vec::new(),
    };
    if json {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
    } else {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        eprintln!("elapsed: {} ms", started.elapsed().as_millis());
    }
    0
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    let env = envelope_from_env();
    let started = Instant::now();
    let load = |p: &PathBuf| -> Result<fixture::Fixture, CliError> {
        fixture::load(p).map_err(|e| CliError {
            code: 2,
            message: format!("{e:#}"),
        })
    };
    let code = match &cli.command {
        Command::FillCheck { fixture, path } => {
            let fx = load(fixture)?;
            emit(cli.json, "fill-check", commands::fill_check(&fx, path, &env)?, started)
        }
        Command::FillingSupport {
            fixture,
            path,
            subgroup,
        } => {
            let fx = load(fixture)?;
            let report = match (path, subgroup) {
                (Some(p), None) => commands::filling_support_cmd(&fx, p, &env)?,
                (None, Some(s)) => commands::subgroup_support(&fx, s, &env)?,
                _ => return Err(commands::usage("pass exactly one of --path / --subgroup")),
            };
            emit(cli.json, "filling-support", report, started)
        }
        Command::OverlapGens { fixture, path } => {
            let fx = load(fixture)?;
            emit(cli.json, "overlap-gens", commands::overlap_gens(&fx, path)?, started)
        }
        Command::FoldFactorize { fixture, map } => {
            let fx = load(fixture)?;
            emit(cli.json, "fold-factorize", commands::fold_factorize_cmd(&fx, map)?, started)
        }
        Command::KrTrace {
            fixture,
            map,
            edge,
            iterate,
        } => {
            let fx = load(fixture)?;
            emit(
                cli.json,
                "kr-trace",
                commands::kr_trace(&fx, map, edge, *iterate, &env)?,
                started,
            )
        }
        Command::TtAnalyze { fixture, map, nu } => {
            let fx = load(fixture)?;
            emit(
                cli.json,
                "tt-analyze",
                commands::tt_analyze(&fx, map, nu.as_deref(), &env)?,
                started,
            )
        }
        Command::TtImprove { fixture, map } => {
            let fx = load(fixture)?;
            emit(cli.json, "tt-improve", commands::tt_improve(&fx, map)?, started)
        }
        Command::TileNesting { fixture, map, edge } => {
            let fx = load(fixture)?;
            emit(
                cli.json,
                "tile-nesting",
                commands::nesting_trace_cmd(&fx, map, edge, &env)?,
                started,
            )
        }
        Command::ExpansionSearch {
            fixture,
            splitting,
            budget,
        } => {
            let fx = load(fixture)?;
            emit(
                cli.json,
                "expansion-search",
                commands::expansion_search(&fx, splitting, *budget)?,
                started,
            )
        }
        Command::BlowupWitness { fixture, path } => {
            let fx = load(fixture)?;
            emit(
                cli.json,
                "blowup-witness",
                commands::blowup_witness_cmd(&fx, path, &env)?,
                started,
            )
        }
        Command::BoolExponent { m } => emit(cli.json, "bool-exponent", commands::bool_exponent_cmd(*m)?, started),
        Command::Normalize { fixture } => {
            let fx = load(fixture)?;
            print!("{}", fixture::emit(&fx));
            0
        }
        Command::OracleSuite {
            seed,
            n,
            len,
            count,
            suite,
        } => {
            let mut outcomes: Vec<(&str, oracle::SuiteOutcome)> = Vec::new();
            let run_all = suite == "all";
            if run_all || suite == "filling" {
                outcomes.push(("filling", oracle::filling_criterion_suite(*seed, (*n).min(3), *len, *count)));
            }
            if run_all || suite == "overlap" {
                outcomes.push(("overlap", oracle::overlap_stabilizer_suite(*seed + 1, *len, *count)));
            }
            if run_all || suite == "monotone" {
                outcomes.push(("monotone", oracle::monotonicity_suite(*seed + 2, (*n).min(3), *count)));
            }
            if run_all || suite == "cancellation" {
                outcomes.push(("cancellation", oracle::cancellation_suite(*seed + 3, (*n).min(3), *count)));
            }
            if outcomes.is_empty() {
                return Err(commands::usage(format!("unknown suite {suite}")));
            }
            let mut any_violation = false;
            for (name, outcome) in &outcomes {
                let report = OracleReport {
                    suite: name.to_string(),
                    seed: *seed,
                    cases: outcome.cases,
                    violations: outcome.violations.clone(),
                };
                emit(cli.json, "oracle-suite", report, started);
                if !outcome.violations.is_empty() {
                    any_violation = true;
                }
            }
            if any_violation {
                4
            } else {
                0
            }
        }
    };
    Ok(code)
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}
