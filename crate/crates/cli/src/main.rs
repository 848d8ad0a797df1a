//! `ptw`: command-line driver for the predicate transformer workbench.

use clap::{Parser, Subcommand, ValueEnum};
use ptw_core::fuzz::{run_park_suite, run_suite, FuzzConfig, ParkConfig, Violation};
use ptw_core::report::{render_report, ReportFormat};
use ptw_core::runner::{run_spec_text, EngineChoice, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "ptw", version, about = "Predicate transformer workbench for a small while-language over finite state spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Semantic,
    Syntactic,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Load a spec file and run all of its directives.
    Check {
        /// Spec file to check.
        file: PathBuf,
        /// Which slp engine(s) to run; `both` cross-checks them.
        #[arg(long, value_enum, default_value = "both")]
        engine: EngineArg,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Interleave per-program-point predicates with the source for
        /// forward queries.
        #[arg(long)]
        annotate: bool,
        /// Include Kleene iteration traces in the report.
        #[arg(long)]
        trace_fixpoints: bool,
        /// Refuse state spaces larger than this.
        #[arg(long, default_value_t = 1 << 20)]
        max_states: u64,
        /// Print wall-clock timing to stderr.
        #[arg(long)]
        timings: bool,
        /// Test hook: corrupt the syntactic engine's result by one state.
        #[arg(long, hide = true)]
        corrupt_syntactic: bool,
    },
    /// Generate random programs and cross-validate the engines against
    /// the brute-force oracle.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random programs.
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_vars: usize,
        /// Largest domain size per variable.
        #[arg(long, default_value_t = 5)]
        max_domain: u64,
        #[arg(long, default_value_t = 12)]
        max_stmts: usize,
        #[arg(long, default_value_t = 2)]
        max_loop_depth: usize,
        /// Random argument sets per program.
        #[arg(long, default_value_t = 4)]
        sets_per_program: usize,
        /// Random loops for the Park induction suite (0 disables it).
        #[arg(long, default_value_t = 20)]
        park_loops: usize,
        /// Random invariants per loop in the Park suite.
        #[arg(long, default_value_t = 20)]
        park_invariants: usize,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check {
            file,
            engine,
            json,
            annotate,
            trace_fixpoints,
            max_states,
            timings,
            corrupt_syntactic,
        } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(text) => text,
                Err(err) => {
                    eprintln!("ptw: cannot read {}: {err}", file.display());
                    return ExitCode::from(2);
                }
            };
            let cfg = RunConfig {
                engine: match engine {
                    EngineArg::Semantic => EngineChoice::Semantic,
                    EngineArg::Syntactic => EngineChoice::Syntactic,
                    EngineArg::Both => EngineChoice::Both,
                },
                annotate,
                trace_fixpoints,
                max_states,
                corrupt_syntactic,
            };
            let start = Instant::now();
            let outcome = match run_spec_text(&text, &cfg) {
                Ok(outcome) => outcome,
                Err(err) => {
                    eprintln!("ptw: {err}");
                    return ExitCode::from(2);
                }
            };
            if timings {
                eprintln!("ptw: checked in {:.2?}", start.elapsed());
            }
            let format = if json { ReportFormat::Json } else { ReportFormat::Text };
            print!("{}", render_report(&outcome.report, format));
            if outcome.expectations_met && outcome.report.engine_agreement {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Fuzz {
            seed,
            count,
            max_vars,
            max_domain,
            max_stmts,
            max_loop_depth,
            sets_per_program,
            park_loops,
            park_invariants,
        } => {
            let cfg = FuzzConfig {
                seed,
                programs: count,
                max_vars,
                max_domain_size: max_domain,
                max_stmts,
                max_loop_depth,
                sets_per_program,
                ..FuzzConfig::default()
            };
            let start = Instant::now();
            let report = run_suite(&cfg);
            println!(
                "fuzz: {} programs (seed {seed}), {} checks, {} violations",
                report.programs,
                report.checks,
                report.violations.len()
            );
            println!(
                "      {} reversible programs, {} loops checked, max fixpoint iterations {}",
                report.reversible_programs, report.loops_checked, report.max_fixpoint_iterations
            );
            print_violations(&report.violations);
            let mut failed = !report.ok();

            if park_loops > 0 {
                let park_cfg = ParkConfig {
                    seed: seed.wrapping_add(1),
                    loops: park_loops,
                    invariants_per_loop: park_invariants,
                    max_vars,
                    max_domain_size: max_domain,
                };
                let park = run_park_suite(&park_cfg);
                println!(
                    "park: {} loops, {} certificates, {} premise-passing, {} violations",
                    park.loops,
                    park.certificates,
                    park.premise_passes,
                    park.violations.len()
                );
                println!(
                    "      {} variant certificates checked, {} passing",
                    park.variant_certificates, park.variant_passes
                );
                print_violations(&park.violations);
                failed |= !park.ok();
            }

            eprintln!("ptw: fuzzed in {:.2?}", start.elapsed());
            println!("result: {}", if failed { "FAIL" } else { "PASS" });
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}

fn print_violations(violations: &[Violation]) {
    for v in violations.iter().take(10) {
        println!("  violation [{}]: {}", v.check, v.detail);
        println!("    decls:   {}", v.decls);
        println!("    program: {}", v.program);
    }
    if violations.len() > 10 {
        println!("  ... and {} more", violations.len() - 10);
    }
}
