use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use sdtab_core::compiler::{build_theory, BuildOptions};
use sdtab_core::engine::{prove, ProofResult, SearchConfig};
use sdtab_core::render::{render, skeleton, RenderOptions};
use sdtab_core::tptp::{parse_problem, resolve_includes};
use sdtab_core::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceLevel {
    /// Full numbered proof.
    Trace,
    /// Rule counts and closed leaves.
    Skeleton,
    /// Status line only.
    Status,
}

/// Tableau prover with axioms compiled into custom deduction rules.
#[derive(Debug, Parser)]
#[command(name = "sdtab", version)]
struct RunOptions {
    /// TPTP fof problem file.
    input: PathBuf,
    /// Extra directory searched for included files (repeatable).
    #[arg(short = 'I', long = "include-dir")]
    include_dirs: Vec<PathBuf>,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,
    /// Maximum number of rule applications.
    #[arg(long = "max-rules", default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_rules: u64,
    /// Enable the cut rule.
    #[arg(long)]
    cut: bool,
    #[arg(long, value_enum, default_value_t = TraceLevel::Trace)]
    trace: TraceLevel,
    /// Print the compiled rules before searching.
    #[arg(long)]
    list_rules: bool,
    /// Print search statistics to stderr.
    #[arg(long)]
    stats: bool,
    /// Do not detect reflexive, symmetric or transitive relations.
    #[arg(long)]
    no_relation_detection: bool,
    /// Theory name shown in compiled rule names.
    #[arg(long, default_value = "szen")]
    tag: String,
    /// Print the terms behind T_n names.
    #[arg(long)]
    legend: bool,
}

fn run(opts: &RunOptions) -> Result<bool, String> {
    let text = std::fs::read_to_string(&opts.input).map_err(|e| format!("{}: {e}", opts.input.display()))?;
    let mut problem = parse_problem(&text, &opts.input).map_err(|e| e.to_string())?;
    problem.include_paths = opts.include_dirs.clone();
    let problem = resolve_includes(&problem).map_err(|e| e.to_string())?;

    let build = BuildOptions { detect_relations: !opts.no_relation_detection };
    let theory = build_theory(&problem, &opts.tag, build);
    if opts.list_rules {
        println!("{}", theory.dump());
    }
    let goal = problem.conjecture().map_or(Formula::False, |c| c.formula.clone());
    let cfg = SearchConfig {
        max_rule_applications: opts.max_rules as usize,
        timeout: Duration::from_secs(opts.timeout),
        cut_enabled: opts.cut,
        ..SearchConfig::default()
    };
    let result = prove(&theory, &goal, &cfg);
    if opts.stats {
        eprintln!("{}", result.stats());
    }
    let status = match &result {
        ProofResult::Proof(..) => "PROOF-FOUND",
        ProofResult::Exhausted(_) => "NO-PROOF",
        ProofResult::Timeout(_) => "TIMEOUT",
    };
    match (&result, opts.trace) {
        (ProofResult::Proof(tree, _), TraceLevel::Trace) => {
            let ropts = RenderOptions { legend: opts.legend, ..RenderOptions::default() };
            print!("{}", render(tree, &problem, &opts.tag, ropts));
        }
        (ProofResult::Proof(tree, _), TraceLevel::Skeleton) => {
            println!("{status}");
            println!("{}", skeleton(&render(tree, &problem, &opts.tag, RenderOptions::default())));
        }
        (_, TraceLevel::Trace) => println!("(* {status} *)"),
        _ => println!("{status}"),
    }
    Ok(result.is_proof())
}

fn main() -> ExitCode {
    let opts = RunOptions::parse();
    match run(&opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("sdtab: {e}");
            ExitCode::from(2)
        }
    }
}
