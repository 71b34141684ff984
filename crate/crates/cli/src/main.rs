//! Command-line driver: decide sentences, run the quantifier procedure,
//! cross-check against the bounded oracle, or print formula metrics.
//!
//! Exit codes: 0 valid / success, 1 invalid, 2 parse error, 3 resource
//! limit exceeded, 4 internal contract violation.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use expq_core::engine::{decide, decide_prespower, eliminate, SolveConfig, Strategy};
use expq_core::eval::{bounded_witness_search, SamplerSpec};
use expq_core::limits::{Limits, SolveError};
use expq_core::metrics::metrics;
use expq_core::parse::{parse_str, Dialect};
use expq_core::prenex::to_prenex;
use expq_core::render::render;
use expq_core::translate::translate_prespower;
use expq_core::Fragment;

#[derive(Parser)]
#[command(
    name = "expq",
    about = "decision procedures for Presburger arithmetic with powers of two",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Presexp,
    Prespower,
}

#[derive(Clone, Copy, ValueEnum)]
enum FragmentArg {
    Qf,
    Sem,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Backtracking,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Input formula file (UTF-8, one formula, `#` comments).
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "presexp")]
    dialect: DialectArg,
    #[arg(long, value_enum, default_value = "auto")]
    fragment: FragmentArg,
    #[arg(long, value_enum, default_value = "exhaustive")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1_000_000)]
    max_disjuncts: u64,
    #[arg(long, default_value_t = 300)]
    max_seconds: u64,
    /// Write trace events as JSON lines to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Seed for sampling-based cross checks.
    #[arg(long, default_value_t = 0xEC5B)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide sentences (VALID/INVALID) or eliminate quantifiers from open
    /// formulas.
    Decide(CommonArgs),
    /// Print the alternation-free form produced by the procedure.
    Qe(CommonArgs),
    /// Decide and cross-check the verdict against the bounded witness
    /// oracle where one applies.
    CheckOracle(CommonArgs),
    /// Print the parameter report of the formula as JSON.
    Metrics(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, mode) = match &cli.command {
        Command::Decide(a) => (a, "decide"),
        Command::Qe(a) => (a, "qe"),
        Command::CheckOracle(a) => (a, "check-oracle"),
        Command::Metrics(a) => (a, "metrics"),
    };
    if args.input.is_empty() {
        eprintln!("expq: no input files");
        return ExitCode::from(2);
    }
    let mut worst = ExitCode::SUCCESS;
    for path in &args.input {
        let code = match std::panic::catch_unwind(|| run_one(args, mode, path)) {
            Ok(code) => code,
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "unknown panic".into());
                eprintln!("expq: internal contract violation: {msg}");
                ExitCode::from(4)
            }
        };
        if code != ExitCode::SUCCESS {
            worst = code;
        }
    }
    worst
}

fn run_one(args: &CommonArgs, mode: &str, path: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("expq: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let dialect = match args.dialect {
        DialectArg::Presexp => Dialect::PresExp,
        DialectArg::Prespower => Dialect::PresPower,
    };
    let formula = match parse_str(&text, dialect) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("expq: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };

    let cfg = SolveConfig {
        fragment: match args.fragment {
            FragmentArg::Qf => Fragment::Qf,
            FragmentArg::Sem => Fragment::Sem,
            FragmentArg::Auto => Fragment::Qf,
        },
        strategy: match args.strategy {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Backtracking => Strategy::Backtracking,
        },
        limits: Limits {
            max_disjuncts: args.max_disjuncts,
            max_seconds: args.max_seconds,
            ..Limits::default()
        },
        trace: args.trace.is_some(),
        ..SolveConfig::default()
    };

    let outcome = match mode {
        "metrics" => {
            println!(
                "{}",
                serde_json::to_string_pretty(&metrics(&formula).to_json()).unwrap()
            );
            return ExitCode::SUCCESS;
        }
        "qe" => match run_qe(&formula, dialect, &cfg, args) {
            Ok(code) => return code,
            Err(e) => Err(e),
        },
        _ => run_decide(&formula, dialect, &cfg, args, mode == "check-oracle"),
    };
    match outcome {
        Ok(code) => code,
        Err(SolveError::ResourceExceeded {
            reason,
            partial_trace,
        }) => {
            eprintln!("expq: resource limit exceeded: {reason}");
            if let Some(path) = &args.trace {
                let mut text = String::new();
                for ev in &partial_trace {
                    text.push_str(&ev.to_string());
                    text.push('\n');
                }
                let _ = fs::write(path, text);
            }
            ExitCode::from(3)
        }
    }
}

fn run_qe(
    formula: &expq_core::Formula,
    dialect: Dialect,
    cfg: &SolveConfig,
    args: &CommonArgs,
) -> Result<ExitCode, SolveError> {
    let target = if dialect == Dialect::PresPower {
        translate_prespower(formula).to_formula()
    } else {
        formula.clone()
    };
    let mut qe_cfg = cfg.clone();
    if matches!(args.fragment, FragmentArg::Sem) {
        qe_cfg.fragment = Fragment::Sem;
    }
    let out = eliminate(&target, &qe_cfg)?;
    write_trace(args, &out.trace);
    println!("{}", render(&out.formula));
    Ok(ExitCode::SUCCESS)
}

fn run_decide(
    formula: &expq_core::Formula,
    dialect: Dialect,
    cfg: &SolveConfig,
    args: &CommonArgs,
    cross_check: bool,
) -> Result<ExitCode, SolveError> {
    if !formula.free_vars().is_empty() {
        if dialect == Dialect::PresPower {
            eprintln!("expq: open formulas in the prespower dialect are not supported");
            return Ok(ExitCode::from(2));
        }
        let out = eliminate(formula, cfg)?;
        write_trace(args, &out.trace);
        if cross_check && formula.is_quantifier_free() && out.formula.is_quantifier_free() {
            let report = expq_core::eval::sample_equivalence(
                formula,
                &out.formula,
                SamplerSpec {
                    seed: args.seed,
                    ..SamplerSpec::default()
                },
            );
            if report.agrees() {
                eprintln!("oracle: agreement on {} samples", report.samples_tried);
            } else {
                eprintln!("oracle: DISAGREEMENT: {report:?}");
            }
        }
        println!("{}", render(&out.formula));
        return Ok(ExitCode::SUCCESS);
    }
    let verdict = if dialect == Dialect::PresPower {
        let out = decide_prespower(formula, cfg)?;
        write_trace(args, &out.trace);
        eprintln!(
            "stages: sem blocks {} pops {}, qf blocks {} pops {}",
            out.counters_sem.blocks,
            out.counters_sem.pops,
            out.counters_qf.blocks,
            out.counters_qf.pops
        );
        out.verdict
    } else {
        let phi = to_prenex(formula);
        if matches!(cfg.strategy, expq_core::engine::Strategy::Backtracking)
            && phi.is_existential()
            && phi.matrix.is_quantifier_free()
        {
            let (verdict, _) = decide(formula, cfg)?;
            verdict
        } else {
            let (verdict, out) = expq_core::engine::decide_sentence(&phi, cfg)?;
            write_trace(args, &out.trace);
            verdict
        }
    };
    if cross_check {
        cross_check_verdict(formula, dialect, cfg, verdict, args.seed);
    }
    println!("{}", if verdict { "VALID" } else { "INVALID" });
    Ok(if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cross_check_verdict(
    formula: &expq_core::Formula,
    dialect: Dialect,
    _cfg: &SolveConfig,
    verdict: bool,
    seed: u64,
) {
    let phi = if dialect == Dialect::PresPower {
        translate_prespower(formula)
    } else {
        to_prenex(formula)
    };
    let _ = seed;
    if phi.is_existential() && phi.matrix.is_quantifier_free() {
        match bounded_witness_search(&phi, 24) {
            Some(w) => {
                let rendered: Vec<String> =
                    w.iter().map(|(v, x)| format!("{v} = {x}")).collect();
                eprintln!("oracle: witness found ({})", rendered.join(", "));
                if !verdict {
                    eprintln!("oracle: DISAGREEMENT: witness exists but verdict is INVALID");
                }
            }
            None => eprintln!(
                "oracle: no witness within the box (proves nothing without a bound argument); verdict {}",
                if verdict { "VALID" } else { "INVALID" }
            ),
        }
    } else {
        eprintln!("oracle: not applicable to this shape");
    }
}

fn write_trace(args: &CommonArgs, trace: &[expq_core::engine::TraceEvent]) {
    let Some(path) = &args.trace else {
        return;
    };
    let mut out = String::new();
    for ev in trace {
        out.push_str(&serde_json::to_string(ev).unwrap());
        out.push('\n');
    }
    if let Err(e) = fs::File::create(path).and_then(|mut f| f.write_all(out.as_bytes())) {
        eprintln!("expq: cannot write trace {}: {e}", path.display());
    }
}
