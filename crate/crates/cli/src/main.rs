//! Command-line front end: validate and compile game files, solve them under
//! the three solution concepts, run ensembles, and pretty-print traces.
//!
//! Exit codes are part of the interface and stable:
//! 0 success, 1 no equilibrium under `--strict`, 2 validation failure,
//! 3 I/O or parse error, 4 usage error.

mod render;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spacetime_games_core::epr::{
    sample_ensemble_with, EnsembleReport, Execution, SignMap, UtilityModel,
};
use spacetime_games_core::format::{
    parse_game, parse_trace, parse_utilities, serialize, Diagnostic, Document, GameBody,
    GameDocument, TraceDocument,
};
use spacetime_games_core::model::{to_tree, validate_game, GameTree};
use spacetime_games_core::solvers::{
    enumerate_nash, solve_pte, solve_spe, PteResult, PteStatus, SpeError,
};
use spacetime_games_core::spacetime::{compile, validate_spec};

pub const EXIT_NO_EQUILIBRIUM: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO_OR_SYNTAX: u8 = 3;
pub const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "spacetime-games",
    version,
    about = "Model decision setups located in spacetime as games and solve them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a game file and report every violated invariant.
    Validate { path: PathBuf },
    /// Compile a spacetime spec into an extensive game file.
    CompileSpacetime {
        path: PathBuf,
        /// Destination for the compiled `.game.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a game under a solution concept.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum)]
        concept: Concept,
        /// Print the elimination rounds and write a `.trace.json`.
        #[arg(long)]
        trace: bool,
        /// Exit with status 1 when no equilibrium exists.
        #[arg(long)]
        strict: bool,
        /// Where to write the trace (defaults next to the input).
        #[arg(long, requires = "trace")]
        out: Option<PathBuf>,
    },
    /// Draw random utility profiles, solve each game, aggregate statistics.
    EprEnsemble {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// `uniform` or `fixed:<utilities file>`.
        #[arg(long, default_value = "uniform")]
        model: String,
        /// Give both universe sides one shared ranking.
        #[arg(long)]
        shared_universe: bool,
        /// Destination for the report JSON.
        #[arg(long)]
        out: PathBuf,
        /// Also write the conditional tables as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Evaluate samples on a thread pool (same result, fewer seconds).
        #[arg(long)]
        parallel: bool,
        /// Four '+'/'-' characters mapping measured values 0..=3.
        #[arg(long, default_value = "+-+-")]
        sign_map: String,
    },
    /// Pretty-print an existing trace file.
    Explain { path: PathBuf },
}

#[derive(Copy, Clone, ValueEnum)]
enum Concept {
    Spe,
    Nash,
    Pte,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are not errors; everything else is usage
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::CompileSpacetime { path, out } => cmd_compile_spacetime(&path, &out),
        Command::Solve { path, concept, trace, strict, out } => {
            cmd_solve(&path, concept, trace, strict, out.as_deref())
        }
        Command::EprEnsemble {
            samples,
            seed,
            model,
            shared_universe,
            out,
            csv,
            parallel,
            sign_map,
        } => cmd_epr_ensemble(
            samples,
            seed,
            &model,
            shared_universe,
            &out,
            csv.as_deref(),
            parallel,
            &sign_map,
        ),
        Command::Explain { path } => cmd_explain(&path),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO_OR_SYNTAX, format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_IO_OR_SYNTAX, format!("{}: {e}", path.display())))
}

fn parse_failure(path: &Path, diagnostic: Diagnostic) -> Failure {
    Failure::new(EXIT_IO_OR_SYNTAX, format!("{}:{diagnostic}", path.display()))
}

fn read_game(path: &Path) -> Result<GameDocument, Failure> {
    parse_game(&read_text(path)?).map_err(|d| parse_failure(path, d))
}

// ---------------------------------------------------------------------------
// validate

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let doc = read_game(path)?;
    let violations: Vec<String> = match &doc.body {
        GameBody::Extensive(tree) => validate_game(tree)
            .violations
            .iter()
            .map(|v| format!("violation at {}: {v}", v.path()))
            .collect(),
        // a normal-form document that parses is total and well-labeled
        GameBody::Normal(_) => vec![],
        GameBody::Spacetime(spec) => validate_spec(spec)
            .violations
            .iter()
            .map(|v| format!("violation at {}: {v}", v.path()))
            .collect(),
    };
    if violations.is_empty() {
        println!("ok: {} game", doc.body.kind());
        return Ok(());
    }
    for line in &violations {
        println!("{line}");
    }
    Err(Failure::new(
        EXIT_VALIDATION,
        format!("{} violation(s) in {}", violations.len(), path.display()),
    ))
}

// ---------------------------------------------------------------------------
// compile-spacetime

fn cmd_compile_spacetime(path: &Path, out: &Path) -> Result<(), Failure> {
    let doc = read_game(path)?;
    let GameBody::Spacetime(spec) = &doc.body else {
        return Err(Failure::new(
            EXIT_VALIDATION,
            format!("{} is a {} game, not a spacetime spec", path.display(), doc.body.kind()),
        ));
    };
    let report = validate_spec(spec);
    if !report.is_valid() {
        for v in &report.violations {
            println!("violation at {}: {v}", v.path());
        }
        return Err(Failure::new(
            EXIT_VALIDATION,
            format!("{} violation(s) in {}", report.violations.len(), path.display()),
        ));
    }
    let tree = compile(spec)
        .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    let text = serialize(&Document::Game(GameDocument {
        body: GameBody::Extensive(tree.clone()),
    }));
    write_text(out, &text)?;
    println!("{} infosets, {} leaves", tree.infosets().len(), tree.leaf_count());
    if tree.is_perfect_information() {
        println!("all infosets singleton (perfect information)");
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// solve

fn game_tree(path: &Path, body: &GameBody) -> Result<GameTree, Failure> {
    let tree = match body {
        GameBody::Extensive(tree) => tree.clone(),
        GameBody::Normal(nf) => {
            let order: Vec<usize> = (0..nf.agents.len()).collect();
            to_tree(nf, &order).expect("the identity order is a permutation")
        }
        GameBody::Spacetime(spec) => {
            let report = validate_spec(spec);
            if !report.is_valid() {
                return Err(Failure::new(
                    EXIT_VALIDATION,
                    format!(
                        "{} has {} spec violation(s); run validate",
                        path.display(),
                        report.violations.len()
                    ),
                ));
            }
            compile(spec)
                .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display())))?
        }
    };
    let report = validate_game(&tree);
    if !report.is_valid() {
        for v in &report.violations {
            println!("violation at {}: {v}", v.path());
        }
        return Err(Failure::new(
            EXIT_VALIDATION,
            format!("{} violation(s) in {}", report.violations.len(), path.display()),
        ));
    }
    Ok(tree)
}

fn profile_line(tree: &GameTree, profile: &spacetime_games_core::model::StrategyProfile) -> String {
    let parts: Vec<String> = tree
        .infosets()
        .iter()
        .enumerate()
        .map(|(ix, infoset)| format!("{}={}", infoset.id, infoset.menu[profile.action_at(ix)]))
        .collect();
    parts.join(", ")
}

fn cmd_solve(
    path: &Path,
    concept: Concept,
    trace: bool,
    strict: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if trace && !matches!(concept, Concept::Pte) {
        return Err(Failure::new(EXIT_USAGE, "--trace applies to --concept pte only"));
    }
    let doc = read_game(path)?;
    let tree = game_tree(path, &doc.body)?;

    match concept {
        Concept::Spe => {
            let result = solve_spe(&tree).map_err(|e| {
                let code = match e {
                    SpeError::ImperfectInformation(_) | SpeError::Ties(_) => EXIT_VALIDATION,
                };
                Failure::new(code, e.to_string())
            })?;
            println!("spe: {} at {}", result.outcome.payoffs, result.outcome.id);
            println!("profile: {}", profile_line(&tree, &result.profile));
            Ok(())
        }
        Concept::Nash => {
            let equilibria = enumerate_nash(&tree);
            if equilibria.is_empty() {
                println!("nash: no pure equilibrium");
                if strict {
                    return Err(Failure::new(EXIT_NO_EQUILIBRIUM, String::new()));
                }
                return Ok(());
            }
            println!(
                "nash: {} equilibri{}",
                equilibria.len(),
                if equilibria.len() == 1 { "um" } else { "a" }
            );
            for eq in &equilibria {
                println!(
                    "  {} at {} [{}]",
                    eq.outcome.payoffs,
                    eq.outcome.id,
                    profile_line(&tree, &eq.profile)
                );
            }
            Ok(())
        }
        Concept::Pte => {
            let result =
                solve_pte(&tree).map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
            if trace {
                let trace_doc = TraceDocument {
                    concept: "pte".into(),
                    trace: result.trace.clone(),
                };
                print!("{}", render::trace_text(&trace_doc));
                println!();
                let destination = match out {
                    Some(out) => out.to_path_buf(),
                    None => default_trace_path(path),
                };
                write_text(&destination, &serialize(&Document::Trace(trace_doc)))?;
                eprintln!("wrote {}", destination.display());
            }
            print_pte_result(&result);
            if strict && !matches!(result.status, PteStatus::Unique(_)) {
                return Err(Failure::new(EXIT_NO_EQUILIBRIUM, String::new()));
            }
            Ok(())
        }
    }
}

fn print_pte_result(result: &PteResult) {
    match &result.status {
        PteStatus::Unique(outcome) => println!("pte: {} at {}", outcome.payoffs, outcome.id),
        PteStatus::Empty => println!("pte: no equilibrium (elimination emptied the outcome set)"),
        PteStatus::Multiple(survivors) => {
            println!("pte: no equilibrium ({} outcomes survive)", survivors.len())
        }
    }
}

/// `x.game.json` becomes `x.trace.json`; anything else gains the suffix.
fn default_trace_path(input: &Path) -> PathBuf {
    let name = input.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let new_name = match name.strip_suffix(".game.json") {
        Some(stem) => format!("{stem}.trace.json"),
        None => format!("{name}.trace.json"),
    };
    input.with_file_name(new_name)
}

// ---------------------------------------------------------------------------
// epr-ensemble

#[allow(clippy::too_many_arguments)]
fn cmd_epr_ensemble(
    samples: u64,
    seed: u64,
    model_arg: &str,
    shared_universe: bool,
    out: &Path,
    csv: Option<&Path>,
    parallel: bool,
    sign_map: &str,
) -> Result<(), Failure> {
    let sign = SignMap::parse(sign_map)
        .ok_or_else(|| Failure::new(EXIT_USAGE, "--sign-map wants four '+' or '-' characters"))?;

    let model = if model_arg == "uniform" {
        UtilityModel::uniform(shared_universe)
    } else if let Some(file) = model_arg.strip_prefix("fixed:") {
        let path = Path::new(file);
        let mut spec = parse_utilities(&read_text(path)?).map_err(|d| parse_failure(path, d))?;
        spec.shared_universe = spec.shared_universe || shared_universe;
        spec.into_model(model_arg.to_owned())
            .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display())))?
    } else {
        return Err(Failure::new(EXIT_USAGE, "--model is `uniform` or `fixed:<path>`"));
    };

    let execution = if parallel { Execution::Parallel } else { Execution::Serial };
    let report = sample_ensemble_with(samples, seed, &model, execution, sign)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;

    write_text(out, &serialize(&Document::Report(report.clone())))?;
    eprintln!("wrote {}", out.display());
    if let Some(csv_path) = csv {
        write_text(csv_path, &csv_text(&report))?;
        eprintln!("wrote {}", csv_path.display());
    }

    match &report.chsh.s {
        Some(s) => println!(
            "{} samples, {} without equilibrium, S = {s}",
            report.samples, report.no_pte
        ),
        None => println!(
            "{} samples, {} without equilibrium, S undefined (some measurement pair has no support)",
            report.samples, report.no_pte
        ),
    }
    Ok(())
}

/// Conditional tables as rows of `pair,u,v,count,share` for plotting.
fn csv_text(report: &EnsembleReport) -> String {
    let mut out = String::from("pair,u,v,count,share\n");
    for pair in 0..4 {
        let total: u64 = report.counts[pair].iter().sum();
        for (joint, label) in spacetime_games_core::epr::joint_labels(pair).iter().enumerate() {
            let (u, v) = label.split_once('/').expect("joint labels are u/v");
            let count = report.counts[pair][joint];
            let share = if total == 0 { 0.0 } else { count as f64 / total as f64 };
            let _ = writeln!(
                out,
                "{},{u},{v},{count},{share}",
                spacetime_games_core::epr::PAIR_LABELS[pair]
            );
        }
    }
    out
}

// ---------------------------------------------------------------------------
// explain

fn cmd_explain(path: &Path) -> Result<(), Failure> {
    let doc = parse_trace(&read_text(path)?).map_err(|d| parse_failure(path, d))?;
    print!("{}", render::trace_text(&doc));
    Ok(())
}
