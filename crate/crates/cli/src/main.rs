//! `spectrum`: equivalence checking, spectrum reports, formula evaluation and
//! distinguishing-formula generation for finite LTSs and GPSs.
//!
//! Exit codes: 0 the command ran (verdicts never change the exit code),
//! 2 usage error, 3 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spectrum_core::engine::{
    beta_sequence, check_monad_laws, stabilization_depth, LawReport,
};
use spectrum_core::logic::{eval_state, parse_formula, render_formula, Vocabulary};
use spectrum_core::model::{parse_aut, parse_gps, TransitionModel};
use spectrum_core::oracles::full_trace_like_equivalent;
use spectrum_core::separators::{distinguish, SeparationWitness};
use spectrum_core::theory::{names_of, normalize_with, parse_term, render_nf};
use spectrum_core::SemanticsId;

#[derive(Parser)]
#[command(name = "spectrum", version, about = "Process equivalences along the linear time - branching time spectrum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn semantics_parser(s: &str) -> Result<SemanticsId, String> {
    s.parse()
}

#[derive(Subcommand)]
enum Command {
    /// Decide graded equivalence of two states, depth by depth.
    Check {
        #[arg(long, value_parser = semantics_parser)]
        semantics: SemanticsId,
        /// Two state indices, comma-separated.
        #[arg(long)]
        states: String,
        /// Depth bound; defaults to the stabilization depth (coinductive
        /// semantics) or twice the state count plus the automata oracle
        /// (trace-like semantics).
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        model: PathBuf,
    },
    /// Produce a distinguishing formula for two states, if any.
    Distinguish {
        #[arg(long, value_parser = semantics_parser)]
        semantics: SemanticsId,
        #[arg(long)]
        states: String,
        #[arg(long)]
        max_depth: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        model: PathBuf,
    },
    /// Evaluate a formula at states.
    Eval {
        #[arg(long, value_parser = semantics_parser)]
        semantics: SemanticsId,
        #[arg(long)]
        formula: String,
        /// State indices, comma-separated.
        #[arg(long)]
        states: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        model: PathBuf,
    },
    /// Verdicts for two states under every applicable semantics.
    Report {
        #[arg(long)]
        states: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        model: PathBuf,
    },
    /// Print the depth-indexed behaviour of states in canonical text form.
    Beta {
        #[arg(long, value_parser = semantics_parser)]
        semantics: SemanticsId,
        #[arg(long)]
        states: String,
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        model: PathBuf,
    },
    /// Normalize a term of a graded theory.
    Normalize {
        #[arg(long, value_parser = semantics_parser)]
        semantics: SemanticsId,
        #[arg(long)]
        term: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the depth-1 six-tuple laws on small carriers.
    Laws {
        #[arg(long, value_parser = semantics_parser)]
        semantics: SemanticsId,
        /// Carrier sizes, comma-separated.
        #[arg(long, default_value = "0,1,2")]
        sizes: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Input-level failure: exit code 3 with a message.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn load_model(path: &Path) -> Result<TransitionModel, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let looks_json = text.trim_start().starts_with('{');
    let is_gps = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("gps") | Some("json")
    ) || looks_json;
    if is_gps {
        Ok(TransitionModel::from(parse_gps(&text).map_err(|e| {
            InputError(format!("{}: {e}", path.display()))
        })?))
    } else {
        Ok(TransitionModel::from(parse_aut(&text).map_err(|e| {
            InputError(format!("{}: {e}", path.display()))
        })?))
    }
}

fn parse_state_list(s: &str, model: &TransitionModel) -> Result<Vec<u32>, InputError> {
    let states: Vec<u32> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| InputError(format!("bad state index {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    for &x in &states {
        if x >= model.num_states() {
            return Err(InputError(format!(
                "state index {x} out of range (model has {} states)",
                model.num_states()
            )));
        }
    }
    Ok(states)
}

fn parse_state_pair(s: &str, model: &TransitionModel) -> Result<(u32, u32), InputError> {
    let states = parse_state_list(s, model)?;
    match states[..] {
        [x, y] => Ok((x, y)),
        _ => Err(InputError("--states expects exactly two indices".into())),
    }
}

/// Default depth policy: stabilization for the coinductive semantics,
/// 2 * num_states for the trace-like ones (the automata oracle supplies the
/// unbounded verdict where available).
fn default_depth(model: &TransitionModel, sem: SemanticsId) -> u32 {
    if sem.is_coinductive() {
        stabilization_depth(model, sem).expect("coinductive")
    } else {
        2 * model.num_states()
    }
}

fn equivalence_by_depth(
    model: &TransitionModel,
    sem: SemanticsId,
    x: u32,
    y: u32,
    depth: u32,
) -> Result<Vec<bool>, InputError> {
    let rows = beta_sequence(model, sem, depth)?;
    let mut out = Vec::with_capacity(depth as usize + 1);
    let mut all = true;
    for row in &rows {
        all = all && row[x as usize] == row[y as usize];
        out.push(all);
    }
    Ok(out)
}

fn unbounded_verdict(
    model: &TransitionModel,
    sem: SemanticsId,
    x: u32,
    y: u32,
) -> Option<bool> {
    if sem.is_trace_like() && sem != SemanticsId::ProbabilisticTrace {
        Some(full_trace_like_equivalent(model, sem, x, y).expect("applicable"))
    } else {
        None
    }
}

fn run_check(
    sem: SemanticsId,
    states: &str,
    depth: Option<u32>,
    format: Format,
    path: &Path,
) -> Result<(), InputError> {
    let model = load_model(path)?;
    let (x, y) = parse_state_pair(states, &model)?;
    let defaulted = depth.is_none();
    let depth = depth.unwrap_or_else(|| default_depth(&model, sem));
    let per_depth = equivalence_by_depth(&model, sem, x, y, depth)?;
    let first_diff = per_depth.iter().position(|eq| !eq);
    let oracle = if defaulted {
        unbounded_verdict(&model, sem, x, y)
    } else {
        None
    };
    match format {
        Format::Text => {
            for (k, eq) in per_depth.iter().enumerate() {
                println!(
                    "depth {k}: {}",
                    if *eq { "equivalent" } else { "inequivalent" }
                );
            }
            match first_diff {
                Some(k) => println!("inequivalent at depth {k}"),
                None => println!("equivalent up to depth {depth}"),
            }
            if let Some(full) = oracle {
                println!(
                    "all depths: {} (automata oracle)",
                    if full { "equivalent" } else { "inequivalent" }
                );
            }
        }
        Format::Json => {
            let payload = json!({
                "schema": "spectrum/check/1",
                "semantics": sem.name(),
                "states": [x, y],
                "per_depth": per_depth
                    .iter()
                    .enumerate()
                    .map(|(k, eq)| json!({"depth": k, "equivalent": eq}))
                    .collect::<Vec<_>>(),
                "first_inequivalent_depth": first_diff,
                "equivalent_up_to_depth": if first_diff.is_none() { Some(depth) } else { None },
                "unbounded": oracle.map(|full| json!({
                    "method": "automata-oracle",
                    "equivalent": full,
                })),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }
    Ok(())
}

fn witness_json(w: &SeparationWitness, vocab: &Vocabulary) -> serde_json::Value {
    json!({
        "formula": w.render(vocab),
        "depth": w.depth,
        "value_x": w.value_x.to_string(),
        "value_y": w.value_y.to_string(),
    })
}

fn run_distinguish(
    sem: SemanticsId,
    states: &str,
    max_depth: Option<u32>,
    format: Format,
    path: &Path,
) -> Result<(), InputError> {
    let model = load_model(path)?;
    let (x, y) = parse_state_pair(states, &model)?;
    let defaulted = max_depth.is_none();
    let max_depth = max_depth.unwrap_or_else(|| default_depth(&model, sem));
    let vocab = Vocabulary::new(sem, model.alphabet())?;
    let witness = distinguish(&model, sem, x, y, max_depth)?;
    let oracle = if defaulted && witness.is_none() {
        unbounded_verdict(&model, sem, x, y)
    } else {
        None
    };
    match format {
        Format::Text => match &witness {
            Some(w) => {
                println!("{}", w.render(&vocab));
                println!(
                    "depth {}: state {x} evaluates to {}, state {y} to {}",
                    w.depth, w.value_x, w.value_y
                );
            }
            None => {
                println!("equivalent up to depth {max_depth}");
                if let Some(full) = oracle {
                    println!(
                        "all depths: {} (automata oracle)",
                        if full { "equivalent" } else { "inequivalent" }
                    );
                }
            }
        },
        Format::Json => {
            let payload = json!({
                "schema": "spectrum/distinguish/1",
                "semantics": sem.name(),
                "states": [x, y],
                "max_depth": max_depth,
                "witness": witness.as_ref().map(|w| witness_json(w, &vocab)),
                "unbounded": oracle.map(|full| json!({
                    "method": "automata-oracle",
                    "equivalent": full,
                })),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }
    Ok(())
}

fn run_eval(
    sem: SemanticsId,
    formula: &str,
    states: &str,
    format: Format,
    path: &Path,
) -> Result<(), InputError> {
    let model = load_model(path)?;
    let states = parse_state_list(states, &model)?;
    let vocab = Vocabulary::new(sem, model.alphabet())?;
    let f = parse_formula(formula, &vocab)?;
    let values: Vec<String> = states
        .iter()
        .map(|&x| eval_state(&f, &model, x, &vocab).map(|v| v.to_string()))
        .collect::<Result<_, _>>()?;
    match format {
        Format::Text => {
            if values.len() == 1 {
                println!("{}", values[0]);
            } else {
                for (x, v) in states.iter().zip(&values) {
                    println!("state {x}: {v}");
                }
            }
        }
        Format::Json => {
            let payload = json!({
                "schema": "spectrum/eval/1",
                "semantics": sem.name(),
                "formula": render_formula(&f, vocab.alphabet()),
                "results": states
                    .iter()
                    .zip(&values)
                    .map(|(x, v)| json!({"state": x, "value": v}))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }
    Ok(())
}

struct ReportRow {
    semantics: SemanticsId,
    equivalent: bool,
    scope: String,
    method: String,
    witness: Option<(String, u32)>,
}

fn build_report(
    model: &TransitionModel,
    x: u32,
    y: u32,
) -> Result<Vec<ReportRow>, InputError> {
    let mut rows = Vec::new();
    for sem in SemanticsId::ALL {
        if !sem.applies_to(model.kind()) {
            continue;
        }
        let (equivalent, scope, method) = if sem.is_coinductive() {
            let n = stabilization_depth(model, sem)?;
            let eq = spectrum_core::engine::equivalent(model, sem, x, y, n)?;
            (eq, "all-depths".to_string(), format!("fixpoint(depth {n})"))
        } else if sem == SemanticsId::ProbabilisticTrace {
            let bound = 2 * model.num_states();
            let eq = spectrum_core::engine::equivalent(model, sem, x, y, bound)?;
            (
                eq,
                format!("up-to-depth {bound}"),
                format!("graded-bounded(depth {bound})"),
            )
        } else {
            let eq = full_trace_like_equivalent(model, sem, x, y)?;
            (eq, "all-depths".to_string(), "automata-oracle".to_string())
        };
        let witness = if !equivalent && sem.has_vocabulary() {
            let vocab = Vocabulary::new(sem, model.alphabet())?;
            distinguish(model, sem, x, y, 2 * model.num_states() + 2)?
                .map(|w| (w.render(&vocab), w.depth))
        } else {
            None
        };
        rows.push(ReportRow {
            semantics: sem,
            equivalent,
            scope,
            method,
            witness,
        });
    }
    assert_spectrum_consistency(&rows);
    Ok(rows)
}

/// Verdicts must respect the inclusion lattice; a violation is a hard
/// internal error.
fn assert_spectrum_consistency(rows: &[ReportRow]) {
    use SemanticsId::*;
    let verdict = |sem: SemanticsId| rows.iter().find(|r| r.semantics == sem).map(|r| r.equivalent);
    let implications = [
        (Bisimilarity, ReadySimulation),
        (ReadySimulation, Simulation),
        (ReadySimulation, ReadyTrace),
        (ReadyTrace, Readiness),
        (ReadyTrace, FailureTrace),
        (FailureTrace, Failures),
        (Readiness, Failures),
        (Failures, CompletedTrace),
        (CompletedTrace, Trace),
        (Simulation, Trace),
    ];
    for (finer, coarser) in implications {
        if let (Some(true), Some(false)) = (verdict(finer), verdict(coarser)) {
            panic!(
                "internal error: spectrum violation, {finer} equivalent but {coarser} not"
            );
        }
    }
}

fn run_report(states: &str, format: Format, path: &Path) -> Result<(), InputError> {
    let model = load_model(path)?;
    let (x, y) = parse_state_pair(states, &model)?;
    let rows = build_report(&model, x, y)?;
    match format {
        Format::Text => {
            println!("states {x} and {y}:");
            for row in &rows {
                let verdict = if row.equivalent {
                    "equivalent"
                } else {
                    "inequivalent"
                };
                let witness = match &row.witness {
                    Some((f, d)) => format!("  witness (depth {d}): {f}"),
                    None => String::new(),
                };
                println!(
                    "  {:<20} {verdict:<13} [{}, {}]{witness}",
                    row.semantics.name(),
                    row.scope,
                    row.method,
                );
            }
        }
        Format::Json => {
            let payload = json!({
                "schema": "spectrum/report/1",
                "states": [x, y],
                "rows": rows
                    .iter()
                    .map(|r| json!({
                        "semantics": r.semantics.name(),
                        "equivalent": r.equivalent,
                        "scope": r.scope,
                        "method": r.method,
                        "witness": r.witness.as_ref().map(|(f, d)| json!({
                            "formula": f,
                            "depth": d,
                        })),
                    }))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }
    Ok(())
}

fn run_beta(
    sem: SemanticsId,
    states: &str,
    depth: u32,
    format: Format,
    path: &Path,
) -> Result<(), InputError> {
    let model = load_model(path)?;
    let states = parse_state_list(states, &model)?;
    let rows = beta_sequence(&model, sem, depth)?;
    let row = &rows[depth as usize];
    match format {
        Format::Text => {
            for &x in &states {
                println!(
                    "state {x}: {}",
                    row[x as usize].render(model.alphabet())
                );
            }
        }
        Format::Json => {
            let payload = json!({
                "schema": "spectrum/beta/1",
                "semantics": sem.name(),
                "depth": depth,
                "values": states
                    .iter()
                    .map(|&x| json!({
                        "state": x,
                        "value": row[x as usize].render(model.alphabet()),
                    }))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }
    Ok(())
}

fn run_normalize(sem: SemanticsId, term: &str, format: Format) -> Result<(), InputError> {
    let t = parse_term(term)?;
    let names = names_of(&[&t]);
    let n = normalize_with(sem, &t, names)?;
    let rendered = render_nf(&n.nf, &n.names);
    let depth = if n.depth.rigid {
        format!("{}", n.depth.min)
    } else {
        format!(">= {}", n.depth.min)
    };
    match format {
        Format::Text => {
            println!("depth: {depth}");
            println!("normal form: {rendered}");
        }
        Format::Json => {
            let payload = json!({
                "schema": "spectrum/normalize/1",
                "theory": sem.name(),
                "depth": depth,
                "normal_form": rendered,
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }
    Ok(())
}

fn run_laws(sem: SemanticsId, sizes: &str, seed: u64, format: Format) -> Result<(), InputError> {
    let sizes: Vec<u32> = sizes
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| InputError(format!("bad carrier size {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    if sizes.iter().any(|&s| s > 4) {
        return Err(InputError("carrier sizes are limited to at most 4".into()));
    }
    let report: LawReport = check_monad_laws(sem, &sizes, seed);
    match format {
        Format::Text => {
            for r in &report.results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("{status} {} ({} instances)", r.law, r.checked);
                if let Some(w) = &r.witness {
                    println!("  witness: {w}");
                }
            }
        }
        Format::Json => {
            let payload = json!({
                "schema": "spectrum/laws/1",
                "semantics": sem.name(),
                "carrier_sizes": report.carrier_sizes,
                "laws": report.results
                    .iter()
                    .map(|r| json!({
                        "law": r.law,
                        "passed": r.passed,
                        "checked": r.checked,
                        "witness": r.witness,
                    }))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), InputError> {
    match cli.command {
        Command::Check {
            semantics,
            states,
            depth,
            format,
            model,
        } => run_check(semantics, &states, depth, format, &model),
        Command::Distinguish {
            semantics,
            states,
            max_depth,
            format,
            model,
        } => run_distinguish(semantics, &states, max_depth, format, &model),
        Command::Eval {
            semantics,
            formula,
            states,
            format,
            model,
        } => run_eval(semantics, &formula, &states, format, &model),
        Command::Report {
            states,
            format,
            model,
        } => run_report(&states, format, &model),
        Command::Beta {
            semantics,
            states,
            depth,
            format,
            model,
        } => run_beta(semantics, &states, depth, format, &model),
        Command::Normalize {
            semantics,
            term,
            format,
        } => run_normalize(semantics, &term, format),
        Command::Laws {
            semantics,
            sizes,
            seed,
            format,
        } => run_laws(semantics, &sizes, seed, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
