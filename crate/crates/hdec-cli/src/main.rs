//! Command-line front end: parse a problem file, run the requested
//! decision, and report the result as text or as one JSON object.
//!
//! Exit codes are a total function of the verdict:
//!
//! * `0` — the property holds (consistent / lossless / globally consistent)
//! * `1` — the property fails; a witness is part of the report
//! * `2` — unsupported constraint combination
//! * `3` — unreadable input, parse or validation error, bad flags
//! * `4` — search budget exhausted
//! * `70` — internal invariant failure (oracle mismatch, witness self-check)

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use hdec_core::cformula::{CFormula, Mode};
use hdec_core::decide::{
    check_consistency, check_global_consistency, check_losslessness, ConsistencyVerdict,
    DecideError, DecideOptions, GlobalConsistencyVerdict, LosslessnessVerdict, Witness,
};
use hdec_core::dimacs::parse_dimacs;
use hdec_core::encode::{encode_cdcs, encode_views, CVarGen, Valuation, VarP};
use hdec_core::model::{classify_fd, classify_uind, Instance, Problem, Tuple, UindKind};
use hdec_core::oracle::{
    brute_force_consistency, brute_force_global_consistency, brute_force_losslessness,
    problem_bound, sat_to_consistency, unsat_to_losslessness,
};
use hdec_core::parse::parse_problem;
use hdec_core::print::problem_to_text;
use hdec_core::separability::{
    dp_closure, extend_to_uind_model, separability_pipeline, PipelineLog, SepError,
    SeparabilityOutcome, TheoremTag, UnsupportedReason,
};
use hdec_core::solver::SolverError;

const EXIT_HOLDS: i32 = 0;
const EXIT_FAILS: i32 = 1;
const EXIT_UNSUPPORTED: i32 = 2;
const EXIT_INPUT: i32 = 3;
const EXIT_RESOURCE: i32 = 4;
const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(
    name = "hdec",
    version,
    about = "Decides consistency and losslessness of horizontal decompositions \
             under conditional domain constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the constraints admit a legal tuple
    Consistency(DecideArgs),
    /// Decide whether the views cover every legal tuple
    Losslessness(DecideArgs),
    /// Decide whether every equality pattern admits a legal tuple
    GlobalConsistency(DecideArgs),
    /// Print the domain-propagation closure of the constraints
    Closure(DecideArgs),
    /// Classify the constraints and report the reduction without deciding
    Classify(DecideArgs),
    /// Generate a problem file from a DIMACS CNF formula
    Reduce {
        /// Which reduction to apply
        #[arg(value_enum)]
        direction: Direction,
        /// DIMACS CNF input file
        file: PathBuf,
    },
    /// Decide losslessness and report the counterexample in full
    Witness(DecideArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Satisfiable formula if and only if consistent constraints
    Sat,
    /// Unsatisfiable formula if and only if lossless decomposition
    Unsat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Utvpi,
    Butvpi,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Utvpi => Mode::Utvpi,
            ModeArg::Butvpi => Mode::Butvpi,
        }
    }
}

#[derive(Args)]
struct DecideArgs {
    /// Problem file in the constraint DSL
    file: PathBuf,
    /// Emit one JSON object instead of human-readable text
    #[arg(long)]
    json: bool,
    /// Override the file's declared atom language
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Node budget for the Boolean-mode search
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Worker threads for the valuation sweep
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Cross-check the verdict against brute-force enumeration
    #[arg(long)]
    oracle: bool,
}

impl DecideArgs {
    fn options(&self) -> DecideOptions {
        DecideOptions { budget: self.budget, parallel: self.parallel }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_INPUT } else { EXIT_HOLDS };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Consistency(args) => run_consistency(&args),
        Command::Losslessness(args) => run_losslessness(&args, false),
        Command::GlobalConsistency(args) => run_global_consistency(&args),
        Command::Closure(args) => run_closure(&args),
        Command::Classify(args) => run_classify(&args),
        Command::Reduce { direction, file } => run_reduce(direction, &file),
        Command::Witness(args) => run_losslessness(&args, true),
    };
    std::process::exit(code);
}

// ---------------------------------------------------------------- plumbing

fn load(args: &DecideArgs) -> Result<Problem, i32> {
    let text = fs::read_to_string(&args.file).map_err(|err| {
        eprintln!("error: {}: {err}", args.file.display());
        EXIT_INPUT
    })?;
    parse_problem(&text, args.mode.map(Mode::from)).map_err(|err| {
        eprintln!("error: {}: {err}", args.file.display());
        EXIT_INPUT
    })
}

fn decide_error(err: DecideError) -> i32 {
    eprintln!("error: {err}");
    match err {
        DecideError::Solver(SolverError::ResourceLimit { .. }) => EXIT_RESOURCE,
        _ => EXIT_INTERNAL,
    }
}

fn sep_error(err: SepError) -> i32 {
    match err {
        SepError::Decide(inner) => decide_error(inner),
        SepError::NotDpControllable { .. } => {
            eprintln!("unsupported: {err}");
            EXIT_UNSUPPORTED
        }
        SepError::PreconditionViolated { .. } => {
            eprintln!("error: {err}");
            EXIT_INTERNAL
        }
    }
}

fn oracle_mismatch(what: &str) -> i32 {
    eprintln!("internal error: the {what} verdict contradicts the brute-force oracle");
    EXIT_INTERNAL
}

/// The declared propositional variables of the encoding the verdict came
/// from, for rendering valuations with their full variable set.
fn var_p_for(problem: &Problem, with_views: bool) -> VarP {
    let mut gen = CVarGen::new();
    let (cdc_theory, _) = encode_cdcs(&problem.cdcs, &mut gen);
    if with_views {
        let (view_theory, _) = encode_views(&problem.views, &mut gen);
        VarP::from_theories([&cdc_theory, &view_theory])
    } else {
        VarP::from_theories([&cdc_theory])
    }
}

fn render_formulas(set: &BTreeSet<CFormula>) -> String {
    let parts: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn formulas_json(set: &BTreeSet<CFormula>) -> Value {
    json!(set.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn valuation_json(valuation: &Valuation, var_p: &VarP) -> Value {
    let mut map = Map::new();
    for (position, constant, value) in valuation.assignments(var_p) {
        map.insert(format!("p{position}^{constant}"), json!(value));
    }
    Value::Object(map)
}

fn tuple_json(tuple: &Tuple) -> Value {
    json!({
        "x": tuple.x.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "y": tuple.y,
    })
}

fn checked_json(checked: &[(Valuation, BTreeSet<CFormula>)], var_p: &VarP) -> Value {
    json!(checked
        .iter()
        .map(|(valuation, set)| {
            json!({
                "valuation": valuation_json(valuation, var_p),
                "filtered_formulas": formulas_json(set),
            })
        })
        .collect::<Vec<_>>())
}

/// Prints the report.  JSON reports always carry the same top-level keys so
/// downstream diffing never has to special-case the verdict.
fn emit(as_json: bool, human: Vec<String>, mut fields: Map<String, Value>, started: Instant) {
    if as_json {
        for key in ["verdict", "theorem_tag", "witness", "valuation", "filtered_formulas"] {
            fields.entry(key).or_insert(Value::Null);
        }
        fields.insert("timing_ms".into(), json!(started.elapsed().as_millis() as u64));
        println!("{}", serde_json::to_string_pretty(&Value::Object(fields)).expect("serializable"));
    } else {
        for line in human {
            println!("{line}");
        }
    }
}

fn witness_lines(witness: &Witness, var_p: &VarP, lines: &mut Vec<String>) {
    lines.push(format!("valuation: {}", witness.valuation.render(var_p)));
    lines.push(format!("filtered: {}", render_formulas(&witness.filtered)));
    lines.push(format!("witness: {}", witness.tuple));
}

fn witness_fields(witness: &Witness, var_p: &VarP, fields: &mut Map<String, Value>) {
    fields.insert("witness".into(), tuple_json(&witness.tuple));
    fields.insert("valuation".into(), valuation_json(&witness.valuation, var_p));
    fields.insert("filtered_formulas".into(), formulas_json(&witness.filtered));
}

// ------------------------------------------------------------- subcommands

fn run_consistency(args: &DecideArgs) -> i32 {
    let started = Instant::now();
    let problem = match load(args) {
        Ok(problem) => problem,
        Err(code) => return code,
    };
    let verdict = match check_consistency(&problem, &args.options()) {
        Ok(verdict) => verdict,
        Err(err) => return decide_error(err),
    };
    if args.oracle {
        let expected = brute_force_consistency(&problem, problem_bound(&problem)).is_some();
        if expected != matches!(verdict, ConsistencyVerdict::Consistent(_)) {
            return oracle_mismatch("consistency");
        }
    }
    let var_p = var_p_for(&problem, false);
    let mut fields = Map::new();
    match verdict {
        ConsistencyVerdict::Consistent(witness) => {
            let mut human = vec!["CONSISTENT".to_string()];
            witness_lines(&witness, &var_p, &mut human);
            fields.insert("verdict".into(), json!("Consistent"));
            witness_fields(&witness, &var_p, &mut fields);
            emit(args.json, human, fields, started);
            EXIT_HOLDS
        }
        ConsistencyVerdict::Inconsistent { checked } => {
            let mut human = vec!["INCONSISTENT".to_string()];
            for (valuation, set) in &checked {
                human.push(format!(
                    "  {}: unsatisfiable {}",
                    valuation.render(&var_p),
                    render_formulas(set)
                ));
            }
            fields.insert("verdict".into(), json!("Inconsistent"));
            fields.insert("checked".into(), checked_json(&checked, &var_p));
            emit(args.json, human, fields, started);
            EXIT_FAILS
        }
    }
}

/// The human form of the applied-theorem note.  The FD-only case reports
/// the dropped dependencies (or `none`); other cases mention them only when
/// any were dropped.
fn theorem_note(tag: TheoremTag, log: &PipelineLog) -> String {
    let dropped: Vec<String> = log.dropped_fds.iter().map(ToString::to_string).collect();
    match tag {
        TheoremTag::FdOnly if dropped.is_empty() => format!("{tag}(none)"),
        _ if dropped.is_empty() => tag.to_string(),
        _ => format!("{tag}({})", dropped.join("; ")),
    }
}

fn unsupported_report(
    args: &DecideArgs,
    problem: &Problem,
    reason: &UnsupportedReason,
    started: Instant,
) -> i32 {
    let mut human = vec![format!("UNSUPPORTED: {reason}")];
    let mut fields = Map::new();
    fields.insert("verdict".into(), json!("Unsupported"));
    fields.insert("reason".into(), json!(reason.to_string()));
    match reason {
        UnsupportedReason::NeitherGcNorDisjoint { gc_valuation, gc_filtered, uind, violation } => {
            let var_p = var_p_for(problem, false);
            human.push(format!(
                "  global consistency fails at {}: unsatisfiable {}",
                gc_valuation.render(&var_p),
                render_formulas(gc_filtered)
            ));
            human.push(format!("  disjointness fails for {uind}: {violation}"));
            fields.insert("gc_valuation".into(), valuation_json(gc_valuation, &var_p));
            fields.insert("gc_filtered".into(), formulas_json(gc_filtered));
            fields.insert("uind".into(), json!(uind.to_string()));
            fields.insert("disjoint_violation".into(), json!(violation.to_string()));
        }
        UnsupportedReason::FdClassWithUind { fd, fd_class, uind, uind_kind } => {
            human.push(format!("  {fd} is {fd_class}; {uind} is {uind_kind}"));
            fields.insert("fd".into(), json!(fd.to_string()));
            fields.insert("uind".into(), json!(uind.to_string()));
        }
        UnsupportedReason::XUindWithFd { uind, fd } => {
            human.push(format!("  {uind} cannot be combined with {fd}"));
            fields.insert("fd".into(), json!(fd.to_string()));
            fields.insert("uind".into(), json!(uind.to_string()));
        }
        UnsupportedReason::NotDpControllable { .. } => {}
    }
    emit(args.json, human, fields, started);
    EXIT_UNSUPPORTED
}

fn run_losslessness(args: &DecideArgs, full_witness: bool) -> i32 {
    let started = Instant::now();
    let problem = match load(args) {
        Ok(problem) => problem,
        Err(code) => return code,
    };
    let opts = args.options();
    let (outcome, log) = match separability_pipeline(&problem, &opts) {
        Ok(pair) => pair,
        Err(err) => return decide_error(err),
    };
    let (cdcs, applied) = match outcome {
        SeparabilityOutcome::Unsupported { reason } => {
            return unsupported_report(args, &problem, &reason, started);
        }
        SeparabilityOutcome::Reduced { cdcs, applied } => (cdcs, applied),
    };
    let mut reduced = problem.clone();
    reduced.cdcs = cdcs;
    reduced.uinds.clear();
    reduced.fds.clear();
    let verdict = match check_losslessness(&reduced, &opts) {
        Ok(verdict) => verdict,
        Err(err) => return decide_error(err),
    };
    if args.oracle {
        let expected = brute_force_losslessness(&reduced, problem_bound(&reduced)).is_some();
        if expected != matches!(verdict, LosslessnessVerdict::Lossy(_)) {
            return oracle_mismatch("losslessness");
        }
    }
    let note = theorem_note(applied, &log);
    let var_p = var_p_for(&reduced, true);
    let mut fields = Map::new();
    fields.insert("theorem_tag".into(), json!(applied.to_string()));
    if !log.dropped_fds.is_empty() {
        fields.insert(
            "dropped_fds".into(),
            json!(log.dropped_fds.iter().map(ToString::to_string).collect::<Vec<_>>()),
        );
    }
    if !log.derived_cdcs.is_empty() {
        fields.insert(
            "derived_cdcs".into(),
            json!(log.derived_cdcs.iter().map(ToString::to_string).collect::<Vec<_>>()),
        );
    }
    match verdict {
        LosslessnessVerdict::Lossless { checked } => {
            let mut human = vec![format!("LOSSLESS, theorem: {note}")];
            for (valuation, set) in &checked {
                human.push(format!(
                    "  {}: unsatisfiable {}",
                    valuation.render(&var_p),
                    render_formulas(set)
                ));
            }
            fields.insert("verdict".into(), json!("Lossless"));
            fields.insert("checked".into(), checked_json(&checked, &var_p));
            emit(args.json, human, fields, started);
            EXIT_HOLDS
        }
        LosslessnessVerdict::Lossy(witness) => {
            let mut human = vec![format!("LOSSY, theorem: {note}")];
            witness_lines(&witness, &var_p, &mut human);
            fields.insert("verdict".into(), json!("Lossy"));
            witness_fields(&witness, &var_p, &mut fields);
            if full_witness && !problem.uinds.is_empty() {
                let single = Instance::from_tuples([witness.tuple.clone()]);
                let extended = match extend_to_uind_model(
                    &single,
                    &problem.cdcs,
                    &problem.uinds,
                    &problem.schema,
                    &opts,
                ) {
                    Ok(extended) => extended,
                    Err(err) => return sep_error(err),
                };
                human.push("completion:".to_string());
                for tuple in &extended.tuples {
                    human.push(format!("  {tuple}"));
                }
                fields.insert(
                    "completion".into(),
                    json!(extended.tuples.iter().map(tuple_json).collect::<Vec<_>>()),
                );
            }
            emit(args.json, human, fields, started);
            EXIT_FAILS
        }
    }
}

fn run_global_consistency(args: &DecideArgs) -> i32 {
    let started = Instant::now();
    let problem = match load(args) {
        Ok(problem) => problem,
        Err(code) => return code,
    };
    let verdict = match check_global_consistency(&problem, &args.options()) {
        Ok(verdict) => verdict,
        Err(err) => return decide_error(err),
    };
    if args.oracle {
        let expected = brute_force_global_consistency(&problem, problem_bound(&problem)).is_none();
        if expected != matches!(verdict, GlobalConsistencyVerdict::GloballyConsistent { .. }) {
            return oracle_mismatch("global-consistency");
        }
    }
    let var_p = var_p_for(&problem, false);
    let mut fields = Map::new();
    match verdict {
        GlobalConsistencyVerdict::GloballyConsistent { checked } => {
            let human = vec![
                "GLOBALLY CONSISTENT".to_string(),
                format!("  {} valuations checked", checked.len()),
            ];
            fields.insert("verdict".into(), json!("GloballyConsistent"));
            fields.insert("checked".into(), checked_json(&checked, &var_p));
            emit(args.json, human, fields, started);
            EXIT_HOLDS
        }
        GlobalConsistencyVerdict::NotGloballyConsistent { valuation, filtered } => {
            let human = vec![
                "NOT GLOBALLY CONSISTENT".to_string(),
                format!("valuation: {}", valuation.render(&var_p)),
                format!("filtered: {}", render_formulas(&filtered)),
            ];
            fields.insert("verdict".into(), json!("NotGloballyConsistent"));
            fields.insert("valuation".into(), valuation_json(&valuation, &var_p));
            fields.insert("filtered_formulas".into(), formulas_json(&filtered));
            emit(args.json, human, fields, started);
            EXIT_FAILS
        }
    }
}

fn run_closure(args: &DecideArgs) -> i32 {
    let started = Instant::now();
    let problem = match load(args) {
        Ok(problem) => problem,
        Err(code) => return code,
    };
    let yuinds: Vec<_> = problem
        .uinds
        .iter()
        .filter(|uind| matches!(classify_uind(uind, &problem.schema), Ok(UindKind::Y)))
        .copied()
        .collect();
    let closed = match dp_closure(&problem.cdcs, &yuinds, &problem.schema) {
        Ok(closed) => closed,
        Err(err) => return sep_error(err),
    };
    let human: Vec<String> = closed.iter().map(|cdc| format!("cdc: {cdc}")).collect();
    let mut fields = Map::new();
    fields.insert("verdict".into(), json!("Closure"));
    fields.insert(
        "cdcs".into(),
        json!(closed.iter().map(ToString::to_string).collect::<Vec<_>>()),
    );
    emit(args.json, human, fields, started);
    EXIT_HOLDS
}

fn run_classify(args: &DecideArgs) -> i32 {
    let started = Instant::now();
    let problem = match load(args) {
        Ok(problem) => problem,
        Err(code) => return code,
    };
    let mut human = Vec::new();
    let mut fds = Vec::new();
    for fd in &problem.fds {
        let class = classify_fd(fd, &problem.schema).expect("validated problem");
        human.push(format!("fd {fd}: {class}"));
        fds.push(json!({ "fd": fd.to_string(), "class": class.to_string() }));
    }
    let mut uinds = Vec::new();
    for uind in &problem.uinds {
        let kind = classify_uind(uind, &problem.schema).expect("validated problem");
        human.push(format!("uind {uind}: {kind}"));
        uinds.push(json!({ "uind": uind.to_string(), "kind": kind.to_string() }));
    }
    let (outcome, log) = match separability_pipeline(&problem, &args.options()) {
        Ok(pair) => pair,
        Err(err) => return decide_error(err),
    };
    let mut fields = Map::new();
    fields.insert("fds".into(), json!(fds));
    fields.insert("uinds".into(), json!(uinds));
    if let Some(gc) = log.globally_consistent {
        human.push(format!("globally consistent: {gc}"));
        fields.insert("globally_consistent".into(), json!(gc));
    }
    if let Some(disjoint) = log.disjoint {
        human.push(format!("disjoint: {disjoint}"));
        fields.insert("disjoint".into(), json!(disjoint));
    }
    match outcome {
        SeparabilityOutcome::Reduced { cdcs, applied } => {
            human.push(format!("reduction: {}, {} constraints", theorem_note(applied, &log), cdcs.len()));
            fields.insert("verdict".into(), json!("Reduced"));
            fields.insert("theorem_tag".into(), json!(applied.to_string()));
            fields.insert(
                "cdcs".into(),
                json!(cdcs.iter().map(ToString::to_string).collect::<Vec<_>>()),
            );
            emit(args.json, human, fields, started);
            EXIT_HOLDS
        }
        SeparabilityOutcome::Unsupported { reason } => {
            human.push(format!("UNSUPPORTED: {reason}"));
            fields.insert("verdict".into(), json!("Unsupported"));
            fields.insert("reason".into(), json!(reason.to_string()));
            emit(args.json, human, fields, started);
            EXIT_UNSUPPORTED
        }
    }
}

fn run_reduce(direction: Direction, file: &Path) -> i32 {
    let text = match fs::read_to_string(file) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: {}: {err}", file.display());
            return EXIT_INPUT;
        }
    };
    let cnf = match parse_dimacs(&text) {
        Ok(cnf) => cnf,
        Err(err) => {
            eprintln!("error: {}: {err}", file.display());
            return EXIT_INPUT;
        }
    };
    let problem = match direction {
        Direction::Sat => sat_to_consistency(&cnf),
        Direction::Unsat => unsat_to_losslessness(&cnf),
    };
    print!("{}", problem_to_text(&problem));
    EXIT_HOLDS
}
