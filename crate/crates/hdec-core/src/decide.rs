//! The three decision procedures.
//!
//! All three reduce to the same shape: enumerate the admissible valuations
//! of the propositional encoding and decide satisfiability of the filtered
//! constraint set each valuation induces.
//!
//! * consistency of a CDC set — *some* valuation yields a satisfiable set;
//! * losslessness of a decomposition — *every* valuation (now also ruling
//!   out the pure selections) yields an unsatisfiable combined set, where
//!   the combined set joins the applicable consequents with the negated
//!   interpreted-side view conditions;
//! * global consistency — *every* valuation yields a satisfiable set.
//!
//! Existential verdicts come with a witness tuple built from the valuation
//! (fresh `⋆i` constants for positions with no chosen value) and the solver
//! model; the tuple is re-checked against the original constraints before it
//! is returned, and a failed re-check is an error, never a silent pass.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cformula::{CFormula, LangError};
use crate::encode::{
    CVarGen, IdfMap, PropTheory, Valuation, VarP, alpha_filter_cdc, alpha_filter_views,
    aux_theory, encode_cdcs, encode_views, enumerate_valuations,
};
use crate::model::{DomConstant, Problem, Schema, Tuple};
use crate::solver::{IntAssignment, SatResult, SolverError, solve_cformula_set};

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("internal witness check failed: {detail}")]
    WitnessCheckFailed { detail: String },
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    /// Node budget for the Boolean search; exceeded budgets surface as
    /// resource-limit errors.
    pub budget: u64,
    /// Number of worker threads for the valuation sweep; `0` and `1` both
    /// mean sequential.  The verdict does not depend on this.
    pub parallel: usize,
}

impl Default for DecideOptions {
    fn default() -> DecideOptions {
        DecideOptions { budget: 1_000_000, parallel: 1 }
    }
}

/// A checked existential witness: the valuation, the constraint set it
/// induced, and a tuple whose interpreted part models that set.
#[derive(Debug, Clone)]
pub struct Witness {
    pub valuation: Valuation,
    pub filtered: BTreeSet<CFormula>,
    pub tuple: Tuple,
}

#[derive(Debug)]
pub enum ConsistencyVerdict {
    Consistent(Witness),
    /// Every admissible valuation induced an unsatisfiable set; the pairs
    /// record each valuation with its set, in enumeration order.
    Inconsistent { checked: Vec<(Valuation, BTreeSet<CFormula>)> },
}

#[derive(Debug)]
pub enum LosslessnessVerdict {
    /// Every admissible valuation induced an unsatisfiable combined set.
    Lossless { checked: Vec<(Valuation, BTreeSet<CFormula>)> },
    /// The witness tuple satisfies every CDC yet is selected by no view.
    Lossy(Witness),
}

#[derive(Debug)]
pub enum GlobalConsistencyVerdict {
    GloballyConsistent { checked: Vec<(Valuation, BTreeSet<CFormula>)> },
    NotGloballyConsistent { valuation: Valuation, filtered: BTreeSet<CFormula> },
}

/// Placeholder constant for a position the valuation leaves unconstrained;
/// the parser rejects `⋆`-prefixed constants in input, so these never
/// collide with mentioned ones.
pub fn fresh_constant(position: usize) -> DomConstant {
    DomConstant::new(format!("⋆{position}"))
}

/// The encoded problem pieces a sweep works over.
struct Encoded {
    theory: PropTheory,
    idf: IdfMap,
    view_theory: Option<(PropTheory, IdfMap)>,
    var_p: VarP,
    aux: PropTheory,
}

fn encode_problem(problem: &Problem, with_views: bool) -> Encoded {
    let mut gen = CVarGen::new();
    let (theory, idf) = encode_cdcs(&problem.cdcs, &mut gen);
    if with_views {
        let (view_theory, view_idf) = encode_views(&problem.views, &mut gen);
        let var_p = VarP::from_theories([&theory, &view_theory]);
        let aux = aux_theory([&theory, &view_theory], &var_p);
        Encoded { theory, idf, view_theory: Some((view_theory, view_idf)), var_p, aux }
    } else {
        let var_p = VarP::from_theories([&theory]);
        let aux = aux_theory([&theory], &var_p);
        Encoded { theory, idf, view_theory: None, var_p, aux }
    }
}

enum SearchStep<D, R> {
    Continue(D),
    Stop(R),
}

/// Sweeps the valuation stream, stopping at the first `Stop` in enumeration
/// order.  With more than one worker the stream is processed in batches of
/// `workers` items; within a batch all items are evaluated and the earliest
/// `Stop` (or error) wins, so the outcome matches the sequential sweep.
fn search<D: Send, R: Send>(
    mut valuations: impl Iterator<Item = Valuation>,
    workers: usize,
    test: impl Fn(&Valuation) -> Result<SearchStep<D, R>, DecideError> + Sync,
) -> Result<(Vec<(Valuation, D)>, Option<(Valuation, R)>), DecideError> {
    let width = workers.max(1);
    let mut seen = Vec::new();
    loop {
        let batch: Vec<Valuation> = valuations.by_ref().take(width).collect();
        if batch.is_empty() {
            return Ok((seen, None));
        }
        let outcomes: Vec<Result<SearchStep<D, R>, DecideError>> = if width == 1 {
            batch.iter().map(&test).collect()
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = batch.iter().map(|v| scope.spawn(|| test(v))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("search worker panicked"))
                    .collect()
            })
        };
        for (valuation, outcome) in batch.into_iter().zip(outcomes) {
            match outcome? {
                SearchStep::Continue(d) => seen.push((valuation, d)),
                SearchStep::Stop(r) => return Ok((seen, Some((valuation, r)))),
            }
        }
    }
}

fn build_witness_tuple(schema: &Schema, alpha: &Valuation, model: &IntAssignment) -> Tuple {
    let x = (1..=schema.x_arity)
        .map(|p| alpha.chosen(p).cloned().unwrap_or_else(|| fresh_constant(p)))
        .collect();
    Tuple::new(x, model.to_y_values(schema.y_arity))
}

fn check_filtered(filtered: &BTreeSet<CFormula>, tuple: &Tuple) -> Result<(), DecideError> {
    for f in filtered {
        if !f.eval_on(&tuple.y) {
            return Err(DecideError::WitnessCheckFailed {
                detail: format!("tuple {tuple} violates filtered constraint {f}"),
            });
        }
    }
    Ok(())
}

fn check_consistency_witness(problem: &Problem, w: &Witness) -> Result<(), DecideError> {
    check_filtered(&w.filtered, &w.tuple)?;
    for cdc in &problem.cdcs {
        if !cdc.satisfied_by(&w.tuple) {
            return Err(DecideError::WitnessCheckFailed {
                detail: format!("tuple {} violates CDC {cdc}", w.tuple),
            });
        }
    }
    Ok(())
}

fn check_lossy_witness(problem: &Problem, w: &Witness) -> Result<(), DecideError> {
    check_consistency_witness(problem, w)?;
    for view in &problem.views {
        if view.selects(&w.tuple) {
            return Err(DecideError::WitnessCheckFailed {
                detail: format!("tuple {} is selected by view {}", w.tuple, view.name),
            });
        }
    }
    Ok(())
}

/// Is there a tuple satisfying every CDC?  (Views play no role here.)
pub fn check_consistency(
    problem: &Problem,
    opts: &DecideOptions,
) -> Result<ConsistencyVerdict, DecideError> {
    let enc = encode_problem(problem, false);
    let test = |alpha: &Valuation| {
        let filtered = alpha_filter_cdc(&enc.theory, &enc.idf, alpha);
        Ok(match solve_cformula_set(filtered.iter(), opts.budget)? {
            SatResult::Sat(model) => SearchStep::Stop((filtered, model)),
            SatResult::Unsat(_) => SearchStep::Continue(filtered),
        })
    };
    let (checked, hit) = search(enumerate_valuations(&enc.var_p, &enc.aux), opts.parallel, test)?;
    match hit {
        Some((valuation, (filtered, model))) => {
            let tuple = build_witness_tuple(&problem.schema, &valuation, &model);
            let witness = Witness { valuation, filtered, tuple };
            check_consistency_witness(problem, &witness)?;
            Ok(ConsistencyVerdict::Consistent(witness))
        }
        None => Ok(ConsistencyVerdict::Inconsistent { checked }),
    }
}

/// Does every tuple satisfying the CDCs land in at least one view?
pub fn check_losslessness(
    problem: &Problem,
    opts: &DecideOptions,
) -> Result<LosslessnessVerdict, DecideError> {
    let enc = encode_problem(problem, true);
    let (view_theory, view_idf) = enc.view_theory.as_ref().expect("views encoded");
    let test = |alpha: &Valuation| {
        let mut combined = alpha_filter_cdc(&enc.theory, &enc.idf, alpha);
        combined.extend(alpha_filter_views(view_theory, view_idf, alpha)?);
        Ok(match solve_cformula_set(combined.iter(), opts.budget)? {
            SatResult::Sat(model) => SearchStep::Stop((combined, model)),
            SatResult::Unsat(_) => SearchStep::Continue(combined),
        })
    };
    let (checked, hit) = search(enumerate_valuations(&enc.var_p, &enc.aux), opts.parallel, test)?;
    match hit {
        Some((valuation, (filtered, model))) => {
            let tuple = build_witness_tuple(&problem.schema, &valuation, &model);
            let witness = Witness { valuation, filtered, tuple };
            check_lossy_witness(problem, &witness)?;
            Ok(LosslessnessVerdict::Lossy(witness))
        }
        None => Ok(LosslessnessVerdict::Lossless { checked }),
    }
}

/// Is the filtered CDC set satisfiable under *every* admissible valuation,
/// not just some?
pub fn check_global_consistency(
    problem: &Problem,
    opts: &DecideOptions,
) -> Result<GlobalConsistencyVerdict, DecideError> {
    let enc = encode_problem(problem, false);
    let test = |alpha: &Valuation| {
        let filtered = alpha_filter_cdc(&enc.theory, &enc.idf, alpha);
        Ok(match solve_cformula_set(filtered.iter(), opts.budget)? {
            SatResult::Sat(_) => SearchStep::Continue(filtered),
            SatResult::Unsat(_) => SearchStep::Stop(filtered),
        })
    };
    let (checked, hit) = search(enumerate_valuations(&enc.var_p, &enc.aux), opts.parallel, test)?;
    match hit {
        Some((valuation, filtered)) => {
            Ok(GlobalConsistencyVerdict::NotGloballyConsistent { valuation, filtered })
        }
        None => Ok(GlobalConsistencyVerdict::GloballyConsistent { checked }),
    }
}
