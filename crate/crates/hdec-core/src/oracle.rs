//! Brute-force reference semantics, deliberately naive: exhaustive searches
//! over bounded universes that the fast paths are tested against, plus the
//! CNF reduction generators used as structured test-case factories.
//!
//! Non-interpreted parts range over per-position pools — the constants the
//! problem mentions at that position plus one placeholder (`⋆i`); a tuple
//! using unmentioned constants behaves exactly like one using the
//! placeholder, so the pools cover all behaviours.  Interpreted parts range
//! over `[-B, B]` for a caller-supplied bound, which must be at least the
//! small-model bound of the formula sets involved.

use std::collections::{BTreeMap, BTreeSet};

use crate::cformula::{Butvpi, CFormula, Cmp, Mode, Sign, Utvpi, YVar, normalize_comparison};
use crate::decide::fresh_constant;
use crate::dimacs::Cnf;
use crate::model::{BoolExpr, Cdc, DomConstant, EqAtom, Instance, Problem, Schema, Tuple, ViewDef};
use crate::solver::{IntAssignment, SatResult, small_model_bound};

/// Three-valued truth under a partial assignment: `None` when unassigned
/// variables block the verdict.
fn eval3_utvpi(atom: &Utvpi, value: &impl Fn(YVar) -> Option<i64>) -> Option<bool> {
    let mut total = true;
    for v in atom.vars() {
        total &= value(v).is_some();
    }
    if !total {
        return None;
    }
    Some(atom.eval(|v| value(v).expect("checked assigned")))
}

fn eval3_butvpi(f: &Butvpi, value: &impl Fn(YVar) -> Option<i64>) -> Option<bool> {
    match f {
        Butvpi::Atom(a) => eval3_utvpi(a, value),
        Butvpi::Not(inner) => eval3_butvpi(inner, value).map(|b| !b),
        Butvpi::And(parts) => {
            let mut open = false;
            for p in parts {
                match eval3_butvpi(p, value) {
                    Some(false) => return Some(false),
                    Some(true) => {}
                    None => open = true,
                }
            }
            if open { None } else { Some(true) }
        }
        Butvpi::Or(parts) => {
            let mut open = false;
            for p in parts {
                match eval3_butvpi(p, value) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => open = true,
                }
            }
            if open { None } else { Some(false) }
        }
    }
}

fn eval3_cformula(f: &CFormula, value: &impl Fn(YVar) -> Option<i64>) -> Option<bool> {
    match f {
        CFormula::Utvpi(atoms) => {
            let mut open = false;
            for a in atoms {
                match eval3_utvpi(a, value) {
                    Some(false) => return Some(false),
                    Some(true) => {}
                    None => open = true,
                }
            }
            if open { None } else { Some(true) }
        }
        CFormula::Butvpi(b) => eval3_butvpi(b, value),
    }
}

/// A formula that must come out with the given truth value.
struct Requirement<'a> {
    formula: &'a CFormula,
    want: bool,
}

/// Atoms whose truth value is entailed by requiring `f` to come out `want`:
/// conjunctive structure propagates `true`, disjunctive structure `false`.
fn forced_atoms(f: &CFormula, want: bool, out: &mut Vec<(Utvpi, bool)>) {
    match f {
        CFormula::Utvpi(atoms) => {
            if want {
                out.extend(atoms.iter().map(|a| (a.clone(), true)));
            } else if let [only] = atoms.as_slice() {
                out.push((only.clone(), false));
            }
        }
        CFormula::Butvpi(t) => forced_atoms_butvpi(t, want, out),
    }
}

fn forced_atoms_butvpi(f: &Butvpi, want: bool, out: &mut Vec<(Utvpi, bool)>) {
    match f {
        Butvpi::Atom(a) => out.push((a.clone(), want)),
        Butvpi::Not(inner) => forced_atoms_butvpi(inner, !want, out),
        Butvpi::And(parts) if want => {
            for p in parts {
                forced_atoms_butvpi(p, true, out);
            }
        }
        Butvpi::Or(parts) if !want => {
            for p in parts {
                forced_atoms_butvpi(p, false, out);
            }
        }
        Butvpi::And(_) | Butvpi::Or(_) => {}
    }
}

struct YSearch<'a> {
    reqs: Vec<Requirement<'a>>,
    vars: Vec<YVar>,
    values: Vec<i64>,
    /// Entailed atoms indexed by each variable they mention, used to narrow
    /// the candidate interval of a variable from already-assigned partners.
    clips: BTreeMap<YVar, Vec<(Utvpi, bool)>>,
    assignment: BTreeMap<YVar, i64>,
}

impl<'a> YSearch<'a> {
    fn new(reqs: Vec<Requirement<'a>>, bound: i64) -> YSearch<'a> {
        let mut occurrences: BTreeMap<YVar, usize> = BTreeMap::new();
        for r in &reqs {
            for v in r.formula.vars() {
                *occurrences.entry(v).or_insert(0) += 1;
            }
        }
        // most-constrained variables first makes the partial evaluation
        // prune early
        let mut vars: Vec<YVar> = occurrences.keys().copied().collect();
        vars.sort_by_key(|v| (usize::MAX - occurrences[v], v.0));
        // centre-out value order finds the typical small model quickly
        let mut values = vec![0];
        for d in 1..=bound.max(0) {
            values.push(d);
            values.push(-d);
        }
        let mut forced = Vec::new();
        for r in &reqs {
            forced_atoms(r.formula, r.want, &mut forced);
        }
        let mut clips: BTreeMap<YVar, Vec<(Utvpi, bool)>> = BTreeMap::new();
        for (atom, polarity) in forced {
            for v in atom.vars() {
                clips.entry(v).or_default().push((atom.clone(), polarity));
            }
        }
        YSearch { reqs, vars, values, clips, assignment: BTreeMap::new() }
    }

    /// Interval of values for `var` permitted by every entailed atom whose
    /// partner variable, if any, is already assigned.  Skipping values
    /// outside it cannot lose a satisfying assignment.
    fn feasible_range(&self, var: YVar) -> (i64, i64) {
        let (mut lo, mut hi) = (i64::MIN, i64::MAX);
        let Some(clips) = self.clips.get(&var) else {
            return (lo, hi);
        };
        for &(ref atom, polarity) in clips {
            // reduce the atom to `sign * var <= rest` (for polarity true)
            let (sign, rest) = match *atom {
                Utvpi::Const { .. } => continue,
                Utvpi::Single { a, y, d } => {
                    if y != var {
                        continue;
                    }
                    (a, d)
                }
                Utvpi::Pair { a, i, b, j, d } => {
                    let (sign, partner_sign, partner) = if i == var && j != var {
                        (a, b, j)
                    } else if j == var && i != var {
                        (b, a, i)
                    } else {
                        continue;
                    };
                    let Some(&v) = self.assignment.get(&partner) else {
                        continue;
                    };
                    let t = match partner_sign {
                        Sign::Pos => v,
                        Sign::Neg => -v,
                    };
                    (sign, d.saturating_sub(t))
                }
            };
            match (polarity, sign) {
                // sign * var <= rest
                (true, Sign::Pos) => hi = hi.min(rest),
                (true, Sign::Neg) => lo = lo.max(rest.saturating_neg()),
                // sign * var > rest
                (false, Sign::Pos) => lo = lo.max(rest.saturating_add(1)),
                (false, Sign::Neg) => {
                    hi = hi.min(rest.saturating_neg().saturating_sub(1))
                }
            }
        }
        (lo, hi)
    }

    fn run(mut self) -> Option<IntAssignment> {
        let undecided: Vec<usize> = (0..self.reqs.len()).collect();
        if self.go(0, &undecided) {
            Some(IntAssignment::from_pairs(
                self.assignment.iter().map(|(v, x)| (v.0, *x)),
            ))
        } else {
            None
        }
    }

    fn go(&mut self, depth: usize, undecided: &[usize]) -> bool {
        let value = |v: YVar| self.assignment.get(&v).copied();
        let mut open = Vec::new();
        for &n in undecided {
            let r = &self.reqs[n];
            match eval3_cformula(r.formula, &value) {
                Some(b) if b == r.want => {}
                Some(_) => return false,
                None => open.push(n),
            }
        }
        if open.is_empty() {
            return true;
        }
        if depth == self.vars.len() {
            return false;
        }
        let var = self.vars[depth];
        let (lo, hi) = self.feasible_range(var);
        for n in 0..self.values.len() {
            let v = self.values[n];
            if v < lo || v > hi {
                continue;
            }
            self.assignment.insert(var, v);
            if self.go(depth + 1, &open) {
                return true;
            }
        }
        self.assignment.remove(&var);
        false
    }
}

/// Exhaustive satisfiability over `[-bound, bound]` per variable.
pub fn brute_force_cformula_sat(formulas: &[CFormula], bound: i64) -> SatResult {
    let reqs = formulas.iter().map(|f| Requirement { formula: f, want: true }).collect();
    match YSearch::new(reqs, bound).run() {
        Some(assignment) => SatResult::Sat(assignment),
        None => SatResult::Unsat(Vec::new()),
    }
}

/// Per-position constant pools: mentioned constants in ascending order,
/// then the position's placeholder.
pub fn constant_pools(problem: &Problem) -> Vec<Vec<DomConstant>> {
    problem
        .constants_by_position()
        .into_iter()
        .enumerate()
        .map(|(idx, set)| {
            let mut pool: Vec<DomConstant> = set.into_iter().collect();
            pool.push(fresh_constant(idx + 1));
            pool
        })
        .collect()
}

/// An adequate interpreted-value bound for every formula set this problem
/// can induce (consequents and negated view conditions).
pub fn problem_bound(problem: &Problem) -> i64 {
    let mut max_d: i64 = 0;
    for cdc in &problem.cdcs {
        max_d = max_d.max(cdc.consequent.max_abs_bound());
    }
    for view in &problem.views {
        if let Some(c) = &view.y_condition {
            max_d = max_d.max(c.max_abs_bound());
        }
    }
    // negating an atom shifts its bound by one
    small_model_bound(problem.schema.y_arity, max_d.saturating_add(1))
}

fn x_combos(pools: &[Vec<DomConstant>]) -> Vec<Vec<DomConstant>> {
    let mut out = vec![Vec::new()];
    for pool in pools {
        let mut next = Vec::with_capacity(out.len() * pool.len());
        for prefix in &out {
            for c in pool {
                let mut combo = prefix.clone();
                combo.push(c.clone());
                next.push(combo);
            }
        }
        out = next;
    }
    out
}

fn single_tuple_search(problem: &Problem, bound: i64, with_views: bool) -> Option<Tuple> {
    let pools = constant_pools(problem);
    let m = problem.schema.y_arity;
    // distinct non-interpreted parts often induce the same requirement
    // profile; searching a profile once is enough
    let mut searched: BTreeSet<Vec<(bool, usize)>> = BTreeSet::new();
    'combos: for x in x_combos(&pools) {
        let probe = Tuple::new(x.clone(), vec![0; m]);
        let mut reqs = Vec::new();
        let mut profile = Vec::new();
        for (n, cdc) in problem.cdcs.iter().enumerate() {
            if cdc.antecedent.eval(&probe) {
                reqs.push(Requirement { formula: &cdc.consequent, want: true });
                profile.push((false, n));
            }
        }
        if with_views {
            for (n, view) in problem.views.iter().enumerate() {
                if view.x_condition.eval(&probe) {
                    match &view.y_condition {
                        // a pure selection catches this non-interpreted
                        // part whatever the interpreted values are
                        None => continue 'combos,
                        Some(cond) => {
                            reqs.push(Requirement { formula: cond, want: false });
                            profile.push((true, n));
                        }
                    }
                }
            }
        }
        if !searched.insert(profile) {
            continue;
        }
        if let Some(assignment) = YSearch::new(reqs, bound).run() {
            return Some(Tuple::new(x, assignment.to_y_values(m)));
        }
    }
    None
}

/// First tuple satisfying every CDC, or `None` if the CDCs are
/// inconsistent.
pub fn brute_force_consistency(problem: &Problem, bound: i64) -> Option<Tuple> {
    single_tuple_search(problem, bound, false)
}

/// First tuple satisfying every CDC that no view selects — a decomposition
/// counterexample — or `None` if the decomposition is lossless.  Sound
/// because a lost tuple on any instance is already lost on the
/// single-tuple instance containing it.
pub fn brute_force_losslessness(problem: &Problem, bound: i64) -> Option<Tuple> {
    single_tuple_search(problem, bound, true)
}

/// Non-interpreted part for which the applicable CDC set is unsatisfiable,
/// or `None` if every part admits interpreted values.
pub fn brute_force_global_consistency(problem: &Problem, bound: i64) -> Option<Vec<DomConstant>> {
    let pools = constant_pools(problem);
    let m = problem.schema.y_arity;
    let mut searched: BTreeSet<Vec<usize>> = BTreeSet::new();
    for x in x_combos(&pools) {
        let probe = Tuple::new(x.clone(), vec![0; m]);
        let mut reqs = Vec::new();
        let mut profile = Vec::new();
        for (n, cdc) in problem.cdcs.iter().enumerate() {
            if cdc.antecedent.eval(&probe) {
                reqs.push(Requirement { formula: &cdc.consequent, want: true });
                profile.push(n);
            }
        }
        if !searched.insert(profile) {
            continue;
        }
        if YSearch::new(reqs, bound).run().is_none() {
            return Some(x);
        }
    }
    None
}

fn universe(problem: &Problem, bound: i64) -> Vec<Tuple> {
    let pools = constant_pools(problem);
    let m = problem.schema.y_arity;
    let mut out = Vec::new();
    for x in x_combos(&pools) {
        let mut ys = vec![vec![]];
        for _ in 0..m {
            let mut next = Vec::new();
            for prefix in &ys {
                for v in -bound..=bound {
                    let mut y: Vec<i64> = prefix.clone();
                    y.push(v);
                    next.push(y);
                }
            }
            ys = next;
        }
        for y in ys {
            out.push(Tuple::new(x.clone(), y));
        }
    }
    out
}

fn satisfies_all(instance: &Instance, problem: &Problem) -> bool {
    problem.cdcs.iter().all(|c| instance.satisfies_cdc(c))
        && problem.uinds.iter().all(|u| instance.satisfies_uind(u))
        && problem.fds.iter().all(|f| instance.satisfies_fd(f))
}

/// Every instance of at most `max_tuples` tuples over the bounded universe
/// satisfying all CDCs, UINDs and FDs, the empty instance included,
/// smallest first.
pub fn brute_force_instance_models(
    problem: &Problem,
    max_tuples: usize,
    bound: i64,
) -> Vec<Instance> {
    let tuples = universe(problem, bound);
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Tuple>)> = vec![(0, Vec::new())];
    // depth-first over index-ordered subsets, grouped by size afterwards
    let mut subsets: Vec<Vec<Tuple>> = Vec::new();
    while let Some((from, chosen)) = stack.pop() {
        subsets.push(chosen.clone());
        if chosen.len() == max_tuples {
            continue;
        }
        for n in (from..tuples.len()).rev() {
            let mut next = chosen.clone();
            next.push(tuples[n].clone());
            stack.push((n + 1, next));
        }
    }
    subsets.sort_by_key(|s| s.len());
    for subset in subsets {
        let instance = Instance::from_tuples(subset);
        if satisfies_all(&instance, problem) {
            out.push(instance);
        }
    }
    out
}

/// Searches for an instance of at most `max_tuples` tuples satisfying every
/// constraint while containing a tuple no view selects.  `None` means no
/// bounded counterexample to losslessness of the full constraint set.
pub fn bounded_lossy_instance(
    problem: &Problem,
    max_tuples: usize,
    bound: i64,
) -> Option<Instance> {
    assert!(max_tuples >= 1);
    let satisfying: Vec<Tuple> = universe(problem, bound)
        .into_iter()
        .filter(|t| problem.cdcs.iter().all(|c| c.satisfied_by(t)))
        .collect();
    let lost: Vec<&Tuple> = satisfying
        .iter()
        .filter(|t| !problem.views.iter().any(|v| v.selects(t)))
        .collect();
    for t in lost {
        let mut chosen = vec![t.clone()];
        if fill_helpers(problem, &satisfying, &mut chosen, 0, max_tuples) {
            return Some(Instance::from_tuples(chosen));
        }
    }
    None
}

fn fill_helpers(
    problem: &Problem,
    satisfying: &[Tuple],
    chosen: &mut Vec<Tuple>,
    from: usize,
    max_tuples: usize,
) -> bool {
    let instance = Instance::from_tuples(chosen.iter().cloned());
    if instance.tuples.len() == chosen.len() && satisfies_all(&instance, problem) {
        return true;
    }
    if chosen.len() >= max_tuples {
        return false;
    }
    for n in from..satisfying.len() {
        chosen.push(satisfying[n].clone());
        if fill_helpers(problem, satisfying, chosen, n + 1, max_tuples) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// The reserved constant of the CNF reductions.
pub fn sat_constant() -> DomConstant {
    DomConstant::new("sat_a")
}

fn clause_cdc(clause: &[i32], consequent: CFormula) -> Cdc {
    let a = sat_constant();
    let conjuncts = clause
        .iter()
        .map(|lit| {
            let position = lit.unsigned_abs() as usize;
            // a positive literal contributes the disequality, so the
            // antecedent fires exactly when the clause is falsified
            BoolExpr::Atom(EqAtom { position, constant: a.clone(), negated: *lit > 0 })
        })
        .collect();
    Cdc { antecedent: BoolExpr::and(conjuncts), consequent }
}

fn y1_gt_0() -> CFormula {
    CFormula::Utvpi(normalize_comparison(Cmp::Gt, 1, Some(1), 0, None, 0).unwrap())
}

fn y1_le_0() -> CFormula {
    CFormula::Utvpi(normalize_comparison(Cmp::Le, 1, Some(1), 0, None, 0).unwrap())
}

/// Encodes CNF satisfiability as CDC consistency: one CDC per clause firing
/// on falsifying non-interpreted parts, plus an unconditional cap that
/// contradicts the fired consequent.  The output is consistent iff the CNF
/// is satisfiable.
pub fn sat_to_consistency(cnf: &Cnf) -> Problem {
    let schema = Schema::new("R", cnf.num_vars.max(1), 1).expect("non-empty schema");
    let mut problem = Problem::new(schema, Mode::Utvpi);
    for clause in &cnf.clauses {
        problem.cdcs.push(clause_cdc(clause, y1_gt_0()));
    }
    problem.cdcs.push(Cdc { antecedent: BoolExpr::True, consequent: y1_le_0() });
    problem
}

/// Encodes CNF unsatisfiability as losslessness: the clause CDCs force the
/// interpreted value positive exactly on falsifying parts, and the single
/// view selects the positive tuples.  The decomposition is lossless iff
/// the CNF is unsatisfiable.
pub fn unsat_to_losslessness(cnf: &Cnf) -> Problem {
    let schema = Schema::new("R", cnf.num_vars.max(1), 1).expect("non-empty schema");
    let mut problem = Problem::new(schema, Mode::Utvpi);
    for clause in &cnf.clauses {
        problem.cdcs.push(clause_cdc(clause, y1_gt_0()));
    }
    problem.views.push(ViewDef {
        name: "V".into(),
        x_condition: BoolExpr::True,
        y_condition: Some(y1_gt_0()),
    });
    problem
}

/// Exhaustive CNF satisfiability by truth table.
pub fn truth_table_sat(cnf: &Cnf) -> bool {
    let n = cnf.num_vars;
    assert!(n < usize::BITS as usize);
    (0u64..(1u64 << n)).any(|bits| {
        cnf.clauses.iter().all(|clause| {
            clause.iter().any(|lit| {
                let on = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
                (*lit > 0) == on
            })
        })
    })
}
