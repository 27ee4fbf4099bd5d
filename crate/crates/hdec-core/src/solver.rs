//! Integer satisfiability for unit-two-variable inequalities and their
//! Boolean combinations.
//!
//! A conjunctive atom set is decided on the doubled-variable difference
//! graph: each variable `y` gets two nodes `y+` (value `y`) and `y-` (value
//! `-y`), and every atom turns into one or two difference edges
//! `val(t) - val(s) <= w`:
//!
//! ```text
//!   a*yi + b*yj <= d   edges  node(j,-b) -> node(i,a)  weight d
//!                             node(i,-a) -> node(j,b)  weight d
//!   a*y <= d           edge   node(y,-a) -> node(y,a)  weight 2d
//! ```
//!
//! A negative cycle (Bellman-Ford) refutes the set over the rationals.
//! Otherwise all-pairs shortest paths are closed (Floyd-Warshall) and the
//! derived even bounds are tightened — the path `y- ~> y+` of weight `c`
//! means `2y <= c`, so an odd `c` tightens to `c - 1` — repeating closure
//! and tightening until a fixpoint.  A negative diagonal after tightening
//! refutes the set over the integers (the classic case is a zero-weight
//! cycle through `y-` and `y+` whose half has odd weight).  On success a
//! model is read off by fixing one variable at a time to the value nearest
//! zero inside its tightened range and re-closing.
//!
//! Arithmetic is done in i128: path weights are sums of at most `2v` edge
//! weights, each at most `2|d|` with `d` a 64-bit input bound, so nothing
//! overflows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cformula::{Butvpi, CFormula, Sign, Utvpi, YVar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("search budget of {budget} nodes exhausted")]
    ResourceLimit { budget: u64 },
}

/// A total integer assignment; variables never mentioned default to 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntAssignment(BTreeMap<YVar, i64>);

impl IntAssignment {
    pub fn new() -> IntAssignment {
        IntAssignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, i64)>) -> IntAssignment {
        IntAssignment(pairs.into_iter().map(|(v, x)| (YVar(v), x)).collect())
    }

    pub fn get(&self, y: YVar) -> i64 {
        self.0.get(&y).copied().unwrap_or(0)
    }

    pub fn set(&mut self, y: YVar, v: i64) {
        self.0.insert(y, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (YVar, i64)> + '_ {
        self.0.iter().map(|(y, v)| (*y, *v))
    }

    /// Interpreted part of a tuple for a schema with `m` interpreted
    /// positions.
    pub fn to_y_values(&self, m: usize) -> Vec<i64> {
        (1..=m).map(|j| self.get(YVar(j))).collect()
    }
}

impl fmt::Display for IntAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (y, v)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{y} = {v}")?;
        }
        write!(f, "}}")
    }
}

/// Outcome of a satisfiability check.  `Unsat` carries a subset of the input
/// atoms that is itself unsatisfiable; for Boolean-level refutations (where
/// no atom subset certifies anything) the core is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(IntAssignment),
    Unsat(Vec<Utvpi>),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(&self) -> Option<&IntAssignment> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat(_) => None,
        }
    }
}

/// True iff every atom holds under the assignment.
pub fn check_model(atoms: &[Utvpi], model: &IntAssignment) -> bool {
    atoms.iter().all(|a| a.eval(|y| model.get(y)))
}

/// Largest value a satisfiable atom set over `num_vars` variables with
/// bounds of magnitude at most `max_abs_d` can force on a variable; searching
/// `[-B, B]^v` with this `B` is therefore a complete procedure.
pub fn small_model_bound(num_vars: usize, max_abs_d: i64) -> i64 {
    (num_vars as i64 + 1).saturating_mul(max_abs_d.saturating_add(1))
}

const INF: i128 = i128::MAX / 4;

/// Doubled-variable constraint graph plus all-pairs closure state.
struct Graph {
    vars: Vec<YVar>,
    /// direct[u][v]: best direct edge weight and the atoms justifying it.
    direct: Vec<Vec<Option<(i128, BTreeSet<Utvpi>)>>>,
    dist: Vec<Vec<i128>>,
    mid: Vec<Vec<Option<usize>>>,
}

impl Graph {
    fn node(&self, y: YVar, sign: Sign) -> usize {
        let q = self.vars.binary_search(&y).expect("variable registered");
        2 * q + if sign == Sign::Pos { 0 } else { 1 }
    }

    fn len(&self) -> usize {
        2 * self.vars.len()
    }

    fn add_edge(&mut self, from: usize, to: usize, w: i128, atoms: BTreeSet<Utvpi>) {
        let slot = &mut self.direct[from][to];
        match slot {
            Some((old, _)) if *old <= w => {}
            _ => *slot = Some((w, atoms)),
        }
    }

    /// Floyd-Warshall over the direct edges, then tighten the derived even
    /// bounds, repeating until stable.  Returns false when a negative
    /// diagonal entry appears (integer-unsatisfiable).
    fn close_and_tighten(&mut self) -> bool {
        loop {
            let n = self.len();
            self.dist = vec![vec![INF; n]; n];
            self.mid = vec![vec![None; n]; n];
            for u in 0..n {
                self.dist[u][u] = 0;
            }
            for u in 0..n {
                for v in 0..n {
                    if let Some((w, _)) = &self.direct[u][v] {
                        if *w < self.dist[u][v] {
                            self.dist[u][v] = *w;
                            self.mid[u][v] = None;
                        }
                    }
                }
            }
            for w in 0..n {
                for u in 0..n {
                    if self.dist[u][w] == INF {
                        continue;
                    }
                    for v in 0..n {
                        if self.dist[w][v] == INF {
                            continue;
                        }
                        let cand = self.dist[u][w] + self.dist[w][v];
                        if cand < self.dist[u][v] {
                            self.dist[u][v] = cand;
                            self.mid[u][v] = Some(w);
                        }
                    }
                }
            }
            if (0..n).any(|u| self.dist[u][u] < 0) {
                return false;
            }
            // Tighten: an odd bound on 2y drops to the even value below it.
            let mut changed = false;
            for q in 0..self.vars.len() {
                let (pos, neg) = (2 * q, 2 * q + 1);
                for (from, to) in [(neg, pos), (pos, neg)] {
                    let d = self.dist[from][to];
                    if d != INF && d.rem_euclid(2) == 1 {
                        let atoms = self.path_atoms(from, to);
                        self.add_edge(from, to, d - 1, atoms);
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Atoms along a reconstructed shortest path.  The midpoint recursion is
    /// well-founded only while the graph has no negative cycle, which the
    /// closure checks before every tightening step.
    fn path_atoms(&self, u: usize, v: usize) -> BTreeSet<Utvpi> {
        let mut out = BTreeSet::new();
        self.collect_path(u, v, &mut out);
        out
    }

    fn collect_path(&self, u: usize, v: usize, out: &mut BTreeSet<Utvpi>) {
        match self.mid[u][v] {
            Some(w) => {
                self.collect_path(u, w, out);
                self.collect_path(w, v, out);
            }
            None => {
                if u == v {
                    return;
                }
                if let Some((_, atoms)) = &self.direct[u][v] {
                    out.extend(atoms.iter().copied());
                }
            }
        }
    }

    /// Unions the justifications along one negative cycle of the direct
    /// edges.  Only callable after `close_and_tighten` reported one; uses
    /// Bellman-Ford predecessor walking, which stays well-founded where the
    /// midpoint recursion of `path_atoms` would not.
    fn negative_core(&self) -> Vec<Utvpi> {
        let n = self.len();
        let mut edges: Vec<(usize, usize, i128, &BTreeSet<Utvpi>)> = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if let Some((w, atoms)) = &self.direct[u][v] {
                    edges.push((u, v, *w, atoms));
                }
            }
        }
        let mut dist = vec![0i128; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut touched = None;
        for _ in 0..=n {
            touched = None;
            for (idx, (from, to, w, _)) in edges.iter().enumerate() {
                if dist[*from] + w < dist[*to] {
                    dist[*to] = dist[*from] + w;
                    pred[*to] = Some(idx);
                    touched = Some(*to);
                }
            }
            if touched.is_none() {
                break;
            }
        }
        // Still relaxing after n rounds: walk predecessors onto the cycle
        // and collect its atoms.
        let mut node = touched.expect("a negative cycle exists");
        for _ in 0..n {
            node = edges[pred[node].expect("predecessor on walk")].0;
        }
        let start = node;
        let mut core = BTreeSet::new();
        loop {
            let e = pred[node].expect("predecessor on cycle");
            core.extend(edges[e].3.iter().copied());
            node = edges[e].0;
            if node == start {
                break;
            }
        }
        core.into_iter().collect()
    }

    /// Bound pair for variable `q` as (lower, upper), `None` = unbounded.
    fn range(&self, q: usize) -> (Option<i128>, Option<i128>) {
        let up = self.dist[2 * q + 1][2 * q]; // y- ~> y+ : 2y <= d
        let lo = self.dist[2 * q][2 * q + 1]; // y+ ~> y- : -2y <= d
        let upper = (up != INF).then(|| up.div_euclid(2));
        let lower = (lo != INF).then(|| -(lo.div_euclid(2)));
        (lower, upper)
    }
}

/// Decides a conjunctive set of atoms over the integers.
pub fn utvpi_sat(atoms: &[Utvpi]) -> SatResult {
    // Constant atoms: 0 <= d is false exactly when d < 0.
    for a in atoms {
        if let Utvpi::Const { d } = a {
            if *d < 0 {
                return SatResult::Unsat(vec![*a]);
            }
        }
    }
    let distinct: BTreeSet<Utvpi> = atoms
        .iter()
        .filter(|a| !matches!(a, Utvpi::Const { .. }))
        .copied()
        .collect();
    let vars: Vec<YVar> = distinct.iter().flat_map(|a| a.vars()).collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if vars.is_empty() {
        return SatResult::Sat(IntAssignment::new());
    }
    let n = 2 * vars.len();
    let mut graph = Graph {
        vars,
        direct: vec![vec![None; n]; n],
        dist: Vec::new(),
        mid: Vec::new(),
    };
    for a in &distinct {
        match *a {
            Utvpi::Const { .. } => {}
            Utvpi::Single { a: s, y, d } => {
                let (from, to) = (graph.node(y, s.flip()), graph.node(y, s));
                graph.add_edge(from, to, 2 * d as i128, BTreeSet::from([*a]));
            }
            Utvpi::Pair { a: sa, i, b: sb, j, d } => {
                let (from, to) = (graph.node(j, sb.flip()), graph.node(i, sa));
                graph.add_edge(from, to, d as i128, BTreeSet::from([*a]));
                let (from, to) = (graph.node(i, sa.flip()), graph.node(j, sb));
                graph.add_edge(from, to, d as i128, BTreeSet::from([*a]));
            }
        }
    }
    if !graph.close_and_tighten() {
        return SatResult::Unsat(graph.negative_core());
    }
    // Fix variables one at a time; every value inside the tightened range
    // extends to a full integer model, and re-closing keeps later ranges
    // exact.
    let mut model = IntAssignment::new();
    for q in 0..graph.vars.len() {
        let (lower, upper) = graph.range(q);
        let v = match (lower, upper) {
            (Some(lo), Some(up)) => {
                assert!(lo <= up, "tightened range must be non-empty");
                0.clamp(lo, up)
            }
            (Some(lo), None) => lo.max(0),
            (None, Some(up)) => up.min(0),
            (None, None) => 0,
        };
        let value = i64::try_from(v).expect("model value exceeds 64-bit range");
        model.set(graph.vars[q], value);
        let (pos, neg) = (2 * q, 2 * q + 1);
        graph.add_edge(neg, pos, 2 * v, BTreeSet::new());
        graph.add_edge(pos, neg, -2 * v, BTreeSet::new());
        let ok = graph.close_and_tighten();
        assert!(ok, "fixing a value inside the tightened range cannot fail");
    }
    debug_assert!(check_model(atoms, &model));
    SatResult::Sat(model)
}

/// Decides a set of Boolean combinations by depth-first search over atom
/// polarities: decisions propagate through the Boolean structure, and every
/// full polarity choice is checked as a conjunctive atom set.  `budget`
/// bounds the number of search nodes.
pub fn butvpi_sat(formulas: &[Butvpi], budget: u64) -> Result<SatResult, SolverError> {
    let atom_set: BTreeSet<Utvpi> = {
        let mut s = BTreeSet::new();
        formulas.iter().for_each(|f| f.atoms(&mut s));
        s
    };
    let atoms: Vec<Utvpi> = atom_set.into_iter().collect();
    let index: BTreeMap<Utvpi, usize> = atoms.iter().enumerate().map(|(n, a)| (*a, n)).collect();
    let mut search = Search {
        atoms: &atoms,
        index: &index,
        formulas,
        assignment: vec![None; atoms.len()],
        nodes_left: budget,
        budget,
    };
    search.run()
}

struct Search<'a> {
    atoms: &'a [Utvpi],
    index: &'a BTreeMap<Utvpi, usize>,
    formulas: &'a [Butvpi],
    assignment: Vec<Option<bool>>,
    nodes_left: u64,
    budget: u64,
}

/// Three-valued evaluation result.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Partial {
    True,
    False,
    Unknown,
}

impl Search<'_> {
    fn run(&mut self) -> Result<SatResult, SolverError> {
        match self.dfs()? {
            Some(model) => Ok(SatResult::Sat(model)),
            None => Ok(SatResult::Unsat(Vec::new())),
        }
    }

    fn dfs(&mut self) -> Result<Option<IntAssignment>, SolverError> {
        if self.nodes_left == 0 {
            return Err(SolverError::ResourceLimit { budget: self.budget });
        }
        self.nodes_left -= 1;
        // Propagate forced polarities until stable.
        let saved = self.assignment.clone();
        loop {
            let mut progressed = false;
            for f in self.formulas {
                match self.eval(f) {
                    Partial::False => {
                        self.assignment.clone_from(&saved);
                        return Ok(None);
                    }
                    Partial::True => {}
                    Partial::Unknown => {
                        if self.force(f, true, &mut progressed).is_err() {
                            self.assignment.clone_from(&saved);
                            return Ok(None);
                        }
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        match self.assignment.iter().position(|a| a.is_none()) {
            None => {
                let theory: Vec<Utvpi> = self
                    .atoms
                    .iter()
                    .zip(&self.assignment)
                    .map(|(a, v)| if v.unwrap() { *a } else { a.negated() })
                    .collect();
                match utvpi_sat(&theory) {
                    SatResult::Sat(model) => Ok(Some(model)),
                    SatResult::Unsat(_) => {
                        self.assignment.clone_from(&saved);
                        Ok(None)
                    }
                }
            }
            Some(next) => {
                for choice in [true, false] {
                    self.assignment[next] = Some(choice);
                    if let Some(model) = self.dfs()? {
                        return Ok(Some(model));
                    }
                    self.assignment[next] = None;
                }
                self.assignment.clone_from(&saved);
                Ok(None)
            }
        }
    }

    fn eval(&self, f: &Butvpi) -> Partial {
        match f {
            Butvpi::Atom(a) => match self.assignment[self.index[a]] {
                Some(true) => Partial::True,
                Some(false) => Partial::False,
                None => Partial::Unknown,
            },
            Butvpi::Not(g) => match self.eval(g) {
                Partial::True => Partial::False,
                Partial::False => Partial::True,
                Partial::Unknown => Partial::Unknown,
            },
            Butvpi::And(fs) => {
                let mut out = Partial::True;
                for g in fs {
                    match self.eval(g) {
                        Partial::False => return Partial::False,
                        Partial::Unknown => out = Partial::Unknown,
                        Partial::True => {}
                    }
                }
                out
            }
            Butvpi::Or(fs) => {
                let mut out = Partial::False;
                for g in fs {
                    match self.eval(g) {
                        Partial::True => return Partial::True,
                        Partial::Unknown => out = Partial::Unknown,
                        Partial::False => {}
                    }
                }
                out
            }
        }
    }

    /// Assigns the polarities forced by requiring `f` to have truth value
    /// `required`; `Err(())` signals a conflict.
    fn force(&mut self, f: &Butvpi, required: bool, progressed: &mut bool) -> Result<(), ()> {
        match f {
            Butvpi::Atom(a) => {
                let idx = self.index[a];
                match self.assignment[idx] {
                    None => {
                        self.assignment[idx] = Some(required);
                        *progressed = true;
                        Ok(())
                    }
                    Some(v) if v == required => Ok(()),
                    Some(_) => Err(()),
                }
            }
            Butvpi::Not(g) => self.force(g, !required, progressed),
            Butvpi::And(fs) if required => {
                fs.iter().try_for_each(|g| self.force(g, true, progressed))
            }
            Butvpi::Or(fs) if !required => {
                fs.iter().try_for_each(|g| self.force(g, false, progressed))
            }
            Butvpi::And(fs) => {
                // Required false: forces only when a single child can still
                // fail.
                let open: Vec<&Butvpi> =
                    fs.iter().filter(|g| self.eval(g) != Partial::True).collect();
                match open.as_slice() {
                    [] => Err(()),
                    [one] => self.force(one, false, progressed),
                    _ => Ok(()),
                }
            }
            Butvpi::Or(fs) => {
                let open: Vec<&Butvpi> =
                    fs.iter().filter(|g| self.eval(g) != Partial::False).collect();
                match open.as_slice() {
                    [] => Err(()),
                    [one] => self.force(one, true, progressed),
                    _ => Ok(()),
                }
            }
        }
    }
}

/// Decides a set of constraints of either fragment: pure conjunctive sets go
/// straight to the atom-level solver, anything else through the Boolean
/// search.
pub fn solve_cformula_set<'a>(
    formulas: impl IntoIterator<Item = &'a CFormula>,
    budget: u64,
) -> Result<SatResult, SolverError> {
    let formulas: Vec<&CFormula> = formulas.into_iter().collect();
    if formulas.iter().all(|f| matches!(f, CFormula::Utvpi(_))) {
        let atoms: Vec<Utvpi> = formulas
            .iter()
            .flat_map(|f| match f {
                CFormula::Utvpi(atoms) => atoms.iter().copied(),
                CFormula::Butvpi(_) => unreachable!(),
            })
            .collect();
        return Ok(utvpi_sat(&atoms));
    }
    let trees: Vec<Butvpi> = formulas
        .iter()
        .map(|f| match f {
            CFormula::Utvpi(atoms) => {
                Butvpi::and(atoms.iter().map(|a| Butvpi::Atom(*a)).collect())
            }
            CFormula::Butvpi(b) => b.clone(),
        })
        .collect();
    butvpi_sat(&trees, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cformula::Utvpi::Const;

    fn single(a: i64, y: usize, d: i64) -> Utvpi {
        Utvpi::new(a, Some(y), 0, None, d).unwrap()
    }

    fn pair(a: i64, i: usize, b: i64, j: usize, d: i64) -> Utvpi {
        Utvpi::new(a, Some(i), b, Some(j), d).unwrap()
    }

    #[test]
    fn satisfiable_set_produces_checked_model() {
        // y1 + y2 <= 5, y2 >= 2, y1 >= y2
        let atoms = vec![pair(1, 1, 1, 2, 5), single(-1, 2, -2), pair(-1, 1, 1, 2, 0)];
        match utvpi_sat(&atoms) {
            SatResult::Sat(model) => assert!(check_model(&atoms, &model)),
            SatResult::Unsat(_) => panic!("expected sat"),
        }
    }

    #[test]
    fn contradictory_bounds_are_unsat_with_checkable_core() {
        // adding y2 >= 4 forces y1 >= 4 and y1 + y2 >= 8 > 5
        let atoms = vec![
            pair(1, 1, 1, 2, 5),
            single(-1, 2, -2),
            pair(-1, 1, 1, 2, 0),
            single(-1, 2, -4),
        ];
        match utvpi_sat(&atoms) {
            SatResult::Unsat(core) => {
                assert!(!core.is_empty());
                assert!(core.iter().all(|a| atoms.contains(a)));
                assert!(matches!(utvpi_sat(&core), SatResult::Unsat(_)));
            }
            SatResult::Sat(_) => panic!("expected unsat"),
        }
    }

    #[test]
    fn integer_gap_detected() {
        // y1 = y2 and y1 + y2 = 1: rationally fine at 1/2, no integer model.
        let atoms = vec![
            pair(1, 1, -1, 2, 0),
            pair(-1, 1, 1, 2, 0),
            pair(1, 1, 1, 2, 1),
            pair(-1, 1, -1, 2, -1),
        ];
        match utvpi_sat(&atoms) {
            SatResult::Unsat(core) => {
                assert!(matches!(utvpi_sat(&core), SatResult::Unsat(_)));
            }
            SatResult::Sat(m) => panic!("integer gap missed, got {m}"),
        }
    }

    #[test]
    fn tightening_shrinks_even_bounds() {
        // y1 = y2 and y1 + y2 <= 1 give 2*y1 <= 1, so y1 <= 0.
        let atoms = vec![
            pair(1, 1, -1, 2, 0),
            pair(-1, 1, 1, 2, 0),
            pair(1, 1, 1, 2, 1),
            single(-1, 1, 0), // y1 >= 0
        ];
        match utvpi_sat(&atoms) {
            SatResult::Sat(model) => {
                assert!(check_model(&atoms, &model));
                assert_eq!(model.get(YVar(1)), 0);
                assert_eq!(model.get(YVar(2)), 0);
            }
            SatResult::Unsat(_) => panic!("expected sat"),
        }
    }

    #[test]
    fn unconstrained_variables_default_to_zero() {
        let atoms = vec![single(1, 2, 3)];
        let model = utvpi_sat(&atoms).model().cloned().unwrap();
        assert_eq!(model.get(YVar(1)), 0);
        assert_eq!(model.get(YVar(2)), 0);
        assert!(utvpi_sat(&[]).is_sat());
    }

    #[test]
    fn constant_atoms() {
        assert!(utvpi_sat(&[Const { d: 0 }, Const { d: 7 }]).is_sat());
        match utvpi_sat(&[Const { d: -1 }]) {
            SatResult::Unsat(core) => assert_eq!(core, vec![Const { d: -1 }]),
            SatResult::Sat(_) => panic!("0 <= -1 must be unsat"),
        }
    }

    #[test]
    fn chained_lower_bounds_propagate() {
        // y1 >= 5, y2 >= y1 + 5, y3 >= y2 + 5
        let atoms = vec![single(-1, 1, -5), pair(1, 1, -1, 2, -5), pair(1, 2, -1, 3, -5)];
        let model = utvpi_sat(&atoms).model().cloned().unwrap();
        assert!(check_model(&atoms, &model));
        assert!(model.get(YVar(3)) >= 15);
    }

    #[test]
    fn boolean_search_finds_disjunct_models() {
        // (y1 <= 0 | y1 >= 2) & y1 = 1 is unsat
        let disj = Butvpi::or(vec![
            Butvpi::Atom(single(1, 1, 0)),
            Butvpi::Atom(single(-1, 1, -2)),
        ]);
        let eq_one = Butvpi::and(vec![
            Butvpi::Atom(single(1, 1, 1)),
            Butvpi::Atom(single(-1, 1, -1)),
        ]);
        let res = butvpi_sat(&[disj.clone(), eq_one], 1_000_000).unwrap();
        assert!(matches!(res, SatResult::Unsat(_)));
        // alone, the disjunction is satisfiable
        let res = butvpi_sat(&[disj.clone()], 1_000_000).unwrap();
        let model = res.model().unwrap();
        assert!(disj.eval(&|y| model.get(y)));
    }

    #[test]
    fn negated_subtrees_are_respected() {
        // !(y1 <= 0 & y2 <= 0) & y1 <= 0  forces y2 >= 1
        let not_both = Butvpi::not(Butvpi::and(vec![
            Butvpi::Atom(single(1, 1, 0)),
            Butvpi::Atom(single(1, 2, 0)),
        ]));
        let f = vec![not_both, Butvpi::Atom(single(1, 1, 0))];
        let model = butvpi_sat(&f, 1_000_000).unwrap().model().cloned().unwrap();
        assert!(model.get(YVar(1)) <= 0);
        assert!(model.get(YVar(2)) >= 1);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f: Vec<Butvpi> = (1..=6)
            .map(|v| {
                Butvpi::or(vec![
                    Butvpi::Atom(single(1, v, 0)),
                    Butvpi::Atom(single(-1, v, 0)),
                ])
            })
            .collect();
        assert_eq!(butvpi_sat(&f, 2), Err(SolverError::ResourceLimit { budget: 2 }));
        assert!(butvpi_sat(&f, 1_000_000).unwrap().is_sat());
    }

    #[test]
    fn mixed_formula_sets_route_through_boolean_search() {
        let conj = CFormula::Utvpi(vec![single(1, 1, 0), single(-1, 1, 0)]); // y1 = 0
        let tree = CFormula::Butvpi(Butvpi::or(vec![
            Butvpi::Atom(single(-1, 1, -1)), // y1 >= 1
            Butvpi::Atom(single(1, 2, -3)),  // y2 <= -3
        ]));
        let res = solve_cformula_set([&conj, &tree], 1_000_000).unwrap();
        let model = res.model().unwrap();
        assert_eq!(model.get(YVar(1)), 0);
        assert!(model.get(YVar(2)) <= -3);
    }
}
