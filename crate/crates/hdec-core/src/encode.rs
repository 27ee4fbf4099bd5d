//! Propositional encoding of the equality conditions.
//!
//! Every equality `xi = a` occurring in a CDC antecedent or a view condition
//! becomes a propositional variable `p(i,a)`.  A CDC turns into an
//! implication `P -> v` whose right-hand side is a fresh variable standing
//! for the interpreted-side consequent (recorded in an [`IdfMap`]); a view
//! turns into `P -> v'` when it has an interpreted-side condition and
//! `P -> bottom` otherwise.  The auxiliary theory holds the formulas with a
//! `bottom` right-hand side together with the unique-value axioms
//! `p(i,a) & p(i,b) -> bottom` for distinct constants at one position.
//!
//! A valuation fixes, for every position that carries propositional
//! variables, either one chosen constant or none; this representation cannot
//! assign two constants to one position, so the unique-value axioms hold by
//! construction.  Valuations are enumerated in lexicographic order: positions
//! ascending, and per position "no constant" first, then the constants in
//! ascending name order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cformula::{CFormula, LangError, negate_cformula};
use crate::model::{BoolExpr, Cdc, DomConstant, EqAtom, ViewDef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("valuation assigns two constants at position {position}: {first} and {second}")]
    AlphaViolatesUniqueValue { position: usize, first: DomConstant, second: DomConstant },
}

/// Identifier of a fresh variable standing for an interpreted-side formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CVarId(pub u32);

impl fmt::Display for CVarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Allocator keeping [`CVarId`]s unique across one encoding run.
#[derive(Debug, Default)]
pub struct CVarGen(u32);

impl CVarGen {
    pub fn new() -> CVarGen {
        CVarGen::default()
    }

    pub fn fresh(&mut self) -> CVarId {
        let id = CVarId(self.0);
        self.0 += 1;
        id
    }
}

/// Right-hand side of a propositional implication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rhs {
    Var(CVarId),
    Bottom,
}

/// Implication `lhs -> rhs`; the left-hand side reads its equality atoms as
/// propositional variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropFormula {
    pub lhs: BoolExpr,
    pub rhs: Rhs,
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rhs {
            Rhs::Var(v) => write!(f, "{} -> {v}", self.lhs),
            Rhs::Bottom => write!(f, "{} -> bottom", self.lhs),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropTheory {
    pub formulas: Vec<PropFormula>,
}

/// Maps the fresh variables back to the interpreted-side formulas they stand
/// for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdfMap(BTreeMap<CVarId, CFormula>);

impl IdfMap {
    pub fn get(&self, v: CVarId) -> Option<&CFormula> {
        self.0.get(&v)
    }

    pub fn insert(&mut self, v: CVarId, f: CFormula) {
        self.0.insert(v, f);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Union of two maps; ids never collide when both came from one
    /// [`CVarGen`].
    pub fn merged(&self, other: &IdfMap) -> IdfMap {
        let mut out = self.clone();
        for (v, f) in &other.0 {
            out.0.insert(*v, f.clone());
        }
        out
    }
}

/// The propositional variables of a set of theories, grouped by position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarP(BTreeMap<usize, BTreeSet<DomConstant>>);

impl VarP {
    pub fn from_theories<'a>(theories: impl IntoIterator<Item = &'a PropTheory>) -> VarP {
        let mut map: BTreeMap<usize, BTreeSet<DomConstant>> = BTreeMap::new();
        let mut atoms = Vec::new();
        for theory in theories {
            for f in &theory.formulas {
                f.lhs.atoms(&mut atoms);
            }
        }
        for a in atoms {
            map.entry(a.position).or_default().insert(a.constant);
        }
        VarP(map)
    }

    pub fn positions(&self) -> impl Iterator<Item = (usize, &BTreeSet<DomConstant>)> {
        self.0.iter().map(|(p, cs)| (*p, cs))
    }

    /// Number of propositional variables.
    pub fn len(&self) -> usize {
        self.0.values().map(|cs| cs.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The valuation induced by a concrete choice of constants for the
    /// non-interpreted columns (1-based position `i` holds `x[i-1]`).
    pub fn valuation_of_x(&self, x: &[DomConstant]) -> Valuation {
        let choices = self
            .0
            .iter()
            .map(|(p, cs)| {
                let at = x.get(*p - 1);
                (*p, at.filter(|c| cs.contains(*c)).cloned())
            })
            .collect();
        Valuation { choices }
    }
}

/// A truth assignment to the propositional variables, stored as one chosen
/// constant (or none) per position.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Valuation {
    choices: BTreeMap<usize, Option<DomConstant>>,
}

impl Valuation {
    /// Builds a valuation from explicit variable assignments, rejecting
    /// assignments that set two constants at one position.
    pub fn try_from_assignments<'a>(
        var_p: &VarP,
        assignments: impl IntoIterator<Item = (usize, &'a DomConstant, bool)>,
    ) -> Result<Valuation, EncodeError> {
        let mut choices: BTreeMap<usize, Option<DomConstant>> =
            var_p.0.keys().map(|p| (*p, None)).collect();
        for (position, constant, value) in assignments {
            if !value {
                continue;
            }
            match choices.entry(position).or_insert(None) {
                slot @ None => *slot = Some(constant.clone()),
                Some(first) if first == constant => {}
                Some(first) => {
                    return Err(EncodeError::AlphaViolatesUniqueValue {
                        position,
                        first: first.clone(),
                        second: constant.clone(),
                    })
                }
            }
        }
        Ok(Valuation { choices })
    }

    /// Truth value of the variable `p(position, constant)`.
    pub fn holds(&self, position: usize, constant: &DomConstant) -> bool {
        matches!(self.choices.get(&position), Some(Some(c)) if c == constant)
    }

    /// The chosen constant at a position, if any.
    pub fn chosen(&self, position: usize) -> Option<&DomConstant> {
        self.choices.get(&position).and_then(|c| c.as_ref())
    }

    /// Evaluates a propositional left-hand side under this valuation.
    pub fn eval(&self, e: &BoolExpr) -> bool {
        e.eval_with(&|pos, c| self.holds(pos, c))
    }

    /// All variable values over a declared variable set, sorted by
    /// (position, constant).
    pub fn assignments<'a>(
        &'a self,
        var_p: &'a VarP,
    ) -> impl Iterator<Item = (usize, &'a DomConstant, bool)> + 'a {
        var_p
            .0
            .iter()
            .flat_map(move |(p, cs)| cs.iter().map(move |c| (*p, c, self.holds(*p, c))))
    }

    pub fn render(&self, var_p: &VarP) -> String {
        let parts: Vec<String> = self
            .assignments(var_p)
            .map(|(p, c, v)| format!("p{p}^{c}: {}", if v { "T" } else { "F" }))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (p, c)) in self.choices.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            match c {
                Some(c) => write!(f, "x{p} = \"{c}\"")?,
                None => write!(f, "x{p} = *")?,
            }
        }
        write!(f, "}}")
    }
}

/// Encodes a CDC set: one implication per CDC with a fresh right-hand
/// variable mapped to the consequent.
pub fn encode_cdcs(cdcs: &[Cdc], gen: &mut CVarGen) -> (PropTheory, IdfMap) {
    let mut theory = PropTheory::default();
    let mut idf = IdfMap::default();
    for cdc in cdcs {
        let v = gen.fresh();
        theory.formulas.push(PropFormula { lhs: cdc.antecedent.clone(), rhs: Rhs::Var(v) });
        idf.insert(v, cdc.consequent.clone());
    }
    (theory, idf)
}

/// Encodes a view set: views with an interpreted-side condition get a fresh
/// variable, pure selections map to `bottom`.
pub fn encode_views(views: &[ViewDef], gen: &mut CVarGen) -> (PropTheory, IdfMap) {
    let mut theory = PropTheory::default();
    let mut idf = IdfMap::default();
    for view in views {
        let rhs = match &view.y_condition {
            Some(cond) => {
                let v = gen.fresh();
                idf.insert(v, cond.clone());
                Rhs::Var(v)
            }
            None => Rhs::Bottom,
        };
        theory.formulas.push(PropFormula { lhs: view.x_condition.clone(), rhs });
    }
    (theory, idf)
}

/// The admissibility theory: unique-value axioms for `var_p` plus every
/// input formula whose right-hand side is `bottom`.
pub fn aux_theory<'a>(
    theories: impl IntoIterator<Item = &'a PropTheory>,
    var_p: &VarP,
) -> PropTheory {
    let mut out = PropTheory::default();
    for (position, constants) in var_p.positions() {
        let constants: Vec<&DomConstant> = constants.iter().collect();
        for (n, a) in constants.iter().enumerate() {
            for b in &constants[n + 1..] {
                let atom = |c: &DomConstant| {
                    BoolExpr::Atom(EqAtom { position, constant: c.clone(), negated: false })
                };
                out.formulas.push(PropFormula {
                    lhs: BoolExpr::And(vec![atom(a), atom(b)]),
                    rhs: Rhs::Bottom,
                });
            }
        }
    }
    for theory in theories {
        for f in &theory.formulas {
            if f.rhs == Rhs::Bottom {
                out.formulas.push(f.clone());
            }
        }
    }
    out
}

/// Streams every valuation of `var_p` that satisfies the auxiliary theory,
/// in lexicographic order.  The position-wise representation already
/// enforces the unique-value axioms; the `bottom` implications are checked
/// per candidate.
pub fn enumerate_valuations<'a>(var_p: &VarP, aux: &'a PropTheory) -> ValuationIter<'a> {
    let positions: Vec<(usize, Vec<Option<DomConstant>>)> = var_p
        .positions()
        .map(|(p, cs)| {
            let mut options: Vec<Option<DomConstant>> = vec![None];
            options.extend(cs.iter().cloned().map(Some));
            (p, options)
        })
        .collect();
    ValuationIter { positions, odometer: None, aux, done: false }
}

pub struct ValuationIter<'a> {
    positions: Vec<(usize, Vec<Option<DomConstant>>)>,
    odometer: Option<Vec<usize>>,
    aux: &'a PropTheory,
    done: bool,
}

impl ValuationIter<'_> {
    fn current(&self) -> Valuation {
        let odo = self.odometer.as_ref().expect("initialized");
        Valuation {
            choices: self
                .positions
                .iter()
                .zip(odo)
                .map(|((p, options), idx)| (*p, options[*idx].clone()))
                .collect(),
        }
    }

    /// Advances the odometer; the last position cycles fastest.
    fn advance(&mut self) {
        let odo = match &mut self.odometer {
            None => {
                self.odometer = Some(vec![0; self.positions.len()]);
                return;
            }
            Some(odo) => odo,
        };
        for i in (0..odo.len()).rev() {
            odo[i] += 1;
            if odo[i] < self.positions[i].1.len() {
                return;
            }
            odo[i] = 0;
        }
        self.done = true;
    }

    fn admissible(&self, candidate: &Valuation) -> bool {
        self.aux
            .formulas
            .iter()
            .all(|f| f.rhs != Rhs::Bottom || !candidate.eval(&f.lhs))
    }
}

impl Iterator for ValuationIter<'_> {
    type Item = Valuation;

    fn next(&mut self) -> Option<Valuation> {
        loop {
            self.advance();
            if self.done {
                return None;
            }
            let candidate = self.current();
            if self.admissible(&candidate) {
                return Some(candidate);
            }
        }
    }
}

/// The interpreted-side constraints a valuation makes applicable: the
/// consequents of the implications whose left-hand side it satisfies.
pub fn alpha_filter_cdc(theory: &PropTheory, idf: &IdfMap, alpha: &Valuation) -> BTreeSet<CFormula> {
    let mut out = BTreeSet::new();
    for f in &theory.formulas {
        if let Rhs::Var(v) = f.rhs {
            if alpha.eval(&f.lhs) {
                out.insert(idf.get(v).expect("identified formula").clone());
            }
        }
    }
    out
}

/// The negated interpreted-side conditions of the views a valuation makes
/// applicable; pure selections (`bottom` right-hand sides) contribute
/// nothing here.
pub fn alpha_filter_views(
    theory: &PropTheory,
    idf: &IdfMap,
    alpha: &Valuation,
) -> Result<BTreeSet<CFormula>, LangError> {
    let mut out = BTreeSet::new();
    for f in &theory.formulas {
        if let Rhs::Var(v) = f.rhs {
            if alpha.eval(&f.lhs) {
                out.insert(negate_cformula(idf.get(v).expect("identified formula"))?);
            }
        }
    }
    Ok(out)
}
