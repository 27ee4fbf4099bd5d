//! Relational side of the problem: schemas with a non-interpreted /
//! interpreted column split, tuples and instances, selection conditions over
//! the non-interpreted columns, and the constraint kinds attached to a
//! problem (CDCs, views, inclusion dependencies, functional dependencies).
//!
//! Positions are 1-based.  A schema `R(x:k, y:m)` has non-interpreted
//! positions `1..=k` and interpreted positions `k+1..=k+m`; the interpreted
//! position `k+j` is the variable `yj` of the constraint language.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cformula::{CFormula, Mode, YVar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("schema must have at least one position")]
    EmptySchema,
    #[error("position {position} out of range 1..={arity}")]
    PositionOutOfRange { position: usize, arity: usize },
    #[error("inclusion dependency mixes non-interpreted and interpreted sides: R[{lhs}] <= R[{rhs}]")]
    MixedUind { lhs: usize, rhs: usize },
    #[error("functional dependency side mixes non-interpreted and interpreted positions: {fd}")]
    MixedFd { fd: Fd },
    #[error("functional dependency has an empty side: {fd}")]
    EmptyFdSide { fd: Fd },
    #[error("tuple arity ({got_x}, {got_y}) does not match schema ({want_x}, {want_y})")]
    ArityMismatch { want_x: usize, want_y: usize, got_x: usize, got_y: usize },
    #[error("duplicate view name {0}")]
    DuplicateViewName(String),
    #[error("constraint uses {found} formulas but the problem is in {declared} mode")]
    ModeMismatch { declared: Mode, found: Mode },
}

/// An uninterpreted constant.  Constants are compared by name only; nothing
/// else is known about them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomConstant(String);

impl DomConstant {
    pub fn new(name: impl Into<String>) -> DomConstant {
        DomConstant(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DomConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Relation schema with `x_arity` non-interpreted and `y_arity` interpreted
/// positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub x_arity: usize,
    pub y_arity: usize,
}

impl Schema {
    pub fn new(name: impl Into<String>, x_arity: usize, y_arity: usize) -> Result<Schema, ModelError> {
        if x_arity + y_arity == 0 {
            return Err(ModelError::EmptySchema);
        }
        Ok(Schema { name: name.into(), x_arity, y_arity })
    }

    pub fn arity(&self) -> usize {
        self.x_arity + self.y_arity
    }

    /// Maps a global interpreted position to its variable index.
    pub fn y_var(&self, position: usize) -> Option<YVar> {
        (position > self.x_arity && position <= self.arity())
            .then(|| YVar(position - self.x_arity))
    }
}

/// A tuple split into its non-interpreted and interpreted parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    pub x: Vec<DomConstant>,
    pub y: Vec<i64>,
}

impl Tuple {
    pub fn new(x: Vec<DomConstant>, y: Vec<i64>) -> Tuple {
        Tuple { x, y }
    }

    pub fn check_arity(&self, schema: &Schema) -> Result<(), ModelError> {
        if self.x.len() != schema.x_arity || self.y.len() != schema.y_arity {
            return Err(ModelError::ArityMismatch {
                want_x: schema.x_arity,
                want_y: schema.y_arity,
                got_x: self.x.len(),
                got_y: self.y.len(),
            });
        }
        Ok(())
    }

    /// Value at a global 1-based position.
    pub fn value_at(&self, position: usize) -> Value<'_> {
        if position <= self.x.len() {
            Value::Constant(&self.x[position - 1])
        } else {
            Value::Integer(self.y[position - 1 - self.x.len()])
        }
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        let mut first = true;
        for c in &self.x {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "\"{c}\"")?;
        }
        for v in &self.y {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A value in some column: a constant or an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value<'a> {
    Constant(&'a DomConstant),
    Integer(i64),
}

/// An equality test `x<position> = constant` (or its negation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EqAtom {
    pub position: usize,
    pub constant: DomConstant,
    pub negated: bool,
}

impl fmt::Display for EqAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.negated { "!=" } else { "=" };
        write!(f, "x{} {op} \"{}\"", self.position, self.constant)
    }
}

/// Boolean combination of equalities over the non-interpreted columns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoolExpr {
    True,
    Atom(EqAtom),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    /// Conjunction; drops `top` conjuncts, splices nested conjunctions and
    /// unwraps singletons.
    pub fn and(parts: Vec<BoolExpr>) -> BoolExpr {
        let mut kept = Vec::new();
        for p in parts {
            match p {
                BoolExpr::True => {}
                BoolExpr::And(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            0 => BoolExpr::True,
            1 => kept.pop().unwrap(),
            _ => BoolExpr::And(kept),
        }
    }

    /// Disjunction; absorbs into `top`, splices nested disjunctions and
    /// unwraps singletons.
    pub fn or(parts: Vec<BoolExpr>) -> BoolExpr {
        if parts.iter().any(|p| *p == BoolExpr::True) {
            return BoolExpr::True;
        }
        let mut kept = Vec::new();
        for p in parts {
            match p {
                BoolExpr::Or(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        match kept.len() {
            1 => kept.pop().unwrap(),
            _ => BoolExpr::Or(kept),
        }
    }

    /// Negation; folds atoms into their polarity flag and removes double
    /// negation.
    pub fn not(e: BoolExpr) -> BoolExpr {
        match e {
            BoolExpr::Atom(mut a) => {
                a.negated = !a.negated;
                BoolExpr::Atom(a)
            }
            BoolExpr::Not(inner) => *inner,
            other => BoolExpr::Not(Box::new(other)),
        }
    }

    pub fn eval(&self, t: &Tuple) -> bool {
        self.eval_with(&|pos, c| &t.x[pos - 1] == c)
    }

    /// Evaluates with an arbitrary interpretation of the equalities; `holds`
    /// answers whether position `pos` carries constant `c`.
    pub fn eval_with(&self, holds: &impl Fn(usize, &DomConstant) -> bool) -> bool {
        match self {
            BoolExpr::True => true,
            BoolExpr::Atom(a) => holds(a.position, &a.constant) != a.negated,
            BoolExpr::Not(e) => !e.eval_with(holds),
            BoolExpr::And(es) => es.iter().all(|e| e.eval_with(holds)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval_with(holds)),
        }
    }

    pub fn atoms(&self, out: &mut Vec<EqAtom>) {
        match self {
            BoolExpr::True => {}
            BoolExpr::Atom(a) => out.push(a.clone()),
            BoolExpr::Not(e) => e.atoms(out),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().for_each(|e| e.atoms(out)),
        }
    }

    pub fn mentions_position(&self, position: usize) -> bool {
        let mut atoms = Vec::new();
        self.atoms(&mut atoms);
        atoms.iter().any(|a| a.position == position)
    }

    pub fn max_position(&self) -> usize {
        let mut atoms = Vec::new();
        self.atoms(&mut atoms);
        atoms.iter().map(|a| a.position).max().unwrap_or(0)
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_part(f: &mut fmt::Formatter<'_>, e: &BoolExpr, in_and: bool) -> fmt::Result {
            if matches!(e, BoolExpr::Or(_)) && in_and {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            BoolExpr::True => write!(f, "top"),
            BoolExpr::Atom(a) => write!(f, "{a}"),
            BoolExpr::Not(e) => write!(f, "!({e})"),
            BoolExpr::And(es) => {
                for (n, e) in es.iter().enumerate() {
                    if n > 0 {
                        write!(f, " & ")?;
                    }
                    write_part(f, e, true)?;
                }
                Ok(())
            }
            BoolExpr::Or(es) => {
                for (n, e) in es.iter().enumerate() {
                    if n > 0 {
                        write!(f, " | ")?;
                    }
                    write_part(f, e, false)?;
                }
                Ok(())
            }
        }
    }
}

/// Conditional domain constraint: when the antecedent holds on the
/// non-interpreted part of a tuple, the consequent must hold on its
/// interpreted part.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cdc {
    pub antecedent: BoolExpr,
    pub consequent: CFormula,
}

impl Cdc {
    pub fn satisfied_by(&self, t: &Tuple) -> bool {
        !self.antecedent.eval(t) || self.consequent.eval_on(&t.y)
    }
}

impl fmt::Display for Cdc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.antecedent, self.consequent)
    }
}

/// A selection view: selects the tuples satisfying the condition over the
/// non-interpreted columns and, when present, the condition over the
/// interpreted columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewDef {
    pub name: String,
    pub x_condition: BoolExpr,
    pub y_condition: Option<CFormula>,
}

impl ViewDef {
    pub fn selects(&self, t: &Tuple) -> bool {
        self.x_condition.eval(t)
            && self.y_condition.as_ref().map_or(true, |c| c.eval_on(&t.y))
    }
}

/// Unary inclusion dependency `R[lhs] <= R[rhs]` over global positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uind {
    pub lhs: usize,
    pub rhs: usize,
}

impl fmt::Display for Uind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R[{}] <= R[{}]", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UindKind {
    /// Both positions non-interpreted.
    X,
    /// Both positions interpreted.
    Y,
}

impl fmt::Display for UindKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UindKind::X => write!(f, "X-UIND"),
            UindKind::Y => write!(f, "Y-UIND"),
        }
    }
}

/// Classifies an inclusion dependency by the side of the schema split its
/// positions fall on.
pub fn classify_uind(uind: &Uind, schema: &Schema) -> Result<UindKind, ModelError> {
    let arity = schema.arity();
    for p in [uind.lhs, uind.rhs] {
        if p == 0 || p > arity {
            return Err(ModelError::PositionOutOfRange { position: p, arity });
        }
    }
    let k = schema.x_arity;
    match (uind.lhs <= k, uind.rhs <= k) {
        (true, true) => Ok(UindKind::X),
        (false, false) => Ok(UindKind::Y),
        _ => Err(ModelError::MixedUind { lhs: uind.lhs, rhs: uind.rhs }),
    }
}

/// Functional dependency over global positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fd {
    pub lhs: BTreeSet<usize>,
    pub rhs: BTreeSet<usize>,
}

impl fmt::Display for Fd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, s: &BTreeSet<usize>| -> fmt::Result {
            write!(f, "{{")?;
            for (n, p) in s.iter().enumerate() {
                if n > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, "}}")
        };
        side(f, &self.lhs)?;
        write!(f, " -> ")?;
        side(f, &self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdClass {
    /// Determinant and dependent both non-interpreted.
    X,
    /// Both interpreted.
    Y,
    /// Non-interpreted determines interpreted.
    XY,
    /// Interpreted determines non-interpreted.
    YX,
}

impl fmt::Display for FdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FdClass::X => write!(f, "X-FD"),
            FdClass::Y => write!(f, "Y-FD"),
            FdClass::XY => write!(f, "XY-FD"),
            FdClass::YX => write!(f, "YX-FD"),
        }
    }
}

/// Classifies a functional dependency; each side must lie entirely on one
/// side of the schema split.
pub fn classify_fd(fd: &Fd, schema: &Schema) -> Result<FdClass, ModelError> {
    let arity = schema.arity();
    for p in fd.lhs.iter().chain(fd.rhs.iter()) {
        if *p == 0 || *p > arity {
            return Err(ModelError::PositionOutOfRange { position: *p, arity });
        }
    }
    if fd.lhs.is_empty() || fd.rhs.is_empty() {
        return Err(ModelError::EmptyFdSide { fd: fd.clone() });
    }
    let k = schema.x_arity;
    let side = |s: &BTreeSet<usize>| -> Option<bool> {
        // Some(true) = all non-interpreted, Some(false) = all interpreted.
        let xs = s.iter().all(|p| *p <= k);
        let ys = s.iter().all(|p| *p > k);
        match (xs, ys) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    };
    match (side(&fd.lhs), side(&fd.rhs)) {
        (Some(true), Some(true)) => Ok(FdClass::X),
        (Some(false), Some(false)) => Ok(FdClass::Y),
        (Some(true), Some(false)) => Ok(FdClass::XY),
        (Some(false), Some(true)) => Ok(FdClass::YX),
        _ => Err(ModelError::MixedFd { fd: fd.clone() }),
    }
}

/// A finite extension of the source relation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    pub tuples: BTreeSet<Tuple>,
}

impl Instance {
    pub fn from_tuples(tuples: impl IntoIterator<Item = Tuple>) -> Instance {
        Instance { tuples: tuples.into_iter().collect() }
    }

    pub fn satisfies_cdc(&self, cdc: &Cdc) -> bool {
        self.tuples.iter().all(|t| cdc.satisfied_by(t))
    }

    pub fn satisfies_uind(&self, uind: &Uind) -> bool {
        let column = |p: usize| -> BTreeSet<Value<'_>> {
            self.tuples.iter().map(|t| t.value_at(p)).collect()
        };
        column(uind.lhs).is_subset(&column(uind.rhs))
    }

    pub fn satisfies_fd(&self, fd: &Fd) -> bool {
        let project = |t: &Tuple, s: &BTreeSet<usize>| -> Vec<String> {
            s.iter()
                .map(|p| match t.value_at(*p) {
                    Value::Constant(c) => format!("c:{c}"),
                    Value::Integer(v) => format!("i:{v}"),
                })
                .collect()
        };
        let tuples: Vec<&Tuple> = self.tuples.iter().collect();
        for (n, t) in tuples.iter().enumerate() {
            for u in &tuples[n + 1..] {
                if project(t, &fd.lhs) == project(u, &fd.lhs)
                    && project(t, &fd.rhs) != project(u, &fd.rhs)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// A full decision problem: schema, language mode, and the declared
/// constraints and views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub schema: Schema,
    pub mode: Mode,
    pub cdcs: Vec<Cdc>,
    pub views: Vec<ViewDef>,
    pub uinds: Vec<Uind>,
    pub fds: Vec<Fd>,
}

impl Problem {
    pub fn new(schema: Schema, mode: Mode) -> Problem {
        Problem { schema, mode, cdcs: Vec::new(), views: Vec::new(), uinds: Vec::new(), fds: Vec::new() }
    }

    /// Checks positional and structural well-formedness: positions within
    /// arity, formula variants matching the declared mode, unique view
    /// names, and homogeneous dependency sides.
    pub fn validate(&self) -> Result<(), ModelError> {
        let k = self.schema.x_arity;
        let m = self.schema.y_arity;
        let check_x = |e: &BoolExpr| -> Result<(), ModelError> {
            let p = e.max_position();
            if p > k {
                return Err(ModelError::PositionOutOfRange { position: p, arity: k });
            }
            Ok(())
        };
        let check_c = |c: &CFormula| -> Result<(), ModelError> {
            match (self.mode, c) {
                (Mode::Utvpi, CFormula::Butvpi(_)) => {
                    return Err(ModelError::ModeMismatch { declared: Mode::Utvpi, found: Mode::Butvpi })
                }
                (Mode::Butvpi, CFormula::Utvpi(_)) => {
                    return Err(ModelError::ModeMismatch { declared: Mode::Butvpi, found: Mode::Utvpi })
                }
                _ => {}
            }
            if let Some(v) = c.vars().iter().max() {
                if v.0 > m {
                    return Err(ModelError::PositionOutOfRange { position: k + v.0, arity: k + m });
                }
            }
            Ok(())
        };
        for cdc in &self.cdcs {
            check_x(&cdc.antecedent)?;
            check_c(&cdc.consequent)?;
        }
        let mut names = BTreeSet::new();
        for view in &self.views {
            if !names.insert(view.name.clone()) {
                return Err(ModelError::DuplicateViewName(view.name.clone()));
            }
            check_x(&view.x_condition)?;
            if let Some(c) = &view.y_condition {
                check_c(c)?;
            }
        }
        for uind in &self.uinds {
            classify_uind(uind, &self.schema)?;
        }
        for fd in &self.fds {
            classify_fd(fd, &self.schema)?;
        }
        Ok(())
    }

    /// All constants mentioned at each non-interpreted position, across CDC
    /// antecedents and view conditions.
    pub fn constants_by_position(&self) -> Vec<BTreeSet<DomConstant>> {
        let mut by_pos = vec![BTreeSet::new(); self.schema.x_arity];
        let mut atoms = Vec::new();
        for cdc in &self.cdcs {
            cdc.antecedent.atoms(&mut atoms);
        }
        for view in &self.views {
            view.x_condition.atoms(&mut atoms);
        }
        for a in atoms {
            if a.position >= 1 && a.position <= by_pos.len() {
                by_pos[a.position - 1].insert(a.constant);
            }
        }
        by_pos
    }
}
