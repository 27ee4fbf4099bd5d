//! Constraint language over the interpreted (integer) columns.
//!
//! The atomic constraints are unit-two-variable inequalities
//!
//! ```text
//!   a*yi + b*yj <= d        a, b in {-1, 0, 1}
//! ```
//!
//! kept in a canonical form: at most two distinct variables, the
//! lower-indexed variable first, and `<=` as the only comparison.  The other
//! comparison operators are rewritten on entry:
//!
//! ```text
//!   e >= d   becomes   -e <= -d
//!   e <  d   becomes    e <= d - 1
//!   e >  d   becomes   -e <= -d - 1
//!   e =  d   becomes    e <= d   and   -e <= -d
//! ```
//!
//! In `utvpi` mode a constraint is a conjunctive set of atoms; `butvpi` mode
//! additionally allows arbitrary `&`, `|`, `!` combinations.  Negation of a
//! single atom stays in the language: `!(a*yi + b*yj <= d)` is
//! `-a*yi + -b*yj <= -d - 1`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{BoolExpr, Cdc, EqAtom, Schema, ViewDef};

/// Which fragment of the constraint language a problem uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Utvpi,
    Butvpi,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Utvpi => write!(f, "utvpi"),
            Mode::Butvpi => write!(f, "butvpi"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("coefficient {0} out of range: unit coefficients are -1, 0 or 1")]
    CoefficientOutOfRange(i64),
    #[error("negation of a multi-atom conjunction is not expressible in utvpi mode")]
    NegationNotSingleAtom,
    #[error("domain constraints need at least one interpreted position")]
    NoInterpretedPosition,
    #[error("bound {0} leaves the 64-bit range after rewriting")]
    BoundOutOfRange(i64),
}

/// Sign of a unit coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn apply(self, v: i128) -> i128 {
        match self {
            Sign::Pos => v,
            Sign::Neg => -v,
        }
    }

    fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// Interpreted variable index, 1-based: `y1` is `YVar(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YVar(pub usize);

impl fmt::Display for YVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y{}", self.0)
    }
}

/// A canonical atom `a*yi + b*yj <= d`.
///
/// `Const` covers the degenerate `0 <= d` case (true iff `d >= 0`), which can
/// arise from input like `y1 - y1 <= d`.  `Pair` always has `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Utvpi {
    Const { d: i64 },
    Single { a: Sign, y: YVar, d: i64 },
    Pair { a: Sign, i: YVar, b: Sign, j: YVar, d: i64 },
}

impl Utvpi {
    /// Builds a canonical atom from raw coefficients.  `i`/`j` are 1-based
    /// variable indices; a zero coefficient must come with `None`.
    pub fn new(
        a: i64,
        i: Option<usize>,
        b: i64,
        j: Option<usize>,
        d: i64,
    ) -> Result<Utvpi, LangError> {
        let term = |c: i64, v: Option<usize>| -> Result<Option<(Sign, YVar)>, LangError> {
            match (c, v) {
                (0, _) | (_, None) => Ok(None),
                (1, Some(v)) => Ok(Some((Sign::Pos, YVar(v)))),
                (-1, Some(v)) => Ok(Some((Sign::Neg, YVar(v)))),
                (c, _) => Err(LangError::CoefficientOutOfRange(c)),
            }
        };
        let atom = match (term(a, i)?, term(b, j)?) {
            (None, None) => Utvpi::Const { d },
            (Some((a, y)), None) | (None, Some((a, y))) => Utvpi::Single { a, y, d },
            (Some((a, i)), Some((b, j))) => {
                if i == j {
                    if a == b {
                        // y + y or -y - y: coefficient 2 is not unit.
                        return Err(LangError::CoefficientOutOfRange(2 * a.as_i8() as i64));
                    }
                    Utvpi::Const { d }
                } else if i < j {
                    Utvpi::Pair { a, i, b, j, d }
                } else {
                    Utvpi::Pair { a: b, i: j, b: a, j: i, d }
                }
            }
        };
        Ok(atom)
    }

    /// The complement atom: `!(e <= d)` is `-e <= -d - 1`.
    pub fn negated(&self) -> Utvpi {
        // -d - 1 is bitwise not in two's complement, total on all of i64.
        let neg = |d: i64| !d;
        match *self {
            Utvpi::Const { d } => Utvpi::Const { d: neg(d) },
            Utvpi::Single { a, y, d } => Utvpi::Single { a: a.flip(), y, d: neg(d) },
            Utvpi::Pair { a, i, b, j, d } => {
                Utvpi::Pair { a: a.flip(), i, b: b.flip(), j, d: neg(d) }
            }
        }
    }

    /// Evaluates the atom under `value` (arithmetic in i128, no overflow).
    pub fn eval(&self, value: impl Fn(YVar) -> i64) -> bool {
        match *self {
            Utvpi::Const { d } => 0 <= d,
            Utvpi::Single { a, y, d } => a.apply(value(y) as i128) <= d as i128,
            Utvpi::Pair { a, i, b, j, d } => {
                a.apply(value(i) as i128) + b.apply(value(j) as i128) <= d as i128
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<YVar> {
        match *self {
            Utvpi::Const { .. } => BTreeSet::new(),
            Utvpi::Single { y, .. } => BTreeSet::from([y]),
            Utvpi::Pair { i, j, .. } => BTreeSet::from([i, j]),
        }
    }

    pub fn bound(&self) -> i64 {
        match *self {
            Utvpi::Const { d } | Utvpi::Single { d, .. } | Utvpi::Pair { d, .. } => d,
        }
    }

    fn rename(&self, from: YVar, to: YVar) -> Result<Utvpi, LangError> {
        let map = |y: YVar| if y == from { to } else { y };
        match *self {
            Utvpi::Const { d } => Ok(Utvpi::Const { d }),
            Utvpi::Single { a, y, d } => Ok(Utvpi::Single { a, y: map(y), d }),
            Utvpi::Pair { a, i, b, j, d } => Utvpi::new(
                a.as_i8() as i64,
                Some(map(i).0),
                b.as_i8() as i64,
                Some(map(j).0),
                d,
            ),
        }
    }
}

impl fmt::Display for Utvpi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |s: Sign| if s == Sign::Pos { "" } else { "-" };
        match *self {
            Utvpi::Const { d } => write!(f, "0 <= {d}"),
            Utvpi::Single { a, y, d } => write!(f, "{}{y} <= {d}", sign(a)),
            Utvpi::Pair { a, i, b, j, d } => {
                let op = if b == Sign::Pos { "+" } else { "-" };
                write!(f, "{}{i} {op} {j} <= {d}", sign(a))
            }
        }
    }
}

/// Comparison operators accepted on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
}

/// Rewrites `a*yi + b*yj <op> d` into canonical `<=` atoms (one atom, or two
/// for `=`).
pub fn normalize_comparison(
    op: Cmp,
    a: i64,
    i: Option<usize>,
    b: i64,
    j: Option<usize>,
    d: i64,
) -> Result<Vec<Utvpi>, LangError> {
    let le = |a: i64, b: i64, d: i64| Utvpi::new(a, i, b, j, d);
    let ge = |a: i64, b: i64, d: i64| -> Result<Utvpi, LangError> {
        let nd = d.checked_neg().ok_or(LangError::BoundOutOfRange(d))?;
        Utvpi::new(-a, i, -b, j, nd)
    };
    match op {
        Cmp::Le => Ok(vec![le(a, b, d)?]),
        Cmp::Ge => Ok(vec![ge(a, b, d)?]),
        Cmp::Lt => {
            let d = d.checked_sub(1).ok_or(LangError::BoundOutOfRange(d))?;
            Ok(vec![le(a, b, d)?])
        }
        Cmp::Gt => {
            let d = d.checked_add(1).ok_or(LangError::BoundOutOfRange(d))?;
            Ok(vec![ge(a, b, d)?])
        }
        Cmp::Eq => Ok(vec![le(a, b, d)?, ge(a, b, d)?]),
    }
}

/// Boolean combination of atoms (`butvpi` mode).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Butvpi {
    Atom(Utvpi),
    Not(Box<Butvpi>),
    And(Vec<Butvpi>),
    Or(Vec<Butvpi>),
}

impl Butvpi {
    /// Negation with the two canonicalizations that keep printing stable:
    /// `!!f` collapses to `f` and `!atom` folds into the complement atom.
    pub fn not(f: Butvpi) -> Butvpi {
        match f {
            Butvpi::Atom(a) => Butvpi::Atom(a.negated()),
            Butvpi::Not(inner) => *inner,
            other => Butvpi::Not(Box::new(other)),
        }
    }

    /// Conjunction; splices nested conjunctions and unwraps singletons.
    pub fn and(parts: Vec<Butvpi>) -> Butvpi {
        let mut kept = Vec::new();
        for p in parts {
            match p {
                Butvpi::And(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        if kept.len() == 1 { kept.pop().unwrap() } else { Butvpi::And(kept) }
    }

    /// Disjunction; splices nested disjunctions and unwraps singletons.
    pub fn or(parts: Vec<Butvpi>) -> Butvpi {
        let mut kept = Vec::new();
        for p in parts {
            match p {
                Butvpi::Or(inner) => kept.extend(inner),
                other => kept.push(other),
            }
        }
        if kept.len() == 1 { kept.pop().unwrap() } else { Butvpi::Or(kept) }
    }

    pub fn eval(&self, value: &impl Fn(YVar) -> i64) -> bool {
        match self {
            Butvpi::Atom(a) => a.eval(value),
            Butvpi::Not(f) => !f.eval(value),
            Butvpi::And(fs) => fs.iter().all(|f| f.eval(value)),
            Butvpi::Or(fs) => fs.iter().any(|f| f.eval(value)),
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Utvpi>) {
        match self {
            Butvpi::Atom(a) => {
                out.insert(*a);
            }
            Butvpi::Not(f) => f.atoms(out),
            Butvpi::And(fs) | Butvpi::Or(fs) => fs.iter().for_each(|f| f.atoms(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<YVar> {
        let mut atoms = BTreeSet::new();
        self.atoms(&mut atoms);
        atoms.iter().flat_map(|a| a.vars()).collect()
    }

    fn rename(&self, from: YVar, to: YVar) -> Result<Butvpi, LangError> {
        Ok(match self {
            Butvpi::Atom(a) => Butvpi::Atom(a.rename(from, to)?),
            Butvpi::Not(f) => Butvpi::Not(Box::new(f.rename(from, to)?)),
            Butvpi::And(fs) => Butvpi::And(
                fs.iter().map(|f| f.rename(from, to)).collect::<Result<_, _>>()?,
            ),
            Butvpi::Or(fs) => Butvpi::Or(
                fs.iter().map(|f| f.rename(from, to)).collect::<Result<_, _>>()?,
            ),
        })
    }
}

impl fmt::Display for Butvpi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, inner: &Butvpi, in_and: bool) -> fmt::Result {
            let needs = matches!(inner, Butvpi::Or(_)) && in_and;
            if needs {
                write!(f, "(")?;
                write!(f, "{inner}")?;
                write!(f, ")")
            } else {
                write!(f, "{inner}")
            }
        }
        match self {
            Butvpi::Atom(a) => write!(f, "{a}"),
            Butvpi::Not(inner) => write!(f, "!({inner})"),
            Butvpi::And(fs) => {
                for (n, part) in fs.iter().enumerate() {
                    if n > 0 {
                        write!(f, " & ")?;
                    }
                    paren(f, part, true)?;
                }
                Ok(())
            }
            Butvpi::Or(fs) => {
                for (n, part) in fs.iter().enumerate() {
                    if n > 0 {
                        write!(f, " | ")?;
                    }
                    paren(f, part, false)?;
                }
                Ok(())
            }
        }
    }
}

/// A constraint over the interpreted columns, tagged by language fragment.
///
/// `Utvpi` holds a conjunctive set of atoms.  CDC consequents in utvpi mode
/// are a single atom after desugaring; view conditions may keep several.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CFormula {
    Utvpi(Vec<Utvpi>),
    Butvpi(Butvpi),
}

impl CFormula {
    pub fn eval(&self, value: impl Fn(YVar) -> i64) -> bool {
        match self {
            CFormula::Utvpi(atoms) => atoms.iter().all(|a| a.eval(&value)),
            CFormula::Butvpi(f) => f.eval(&value),
        }
    }

    pub fn eval_on(&self, y: &[i64]) -> bool {
        self.eval(|v: YVar| y[v.0 - 1])
    }

    pub fn vars(&self) -> BTreeSet<YVar> {
        match self {
            CFormula::Utvpi(atoms) => atoms.iter().flat_map(|a| a.vars()).collect(),
            CFormula::Butvpi(f) => f.vars(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Utvpi> {
        let mut out = BTreeSet::new();
        match self {
            CFormula::Utvpi(atoms) => out.extend(atoms.iter().copied()),
            CFormula::Butvpi(f) => f.atoms(&mut out),
        }
        out
    }

    /// Largest |d| over the atoms (0 when there are none).
    pub fn max_abs_bound(&self) -> i64 {
        self.atoms()
            .iter()
            .map(|a| a.bound().saturating_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn rename_var(&self, from: YVar, to: YVar) -> Result<CFormula, LangError> {
        Ok(match self {
            CFormula::Utvpi(atoms) => CFormula::Utvpi(
                atoms.iter().map(|a| a.rename(from, to)).collect::<Result<_, _>>()?,
            ),
            CFormula::Butvpi(f) => CFormula::Butvpi(f.rename(from, to)?),
        })
    }
}

impl fmt::Display for CFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CFormula::Utvpi(atoms) => {
                for (n, a) in atoms.iter().enumerate() {
                    if n > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
            CFormula::Butvpi(b) => write!(f, "{b}"),
        }
    }
}

/// Complements a constraint.  In utvpi mode only single atoms can be negated
/// without leaving the conjunctive fragment.
pub fn negate_cformula(f: &CFormula) -> Result<CFormula, LangError> {
    match f {
        CFormula::Utvpi(atoms) => match atoms.as_slice() {
            [one] => Ok(CFormula::Utvpi(vec![one.negated()])),
            _ => Err(LangError::NegationNotSingleAtom),
        },
        CFormula::Butvpi(b) => Ok(CFormula::Butvpi(Butvpi::not(b.clone()))),
    }
}

/// Splits a conjunctive utvpi-mode consequent into one CDC per atom, all with
/// the same antecedent.  Butvpi consequents pass through unchanged.
pub fn split_conjunctive_cdc(cdc: &Cdc) -> Vec<Cdc> {
    match &cdc.consequent {
        CFormula::Utvpi(atoms) if atoms.len() > 1 => atoms
            .iter()
            .map(|a| Cdc {
                antecedent: cdc.antecedent.clone(),
                consequent: CFormula::Utvpi(vec![*a]),
            })
            .collect(),
        _ => vec![cdc.clone()],
    }
}

/// Splits a view of the disjunctive form `name: lambda | sigma` into a pure
/// selection view and a pure condition view; their union selects the same
/// tuples.
pub fn split_disjunctive_view(
    name: &str,
    x_condition: BoolExpr,
    y_condition: CFormula,
) -> (ViewDef, ViewDef) {
    (
        ViewDef {
            name: format!("{name}_x"),
            x_condition,
            y_condition: None,
        },
        ViewDef {
            name: format!("{name}_y"),
            x_condition: BoolExpr::True,
            y_condition: Some(y_condition),
        },
    )
}

/// Expresses `t[position] in constants` as a pair of CDCs: both fire exactly
/// when the position holds none of the listed constants, and their
/// consequents (`y1 <= 0` and its complement) then contradict each other.
pub fn desugar_domain_constraint(
    position: usize,
    constants: &BTreeSet<crate::model::DomConstant>,
    schema: &Schema,
) -> Result<(Cdc, Cdc), LangError> {
    if schema.y_arity == 0 {
        return Err(LangError::NoInterpretedPosition);
    }
    let antecedent = BoolExpr::and(
        constants
            .iter()
            .map(|c| {
                BoolExpr::Atom(EqAtom {
                    position,
                    constant: c.clone(),
                    negated: true,
                })
            })
            .collect(),
    );
    let delta = Utvpi::Single { a: Sign::Pos, y: YVar(1), d: 0 };
    Ok((
        Cdc {
            antecedent: antecedent.clone(),
            consequent: CFormula::Utvpi(vec![delta]),
        },
        Cdc {
            antecedent,
            consequent: CFormula::Utvpi(vec![delta.negated()]),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(a: i64, y: usize, d: i64) -> Utvpi {
        Utvpi::new(a, Some(y), 0, None, d).unwrap()
    }

    fn pair(a: i64, i: usize, b: i64, j: usize, d: i64) -> Utvpi {
        Utvpi::new(a, Some(i), b, Some(j), d).unwrap()
    }

    #[test]
    fn normalize_ge_flips_both_signs() {
        // y1 - y2 >= 0 becomes -y1 + y2 <= 0
        let out = normalize_comparison(Cmp::Ge, 1, Some(1), -1, Some(2), 0).unwrap();
        assert_eq!(out, vec![pair(-1, 1, 1, 2, 0)]);
    }

    #[test]
    fn normalize_strict_adjusts_bound() {
        // y2 < 4 becomes y2 <= 3
        let out = normalize_comparison(Cmp::Lt, 1, Some(2), 0, None, 4).unwrap();
        assert_eq!(out, vec![single(1, 2, 3)]);
        // y2 > 3 becomes -y2 <= -4
        let out = normalize_comparison(Cmp::Gt, 1, Some(2), 0, None, 3).unwrap();
        assert_eq!(out, vec![single(-1, 2, -4)]);
    }

    #[test]
    fn normalize_equality_splits() {
        // y1 = 0 becomes y1 <= 0 and -y1 <= 0
        let out = normalize_comparison(Cmp::Eq, 1, Some(1), 0, None, 0).unwrap();
        assert_eq!(out, vec![single(1, 1, 0), single(-1, 1, 0)]);
    }

    #[test]
    fn canonical_orders_pair_by_variable() {
        assert_eq!(pair(1, 2, -1, 1, 3), pair(-1, 1, 1, 2, 3));
    }

    #[test]
    fn same_variable_cancels_or_is_rejected() {
        assert_eq!(Utvpi::new(1, Some(1), -1, Some(1), 2).unwrap(), Utvpi::Const { d: 2 });
        assert!(matches!(
            Utvpi::new(1, Some(1), 1, Some(1), 2),
            Err(LangError::CoefficientOutOfRange(2))
        ));
        assert!(matches!(
            Utvpi::new(3, Some(1), 0, None, 2),
            Err(LangError::CoefficientOutOfRange(3))
        ));
    }

    #[test]
    fn negation_is_involutive_on_samples() {
        for atom in [
            Utvpi::Const { d: -7 },
            single(1, 3, 9),
            single(-1, 1, i64::MAX),
            single(1, 1, i64::MIN),
            pair(1, 1, -1, 2, 0),
        ] {
            assert_eq!(atom.negated().negated(), atom);
        }
    }

    #[test]
    fn negation_complements_pointwise() {
        // !(y1 + y2 <= 5) is -y1 - y2 <= -6
        let atom = pair(1, 1, 1, 2, 5);
        let neg = atom.negated();
        assert_eq!(neg, pair(-1, 1, -1, 2, -6));
        for a in -10..=10i64 {
            for b in -10..=10i64 {
                let value = |v: YVar| if v.0 == 1 { a } else { b };
                assert_ne!(atom.eval(value), neg.eval(value));
            }
        }
    }

    #[test]
    fn negate_cformula_rejects_conjunctions() {
        let conj = CFormula::Utvpi(vec![single(1, 1, 0), single(-1, 1, 0)]);
        assert_eq!(negate_cformula(&conj), Err(LangError::NegationNotSingleAtom));
        let one = CFormula::Utvpi(vec![single(1, 1, 0)]);
        assert_eq!(
            negate_cformula(&one).unwrap(),
            CFormula::Utvpi(vec![single(-1, 1, -1)])
        );
    }

    #[test]
    fn butvpi_not_folds_atoms_and_double_negation() {
        let atom = Butvpi::Atom(single(1, 1, 0));
        assert_eq!(Butvpi::not(atom.clone()), Butvpi::Atom(single(-1, 1, -1)));
        let or = Butvpi::or(vec![atom.clone(), Butvpi::Atom(single(1, 2, 1))]);
        assert_eq!(Butvpi::not(Butvpi::not(or.clone())), or);
    }

    #[test]
    fn split_conjunctive_cdc_one_atom_per_conjunct() {
        use crate::model::DomConstant;
        // x2 = a -> (y1 <= 0 & y1 > 0) splits into two CDCs with the same
        // antecedent.
        let cdc = Cdc {
            antecedent: BoolExpr::Atom(EqAtom {
                position: 2,
                constant: DomConstant::new("a"),
                negated: false,
            }),
            consequent: CFormula::Utvpi(vec![single(1, 1, 0), single(-1, 1, -1)]),
        };
        let parts = split_conjunctive_cdc(&cdc);
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|p| p.antecedent == cdc.antecedent));
        assert_eq!(parts[0].consequent, CFormula::Utvpi(vec![single(1, 1, 0)]));
        assert_eq!(parts[1].consequent, CFormula::Utvpi(vec![single(-1, 1, -1)]));
    }

    #[test]
    fn display_round_trips_signs() {
        assert_eq!(pair(1, 1, 1, 2, 5).to_string(), "y1 + y2 <= 5");
        assert_eq!(pair(-1, 1, 1, 2, 0).to_string(), "-y1 + y2 <= 0");
        assert_eq!(single(-1, 2, -4).to_string(), "-y2 <= -4");
        assert_eq!(Utvpi::Const { d: -1 }.to_string(), "0 <= -1");
    }
}
