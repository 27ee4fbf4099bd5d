//! Decision procedures for conditional domain constraints (CDCs) over
//! relations whose columns split into non-interpreted positions (holding
//! opaque constants) and interpreted positions (holding integers constrained
//! by unit-two-variable inequalities).
//!
//! The library decides three questions and produces checkable evidence for
//! each:
//!
//! * **consistency** of a set of CDCs — witnessed by a tuple satisfying all
//!   of them;
//! * **losslessness** of a horizontal decomposition by selection views —
//!   refuted, when it fails, by a tuple kept by the source relation but by
//!   none of the views;
//! * **separability** of functional and unary inclusion dependencies from
//!   the CDCs — a syntactic reduction that either eliminates them or
//!   reports the unsupported combination.
//!
//! Both decisions work on a propositional encoding of the equality
//! conditions: every valuation of the equality variables selects the set of
//! interpreted-side constraints it makes applicable, and a small integer
//! constraint solver decides each selected set.  `oracle` holds independent
//! brute-force re-implementations used to validate all of the above in
//! tests.

pub mod cformula;
pub mod decide;
pub mod dimacs;
pub mod encode;
pub mod model;
pub mod oracle;
pub mod parse;
pub mod print;
pub mod separability;
pub mod solver;

pub use cformula::{Butvpi, CFormula, Cmp, LangError, Mode, Sign, Utvpi, YVar};
pub use model::{
    BoolExpr, Cdc, DomConstant, EqAtom, Fd, FdClass, Instance, ModelError, Problem, Schema, Tuple,
    Uind, UindKind, ViewDef,
};
pub use parse::{parse_problem, ParseError};
pub use print::problem_to_text;
