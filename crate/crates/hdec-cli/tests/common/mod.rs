//! Deterministic problem generators shared by the integration tests.
//!
//! Everything is driven by a seeded [`ChaCha8Rng`], so a failing seed can be
//! replayed on its own.

// Each test binary links this module and uses its own subset of the helpers.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hdec_core::cformula::{Butvpi, CFormula, Mode, Utvpi};
use hdec_core::model::{BoolExpr, Cdc, DomConstant, EqAtom, Problem, Schema, Uind, ViewDef};

/// Size limits for generated problems.  Kept small on purpose: the
/// brute-force oracles the tests compare against are exponential in every
/// one of these knobs.
pub struct GenConfig {
    pub mode: Mode,
    pub x_arity: usize,
    pub y_arity: usize,
    pub constants: usize,
    pub max_abs_bound: i64,
    pub max_cdcs: usize,
    pub max_views: usize,
}

impl GenConfig {
    pub fn small(mode: Mode) -> GenConfig {
        GenConfig {
            mode,
            x_arity: 2,
            y_arity: 2,
            constants: 2,
            max_abs_bound: 3,
            max_cdcs: 3,
            max_views: 2,
        }
    }
}

pub fn constant(n: usize) -> DomConstant {
    DomConstant::new(format!("c{n}"))
}

pub fn random_atom(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Utvpi {
    let m = cfg.y_arity;
    let d = rng.gen_range(-cfg.max_abs_bound..=cfg.max_abs_bound);
    let sign = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1 } else { -1 };
    if m >= 2 && rng.gen_bool(0.5) {
        let i = rng.gen_range(1..m);
        let j = rng.gen_range(i + 1..=m);
        Utvpi::new(sign(rng), Some(i), sign(rng), Some(j), d).expect("unit pair")
    } else if rng.gen_bool(0.9) {
        let y = rng.gen_range(1..=m);
        Utvpi::new(sign(rng), Some(y), 0, None, d).expect("unit single")
    } else {
        // Constant atom: a conditional contradiction when d < 0.
        Utvpi::new(0, None, 0, None, d).expect("constant atom")
    }
}

pub fn random_boolexpr(rng: &mut ChaCha8Rng, cfg: &GenConfig, depth: usize) -> BoolExpr {
    if cfg.x_arity == 0 {
        return BoolExpr::True;
    }
    if depth == 0 || rng.gen_bool(0.6) {
        if rng.gen_bool(0.15) {
            return BoolExpr::True;
        }
        return BoolExpr::Atom(EqAtom {
            position: rng.gen_range(1..=cfg.x_arity),
            constant: constant(rng.gen_range(1..=cfg.constants)),
            negated: rng.gen_bool(0.3),
        });
    }
    match rng.gen_range(0..3) {
        0 => BoolExpr::not(random_boolexpr(rng, cfg, depth - 1)),
        1 => BoolExpr::and(vec![
            random_boolexpr(rng, cfg, depth - 1),
            random_boolexpr(rng, cfg, depth - 1),
        ]),
        _ => BoolExpr::or(vec![
            random_boolexpr(rng, cfg, depth - 1),
            random_boolexpr(rng, cfg, depth - 1),
        ]),
    }
}

fn random_butvpi(rng: &mut ChaCha8Rng, cfg: &GenConfig, depth: usize) -> Butvpi {
    if depth == 0 || rng.gen_bool(0.5) {
        return Butvpi::Atom(random_atom(rng, cfg));
    }
    match rng.gen_range(0..3) {
        0 => Butvpi::not(random_butvpi(rng, cfg, depth - 1)),
        1 => Butvpi::and(vec![
            random_butvpi(rng, cfg, depth - 1),
            random_butvpi(rng, cfg, depth - 1),
        ]),
        _ => Butvpi::or(vec![
            random_butvpi(rng, cfg, depth - 1),
            random_butvpi(rng, cfg, depth - 1),
        ]),
    }
}

/// A condition over the interpreted columns.  `single` restricts utvpi-mode
/// output to one atom, the shape whose complement stays in the fragment —
/// required for view conditions, which the losslessness check negates.
pub fn random_cformula(rng: &mut ChaCha8Rng, cfg: &GenConfig, single: bool) -> CFormula {
    match cfg.mode {
        Mode::Utvpi => {
            let n = if single { 1 } else { rng.gen_range(1..=2) };
            CFormula::Utvpi((0..n).map(|_| random_atom(rng, cfg)).collect())
        }
        Mode::Butvpi => CFormula::Butvpi(random_butvpi(rng, cfg, 2)),
    }
}

/// A random constraint-and-view problem without dependencies.  With
/// `canonical` set, utvpi-mode constraint consequents stay single atoms, the
/// shape the text format parses back unchanged (multi-atom conjunctions
/// split into one constraint per atom on input).
pub fn random_problem_with(rng: &mut ChaCha8Rng, cfg: &GenConfig, canonical: bool) -> Problem {
    let schema = Schema::new("R", cfg.x_arity, cfg.y_arity).expect("nonempty schema");
    let mut problem = Problem::new(schema, cfg.mode);
    for _ in 0..rng.gen_range(0..=cfg.max_cdcs) {
        problem.cdcs.push(Cdc {
            antecedent: random_boolexpr(rng, cfg, 1),
            consequent: random_cformula(rng, cfg, canonical),
        });
    }
    for v in 0..rng.gen_range(0..=cfg.max_views) {
        let name = format!("V{}", v + 1);
        let (x_condition, y_condition) = match rng.gen_range(0..3) {
            0 if cfg.x_arity > 0 => (random_boolexpr(rng, cfg, 1), None),
            1 => (BoolExpr::True, Some(random_cformula(rng, cfg, true))),
            _ => (
                random_boolexpr(rng, cfg, 1),
                Some(random_cformula(rng, cfg, true)),
            ),
        };
        problem.views.push(ViewDef {
            name,
            x_condition,
            y_condition,
        });
    }
    problem.validate().expect("generated problem validates");
    problem
}

pub fn random_problem(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Problem {
    random_problem_with(rng, cfg, false)
}

/// Distinct-column unary inclusion over the non-interpreted part.
pub fn random_x_uind(rng: &mut ChaCha8Rng, x_arity: usize) -> Uind {
    let lhs = rng.gen_range(1..=x_arity);
    let rhs = loop {
        let r = rng.gen_range(1..=x_arity);
        if r != lhs {
            break r;
        }
    };
    Uind { lhs, rhs }
}

/// Distinct-column unary inclusion over the interpreted part, in global
/// positions.
pub fn random_y_uind(rng: &mut ChaCha8Rng, x_arity: usize, y_arity: usize) -> Uind {
    let lhs = rng.gen_range(1..=y_arity);
    let rhs = loop {
        let r = rng.gen_range(1..=y_arity);
        if r != lhs {
            break r;
        }
    };
    Uind {
        lhs: x_arity + lhs,
        rhs: x_arity + rhs,
    }
}
