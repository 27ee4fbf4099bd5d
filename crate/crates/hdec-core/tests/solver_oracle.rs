//! Differential tests of the constraint solvers against bounded brute-force
//! search.  The small-model bound makes the brute-force side a complete
//! decision procedure on these sizes, so any disagreement is a solver bug.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_atom, random_cformula, GenConfig};
use hdec_core::cformula::{CFormula, Mode, Utvpi};
use hdec_core::oracle::brute_force_cformula_sat;
use hdec_core::solver::{
    check_model, small_model_bound, solve_cformula_set, utvpi_sat, SatResult,
};

fn bound_for(formulas: &[CFormula], y_arity: usize) -> i64 {
    let maxd = formulas
        .iter()
        .map(|f| f.max_abs_bound())
        .max()
        .unwrap_or(0);
    // One extra unit of slack: complements shift bounds by one.
    small_model_bound(y_arity, maxd.saturating_add(1))
}

#[test]
fn conjunctive_solver_agrees_with_bounded_search() {
    let cfg = GenConfig::small(Mode::Utvpi);
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms: Vec<Utvpi> = (0..rng.gen_range(1..=6))
            .map(|_| random_atom(&mut rng, &cfg))
            .collect();
        let formulas = vec![CFormula::Utvpi(atoms.clone())];
        let oracle = brute_force_cformula_sat(&formulas, bound_for(&formulas, cfg.y_arity));
        match utvpi_sat(&atoms) {
            SatResult::Sat(model) => {
                assert!(oracle.is_sat(), "seed {seed}: solver sat, search unsat");
                assert!(check_model(&atoms, &model), "seed {seed}: bad model");
            }
            SatResult::Unsat(core) => {
                assert!(!oracle.is_sat(), "seed {seed}: solver unsat, search sat");
                assert!(
                    core.iter().all(|a| atoms.contains(a)),
                    "seed {seed}: core {core:?} not a subset of the input"
                );
                let core_formulas = vec![CFormula::Utvpi(core.clone())];
                assert!(
                    !brute_force_cformula_sat(&core_formulas, bound_for(&core_formulas, cfg.y_arity))
                        .is_sat(),
                    "seed {seed}: returned core is satisfiable"
                );
            }
        }
    }
}

#[test]
fn boolean_solver_agrees_with_bounded_search() {
    let cfg = GenConfig::small(Mode::Butvpi);
    for seed in 0..400u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let formulas: Vec<CFormula> = (0..rng.gen_range(1..=3))
            .map(|_| random_cformula(&mut rng, &cfg, false))
            .collect();
        let oracle = brute_force_cformula_sat(&formulas, bound_for(&formulas, cfg.y_arity));
        let solved = solve_cformula_set(&formulas, 1_000_000).expect("budget is ample");
        assert_eq!(
            solved.is_sat(),
            oracle.is_sat(),
            "seed {seed}: disagreement on {formulas:?}"
        );
        if let SatResult::Sat(model) = solved {
            assert!(
                formulas.iter().all(|f| f.eval_on(&model.to_y_values(cfg.y_arity))),
                "seed {seed}: bad boolean model"
            );
        }
    }
}

#[test]
fn mixed_conjunctive_sets_agree_with_bounded_search() {
    let cfg = GenConfig::small(Mode::Utvpi);
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let formulas: Vec<CFormula> = (0..rng.gen_range(1..=4))
            .map(|_| random_cformula(&mut rng, &cfg, false))
            .collect();
        let oracle = brute_force_cformula_sat(&formulas, bound_for(&formulas, cfg.y_arity));
        let solved = solve_cformula_set(&formulas, 1_000_000).expect("budget is ample");
        assert_eq!(solved.is_sat(), oracle.is_sat(), "seed {seed}");
    }
}
