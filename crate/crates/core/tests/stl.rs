mod common;

use common::{arb_case, oracle_rho, oracle_sat, perturb, ranges};
use ogan_core::stl::{eval_boolean, eval_robustness, parse_stl};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn boolean_monitor_matches_definition((f, trace) in arb_case(true)) {
        prop_assert_eq!(eval_boolean(&f, &trace, 0).unwrap(), oracle_sat(&f, &trace, 0));
    }

    #[test]
    fn robustness_matches_definition((f, trace) in arb_case(true)) {
        let r = eval_robustness(&f, &trace, &ranges(), 0).unwrap();
        prop_assert_eq!(r.value, oracle_rho(&f, &trace, 0));
        prop_assert!(r.effective_lo <= r.value && r.value <= r.effective_hi);
        prop_assert!((0.0..=1.0).contains(&r.scaled));
        prop_assert_eq!(r.scaled > 0.0, r.value > 0.0);
    }

    /// Derived operators evaluate exactly like their primitive expansions.
    #[test]
    fn derived_operators_match_expansion((f, trace) in arb_case(true)) {
        let g = f.expand();
        let (a, b) = (eval_robustness(&f, &trace, &ranges(), 0).unwrap(), eval_robustness(&g, &trace, &ranges(), 0).unwrap());
        prop_assert_eq!(a, b);
        prop_assert_eq!(eval_boolean(&f, &trace, 0).unwrap(), eval_boolean(&g, &trace, 0).unwrap());
    }

    #[test]
    fn printed_formulas_parse_back((f, _) in arb_case(true)) {
        prop_assert_eq!(parse_stl(&f.to_string()).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Positive robustness implies satisfaction and negative implies violation.
    #[test]
    fn robustness_sign_agrees_with_verdict((f, trace) in arb_case(true)) {
        let rho = eval_robustness(&f, &trace, &ranges(), 0).unwrap().value;
        let holds = eval_boolean(&f, &trace, 0).unwrap();
        if rho > 0.0 {
            prop_assert!(holds, "rho = {rho} but violated: {f}");
        }
        if rho < 0.0 {
            prop_assert!(!holds, "rho = {rho} but satisfied: {f}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    /// Moving every sample by less than |rho| never flips the verdict
    /// (single-signal predicates, where each predicate moves by at most the
    /// sample perturbation).
    #[test]
    fn small_perturbations_keep_the_verdict((f, trace) in arb_case(false), seed in any::<u64>()) {
        let eps = eval_robustness(&f, &trace, &ranges(), 0).unwrap().value.abs();
        prop_assume!(eps > 1e-6);
        let verdict = eval_boolean(&f, &trace, 0).unwrap();
        let m = 0.9 * eps;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let up = perturb(&trace, |_| m);
        let down = perturb(&trace, |_| -m);
        let signs = perturb(&trace, |_| if rng.random::<bool>() { m } else { -m });
        let uniform = perturb(&trace, |_| rng.random_range(-m..=m));
        for p in [up, down, signs, uniform] {
            prop_assert_eq!(eval_boolean(&f, &p, 0).unwrap(), verdict, "{}", f);
        }
    }
}
