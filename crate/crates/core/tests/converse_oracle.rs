use bia_core::bounds::ldof_function;
use bia_core::converse::{
    alignment_efficiency, bound_for_cardinalities, build_converse_lp, check_symmetric_optimality,
    solve_converse_lp_full,
};
use bia_core::{BigRational, Rational64, SystemConfig};
use num_traits::Signed;
use proptest::prelude::*;

fn big(r: Rational64) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

#[test]
fn lp_optimum_equals_closed_form() {
    for m in 1..=4usize {
        for k in 2..=8usize {
            if m * k > 8 {
                continue;
            }
            for n in 1..=4.min(m * k) {
                let cfg = SystemConfig::new(m, n, k).unwrap();
                let lp = build_converse_lp(cfg, n).unwrap();
                let sol = solve_converse_lp_full(&lp).unwrap();
                assert_eq!(sol.value, big(ldof_function(m, k, n).unwrap()), "({m},{k},{n})");
                // the returned point is feasible
                for c in &lp.program.constraints {
                    let lhs: BigRational = c.coeffs.iter().zip(&sol.x).map(|(a, b)| a * b).sum();
                    assert!(lhs <= c.rhs);
                }
                assert!(sol.x.iter().all(|v| !v.is_negative()));
            }
        }
    }
}

#[test]
fn symmetric_multiset_is_optimal() {
    for m in 1..=2 {
        for k in 2..=8 {
            for n in 1..=4 {
                let cfg = SystemConfig::new(m, n, k).unwrap();
                let check = check_symmetric_optimality(cfg, 5).unwrap();
                assert!(check.symmetric_is_max, "{cfg}: {check:?}");
                assert_eq!(check.best_value, check.symmetric_value);
            }
        }
    }
}

proptest! {
    #[test]
    fn uniform_multiset_gives_closed_form(m in 1usize..5, k in 2usize..20, n in 1usize..12, copies in 1usize..6) {
        prop_assume!(n <= m * k);
        let cards = vec![n; copies];
        prop_assert_eq!(
            bound_for_cardinalities(m, k, &cards).unwrap(),
            ldof_function(m, k, n).unwrap()
        );
    }

    #[test]
    fn efficiency_pair_matches_formula(m in 1usize..5, k in 2usize..20, n in 1usize..12) {
        prop_assume!(n <= m * k);
        let e = alignment_efficiency(m, k, n).unwrap();
        let c = n.div_ceil(m);
        prop_assert_eq!(e.f, n);
        prop_assert_eq!(e.h, (c - 1) * n + k - c);
        let value = Rational64::new((k * e.f) as i64, (e.f + e.h) as i64);
        prop_assert_eq!(value, ldof_function(m, k, n).unwrap());
    }

    #[test]
    fn mixing_cardinalities_never_beats_the_best(m in 1usize..3, k in 2usize..9, cards in prop::collection::vec(1usize..5, 1..5)) {
        prop_assume!(cards.iter().all(|&c| c <= m * k));
        let mixed = bound_for_cardinalities(m, k, &cards).unwrap();
        let best = cards.iter().map(|&c| ldof_function(m, k, c).unwrap()).max().unwrap();
        prop_assert!(mixed <= best);
    }
}
