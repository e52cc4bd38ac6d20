use cluster_bounds::bounds::theorem_bound;
use cluster_bounds::numerics::{int, rat, Rational};
use cluster_bounds::specialization::{alpha, beta, certified_bound, simulate_theorem};

#[test]
fn coefficient_identity_holds_for_all_stages() {
    for r in 3..=200u64 {
        for i in 3..=r {
            let a_prev = alpha(r, i - 1);
            let lhs = int(i as i64 - 2) * &a_prev + int(1) + &a_prev;
            let rhs = (int(i as i64 - 1) * alpha(r, i) + int(1)) * beta(r, i);
            assert_eq!(lhs, rhs, "r = {r}, i = {i}");
        }
    }
}

#[test]
fn certified_bound_matches_closed_form() {
    for r in 2..=120u64 {
        for m in [1u64, 2, 7, 1000] {
            assert_eq!(
                certified_bound(r, m),
                theorem_bound(r, m),
                "r = {r}, m = {m}"
            );
        }
    }
}

#[test]
fn simulation_certifies_small_grid() {
    for r in 2..=30u64 {
        for m in 1..=10u64 {
            let sim = simulate_theorem(r, m).unwrap_or_else(|e| panic!("r = {r}, m = {m}: {e}"));
            assert!(sim.certified(), "r = {r}, m = {m}");
            assert_eq!(sim.stages.len() as u64, r - 2);
            // Every stage receives the output of the previous one.
            for w in sim.stages.windows(2) {
                assert_eq!(w[0].output, w[1].input);
                assert_eq!(w[0].next_target(), w[1].target);
            }
        }
    }
}

#[test]
fn final_multiplicity_dominates_bound_for_larger_r() {
    for r in [40u64, 60, 80] {
        let sim = simulate_theorem(r, 3).unwrap();
        assert!(sim.certified(), "r = {r}");
        let bound: Rational = sim.certified_bound.clone();
        assert!(int(sim.final_first.clone()) >= bound);
    }
}

#[test]
fn small_case_by_hand() {
    // Degree 4 for four double points beats the bound 45/14.
    let sim = simulate_theorem(4, 2).unwrap();
    assert_eq!(sim.final_first, 4.into());
    assert_eq!(sim.theorem_bound, rat(45, 14));
    let pivots: Vec<usize> = sim.stages[0].trace.steps.iter().map(|s| s.pivot).collect();
    assert_eq!(pivots, vec![1, 3, 2]);
    let last = &sim.stages[1].trace.steps;
    assert_eq!(last.len(), 1);
    assert_eq!((last[0].pivot, last[0].amount.clone()), (1, 1.into()));
}
