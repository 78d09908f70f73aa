//! Frozen expected values for the two bundled instances. Every number here
//! was derived with an independently written enumerator before the solver
//! existed, so these tests pin exact bitwise behavior, not tolerances.

mod common;

use common::load_instance;
use egalloc::deception::{evaluate_lie, optimal_lie_unlimited};
use egalloc::model::{agent_utility, check_instance, egalitarian_welfare, Allocation, EPS};
use egalloc::solver::Solver;

#[test]
fn unlimited_instance_optimum_is_pinned() {
    let inst = load_instance("unlimited_4x10.inst");
    let (alloc, welfare) = Solver::exact().solve(&inst.profile).unwrap();
    assert_eq!(welfare, 183.68);
    assert_eq!(alloc.owner, vec![3, 1, 0, 2, 1, 0, 3, 2, 3, 0]);
    let u_liar = agent_utility(&alloc, &inst.truth, 0).unwrap();
    assert_eq!(u_liar, 204.76000000000002);
}

#[test]
fn unlimited_instance_has_a_known_welfare_tie() {
    // A different optimum with the same welfare: agents 1 and 4 swap
    // resources 6 and 7, and the minimum stays at agent 2's 183.68.
    let inst = load_instance("unlimited_4x10.inst");
    let other = Allocation { owner: vec![3, 1, 0, 2, 1, 3, 0, 2, 3, 0] };
    let w = egalitarian_welfare(&other, &inst.profile).unwrap();
    assert_eq!(w, 183.68);
    let utilities: Vec<f64> = (0..4)
        .map(|a| agent_utility(&other, &inst.profile.rows[a], a).unwrap())
        .collect();
    assert_eq!(
        utilities,
        vec![221.08, 183.68, 183.89999999999998, 208.41000000000003]
    );
}

#[test]
fn limited_instance_optimum_is_pinned() {
    let inst = load_instance("limited_4x10.inst");
    let (alloc, welfare) = Solver::exact().solve(&inst.profile).unwrap();
    assert_eq!(welfare, 33.46);
    assert_eq!(alloc.owner, vec![0, 2, 1, 1, 3, 2, 2, 3, 0, 3]);
    assert_eq!(agent_utility(&alloc, &inst.truth, 0).unwrap(), 34.22);
}

#[test]
fn limited_rows_need_the_loose_tolerance() {
    let inst = load_instance("limited_4x10.inst");
    assert!(check_instance(&inst, 1e-9).is_err());
    assert!(check_instance(&inst, 0.1).is_ok());
    // Worst row deviation is 0.053, so 0.05 is too strict for this data.
    assert!(check_instance(&inst, 0.05).is_err());
    let sums: Vec<f64> = inst.profile.rows.iter().map(|r| r.iter().sum()).collect();
    for sum in sums {
        assert!((99.94..99.96).contains(&sum), "{sum}");
    }
}

#[test]
fn a_deep_discount_lie_pays_off_on_the_unlimited_instance() {
    let inst = load_instance("unlimited_4x10.inst");
    let lie = vec![2.21, 2.27, 10.57, 3.12, 6.5, 5.55, 12.09, 2.18, 2.27, 4.87];
    let eval = evaluate_lie(&inst, &lie, &Solver::exact(), 0.1).unwrap();
    assert_eq!(eval.alloc_lie.owner, vec![1, 0, 0, 0, 0, 0, 0, 2, 3, 0]);
    assert_eq!(eval.u_truth, 204.76000000000002);
    assert_eq!(eval.u_lie, 411.76);
    assert_eq!(eval.profit, 206.99999999999997);
}

#[test]
fn the_closed_form_lie_is_pinned_on_the_unlimited_instance() {
    let inst = load_instance("unlimited_4x10.inst");
    let best = optimal_lie_unlimited(&inst.truth, &inst.rival_rows()).unwrap();
    assert_eq!(best.c, 0.003021028729390858);
    assert_eq!(inst.truth.iter().sum::<f64>(), 506.45000000000005);
    let eval = evaluate_lie(&inst, &best.lie, &Solver::exact(), 0.1).unwrap();
    assert_eq!(eval.alloc_lie.owner, vec![0, 1, 0, 0, 0, 0, 0, 2, 3, 0]);
    // The liar ends up holding everything except resources 2, 8, and 9,
    // exactly the three it truly values least.
    assert_eq!(eval.alloc_lie.bundle(0), vec![0, 2, 3, 4, 5, 6, 9]);
    assert_eq!(eval.u_lie, 434.94000000000005);
    assert_eq!(eval.profit, 230.18000000000004);
}

#[test]
fn the_scaling_constant_only_needs_to_be_small_enough() {
    // Any constant below the closed-form c keeps the report's total under
    // every rival's smallest valuation, so the realized allocation (and
    // with it the liar's true utility) must not move.
    let inst = load_instance("unlimited_4x10.inst");
    let best = optimal_lie_unlimited(&inst.truth, &inst.rival_rows()).unwrap();
    for factor in [0.5, 0.25, 0.1] {
        let c = best.c * factor;
        let lie: Vec<f64> = inst.truth.iter().map(|&v| (c * v).max(EPS)).collect();
        let eval = evaluate_lie(&inst, &lie, &Solver::exact(), 0.1).unwrap();
        assert_eq!(eval.alloc_lie.owner, vec![0, 1, 0, 0, 0, 0, 0, 2, 3, 0], "factor {factor}");
        assert_eq!(eval.u_lie, 434.94000000000005, "factor {factor}");
    }
}

#[test]
fn a_balanced_lie_pays_off_on_the_limited_instance() {
    let inst = load_instance("limited_4x10.inst");
    let lie = vec![13.53, 9.52, 14.35, 9.86, 6.1, 8.83, 9.03, 5.43, 12.2, 11.11];
    assert!((lie.iter().sum::<f64>() - 99.96).abs() < 1e-9);
    let eval = evaluate_lie(&inst, &lie, &Solver::exact(), 0.1).unwrap();
    assert_eq!(eval.alloc_lie.owner, vec![0, 2, 3, 0, 1, 2, 0, 2, 1, 3]);
    assert_eq!(eval.u_lie, 44.24);
    assert_eq!(eval.profit, 10.020000000000003);
}
