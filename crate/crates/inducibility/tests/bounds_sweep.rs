//! Exhaustive consistency sweeps over all small trees: every computed lower
//! bound stays below every upper bound, the strict-even limit never exceeds
//! a certified upper bound, and the uniform point of `Z` evaluates exactly.

use num::{BigRational, ToPrimitive};

use inducibility::bounds::{
    eta, even_inducibility, inducibility_report, z_function, BoundsEngine, BoundsOptions,
};
use inducibility::combinatorics::rational;
use inducibility::counting::CopyCounter;
use inducibility::tree::{enumerate_trees, even_tree, strict_even_tree, Arity, Tree};

fn arity(d: u32) -> Arity {
    Arity::new(d).unwrap()
}

#[test]
fn eta_below_every_upper_bound_exhaustively() {
    for d in [2u32, 3] {
        let mut engine = BoundsEngine::new(arity(d), BoundsOptions::default());
        for n in 1..=8u64 {
            for t in enumerate_trees(arity(d), n, false).unwrap() {
                let report = engine.report(&t).unwrap();
                let best_upper = report.best_upper();
                assert!(
                    report.eta <= best_upper,
                    "eta {} above upper {} for {t} (d = {d})",
                    report.eta,
                    best_upper
                );
                assert!(report.best_lower() <= best_upper, "crossed bounds for {t}");
                for lo in &report.lower {
                    for hi in &report.upper {
                        assert!(
                            lo.value <= hi.value,
                            "{:?} exceeds {:?} for {t} (d = {d})",
                            lo.source,
                            hi.source
                        );
                    }
                }
                if let Some((value, _)) = &report.exact {
                    assert!(*value >= report.best_lower() && *value <= report.best_upper());
                }
            }
        }
    }
}

#[test]
fn uniform_point_evaluates_exactly_for_all_small_trees() {
    for d in [2u32, 3] {
        let uniform: Vec<BigRational> = (0..d).map(|_| rational(1, i64::from(d))).collect();
        for n in 2..=8u64 {
            for t in enumerate_trees(arity(d), n, false).unwrap() {
                let zf = z_function(&t, arity(d)).unwrap();
                let value = zf.eval_rational(&uniform).unwrap();
                assert_eq!(value, zf.uniform_value(), "tree {t} (d = {d})");
            }
        }
    }
}

#[test]
fn even_and_complete_formulas_agree() {
    for d in 2..=4u32 {
        for h in 0..=3u32 {
            if u64::from(d).pow(h) > 81 {
                continue;
            }
            assert_eq!(
                even_inducibility(arity(d), u64::from(d).pow(h)),
                inducibility::bounds::complete_inducibility(arity(d), h),
                "d = {d}, h = {h}"
            );
        }
    }
}

#[test]
fn even_inducibility_agrees_with_eta_on_even_trees() {
    for d in [2u32, 3] {
        for k in 1..=12u64 {
            let t = even_tree(arity(d), k);
            assert_eq!(
                even_inducibility(arity(d), k),
                eta(&t, arity(d)).unwrap(),
                "d = {d}, k = {k}"
            );
        }
    }
}

#[test]
fn strict_even_densities_approach_eta_from_one_side_of_a_band() {
    // |γ(D, H_n) - η| ≤ C/n with a stable constant over a window.
    let d = arity(3);
    let pattern = even_tree(d, 4);
    let eta_value = eta(&pattern, d).unwrap();
    let mut counter = CopyCounter::new(&pattern, d).unwrap();
    let mut scaled: Vec<f64> = Vec::new();
    for n in [20u64, 40, 80, 160] {
        let host = strict_even_tree(d, n);
        let gamma = counter.density(&host).unwrap();
        let gap = if gamma >= eta_value {
            gamma - eta_value.clone()
        } else {
            eta_value.clone() - gamma
        };
        scaled.push(n as f64 * gap.to_f64().unwrap());
    }
    let max = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let min = scaled.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max.is_finite() && max > 0.0);
    // The n-scaled gap stays within a small constant band.
    assert!(max / min.max(1e-12) < 8.0, "scaled gaps {scaled:?}");
}

#[test]
fn numeric_supremum_dominates_a_dense_grid() {
    // Branch sizes (2,4) in a binary tree: no closed form. The seeded
    // search must do at least as well as a 1e-4 grid, and both stay under
    // the certified cap 1/15.
    let t = inducibility::tree::parse_tree("((*,*),((*,*),(*,*)))", arity(2)).unwrap();
    let zf = z_function(&t, arity(2)).unwrap();
    let sup = inducibility::bounds::z_supremum(&zf, &BoundsOptions::default());
    let found = sup.value.to_f64();
    let mut grid_max = f64::MIN;
    inducibility::bounds::grid_scan(2, 10_000, |x| {
        let v = zf.eval_f64(x);
        if v > grid_max {
            grid_max = v;
        }
    });
    assert!(
        found >= grid_max - 1e-6,
        "search {found} vs grid {grid_max}"
    );
    let cap = zf.certified_cap().to_f64().unwrap();
    assert!(found <= cap + 1e-12);
    assert!(grid_max <= cap + 1e-12);
}

#[test]
fn one_shot_report_helper_matches_engine() {
    let t = even_tree(arity(3), 5);
    let report = inducibility_report(&t, arity(3), &BoundsOptions::default()).unwrap();
    let mut engine = BoundsEngine::new(arity(3), BoundsOptions::default());
    let engine_report = engine.report(&t).unwrap();
    assert_eq!(report.eta, engine_report.eta);
    assert_eq!(report.best_upper(), engine_report.best_upper());
    assert_eq!(report.exact.map(|e| e.0), engine_report.exact.map(|e| e.0));
}

#[test]
fn report_respects_empty_branch_conventions() {
    // A cherry seen at larger arity still has η = I = 1.
    for d in 2..=5u32 {
        let cherry = even_tree(arity(d), 2);
        let report = inducibility_report(&cherry, arity(d), &BoundsOptions::default()).unwrap();
        assert_eq!(report.exact.unwrap().0, rational(1, 1));
        assert_eq!(report.eta, rational(1, 1));
    }
    // The empty tree itself has density one by convention; reports reject it
    // but η accepts it.
    assert_eq!(eta(&Tree::Empty, arity(3)).unwrap(), rational(1, 1));
}
