mod common;

use lcs_kernel::ot::{exact_emd, sinkhorn, solve, OtSettings, DEFAULT_EXACT_CAP};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_simplex, reference_transport};

fn instance(rng: &mut ChaCha8Rng, max: usize) -> (Array2<f64>, Vec<f64>, Vec<f64>) {
    let (m, n) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
    let cost = Array2::from_shape_fn((m, n), |_| rng.gen_range(0.0..1.0));
    (cost, random_simplex(rng, m, 0.15), random_simplex(rng, n, 0.15))
}

fn rows(cost: &Array2<f64>) -> Vec<Vec<f64>> {
    cost.rows().into_iter().map(|r| r.to_vec()).collect()
}

#[test]
fn exact_matches_reference_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..300 {
        let (cost, p, q) = instance(&mut rng, 8);
        let plan = exact_emd(cost.view(), &p, &q, DEFAULT_EXACT_CAP).unwrap();
        let reference = reference_transport(&rows(&cost), &p, &q);
        assert!((plan.cost - reference).abs() <= 1e-9, "trial {trial}: {} vs {reference}", plan.cost);
        assert!(plan.marginal_violation(&p, &q) < 1e-12);
        assert!(plan.coupling.iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn exact_handles_degenerate_integer_costs() {
    // Many equal costs and equal masses produce degenerate pivots.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let cost = Array2::from_shape_fn((n, n), |_| f64::from(rng.gen_range(0..3u8)) / 2.0);
        let w = vec![1.0 / n as f64; n];
        let plan = exact_emd(cost.view(), &w, &w, DEFAULT_EXACT_CAP).unwrap();
        let reference = reference_transport(&rows(&cost), &w, &w);
        assert!((plan.cost - reference).abs() <= 1e-9);
    }
}

#[test]
fn transposed_problem_has_same_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let (cost, p, q) = instance(&mut rng, 8);
        let a = exact_emd(cost.view(), &p, &q, DEFAULT_EXACT_CAP).unwrap().cost;
        let b = exact_emd(cost.t(), &q, &p, DEFAULT_EXACT_CAP).unwrap().cost;
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn sinkhorn_bounds_exact_and_gap_shrinks() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for trial in 0..60 {
        let (cost, p, q) = instance(&mut rng, 6);
        let exact = exact_emd(cost.view(), &p, &q, DEFAULT_EXACT_CAP).unwrap().cost;
        let mut last = f64::INFINITY;
        for eps in [0.1, 0.03, 0.01, 0.003] {
            let plan = sinkhorn(cost.view(), &p, &q, eps, 1e-12, 100_000).unwrap();
            let gap = plan.cost - exact;
            assert!(gap >= -1e-9, "trial {trial} eps {eps}: {gap}");
            assert!(gap <= last + 1e-6, "trial {trial} eps {eps}: {gap} after {last}");
            if eps == 0.01 {
                assert!(gap <= 5e-2);
            }
            last = gap;
        }
    }
}

#[test]
fn solve_dispatches_on_threshold() {
    let cost = Array2::from_shape_fn((3, 3), |(i, j)| if i == j { 0.0 } else { 1.0 });
    let w = [0.2, 0.3, 0.5];
    let exact = solve(cost.view(), &w, &w, &OtSettings::default()).unwrap();
    assert_eq!(exact.cost, 0.0);
    let regularized = OtSettings {
        exact_threshold: 4,
        ..OtSettings::default()
    };
    let approx = solve(cost.view(), &w, &w, &regularized).unwrap();
    assert!(approx.cost > 0.0 && approx.cost < 0.05);
}
