use lcs_kernel::eval::cv::{cross_validate, Candidate, CvConfig, KernelChoice};
use lcs_kernel::eval::svm::{svm_train, OneVsOne};
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn linear_gram(xs: &[f64]) -> Array2<f64> {
    Array2::from_shape_fn((xs.len(), xs.len()), |(i, j)| xs[i] * xs[j])
}

#[test]
fn one_dimensional_margin_matches_analytic_solution() {
    // The closest opposite points are -1 and 1.5, so the maximal margin
    // separator is w x + b with w = 2 / 2.5 and b = 1 - 1.5 w.
    let xs = [-3.0, -2.0, -1.0, 1.5, 2.5, 4.0];
    let ys = [-1i8, -1, -1, 1, 1, 1];
    let svm = svm_train(linear_gram(&xs).view(), &ys, 1000.0).unwrap();
    assert!(svm.converged);
    let w: f64 = svm
        .alpha
        .iter()
        .zip(&ys)
        .zip(&xs)
        .map(|((a, &y), x)| a * f64::from(y) * x)
        .sum();
    assert!((w - 0.8).abs() < 1e-6, "{w}");
    assert!((svm.bias + 0.2).abs() < 1e-6, "{}", svm.bias);
    for (k, a) in svm.alpha.iter().enumerate() {
        if k != 2 && k != 3 {
            assert!(a.abs() < 1e-9);
        }
    }
}

#[test]
fn soft_margin_respects_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let ys: Vec<i8> = xs.iter().map(|&x| if x + rng.gen_range(-0.5..0.5) > 0.0 { 1 } else { -1 }).collect();
    let gram = Array2::from_shape_fn((40, 40), |(i, j)| (-(xs[i] - xs[j]).powi(2)).exp());
    for c in [0.01, 1.0, 100.0] {
        let svm = svm_train(gram.view(), &ys, c).unwrap();
        assert!(svm.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
        let balance: f64 = svm.alpha.iter().zip(&ys).map(|(a, &y)| a * f64::from(y)).sum();
        assert!(balance.abs() < 1e-9);
        assert!(svm.kkt_violation(gram.view(), c) <= 1e-3);
    }
}

#[test]
fn three_class_winner_takes_a_pairwise_vote() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts: Vec<f64> = (0..45).map(|i| (i / 15) as f64 * 3.0 + rng.gen_range(-1.5..1.5)).collect();
    let classes: Vec<i64> = (0..45).map(|i| (i / 15) as i64).collect();
    let gram = Array2::from_shape_fn((45, 45), |(i, j)| (-(pts[i] - pts[j]).powi(2) / 2.0).exp());
    let train: Vec<usize> = (0..45).filter(|i| i % 3 != 0).collect();
    let model = OneVsOne::train(&gram, &classes, &train, 1.0).unwrap();
    for x in 0..45 {
        let votes = model.votes(&gram, x);
        let pred = model.predict(&gram, x);
        let k = model.classes.iter().position(|&c| c == pred).unwrap();
        assert!(votes[k] >= 1);
        assert_eq!(votes[k], *votes.iter().max().unwrap());
    }
}

fn rbf_gram(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let d = (pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2);
        (-4.0 * d).exp()
    })
}

#[test]
fn shuffled_labels_score_near_chance() {
    let config = CvConfig {
        c_grid: vec![0.1, 1.0, 10.0],
        folds: 5,
        repeats: 2,
        inner_folds: 3,
        seed: 0,
    };
    let mut total = 0.0;
    let runs = 8;
    for seed in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let gram = rbf_gram(&mut rng, 60);
        let mut labels: Vec<i64> = (0..60).map(|i| i % 2).collect();
        labels.shuffle(&mut rng);
        let cands = [Candidate {
            choice: KernelChoice::lambda(4.0),
            gram: &gram,
        }];
        total += cross_validate(&cands, &labels, &config, 1).unwrap().mean_accuracy;
    }
    let mean = total / runs as f64;
    assert!((mean - 0.5).abs() <= 0.1, "{mean}");
}

#[test]
fn report_shape_and_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gram = rbf_gram(&mut rng, 50);
    let labels: Vec<i64> = (0..50).map(|i| (i % 3) as i64).collect();
    let g2 = gram.mapv(|k| k * k);
    let cands = [
        Candidate {
            choice: KernelChoice::lambda(1.0),
            gram: &gram,
        },
        Candidate {
            choice: KernelChoice::lambda(2.0),
            gram: &g2,
        },
    ];
    let config = CvConfig {
        c_grid: vec![0.1, 10.0],
        folds: 5,
        repeats: 3,
        inner_folds: 3,
        seed: 4,
    };
    let report = cross_validate(&cands, &labels, &config, 2).unwrap();
    assert_eq!(report.per_fold.len(), 15);
    let mean = report.per_fold.iter().sum::<f64>() / 15.0;
    let var = report.per_fold.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / 15.0;
    assert!((report.mean_accuracy - mean).abs() < 1e-12);
    assert!((report.std_accuracy - var.sqrt()).abs() < 1e-12);
    assert!(report.per_fold.iter().all(|a| (0.0..=1.0).contains(a)));
    assert!(report.mean_train_accuracy >= report.mean_accuracy);
    let chosen = report
        .folds
        .iter()
        .filter(|f| f.selected == report.best_params)
        .count();
    for f in &report.folds {
        assert!(report.folds.iter().filter(|g| g.selected == f.selected).count() <= chosen);
    }

    let again = cross_validate(&cands, &labels, &config, 1).unwrap();
    assert_eq!(report.to_json(), again.to_json());
}

#[test]
fn single_repeat_single_split_shape() {
    let labels: Vec<i64> = (0..12).map(|i| i % 2).collect();
    let gram = Array2::from_shape_fn((12, 12), |(i, j)| if labels[i] == labels[j] { 1.0 } else { 0.2 });
    let cands = [Candidate {
        choice: KernelChoice::lambda(1.0),
        gram: &gram,
    }];
    let config = CvConfig {
        c_grid: vec![1.0],
        folds: 2,
        repeats: 1,
        inner_folds: 2,
        seed: 0,
    };
    let report = cross_validate(&cands, &labels, &config, 1).unwrap();
    assert_eq!(report.per_fold.len(), 2);
    assert_eq!(report.mean_accuracy, 1.0);
}
