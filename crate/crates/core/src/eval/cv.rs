//! Repeated stratified k-fold cross-validation with nested model selection.
//!
//! For every outer split, the SVM parameter `C` and the kernel (one Gram
//! matrix per `lambda`, and per `rho`/`s` for the fast variant) are chosen by
//! an inner stratified k-fold on the training part only, then refit on the
//! whole training part and scored on the held-out fold.

use std::collections::BTreeMap;
use std::time::Instant;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::svm::{OneVsOne, SvmError};

pub const C_GRID: [f64; 7] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0];
pub const LAMBDA_GRID: [f64; 6] = [0.0001, 0.001, 0.01, 0.1, 1.0, 10.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvError {
    #[error("no candidate kernels")]
    NoCandidates,
    #[error("empty C grid")]
    EmptyCGrid,
    #[error("candidate {index} is {rows}x{cols}, expected {n}x{n}")]
    Shape {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("need at least 2 folds, got {0}")]
    Folds(usize),
    #[error("need at least 1 repeat")]
    Repeats,
    #[error("{folds} folds but only {n} graphs")]
    TooFewGraphs { folds: usize, n: usize },
    #[error("cannot build a worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Svm(#[from] SvmError),
}

/// Parameters a candidate Gram matrix was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelChoice {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl KernelChoice {
    pub fn lambda(lambda: f64) -> Self {
        Self {
            lambda,
            rho: None,
            s: None,
        }
    }
}

pub struct Candidate<'a> {
    pub choice: KernelChoice,
    pub gram: &'a Array2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub c: f64,
    #[serde(flatten)]
    pub kernel: KernelChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub c_grid: Vec<f64>,
    pub folds: usize,
    pub repeats: usize,
    pub inner_folds: usize,
    /// Repeat `r` shuffles with seed `seed + r`.
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            c_grid: C_GRID.to_vec(),
            folds: 10,
            repeats: 10,
            inner_folds: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub cross_validation_seconds: f64,
}

/// Outcome of one held-out fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub accuracy: f64,
    pub train_accuracy: f64,
    pub selected: Selection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub mean_accuracy: f64,
    /// Population standard deviation of `per_fold`.
    pub std_accuracy: f64,
    pub per_fold: Vec<f64>,
    pub folds: Vec<FoldResult>,
    /// Most frequently selected parameters; earliest in grid order on ties.
    pub best_params: Selection,
    pub mean_train_accuracy: f64,
    pub warnings: Vec<String>,
    /// Wall-clock time is not part of the serialized report, so that
    /// reports from identical inputs are byte-identical.
    #[serde(skip)]
    pub timing: Timing,
}

impl CvReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Stratified assignment of `items` to `k` folds: each class is shuffled and
/// dealt round-robin, continuing the deal across classes so fold sizes
/// differ by at most one.
pub fn stratified_folds(items: &[usize], classes_of: &[i64], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for &x in items {
        by_class.entry(classes_of[x]).or_default().push(x);
    }
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for (_, mut members) in by_class {
        members.shuffle(rng);
        for x in members {
            folds[next].push(x);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds
}

fn complement(folds: &[Vec<usize>], held_out: usize) -> Vec<usize> {
    folds
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != held_out)
        .flat_map(|(_, f)| f.iter().copied())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn inner_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (fold as u64 + 1)
}

/// Picks `(C, kernel)` maximizing pooled inner-fold accuracy on `train`.
fn select(
    candidates: &[Candidate<'_>],
    classes_of: &[i64],
    train: &[usize],
    config: &CvConfig,
    seed: u64,
) -> Result<Selection, CvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = config.inner_folds.min(train.len()).max(2);
    let folds = stratified_folds(train, classes_of, k, &mut rng);
    let mut best: Option<(usize, Selection)> = None;
    for cand in candidates {
        for &c in &config.c_grid {
            let mut hits = 0;
            for (f, test) in folds.iter().enumerate() {
                if test.is_empty() {
                    continue;
                }
                let fit = complement(&folds, f);
                let model = OneVsOne::train(cand.gram, classes_of, &fit, c)?;
                hits += test
                    .iter()
                    .filter(|&&x| model.predict(cand.gram, x) == classes_of[x])
                    .count();
            }
            if best.as_ref().is_none_or(|(h, _)| hits > *h) {
                best = Some((
                    hits,
                    Selection {
                        c,
                        kernel: cand.choice,
                    },
                ));
            }
        }
    }
    Ok(best.expect("non-empty grid").1)
}

pub fn cross_validate(
    candidates: &[Candidate<'_>],
    classes_of: &[i64],
    config: &CvConfig,
    workers: usize,
) -> Result<CvReport, CvError> {
    let n = classes_of.len();
    if candidates.is_empty() {
        return Err(CvError::NoCandidates);
    }
    if config.c_grid.is_empty() {
        return Err(CvError::EmptyCGrid);
    }
    for (index, cand) in candidates.iter().enumerate() {
        if cand.gram.dim() != (n, n) {
            return Err(CvError::Shape {
                index,
                rows: cand.gram.nrows(),
                cols: cand.gram.ncols(),
                n,
            });
        }
    }
    if config.folds < 2 {
        return Err(CvError::Folds(config.folds));
    }
    if config.repeats == 0 {
        return Err(CvError::Repeats);
    }
    if n < config.folds {
        return Err(CvError::TooFewGraphs {
            folds: config.folds,
            n,
        });
    }

    let mut warnings = Vec::new();
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &c in classes_of {
        *counts.entry(c).or_default() += 1;
    }
    for (class, count) in &counts {
        if *count < config.folds {
            warnings.push(format!(
                "class {class} has {count} members, fewer than {} folds; some folds miss it",
                config.folds
            ));
        }
    }

    let start = Instant::now();
    let all: Vec<usize> = (0..n).collect();
    let mut jobs = Vec::new();
    for r in 0..config.repeats {
        let seed = config.seed.wrapping_add(r as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let folds = stratified_folds(&all, classes_of, config.folds, &mut rng);
        for f in 0..config.folds {
            let train = complement(&folds, f);
            jobs.push((r, f, seed, train, folds[f].clone()));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CvError::Pool(e.to_string()))?;
    let results: Vec<Result<FoldResult, CvError>> = pool.install(|| {
        jobs.par_iter()
            .map(|(r, f, seed, train, test)| {
                let selected = select(candidates, classes_of, train, config, inner_seed(*seed, *f))?;
                let gram = candidates
                    .iter()
                    .find(|c| c.choice == selected.kernel)
                    .expect("selected candidate exists")
                    .gram;
                let model = OneVsOne::train(gram, classes_of, train, selected.c)?;
                Ok(FoldResult {
                    repeat: *r,
                    fold: *f,
                    accuracy: model.accuracy(gram, classes_of, test),
                    train_accuracy: model.accuracy(gram, classes_of, train),
                    selected,
                })
            })
            .collect()
    });
    let folds: Vec<FoldResult> = results.into_iter().collect::<Result<_, _>>()?;

    let per_fold: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    let mean = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
    let var = per_fold.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / per_fold.len() as f64;
    let mean_train = folds.iter().map(|f| f.train_accuracy).sum::<f64>() / folds.len() as f64;

    // Mode of the selections, ties resolved by grid order.
    let grid: Vec<Selection> = candidates
        .iter()
        .flat_map(|cand| {
            config.c_grid.iter().map(move |&c| Selection {
                c,
                kernel: cand.choice,
            })
        })
        .collect();
    let best_params = grid
        .iter()
        .copied()
        .rev()
        .max_by_key(|s| folds.iter().filter(|f| f.selected == *s).count())
        .expect("non-empty grid");

    Ok(CvReport {
        mean_accuracy: mean,
        std_accuracy: var.sqrt(),
        per_fold,
        folds,
        best_params,
        mean_train_accuracy: mean_train,
        warnings,
        timing: Timing {
            cross_validation_seconds: start.elapsed().as_secs_f64(),
        },
    })
}
