//! C-SVM on a precomputed kernel, trained by sequential minimal optimization
//! with second-order working-set selection.
//!
//! The kernel may be indefinite: a non-positive curvature along the chosen
//! pair is replaced by a small positive constant so every step stays finite.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

/// Stopping tolerance on the maximal KKT violation.
pub const KKT_TOL: f64 = 1e-3;
const TAU: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("binary labels must be +1 or -1, found {0}")]
    BadLabel(i8),
    #[error("C must be positive and finite, got {0}")]
    BadC(f64),
    #[error("kernel is {rows}x{cols} but there are {labels} labels")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        labels: usize,
    },
}

/// Dual solution of a binary problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    /// Dual variables, `0 <= alpha[i] <= C`.
    pub alpha: Vec<f64>,
    pub labels: Vec<i8>,
    pub bias: f64,
    pub iterations: usize,
    /// False when the iteration cap stopped the solver first.
    pub converged: bool,
}

impl BinarySvm {
    /// `sum_i alpha_i y_i k_i + bias` for the kernel values `k_i` between a
    /// new point and the training points.
    pub fn decision(&self, kernel_row: impl IntoIterator<Item = f64>) -> f64 {
        self.alpha
            .iter()
            .zip(&self.labels)
            .zip(kernel_row)
            .map(|((a, &y), k)| a * f64::from(y) * k)
            .sum::<f64>()
            + self.bias
    }

    /// Largest violation of the KKT conditions, measured as
    /// `max_{I_up} -y G - min_{I_low} -y G`.
    pub fn kkt_violation(&self, gram: ArrayView2<'_, f64>, c: f64) -> f64 {
        let n = self.alpha.len();
        let y: Vec<f64> = self.labels.iter().map(|&l| f64::from(l)).collect();
        let grad: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| y[i] * y[j] * gram[[i, j]] * self.alpha[j])
                    .sum::<f64>()
                    - 1.0
            })
            .collect();
        let mut up = f64::NEG_INFINITY;
        let mut low = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let (a, pos) = (self.alpha[t], y[t] > 0.0);
            if (pos && a < c) || (!pos && a > 0.0) {
                up = up.max(v);
            }
            if (pos && a > 0.0) || (!pos && a < c) {
                low = low.min(v);
            }
        }
        (up - low).max(0.0)
    }
}

pub fn default_max_iter(n: usize) -> usize {
    (100 * n).max(100_000)
}

/// Trains a binary C-SVM on the square kernel `gram` with labels in
/// `{+1, -1}`.
pub fn svm_train(gram: ArrayView2<'_, f64>, labels: &[i8], c: f64) -> Result<BinarySvm, SvmError> {
    svm_train_with_cap(gram, labels, c, default_max_iter(labels.len()))
}

pub fn svm_train_with_cap(
    gram: ArrayView2<'_, f64>,
    labels: &[i8],
    c: f64,
    max_iter: usize,
) -> Result<BinarySvm, SvmError> {
    let n = labels.len();
    if gram.dim() != (n, n) {
        return Err(SvmError::DimensionMismatch {
            rows: gram.nrows(),
            cols: gram.ncols(),
            labels: n,
        });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(SvmError::BadC(c));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
        return Err(SvmError::BadLabel(bad));
    }
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(SvmError::SingleClass);
    }

    let y: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
    let diag: Vec<f64> = (0..n).map(|i| gram[[i, i]]).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // First index: maximal violation among I_up.
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && v >= g_max {
                g_max = v;
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            break;
        };

        // Second index: largest objective decrease among I_low.
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !in_low {
                continue;
            }
            let v = y[t] * grad[t];
            g_max2 = g_max2.max(v);
            let grad_diff = g_max + v;
            if grad_diff > 0.0 {
                let mut quad = diag[i] + diag[t] - 2.0 * gram[[i, t]];
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel.filter(|_| g_max + g_max2 >= KKT_TOL) else {
            converged = true;
            break;
        };
        iterations += 1;

        let q_ij = y[i] * y[j] * gram[[i, j]];
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (k, g) in grad.iter_mut().enumerate() {
            *g += y[k] * (y[i] * gram[[i, k]] * di + y[j] * gram[[j, k]] * dj);
        }
    }

    // Bias from free variables, or the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };

    Ok(BinarySvm {
        alpha,
        labels: labels.to_vec(),
        bias: -rho,
        iterations,
        converged,
    })
}

/// One binary machine per class pair; prediction by majority vote with ties
/// going to the lowest class.
#[derive(Debug, Clone, PartialEq)]
pub struct OneVsOne {
    /// Sorted distinct class labels present in training.
    pub classes: Vec<i64>,
    /// Dataset indices of the training points.
    pub train: Vec<usize>,
    /// `(a, b, machine, positions of its points within `train`)` for class
    /// indices `a < b`; class `a` is the positive side.
    machines: Vec<(usize, usize, BinarySvm, Vec<usize>)>,
    /// Machines that stopped at the iteration cap.
    pub unconverged: usize,
}

impl OneVsOne {
    /// Trains on the points `train` of the full kernel matrix `gram`.
    pub fn train(
        gram: &Array2<f64>,
        classes_of: &[i64],
        train: &[usize],
        c: f64,
    ) -> Result<Self, SvmError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(SvmError::BadC(c));
        }
        let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (pos, &t) in train.iter().enumerate() {
            by_class.entry(classes_of[t]).or_default().push(pos);
        }
        let classes: Vec<i64> = by_class.keys().copied().collect();
        let groups: Vec<Vec<usize>> = by_class.into_values().collect();

        let mut machines = Vec::new();
        let mut unconverged = 0;
        for a in 0..classes.len() {
            for b in a + 1..classes.len() {
                let members: Vec<usize> = groups[a].iter().chain(&groups[b]).copied().collect();
                let labels: Vec<i8> = groups[a]
                    .iter()
                    .map(|_| 1)
                    .chain(groups[b].iter().map(|_| -1))
                    .collect();
                let k = members.len();
                let sub = Array2::from_shape_fn((k, k), |(r, s)| {
                    gram[[train[members[r]], train[members[s]]]]
                });
                let svm = svm_train(sub.view(), &labels, c)?;
                if !svm.converged {
                    unconverged += 1;
                }
                machines.push((a, b, svm, members));
            }
        }
        Ok(Self {
            classes,
            train: train.to_vec(),
            machines,
            unconverged,
        })
    }

    /// Predicted class of dataset point `x`, using row `x` of `gram`.
    pub fn predict(&self, gram: &Array2<f64>, x: usize) -> i64 {
        if self.classes.len() == 1 {
            return self.classes[0];
        }
        let votes = self.votes(gram, x);
        // max_by_key keeps the last maximum; scan in reverse to prefer the
        // lowest class index.
        let best = (0..votes.len())
            .rev()
            .max_by_key(|&k| votes[k])
            .expect("at least two classes");
        self.classes[best]
    }

    /// Votes per class for `x`, in `classes` order.
    pub fn votes(&self, gram: &Array2<f64>, x: usize) -> Vec<usize> {
        let mut votes = vec![0usize; self.classes.len()];
        for (a, b, svm, members) in &self.machines {
            let row = members.iter().map(|&pos| gram[[x, self.train[pos]]]);
            if svm.decision(row) > 0.0 {
                votes[*a] += 1;
            } else {
                votes[*b] += 1;
            }
        }
        votes
    }

    /// Fraction of `points` whose prediction equals their class.
    pub fn accuracy(&self, gram: &Array2<f64>, classes_of: &[i64], points: &[usize]) -> f64 {
        if points.is_empty() {
            return 0.0;
        }
        let hits = points
            .iter()
            .filter(|&&x| self.predict(gram, x) == classes_of[x])
            .count();
        hits as f64 / points.len() as f64
    }
}
