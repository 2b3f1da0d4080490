//! Discrete optimal transport between path measures.

mod emd;
mod sinkhorn;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lcs::lcs_distance_with;
use crate::representation::PathMeasure;

pub use emd::exact_emd;
pub use sinkhorn::sinkhorn;

/// Largest `n1 * n2` the exact solver accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 250_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OtError {
    #[error("empty measure")]
    EmptyMeasure,
    #[error("bad marginals: {0}")]
    BadMarginals(String),
    #[error("cost matrix is {rows}x{cols} but marginals have lengths {p} and {q}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        p: usize,
        q: usize,
    },
    #[error("{cells} cells exceed the exact solver cap of {cap}")]
    TooLarge { cells: usize, cap: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("exact solver exceeded its pivot budget")]
    Stalled,
}

/// Sinkhorn stopped at its iteration cap with a marginal violation above
/// `100 * tol`. The plan is still usable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonConvergence {
    pub iterations: usize,
    pub violation: f64,
}

/// Pairwise LCS distances between the support points of two measures.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundDistanceMatrix(Array2<f64>);

impl GroundDistanceMatrix {
    pub fn entries(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }
}

pub fn ground_distance_matrix(
    a: &PathMeasure,
    b: &PathMeasure,
) -> Result<GroundDistanceMatrix, OtError> {
    if a.is_empty() || b.is_empty() {
        return Err(OtError::EmptyMeasure);
    }
    let mut row = Vec::new();
    let mut d = Array2::zeros((a.len(), b.len()));
    for (i, x) in a.sequences().iter().enumerate() {
        for (j, y) in b.sequences().iter().enumerate() {
            d[[i, j]] = lcs_distance_with(&mut row, x.labels(), y.labels());
        }
    }
    Ok(GroundDistanceMatrix(d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub coupling: Array2<f64>,
    pub cost: f64,
    pub warning: Option<NonConvergence>,
}

impl TransportPlan {
    /// Largest absolute deviation of the coupling's row and column sums from
    /// `p` and `q`.
    pub fn marginal_violation(&self, p: &[f64], q: &[f64]) -> f64 {
        let rows = self
            .coupling
            .rows()
            .into_iter()
            .zip(p)
            .map(|(r, &pi)| (r.sum() - pi).abs());
        let cols = self
            .coupling
            .columns()
            .into_iter()
            .zip(q)
            .map(|(c, &qj)| (c.sum() - qj).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// Solver selection for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtSettings {
    /// Entropic regularization strength of Sinkhorn.
    pub epsilon: f64,
    /// Marginal tolerance of Sinkhorn.
    pub tol: f64,
    pub max_iter: usize,
    /// Problems with `n1 * n2 <= exact_threshold` use the exact solver.
    pub exact_threshold: usize,
    pub exact_cap: usize,
}

impl Default for OtSettings {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            tol: 1e-9,
            max_iter: 10_000,
            exact_threshold: DEFAULT_EXACT_CAP,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }
}

impl OtSettings {
    pub fn validate(&self) -> Result<(), OtError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(OtError::BadEpsilon(self.epsilon));
        }
        Ok(())
    }

    /// Whether an `rows x cols` problem goes to the exact solver.
    pub fn uses_exact(&self, rows: usize, cols: usize) -> bool {
        let cells = rows * cols;
        cells <= self.exact_threshold && cells <= self.exact_cap
    }
}

/// Exact solver for small problems, Sinkhorn above the threshold.
pub fn solve(
    cost: ArrayView2<'_, f64>,
    p: &[f64],
    q: &[f64],
    settings: &OtSettings,
) -> Result<TransportPlan, OtError> {
    let (rows, cols) = cost.dim();
    if settings.uses_exact(rows, cols) {
        exact_emd(cost, p, q, settings.exact_cap)
    } else {
        sinkhorn(cost, p, q, settings.epsilon, settings.tol, settings.max_iter)
    }
}

fn check_marginals(cost: ArrayView2<'_, f64>, p: &[f64], q: &[f64]) -> Result<(), OtError> {
    let (rows, cols) = cost.dim();
    if rows != p.len() || cols != q.len() {
        return Err(OtError::DimensionMismatch {
            rows,
            cols,
            p: p.len(),
            q: q.len(),
        });
    }
    if rows == 0 || cols == 0 {
        return Err(OtError::EmptyMeasure);
    }
    for (name, v) in [("p", p), ("q", q)] {
        if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(OtError::BadMarginals(format!("{name} has entry {x}")));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(OtError::BadMarginals(format!("{name} sums to {sum}")));
        }
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(OtError::BadMarginals("cost matrix has non-finite entries".into()));
    }
    Ok(())
}

fn plan_cost(coupling: &Array2<f64>, cost: ArrayView2<'_, f64>) -> f64 {
    coupling.iter().zip(cost.iter()).map(|(t, c)| t * c).sum()
}
