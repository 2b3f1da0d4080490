//! Entropic optimal transport by Sinkhorn iteration in the log domain.
//!
//! Potentials `f`, `g` define the coupling
//! `T[i][j] = exp((f[i] + g[j] - C[i][j]) / eps)`. Each sweep makes the
//! column sums exact; the row-sum error measured at the start of the next
//! sweep is the stopping criterion.

use ndarray::{Array2, ArrayView2};

use super::{check_marginals, plan_cost, NonConvergence, OtError, TransportPlan};

/// `log(sum(exp(x)))` over an iterator, `-inf` for an empty or all `-inf`
/// input.
fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub fn sinkhorn(
    cost: ArrayView2<'_, f64>,
    p: &[f64],
    q: &[f64],
    epsilon: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TransportPlan, OtError> {
    check_marginals(cost, p, q)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(OtError::BadEpsilon(epsilon));
    }
    let (m, n) = cost.dim();
    let log_p: Vec<f64> = p.iter().map(|x| x.ln()).collect();
    let log_q: Vec<f64> = q.iter().map(|x| x.ln()).collect();
    let mut f = vec![0.0; m];
    let mut g = vec![0.0; n];
    let scaled = cost.mapv(|c| c / epsilon);

    let mut iterations = 0;
    loop {
        // Row update; the log row sums of the current plan fall out of it.
        let mut violation = 0.0f64;
        for i in 0..m {
            let row = scaled.row(i);
            let lse = log_sum_exp(row.iter().zip(&g).map(|(c, gj)| gj / epsilon - c));
            if iterations > 0 {
                let row_sum = (f[i] / epsilon + lse).exp();
                violation = violation.max((row_sum - p[i]).abs());
            }
            f[i] = if p[i] > 0.0 {
                epsilon * (log_p[i] - lse)
            } else {
                f64::NEG_INFINITY
            };
        }
        if iterations > 0 && violation <= tol {
            break;
        }
        if iterations == max_iter {
            break;
        }
        for j in 0..n {
            let col = scaled.column(j);
            let lse = log_sum_exp(col.iter().zip(&f).map(|(c, fi)| fi / epsilon - c));
            g[j] = if q[j] > 0.0 {
                epsilon * (log_q[j] - lse)
            } else {
                f64::NEG_INFINITY
            };
        }
        iterations += 1;
    }

    // Rows are exact after the final row update; columns carry the residual.
    let mut coupling = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            let e = (f[i] + g[j]) / epsilon - scaled[[i, j]];
            coupling[[i, j]] = if e.is_nan() { 0.0 } else { e.exp() };
        }
    }
    let plan = TransportPlan {
        cost: plan_cost(&coupling, cost),
        coupling,
        warning: None,
    };
    let violation = plan.marginal_violation(p, q);
    let warning = (violation > 100.0 * tol).then_some(NonConvergence {
        iterations,
        violation,
    });
    Ok(TransportPlan { warning, ..plan })
}
