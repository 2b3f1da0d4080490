//! Exact transportation solver: primal network simplex on the bipartite
//! supply/demand graph.
//!
//! The basis is a spanning tree of `m + n - 1` cells (zero-flow cells keep
//! degenerate bases connected). Pricing scans blocks of cells and picks the
//! most negative reduced cost within a block. After a long run of degenerate
//! pivots the solver switches to Bland's rule, which cannot cycle.

use ndarray::{Array2, ArrayView2};

use super::{check_marginals, plan_cost, OtError, TransportPlan};

const REDUCED_COST_TOL: f64 = 1e-12;
const DEGENERATE_STREAK: usize = 64;

struct Tree {
    rows: usize,
    /// Basic cells as `(row, col)`.
    cells: Vec<(usize, usize)>,
    flow: Vec<f64>,
    /// Node -> incident basic cell ids. Rows are nodes `0..m`, columns
    /// `m..m + n`.
    incident: Vec<Vec<usize>>,
}

impl Tree {
    fn col_node(&self, j: usize) -> usize {
        self.rows + j
    }

    fn insert(&mut self, id: usize, cell: (usize, usize), flow: f64) {
        self.cells[id] = cell;
        self.flow[id] = flow;
        let (r, c) = (cell.0, self.col_node(cell.1));
        self.incident[r].push(id);
        self.incident[c].push(id);
    }

    fn detach(&mut self, id: usize) {
        let (r, c) = self.cells[id];
        let c = self.col_node(c);
        for node in [r, c] {
            let pos = self.incident[node]
                .iter()
                .position(|&x| x == id)
                .expect("cell is incident");
            self.incident[node].swap_remove(pos);
        }
    }

    fn other_end(&self, id: usize, node: usize) -> usize {
        let (r, c) = self.cells[id];
        if node == r {
            self.col_node(c)
        } else {
            r
        }
    }

    /// Dual potentials with `u[0] = 0` and `u[i] + v[j] = c[i][j]` on the
    /// tree. Returned as one vector over all nodes.
    fn potentials(&self, cost: ArrayView2<'_, f64>, pot: &mut [f64], stack: &mut Vec<usize>) {
        let mut seen = vec![false; pot.len()];
        pot[0] = 0.0;
        seen[0] = true;
        stack.clear();
        stack.push(0);
        while let Some(node) = stack.pop() {
            for &id in &self.incident[node] {
                let next = self.other_end(id, node);
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                let (r, c) = self.cells[id];
                pot[next] = cost[[r, c]] - pot[node];
                stack.push(next);
            }
        }
    }

    /// Cell ids on the tree path from `from` to `to`, in order from `from`.
    fn path(&self, from: usize, to: usize, parent: &mut [usize], stack: &mut Vec<usize>) -> Vec<usize> {
        const NONE: usize = usize::MAX;
        parent.fill(NONE);
        parent[from] = from;
        stack.clear();
        stack.push(from);
        'search: while let Some(node) = stack.pop() {
            for &id in &self.incident[node] {
                let next = self.other_end(id, node);
                if parent[next] != NONE {
                    continue;
                }
                parent[next] = id;
                if next == to {
                    break 'search;
                }
                stack.push(next);
            }
        }
        let mut ids = Vec::new();
        let mut node = to;
        while node != from {
            let id = parent[node];
            ids.push(id);
            node = self.other_end(id, node);
        }
        ids.reverse();
        ids
    }
}

/// Least-cost initial basis: allocate cells in ascending cost order, crossing
/// out exactly one exhausted line per allocation (both on the last one), which
/// yields a spanning tree of `m + n - 1` cells.
fn least_cost_basis(cost: ArrayView2<'_, f64>, p: &[f64], q: &[f64]) -> Tree {
    let (m, n) = (p.len(), q.len());
    let mut tree = Tree {
        rows: m,
        cells: vec![(0, 0); m + n - 1],
        flow: vec![0.0; m + n - 1],
        incident: vec![Vec::new(); m + n],
    };
    let mut order: Vec<usize> = (0..m * n).collect();
    let flat = cost.as_slice();
    order.sort_by(|&a, &b| {
        let (ca, cb) = match flat {
            Some(f) => (f[a], f[b]),
            None => (cost[[a / n, a % n]], cost[[b / n, b % n]]),
        };
        ca.total_cmp(&cb).then(a.cmp(&b))
    });

    let mut supply = p.to_vec();
    let mut demand = q.to_vec();
    let mut row_open = vec![true; m];
    let mut col_open = vec![true; n];
    let (mut open_rows, mut open_cols) = (m, n);
    let mut id = 0;
    for k in order {
        let (i, j) = (k / n, k % n);
        if !row_open[i] || !col_open[j] {
            continue;
        }
        let amount = supply[i].min(demand[j]).max(0.0);
        tree.insert(id, (i, j), amount);
        id += 1;
        supply[i] -= amount;
        demand[j] -= amount;
        if open_rows > 1 && (supply[i] <= demand[j] || open_cols == 1) {
            row_open[i] = false;
            open_rows -= 1;
        } else if open_cols > 1 {
            col_open[j] = false;
            open_cols -= 1;
        } else {
            break;
        }
    }
    debug_assert_eq!(id, m + n - 1);
    tree
}

/// Exact optimal coupling of the transportation problem with marginals `p`
/// and `q`. Fails with [`OtError::TooLarge`] above `cap` cells.
pub fn exact_emd(
    cost: ArrayView2<'_, f64>,
    p: &[f64],
    q: &[f64],
    cap: usize,
) -> Result<TransportPlan, OtError> {
    check_marginals(cost, p, q)?;
    let (m, n) = cost.dim();
    if m * n > cap {
        return Err(OtError::TooLarge { cells: m * n, cap });
    }

    let mut tree = least_cost_basis(cost, p, q);
    let mut pot = vec![0.0; m + n];
    let mut parent = vec![0usize; m + n];
    let mut stack = Vec::new();
    let mut in_basis = vec![false; m * n];
    for &(r, c) in &tree.cells {
        in_basis[r * n + c] = true;
    }

    let cells = m * n;
    let block = ((cells as f64).sqrt() as usize).max(16).min(cells);
    let mut next_cell = 0usize;
    let mut degenerate_run = 0usize;
    let mut bland = false;
    let max_pivots = 50 * cells + 1000;

    for _ in 0..max_pivots {
        tree.potentials(cost, &mut pot, &mut stack);
        let reduced = |k: usize| -> f64 {
            let (r, c) = (k / n, k % n);
            cost[[r, c]] - pot[r] - pot[m + c]
        };

        let entering = if bland {
            (0..cells).find(|&k| !in_basis[k] && reduced(k) < -REDUCED_COST_TOL)
        } else {
            let mut found = None;
            let mut scanned = 0;
            while scanned < cells && found.is_none() {
                let mut best = (-REDUCED_COST_TOL, None);
                let end = (scanned + block).min(cells);
                for _ in scanned..end {
                    let k = next_cell;
                    next_cell = if next_cell + 1 == cells { 0 } else { next_cell + 1 };
                    if in_basis[k] {
                        continue;
                    }
                    let r = reduced(k);
                    if r < best.0 {
                        best = (r, Some(k));
                    }
                }
                scanned = end;
                found = best.1;
            }
            found
        };

        let Some(k) = entering else {
            let mut coupling = Array2::zeros((m, n));
            for (&(r, c), &f) in tree.cells.iter().zip(&tree.flow) {
                coupling[[r, c]] = f.max(0.0);
            }
            let cost_value = plan_cost(&coupling, cost);
            return Ok(TransportPlan {
                coupling,
                cost: cost_value,
                warning: None,
            });
        };

        let (er, ec) = (k / n, k % n);
        let cycle = tree.path(er, m + ec, &mut parent, &mut stack);
        // Path arcs alternate -, +, -, ... starting at the entering row; the
        // entering cell itself gains flow.
        let mut leave_pos = 0;
        let mut theta = f64::INFINITY;
        let mut leave_key = usize::MAX;
        for (pos, &id) in cycle.iter().enumerate().step_by(2) {
            let f = tree.flow[id];
            let (r, c) = tree.cells[id];
            let key = r * n + c;
            if f < theta || (f == theta && key < leave_key) {
                theta = f;
                leave_pos = pos;
                leave_key = key;
            }
        }
        let theta = theta.max(0.0);
        for (pos, &id) in cycle.iter().enumerate() {
            if pos % 2 == 0 {
                tree.flow[id] -= theta;
            } else {
                tree.flow[id] += theta;
            }
        }
        let leaving = cycle[leave_pos];
        let (lr, lc) = tree.cells[leaving];
        in_basis[lr * n + lc] = false;
        tree.detach(leaving);
        tree.insert(leaving, (er, ec), theta);
        in_basis[k] = true;

        if theta > 0.0 {
            degenerate_run = 0;
        } else {
            degenerate_run += 1;
            if degenerate_run > DEGENERATE_STREAK {
                bland = true;
            }
        }
    }
    Err(OtError::Stalled)
}
