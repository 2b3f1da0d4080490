//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library under test.

#![allow(dead_code)]

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Longest common subsequence by enumerating every subsequence of `a` (at
/// most `2^len(a)`) and checking whether it embeds in `b`.
pub fn brute_lcs(a: &[i32], b: &[i32]) -> usize {
    assert!(a.len() <= 16, "oracle is exponential");
    let embeds = |mask: u32| {
        let mut k = 0;
        for (i, &x) in a.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            while k < b.len() && b[k] != x {
                k += 1;
            }
            if k == b.len() {
                return false;
            }
            k += 1;
        }
        true
    };
    (0u32..1 << a.len())
        .filter(|&m| embeds(m))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Longest common contiguous run, by checking every pair of start offsets.
pub fn brute_lcstr(a: &[i32], b: &[i32]) -> usize {
    let mut best = 0;
    for i in 0..a.len() {
        for j in 0..b.len() {
            let mut k = 0;
            while i + k < a.len() && j + k < b.len() && a[i + k] == b[j + k] {
                k += 1;
            }
            best = best.max(k);
        }
    }
    best
}

/// `1 - lcs / max(la, lb)` as an exact fraction.
pub fn rational_distance(lcs: usize, la: usize, lb: usize) -> Ratio<i64> {
    Ratio::from_integer(1) - Ratio::new(lcs as i64, la.max(lb) as i64)
}

/// Textbook full-table LCS, used where sequences are too long for
/// enumeration.
pub fn table_lcs(a: &[i32], b: &[i32]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

pub fn random_sequence(rng: &mut ChaCha8Rng, min_len: usize, max_len: usize, alphabet: &[i32]) -> Vec<i32> {
    let len = rng.gen_range(min_len..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

/// Every simple path between all ordered vertex pairs of a small graph given
/// by adjacency lists.
pub fn simple_paths(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn extend(adj: &[Vec<usize>], path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        for &w in &adj[last] {
            if on[w] {
                continue;
            }
            on[w] = true;
            path.push(w);
            out.push(path.clone());
            extend(adj, path, on, out);
            path.pop();
            on[w] = false;
        }
    }
    let mut out = Vec::new();
    for s in 0..adjacency.len() {
        let mut on = vec![false; adjacency.len()];
        on[s] = true;
        extend(adjacency, &mut vec![s], &mut on, &mut out);
    }
    out
}

/// For each ordered pair `(u, v)`, `u != v`, connected: the shortest simple
/// path whose reversed vertex list is lexicographically smallest. This is
/// the path obtained by walking back from `v` through the lowest-index
/// neighbor one step closer to `u`.
pub fn canonical_shortest_paths(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut best: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
    for p in simple_paths(adjacency) {
        let (u, v) = (p[0], *p.last().unwrap());
        let slot = &mut best[u][v];
        let better = match slot {
            None => true,
            Some(q) => {
                p.len() < q.len()
                    || (p.len() == q.len() && p.iter().rev().lt(q.iter().rev()))
            }
        };
        if better {
            *slot = Some(p);
        }
    }
    best.into_iter().flatten().flatten().collect()
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, edge_prob: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// Random probability vector; `zero_prob` of the entries are set to zero
/// (at least one stays positive).
pub fn random_simplex(rng: &mut ChaCha8Rng, len: usize, zero_prob: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| if rng.gen_bool(zero_prob) { 0.0 } else { rng.gen_range(0.01..1.0) })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..len)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Optimal transport cost via a dense two-phase tableau simplex with Bland's
/// rule on the plain LP `min <C, X>` subject to row sums `p`, column sums
/// `q`, `X >= 0`.
pub fn reference_transport(cost: &[Vec<f64>], p: &[f64], q: &[f64]) -> f64 {
    let (m, n) = (p.len(), q.len());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..m {
        let mut r = vec![0.0; m * n];
        for j in 0..n {
            r[i * n + j] = 1.0;
        }
        rows.push(r);
        rhs.push(p[i]);
    }
    for j in 0..n {
        let mut r = vec![0.0; m * n];
        for i in 0..m {
            r[i * n + j] = 1.0;
        }
        rows.push(r);
        rhs.push(q[j]);
    }
    let c: Vec<f64> = cost.iter().flatten().copied().collect();
    lp_min(&rows, &rhs, &c)
}

/// `min c.x` s.t. `A x = b`, `x >= 0`, with `b >= 0` and a bounded optimum.
pub fn lp_min(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    const EPS: f64 = 1e-11;
    let (r, nv) = (a.len(), c.len());
    let width = nv + r + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; r];
    for i in 0..r {
        t[i][..nv].copy_from_slice(&a[i]);
        t[i][nv + i] = 1.0;
        t[i][rhs] = b[i];
    }
    let mut basis: Vec<usize> = (nv..nv + r).collect();

    fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
        let pv = t[row][col];
        t[row].iter_mut().for_each(|x| *x /= pv);
        let pr = t[row].clone();
        for (i, tr) in t.iter_mut().enumerate() {
            if i == row || tr[col] == 0.0 {
                continue;
            }
            let f = tr[col];
            for (x, y) in tr.iter_mut().zip(&pr) {
                *x -= f * y;
            }
        }
    }

    let run = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, cost: &[f64], allowed: usize| loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z: f64 = (0..r).map(|i| cost[basis[i]] * t[i][j]).sum();
            cost[j] - z < -EPS
        });
        let Some(j) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..r {
            if t[i][j] > EPS {
                let ratio = t[i][rhs] / t[i][j];
                leave = match leave {
                    Some((k, best))
                        if best < ratio - EPS || ((best - ratio).abs() <= EPS && basis[k] < basis[i]) =>
                    {
                        Some((k, best))
                    }
                    _ => Some((i, ratio)),
                };
            }
        }
        let (i, _) = leave.expect("bounded");
        pivot(t, i, j);
        basis[i] = j;
    };

    let phase1: Vec<f64> = (0..nv + r).map(|j| if j >= nv { 1.0 } else { 0.0 }).collect();
    run(&mut t, &mut basis, &phase1, nv + r);
    for i in 0..r {
        if basis[i] >= nv {
            if let Some(j) = (0..nv).find(|&j| t[i][j].abs() > 1e-9) {
                pivot(&mut t, i, j);
                basis[i] = j;
            }
        }
    }
    let mut phase2 = c.to_vec();
    phase2.resize(nv + r, 0.0);
    run(&mut t, &mut basis, &phase2, nv);
    (0..r).map(|i| phase2[basis[i]] * t[i][rhs]).sum()
}
