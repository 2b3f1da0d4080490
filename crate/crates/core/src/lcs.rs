//! Longest common subsequence, sequence similarity and the LCS metric.

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("similarity is undefined for an empty sequence")]
pub struct EmptySequence;

/// Length of the longest common subsequence, `O(|a| |b|)` time and
/// `O(min(|a|, |b|))` memory.
pub fn lcs_length(a: &[i32], b: &[i32]) -> usize {
    let mut row = Vec::new();
    lcs_length_with(&mut row, a, b)
}

/// [`lcs_length`] reusing `row` as DP storage across calls.
pub fn lcs_length_with(row: &mut Vec<u32>, a: &[i32], b: &[i32]) -> usize {
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if inner.is_empty() {
        return 0;
    }
    row.clear();
    row.resize(inner.len() + 1, 0);
    for &x in outer {
        // `diag` holds the previous row's value at column j - 1.
        let mut diag = 0u32;
        for (j, &y) in inner.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[inner.len()] as usize
}

/// Length of the longest common contiguous run.
pub fn lcstr_length(a: &[i32], b: &[i32]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0u32; b.len() + 1];
    let mut cur = vec![0u32; b.len() + 1];
    let mut best = 0;
    for &x in a {
        for (j, &y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { 0 };
            best = best.max(cur[j + 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best as usize
}

/// `lcs / max(len(a), len(b))`, in `[0, 1]`.
pub fn path_similarity(a: &[i32], b: &[i32]) -> Result<f64, EmptySequence> {
    if a.is_empty() || b.is_empty() {
        return Err(EmptySequence);
    }
    Ok(lcs_length(a, b) as f64 / a.len().max(b.len()) as f64)
}

/// `1 - path_similarity(a, b)`; a metric on non-empty sequences.
pub fn lcs_distance(a: &[i32], b: &[i32]) -> Result<f64, EmptySequence> {
    path_similarity(a, b).map(|s| 1.0 - s)
}

/// [`lcs_distance`] for known non-empty inputs, reusing DP storage.
pub(crate) fn lcs_distance_with(row: &mut Vec<u32>, a: &[i32], b: &[i32]) -> f64 {
    debug_assert!(!a.is_empty() && !b.is_empty());
    1.0 - lcs_length_with(row, a, b) as f64 / a.len().max(b.len()) as f64
}
