//! A graph as a discrete distribution of path sequences.
//!
//! The basic representation counts every distinct serialized shortest path.
//! The fast representation first drops sequences much shorter than the
//! longest one, then greedily merges each remaining sequence into the nearest
//! existing center within a radius `s` of the LCS metric.

use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::lcs::lcs_distance_with;
use crate::paths::all_pairs_shortest_paths;
use crate::serialize::{serialize_path, PathSequence, SerializeError};

/// Absorbs rounding in the `len >= rho * l_max` and `d <= s` comparisons.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepresentationError {
    #[error("graph {0} has no shortest paths")]
    EmptyRepresentation(usize),
    #[error(transparent)]
    Serialize(#[from] SerializeError),
    #[error("removing ratio {0} outside [0, 1]")]
    RemovingRatio(f64),
    #[error("merging radius {0} outside [0, 1]")]
    MergingRadius(f64),
}

/// Removing ratio `rho` and merging radius `s` of the fast representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlcsParams {
    rho: f64,
    s: f64,
}

impl FlcsParams {
    pub fn new(rho: f64, s: f64) -> Result<Self, RepresentationError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(RepresentationError::RemovingRatio(rho));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(RepresentationError::MergingRadius(s));
        }
        Ok(Self { rho, s })
    }

    pub fn removing_ratio(&self) -> f64 {
        self.rho
    }

    pub fn merging_radius(&self) -> f64 {
        self.s
    }
}

/// Distinct sequences with positive integer masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathMeasure {
    sequences: Vec<PathSequence>,
    masses: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct JsonPoint<'a> {
    #[serde(borrow)]
    seq: std::borrow::Cow<'a, [i32]>,
    mass: u64,
}

impl PathMeasure {
    pub fn sequences(&self) -> &[PathSequence] {
        &self.sequences
    }

    pub fn masses(&self) -> &[u64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn total_mass(&self) -> u64 {
        self.masses.iter().sum()
    }

    /// Masses normalized to a probability vector.
    pub fn weights(&self) -> Vec<f64> {
        let total = self.total_mass() as f64;
        self.masses.iter().map(|&m| m as f64 / total).collect()
    }

    /// `(sequence, mass)` pairs sorted by sequence; equal for two measures
    /// that differ only in point order.
    pub fn sorted_points(&self) -> Vec<(PathSequence, u64)> {
        let mut pts: Vec<_> = self
            .sequences
            .iter()
            .cloned()
            .zip(self.masses.iter().copied())
            .collect();
        pts.sort();
        pts
    }

    /// One `{"seq": [...], "mass": n}` object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (seq, &mass) in self.sequences.iter().zip(&self.masses) {
            let point = JsonPoint {
                seq: std::borrow::Cow::Borrowed(seq.labels()),
                mass,
            };
            serde_json::to_writer(&mut out, &point)?;
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let mut sequences = Vec::new();
        let mut masses = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let point: JsonPoint<'_> = serde_json::from_str(line)?;
            sequences.push(PathSequence::new(point.seq.into_owned()));
            masses.push(point.mass);
        }
        Ok(Self { sequences, masses })
    }
}

/// Serialized shortest paths of `graph` in `(i, j)` enumeration order.
pub fn serialized_paths(graph: &Graph) -> Result<Vec<PathSequence>, SerializeError> {
    all_pairs_shortest_paths(graph)
        .iter()
        .map(|p| serialize_path(graph, p))
        .collect()
}

/// Keeps sequences with `len >= rho * l_max`, `l_max` the longest length.
pub fn remove_fragments(sequences: Vec<PathSequence>, rho: f64) -> Vec<PathSequence> {
    let l_max = sequences.iter().map(PathSequence::len).max().unwrap_or(0);
    let threshold = rho * l_max as f64 - BOUNDARY_SLACK;
    sequences
        .into_iter()
        .filter(|x| x.len() as f64 >= threshold)
        .collect()
}

/// Exact deduplication with multiplicities, in first-occurrence order.
pub fn aggregate(sequences: Vec<PathSequence>) -> PathMeasure {
    let mut index: HashMap<PathSequence, usize> = HashMap::new();
    let mut out = PathMeasure {
        sequences: Vec::new(),
        masses: Vec::new(),
    };
    for x in sequences {
        match index.get(&x) {
            Some(&k) => out.masses[k] += 1,
            None => {
                index.insert(x.clone(), out.sequences.len());
                out.sequences.push(x);
                out.masses.push(1);
            }
        }
    }
    out
}

/// Greedy radius merging over a fixed stream order. Each sequence joins its
/// nearest center (lowest index on ties) when that center is within
/// `radius`; the center then takes the longer of the two sequences as its
/// representative. Otherwise the sequence opens a new center.
pub fn merge_adjacent(sequences: Vec<PathSequence>, radius: f64) -> PathMeasure {
    let mut centers: Vec<PathSequence> = Vec::new();
    let mut masses: Vec<u64> = Vec::new();
    let mut row = Vec::new();
    for x in sequences {
        let nearest = centers
            .iter()
            .enumerate()
            .map(|(k, c)| (k, lcs_distance_with(&mut row, c.labels(), x.labels())))
            .fold(None, |best: Option<(usize, f64)>, (k, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((k, d)),
            });
        match nearest {
            Some((k, d)) if d <= radius + BOUNDARY_SLACK => {
                if x.len() > centers[k].len() {
                    centers[k] = x;
                }
                masses[k] += 1;
            }
            _ => {
                centers.push(x);
                masses.push(1);
            }
        }
    }
    PathMeasure {
        sequences: centers,
        masses,
    }
}

/// Basic representation: all serialized shortest paths, deduplicated.
pub fn build_basic(graph: &Graph) -> Result<PathMeasure, RepresentationError> {
    let seqs = serialized_paths(graph)?;
    if seqs.is_empty() {
        return Err(RepresentationError::EmptyRepresentation(graph.id()));
    }
    Ok(aggregate(seqs))
}

/// Fast representation: fragment removal followed by adjacent point merging.
pub fn build_fast(graph: &Graph, params: FlcsParams) -> Result<PathMeasure, RepresentationError> {
    let seqs = remove_fragments(serialized_paths(graph)?, params.rho);
    if seqs.is_empty() {
        return Err(RepresentationError::EmptyRepresentation(graph.id()));
    }
    Ok(merge_adjacent(seqs, params.s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[i32]) -> PathSequence {
        PathSequence::new(v.to_vec())
    }

    fn triangle() -> Graph {
        Graph::new(0, vec![1; 3], &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::new(1, vec![1; 3], &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn basic_triangle() {
        let m = build_basic(&triangle()).unwrap();
        assert_eq!(m.sequences(), &[seq(&[1, 1])]);
        assert_eq!(m.masses(), &[6]);
    }

    #[test]
    fn basic_path() {
        let m = build_basic(&path3()).unwrap();
        assert_eq!(m.sequences(), &[seq(&[1, 1]), seq(&[1, 1, 1])]);
        assert_eq!(m.masses(), &[4, 2]);
    }

    #[test]
    fn single_vertex_is_empty() {
        let g = Graph::new(4, vec![1], &[]).unwrap();
        assert_eq!(build_basic(&g), Err(RepresentationError::EmptyRepresentation(4)));
        let p = FlcsParams::new(0.5, 0.5).unwrap();
        assert_eq!(build_fast(&g, p), Err(RepresentationError::EmptyRepresentation(4)));
    }

    #[test]
    fn fast_full_removal_keeps_longest() {
        let m = build_fast(&path3(), FlcsParams::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(m.sequences(), &[seq(&[1, 1, 1])]);
        assert_eq!(m.masses(), &[2]);
    }

    #[test]
    fn merge_takes_longer_representative() {
        let m = merge_adjacent(vec![seq(&[1, 1, 1, 1, 1]), seq(&[1, 1, 1, 2, 1, 1])], 0.2);
        assert_eq!(m.sequences(), &[seq(&[1, 1, 1, 2, 1, 1])]);
        assert_eq!(m.masses(), &[2]);

        let apart = merge_adjacent(vec![seq(&[1, 1, 1, 1, 1]), seq(&[1, 1, 1, 2, 1, 1])], 0.1);
        assert_eq!(apart.masses(), &[1, 1]);
    }

    #[test]
    fn merge_joins_nearest_center_lowest_index_on_tie() {
        // Centers (1,1) and (2,2) are at distance 1 from each other; (1,2) is
        // at distance 1/2 from both.
        let m = merge_adjacent(vec![seq(&[1, 1]), seq(&[2, 2]), seq(&[1, 2])], 0.5);
        assert_eq!(m.sequences(), &[seq(&[1, 1]), seq(&[2, 2])]);
        assert_eq!(m.masses(), &[2, 1]);
    }

    #[test]
    fn removal_boundary_is_inclusive() {
        let xs = vec![seq(&[1; 4]), seq(&[1; 5]), seq(&[1; 3])];
        // 0.8 * 5 = 4: length 4 is kept.
        assert_eq!(remove_fragments(xs.clone(), 0.8).len(), 2);
        assert_eq!(remove_fragments(xs.clone(), 0.0).len(), 3);
        assert_eq!(remove_fragments(xs, 1.0), vec![seq(&[1; 5])]);
    }

    #[test]
    fn params_validated() {
        assert!(FlcsParams::new(-0.1, 0.0).is_err());
        assert!(FlcsParams::new(0.0, 1.5).is_err());
        assert!(FlcsParams::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn jsonl_round_trip() {
        let m = build_basic(&path3()).unwrap();
        let mut buf = Vec::new();
        m.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), r#"{"seq":[1,1],"mass":4}"#);
        assert_eq!(PathMeasure::read_jsonl(&text).unwrap(), m);
    }
}
