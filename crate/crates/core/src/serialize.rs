//! Shortest-path serialization into signed label sequences.
//!
//! Vertex labels appear as positive values. When the graph carries edge
//! labels they are interleaved between the vertex labels, negated.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::paths::VertexPath;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SerializeError {
    #[error("edge ({0}, {1}) on the path has no label")]
    MissingEdgeLabel(usize, usize),
}

/// Serialized path: a sequence of nonzero labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathSequence(Vec<i32>);

impl PathSequence {
    pub fn new(labels: Vec<i32>) -> Self {
        Self(labels)
    }

    pub fn labels(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }
}

impl From<Vec<i32>> for PathSequence {
    fn from(v: Vec<i32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for PathSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

pub fn serialize_path(graph: &Graph, path: &VertexPath) -> Result<PathSequence, SerializeError> {
    let vs = path.vertices();
    let labeled = graph.has_edge_labels();
    let mut out = Vec::with_capacity(if labeled { 2 * vs.len() - 1 } else { vs.len() });
    for (k, &v) in vs.iter().enumerate() {
        out.push(graph.vertex_label(v) as i32);
        if labeled {
            if let Some(&next) = vs.get(k + 1) {
                let w = graph
                    .edge_label(v, next)
                    .ok_or(SerializeError::MissingEdgeLabel(v, next))?;
                out.push(-(w as i32));
            }
        }
    }
    Ok(PathSequence(out))
}
