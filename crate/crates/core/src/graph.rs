//! Undirected, simple, vertex-labeled (and optionally edge-labeled) graphs.

use std::collections::BTreeMap;

use thiserror::Error;

/// Categorical label. Always `>= 1` so that negated edge labels never
/// collide with vertex labels in a serialized sequence.
pub type Label = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },
    #[error("labels must be >= 1 (found 0)")]
    ZeroLabel,
    #[error("edge ({0}, {1}) carries two different labels")]
    InconsistentEdgeLabels(usize, usize),
    #[error("edge ({0}, {1}) has no label in an edge-labeled graph")]
    MissingEdgeLabel(usize, usize),
    #[error("dataset has {graphs} graphs but {labels} class labels")]
    ClassLabelCount { graphs: usize, labels: usize },
    #[error("graph at position {position} has id {id}")]
    GraphId { position: usize, id: usize },
    #[error("dataset mixes edge-labeled and unlabeled graphs")]
    MixedEdgeLabels,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    id: usize,
    adjacency: Vec<Vec<usize>>,
    vertex_labels: Vec<Label>,
    edge_labels: Option<BTreeMap<(usize, usize), Label>>,
}

fn edge_key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Builds a graph without edge labels. Self-loops and repeated edges are
    /// dropped.
    pub fn new(
        id: usize,
        vertex_labels: Vec<Label>,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        Self::build(id, vertex_labels, edges.iter().map(|&(u, v)| (u, v, None)), false)
    }

    /// Builds an edge-labeled graph. Self-loops are dropped; a repeated edge
    /// must repeat its label.
    pub fn with_edge_labels(
        id: usize,
        vertex_labels: Vec<Label>,
        edges: &[(usize, usize, Label)],
    ) -> Result<Self, GraphError> {
        Self::build(
            id,
            vertex_labels,
            edges.iter().map(|&(u, v, l)| (u, v, Some(l))),
            true,
        )
    }

    fn build(
        id: usize,
        vertex_labels: Vec<Label>,
        edges: impl Iterator<Item = (usize, usize, Option<Label>)>,
        labeled: bool,
    ) -> Result<Self, GraphError> {
        let n = vertex_labels.len();
        if vertex_labels.contains(&0) {
            return Err(GraphError::ZeroLabel);
        }
        let mut labels = BTreeMap::new();
        for (u, v, label) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: w,
                        n_vertices: n,
                    });
                }
            }
            if u == v {
                continue;
            }
            if label == Some(0) {
                return Err(GraphError::ZeroLabel);
            }
            let key = edge_key(u, v);
            match labels.get(&key) {
                Some(existing) if *existing != label => {
                    return Err(GraphError::InconsistentEdgeLabels(key.0, key.1))
                }
                Some(_) => {}
                None => {
                    labels.insert(key, label);
                }
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in labels.keys() {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
        }

        let edge_labels = if labeled {
            let mut map = BTreeMap::new();
            for (key, label) in labels {
                let label = label.ok_or(GraphError::MissingEdgeLabel(key.0, key.1))?;
                map.insert(key, label);
            }
            Some(map)
        } else {
            None
        };

        Ok(Self {
            id,
            adjacency,
            vertex_labels,
            edge_labels,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbors of `v` in ascending index order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn vertex_label(&self, v: usize) -> Label {
        self.vertex_labels[v]
    }

    pub fn vertex_labels(&self) -> &[Label] {
        &self.vertex_labels
    }

    pub fn has_edge_labels(&self) -> bool {
        self.edge_labels.is_some()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n_vertices() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Label of edge `{u, v}`, or `None` when the graph is unlabeled or the
    /// edge does not exist.
    pub fn edge_label(&self, u: usize, v: usize) -> Option<Label> {
        self.edge_labels.as_ref()?.get(&edge_key(u, v)).copied()
    }

    /// Undirected edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Same graph with a different id.
    pub fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }

    /// Replaces vertex labels with `degree + 1`.
    pub fn degree_labeled(&self) -> Self {
        let mut g = self.clone();
        g.vertex_labels = (0..self.n_vertices())
            .map(|v| self.degree(v) as Label + 1)
            .collect();
        g
    }

    /// Relabels vertex indices: vertex `v` of `self` becomes `perm[v]`.
    /// Labels travel with their vertices.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, GraphError> {
        let n = self.n_vertices();
        let mut labels = vec![0; n];
        for (v, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: p,
                    n_vertices: n,
                });
            }
            labels[p] = self.vertex_labels[v];
        }
        match &self.edge_labels {
            Some(map) => {
                let edges: Vec<_> = map
                    .iter()
                    .map(|(&(u, v), &l)| (perm[u], perm[v], l))
                    .collect();
                Self::with_edge_labels(self.id, labels, &edges)
            }
            None => {
                let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
                Self::new(self.id, labels, &edges)
            }
        }
    }
}

/// `vertex_labels[i] = degree(i) + 1`.
pub fn degree_labeling(graph: &Graph) -> Graph {
    graph.degree_labeled()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    graphs: Vec<Graph>,
    class_labels: Vec<i64>,
    has_edge_labels: bool,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        graphs: Vec<Graph>,
        class_labels: Vec<i64>,
    ) -> Result<Self, GraphError> {
        if graphs.len() != class_labels.len() {
            return Err(GraphError::ClassLabelCount {
                graphs: graphs.len(),
                labels: class_labels.len(),
            });
        }
        for (position, g) in graphs.iter().enumerate() {
            if g.id() != position {
                return Err(GraphError::GraphId {
                    position,
                    id: g.id(),
                });
            }
        }
        let has_edge_labels = graphs.first().is_some_and(Graph::has_edge_labels);
        if graphs.iter().any(|g| g.has_edge_labels() != has_edge_labels) {
            return Err(GraphError::MixedEdgeLabels);
        }
        Ok(Self {
            name: name.into(),
            graphs,
            class_labels,
            has_edge_labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn graph(&self, id: usize) -> Option<&Graph> {
        self.graphs.get(id)
    }

    pub fn class_labels(&self) -> &[i64] {
        &self.class_labels
    }

    pub fn has_edge_labels(&self) -> bool {
        self.has_edge_labels
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Sub-dataset made of the graphs at `ids`, renumbered from zero.
    pub fn subset(&self, ids: &[usize]) -> Self {
        let graphs = ids
            .iter()
            .enumerate()
            .map(|(k, &i)| self.graphs[i].clone().with_id(k))
            .collect();
        let class_labels = ids.iter().map(|&i| self.class_labels[i]).collect();
        Self {
            name: self.name.clone(),
            graphs,
            class_labels,
            has_edge_labels: self.has_edge_labels,
        }
    }
}
