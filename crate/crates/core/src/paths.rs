//! One geodesic per ordered, reachable vertex pair.

use std::collections::VecDeque;

use crate::graph::Graph;

/// A simple path given by its vertex sequence, at least one edge long.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexPath(Vec<usize>);

impl VertexPath {
    /// Wraps a vertex sequence. Returns `None` when it is not a simple path
    /// of `graph` with at least one edge.
    pub fn new(graph: &Graph, vertices: Vec<usize>) -> Option<Self> {
        if vertices.len() < 2 || vertices.iter().any(|&v| v >= graph.n_vertices()) {
            return None;
        }
        let mut seen = vec![false; graph.n_vertices()];
        for &v in &vertices {
            if std::mem::replace(&mut seen[v], true) {
                return None;
            }
        }
        if vertices.windows(2).any(|w| !graph.has_edge(w[0], w[1])) {
            return None;
        }
        Some(Self(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn start(&self) -> usize {
        self.0[0]
    }

    pub fn end(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// BFS distances from `source`; `usize::MAX` marks unreachable vertices.
pub fn bfs_distances(graph: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.n_vertices()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Geodesics from `source` to every other reachable vertex, ordered by target
/// index. On ties the predecessor of each vertex is its lowest-index
/// neighbor one step closer to the source.
pub fn shortest_paths_from(graph: &Graph, source: usize) -> Vec<VertexPath> {
    let dist = bfs_distances(graph, source);
    let pred: Vec<usize> = (0..graph.n_vertices())
        .map(|v| {
            if v == source || dist[v] == usize::MAX {
                usize::MAX
            } else {
                // Neighbors are sorted, so the first hit is the lowest index.
                *graph
                    .neighbors(v)
                    .iter()
                    .find(|&&u| dist[u] + 1 == dist[v])
                    .expect("reachable vertex has a predecessor")
            }
        })
        .collect();

    (0..graph.n_vertices())
        .filter(|&t| t != source && dist[t] != usize::MAX)
        .map(|target| {
            let mut vertices = Vec::with_capacity(dist[target] + 1);
            let mut v = target;
            while v != source {
                vertices.push(v);
                v = pred[v];
            }
            vertices.push(source);
            vertices.reverse();
            VertexPath(vertices)
        })
        .collect()
}

/// One shortest path for every ordered pair `(i, j)`, `i != j`, with `j`
/// reachable from `i`, in lexicographic `(i, j)` order.
pub fn all_pairs_shortest_paths(graph: &Graph) -> Vec<VertexPath> {
    (0..graph.n_vertices())
        .flat_map(|s| shortest_paths_from(graph, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paths_of(g: &Graph) -> Vec<Vec<usize>> {
        all_pairs_shortest_paths(g)
            .into_iter()
            .map(|p| p.vertices().to_vec())
            .collect()
    }

    #[test]
    fn path_graph() {
        let g = Graph::new(0, vec![1; 3], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            paths_of(&g),
            vec![
                vec![0, 1],
                vec![0, 1, 2],
                vec![1, 0],
                vec![1, 2],
                vec![2, 1, 0],
                vec![2, 1]
            ]
        );
    }

    #[test]
    fn four_cycle_tie_break() {
        let g = Graph::new(0, vec![1; 4], &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let paths = all_pairs_shortest_paths(&g);
        let p02 = paths.iter().find(|p| p.start() == 0 && p.end() == 2).unwrap();
        assert_eq!(p02.vertices(), &[0, 1, 2]);
        let p13 = paths.iter().find(|p| p.start() == 1 && p.end() == 3).unwrap();
        assert_eq!(p13.vertices(), &[1, 0, 3]);
    }

    #[test]
    fn disconnected_pairs_omitted() {
        let g = Graph::new(0, vec![1; 4], &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(paths_of(&g), vec![vec![0, 1], vec![1, 0], vec![2, 3], vec![3, 2]]);
        let empty = Graph::new(0, vec![1; 3], &[]).unwrap();
        assert!(all_pairs_shortest_paths(&empty).is_empty());
    }

    #[test]
    fn vertex_path_validation() {
        let g = Graph::new(0, vec![1; 3], &[(0, 1), (1, 2)]).unwrap();
        assert!(VertexPath::new(&g, vec![0, 1, 2]).is_some());
        assert!(VertexPath::new(&g, vec![0]).is_none());
        assert!(VertexPath::new(&g, vec![0, 2]).is_none());
        assert!(VertexPath::new(&g, vec![0, 1, 0]).is_none());
    }
}
