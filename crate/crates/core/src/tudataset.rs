//! Reader and writer for the plain-text graph benchmark format.
//!
//! A dataset `NAME` lives in one directory:
//!
//! | file | content |
//! |------|---------|
//! | `NAME_A.txt` | `i, j` per line, 1-based global vertex ids, one record per direction |
//! | `NAME_graph_indicator.txt` | line `k` holds the 1-based graph id of vertex `k` |
//! | `NAME_graph_labels.txt` | one class label per graph |
//! | `NAME_node_labels.txt` | optional, one integer per vertex |
//! | `NAME_edge_labels.txt` | optional, one integer per line of `NAME_A.txt` |
//!
//! Attribute files (`*_attributes.txt`) are ignored. Vertex and edge labels are
//! shifted so that the smallest label of each family becomes 1. Without a
//! node-label file, vertices are labeled by degree.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{Dataset, Graph, GraphError, Label};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: edge ({u}, {v}) has different labels on its two records (line {line})", path.display())]
    InconsistentEdgeLabels {
        path: PathBuf,
        line: usize,
        u: usize,
        v: usize,
    },
    #[error("{}: expected {expected} lines, found {found}", path.display())]
    CountMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

struct NumberedLines {
    path: PathBuf,
    lines: Vec<(usize, String)>,
}

impl NumberedLines {
    fn read(path: PathBuf, required: bool) -> Result<Option<Self>, LoadError> {
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return if required {
                    Err(LoadError::MissingFile(path))
                } else {
                    Ok(None)
                };
            }
            Err(source) => return Err(LoadError::Io { path, source }),
        };
        let lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l.to_owned()))
            .collect();
        Ok(Some(Self { path, lines }))
    }

    fn malformed(&self, line: usize, message: impl Into<String>) -> LoadError {
        LoadError::MalformedLine {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn integers(&self, expected_fields: usize) -> Result<Vec<(usize, Vec<i64>)>, LoadError> {
        self.lines
            .iter()
            .map(|(no, line)| {
                let fields = line
                    .split(',')
                    .map(|tok| {
                        let tok = tok.trim();
                        tok.parse::<i64>()
                            .map_err(|_| self.malformed(*no, format!("not an integer: {tok:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if fields.len() != expected_fields {
                    return Err(self.malformed(
                        *no,
                        format!("expected {expected_fields} field(s), found {}", fields.len()),
                    ));
                }
                Ok((*no, fields))
            })
            .collect()
    }

    fn expect_count(&self, expected: usize) -> Result<(), LoadError> {
        if self.lines.len() != expected {
            return Err(LoadError::CountMismatch {
                path: self.path.clone(),
                expected,
                found: self.lines.len(),
            });
        }
        Ok(())
    }
}

fn file(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

/// Shifts raw labels so the minimum becomes 1.
fn remap(raw: &[(usize, i64)], source: &NumberedLines) -> Result<Vec<Label>, LoadError> {
    let Some(min) = raw.iter().map(|&(_, v)| v).min() else {
        return Ok(Vec::new());
    };
    raw.iter()
        .map(|&(no, v)| {
            let shifted = v - min + 1;
            if shifted > i32::MAX as i64 {
                Err(source.malformed(no, format!("label {v} out of range")))
            } else {
                Ok(shifted as Label)
            }
        })
        .collect()
}

pub fn load_tudataset(directory: impl AsRef<Path>, name: &str) -> Result<Dataset, LoadError> {
    let dir = directory.as_ref();
    let read = |suffix: &str, required: bool| NumberedLines::read(file(dir, name, suffix), required);
    // Required files first, so a missing directory reports the adjacency file.
    let adjacency = read("A", true)?.expect("required");
    let indicator = read("graph_indicator", true)?.expect("required");
    let graph_labels = read("graph_labels", true)?.expect("required");
    let node_labels = read("node_labels", false)?;
    let edge_labels = read("edge_labels", false)?;

    // vertex -> (graph, local index)
    let mut n_graphs = 0usize;
    let mut sizes: Vec<usize> = Vec::new();
    let mut locate = Vec::with_capacity(indicator.lines.len());
    for (no, fields) in indicator.integers(1)? {
        let g = fields[0];
        if g < 1 {
            return Err(indicator.malformed(no, format!("graph id {g} must be >= 1")));
        }
        let g = (g - 1) as usize;
        if g >= sizes.len() {
            sizes.resize(g + 1, 0);
        }
        locate.push((g, sizes[g]));
        sizes[g] += 1;
        n_graphs = n_graphs.max(g + 1);
    }
    let n_vertices = locate.len();

    let classes: Vec<i64> = graph_labels
        .integers(1)?
        .into_iter()
        .map(|(_, f)| f[0])
        .collect();
    graph_labels.expect_count(n_graphs)?;

    let vertex_labels = match &node_labels {
        Some(nl) => {
            nl.expect_count(n_vertices)?;
            let raw: Vec<_> = nl.integers(1)?.into_iter().map(|(no, f)| (no, f[0])).collect();
            Some(remap(&raw, nl)?)
        }
        None => None,
    };

    let edge_label_values = match &edge_labels {
        Some(el) => {
            el.expect_count(adjacency.lines.len())?;
            let raw: Vec<_> = el.integers(1)?.into_iter().map(|(no, f)| (no, f[0])).collect();
            Some(remap(&raw, el)?)
        }
        None => None,
    };

    // Per-graph edge records keyed by unordered local pair.
    let mut edges: Vec<BTreeMap<(usize, usize), Option<Label>>> = vec![BTreeMap::new(); n_graphs];
    for (k, (no, fields)) in adjacency.integers(2)?.into_iter().enumerate() {
        let mut ends = [0usize; 2];
        for (slot, &id) in ends.iter_mut().zip(&fields) {
            if id < 1 || id as usize > n_vertices {
                return Err(adjacency.malformed(
                    no,
                    format!("vertex id {id} outside 1..={n_vertices}"),
                ));
            }
            *slot = (id - 1) as usize;
        }
        let (gu, u) = locate[ends[0]];
        let (gv, v) = locate[ends[1]];
        if gu != gv {
            return Err(adjacency.malformed(no, "edge joins vertices of different graphs"));
        }
        if u == v {
            continue;
        }
        let label = edge_label_values.as_ref().map(|l| l[k]);
        let key = (u.min(v), u.max(v));
        match edges[gu].get(&key) {
            Some(existing) if *existing != label => {
                return Err(LoadError::InconsistentEdgeLabels {
                    path: adjacency.path.clone(),
                    line: no,
                    u: fields[0] as usize,
                    v: fields[1] as usize,
                });
            }
            Some(_) => {}
            None => {
                edges[gu].insert(key, label);
            }
        }
    }

    let mut per_graph_labels: Vec<Vec<Label>> =
        sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    for (vertex, &(g, _)) in locate.iter().enumerate() {
        per_graph_labels[g].push(vertex_labels.as_ref().map_or(1, |l| l[vertex]));
    }

    let mut graphs = Vec::with_capacity(n_graphs);
    for (g, (labels, records)) in per_graph_labels.into_iter().zip(edges).enumerate() {
        let graph = if edge_label_values.is_some() {
            let list: Vec<_> = records
                .into_iter()
                .map(|((u, v), l)| (u, v, l.expect("labeled")))
                .collect();
            Graph::with_edge_labels(g, labels, &list)?
        } else {
            let list: Vec<_> = records.into_keys().collect();
            Graph::new(g, labels, &list)?
        };
        graphs.push(if vertex_labels.is_none() {
            graph.degree_labeled()
        } else {
            graph
        });
    }

    Ok(Dataset::new(name, graphs, classes)?)
}

/// Writes `dataset` in the benchmark text format. Node labels are omitted
/// when every vertex label equals `degree + 1`, so that degree-labeled
/// datasets reload unchanged.
pub fn write_tudataset(dataset: &Dataset, directory: impl AsRef<Path>, name: &str) -> io::Result<()> {
    let dir = directory.as_ref();
    fs::create_dir_all(dir)?;
    let create = |suffix: &str| -> io::Result<BufWriter<fs::File>> {
        Ok(BufWriter::new(fs::File::create(file(dir, name, suffix))?))
    };

    let degree_only = dataset.graphs().iter().all(|g| *g == g.degree_labeled());
    let mut a = create("A")?;
    let mut indicator = create("graph_indicator")?;
    let mut classes = create("graph_labels")?;
    let mut nodes = if degree_only { None } else { Some(create("node_labels")?) };
    let mut edge_labels = if dataset.has_edge_labels() {
        Some(create("edge_labels")?)
    } else {
        None
    };

    let mut offset = 0usize;
    for (g, &class) in dataset.graphs().iter().zip(dataset.class_labels()) {
        writeln!(classes, "{class}")?;
        for v in 0..g.n_vertices() {
            writeln!(indicator, "{}", g.id() + 1)?;
            if let Some(w) = nodes.as_mut() {
                writeln!(w, "{}", g.vertex_label(v))?;
            }
        }
        for u in 0..g.n_vertices() {
            for &v in g.neighbors(u) {
                writeln!(a, "{}, {}", offset + u + 1, offset + v + 1)?;
                if let Some(w) = edge_labels.as_mut() {
                    writeln!(w, "{}", g.edge_label(u, v).expect("labeled edge"))?;
                }
            }
        }
        offset += g.n_vertices();
    }
    for mut w in [Some(a), Some(indicator), Some(classes), nodes, edge_labels]
        .into_iter()
        .flatten()
    {
        w.flush()?;
    }
    Ok(())
}
