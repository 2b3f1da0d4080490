//! LCS graph distance, Laplacian kernel values and Gram matrices.

use std::io::{self, BufRead, Write};
use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Dataset, Graph};
use crate::ot::{ground_distance_matrix, solve, NonConvergence, OtError, OtSettings};
use crate::representation::{
    build_basic, build_fast, FlcsParams, PathMeasure, RepresentationError,
};

/// Largest matrix for which [`GramMatrix::min_eigenvalue`] is computed.
pub const EIGEN_DIAGNOSTIC_LIMIT: usize = 2000;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("lambda must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error("the fast variant needs removing ratio and merging radius")]
    MissingFlcsParams,
    #[error("removing ratio and merging radius only apply to the fast variant")]
    UnexpectedFlcsParams,
    #[error(transparent)]
    Ot(#[from] OtError),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error("cannot build a worker pool: {0}")]
    Pool(String),
    #[error("malformed Gram file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Every distinct serialized shortest path.
    Blcs,
    /// Fragment removal plus adjacent point merging.
    Flcs,
}

/// How graphs are turned into path measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepresentationParams {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flcs: Option<FlcsParams>,
}

impl RepresentationParams {
    pub fn basic() -> Self {
        Self {
            variant: Variant::Blcs,
            flcs: None,
        }
    }

    pub fn fast(params: FlcsParams) -> Self {
        Self {
            variant: Variant::Flcs,
            flcs: Some(params),
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match (self.variant, self.flcs) {
            (Variant::Blcs, Some(_)) => Err(KernelError::UnexpectedFlcsParams),
            (Variant::Flcs, None) => Err(KernelError::MissingFlcsParams),
            _ => Ok(()),
        }
    }

    pub fn build(&self, graph: &Graph) -> Result<PathMeasure, KernelError> {
        self.validate()?;
        Ok(match self.flcs {
            Some(p) => build_fast(graph, p)?,
            None => build_basic(graph)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    #[serde(flatten)]
    pub representation: RepresentationParams,
    pub lambda: f64,
    pub ot: OtSettings,
}

impl KernelParams {
    pub fn new(
        representation: RepresentationParams,
        lambda: f64,
        ot: OtSettings,
    ) -> Result<Self, KernelError> {
        let params = Self {
            representation,
            lambda,
            ot,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        self.representation.validate()?;
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(KernelError::BadLambda(self.lambda));
        }
        self.ot.validate()?;
        Ok(())
    }
}

/// Transport distance between two measures plus any solver warning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphDistance {
    pub value: f64,
    pub warning: Option<NonConvergence>,
}

/// Optimal-transport cost between the normalized measures under the LCS
/// ground distance. Lies in `[0, 1]`.
pub fn graph_distance(
    a: &PathMeasure,
    b: &PathMeasure,
    ot: &OtSettings,
) -> Result<GraphDistance, OtError> {
    let d = ground_distance_matrix(a, b)?;
    let plan = solve(d.view(), &a.weights(), &b.weights(), ot)?;
    Ok(GraphDistance {
        value: plan.cost.clamp(0.0, 1.0),
        warning: plan.warning,
    })
}

pub fn kernel_from_distance(distance: f64, lambda: f64) -> f64 {
    (-lambda * distance).exp()
}

/// `exp(-lambda * graph_distance(a, b))`.
pub fn kernel_value(
    a: &PathMeasure,
    b: &PathMeasure,
    params: &KernelParams,
) -> Result<f64, KernelError> {
    params.validate()?;
    let d = graph_distance(a, b, &params.ot)?;
    Ok(kernel_from_distance(d.value, params.lambda))
}

/// A graph left out of a matrix because it has no representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Excluded {
    pub graph: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairWarning {
    pub row: usize,
    pub col: usize,
    pub iterations: usize,
    pub violation: f64,
}

/// Pairwise graph distances over a dataset; the expensive part of every Gram
/// matrix. Kernels for any `lambda` follow elementwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub values: Array2<f64>,
    pub representation: RepresentationParams,
    pub ot: OtSettings,
    pub dataset: String,
    /// Dataset ids of the rows, ascending.
    pub graph_ids: Vec<usize>,
    pub excluded: Vec<Excluded>,
    pub warnings: Vec<PairWarning>,
    pub representation_seconds: f64,
    pub transport_seconds: f64,
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T, KernelError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| KernelError::Pool(e.to_string()))?;
    Ok(pool.install(job))
}

/// Builds one representation per graph, then solves every unordered pair.
/// The diagonal is zero without solving. Output does not depend on
/// `workers` (0 means all available cores).
pub fn distance_matrix(
    dataset: &Dataset,
    representation: RepresentationParams,
    ot: &OtSettings,
    workers: usize,
) -> Result<DistanceMatrix, KernelError> {
    representation.validate()?;
    ot.validate()?;
    with_pool(workers, || {
        let start = Instant::now();
        let built: Vec<_> = dataset
            .graphs()
            .par_iter()
            .map(|g| representation.build(g))
            .collect();
        let mut measures = Vec::new();
        let mut graph_ids = Vec::new();
        let mut excluded = Vec::new();
        for (id, r) in built.into_iter().enumerate() {
            match r {
                Ok(m) => {
                    measures.push(m);
                    graph_ids.push(id);
                }
                Err(e) => excluded.push(Excluded {
                    graph: id,
                    reason: e.to_string(),
                }),
            }
        }
        let representation_seconds = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let n = measures.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let solved: Vec<_> = pairs
            .par_iter()
            .map(|&(i, j)| graph_distance(&measures[i], &measures[j], ot))
            .collect();
        let mut values = Array2::zeros((n, n));
        let mut warnings = Vec::new();
        for (&(i, j), r) in pairs.iter().zip(solved) {
            let d = r?;
            values[[i, j]] = d.value;
            values[[j, i]] = d.value;
            if let Some(w) = d.warning {
                warnings.push(PairWarning {
                    row: graph_ids[i],
                    col: graph_ids[j],
                    iterations: w.iterations,
                    violation: w.violation,
                });
            }
        }
        Ok(DistanceMatrix {
            values,
            representation,
            ot: *ot,
            dataset: dataset.name().to_owned(),
            graph_ids,
            excluded,
            warnings,
            representation_seconds,
            transport_seconds: start.elapsed().as_secs_f64(),
        })
    })?
}

impl DistanceMatrix {
    pub fn gram(&self, lambda: f64) -> Result<GramMatrix, KernelError> {
        let params = KernelParams::new(self.representation, lambda, self.ot)?;
        Ok(GramMatrix {
            values: self.values.mapv(|d| kernel_from_distance(d, lambda)),
            header: GramHeader {
                params,
                dataset: self.dataset.clone(),
                n_graphs: self.graph_ids.len(),
                graph_ids: self.graph_ids.clone(),
                excluded: self.excluded.iter().map(|e| e.graph).collect(),
                warnings: self.warnings.clone(),
            },
        })
    }

    pub fn seconds(&self) -> f64 {
        self.representation_seconds + self.transport_seconds
    }
}

/// Metadata stored in the first line of a Gram CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramHeader {
    pub params: KernelParams,
    pub dataset: String,
    pub n_graphs: usize,
    pub graph_ids: Vec<usize>,
    pub excluded: Vec<usize>,
    #[serde(default)]
    pub warnings: Vec<PairWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub values: Array2<f64>,
    pub header: GramHeader,
}

pub fn gram_matrix(
    dataset: &Dataset,
    params: &KernelParams,
    workers: usize,
) -> Result<GramMatrix, KernelError> {
    params.validate()?;
    distance_matrix(dataset, params.representation, &params.ot, workers)?.gram(params.lambda)
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn params(&self) -> &KernelParams {
        &self.header.params
    }

    /// Smallest eigenvalue, as an indefiniteness diagnostic. `None` above
    /// [`EIGEN_DIAGNOSTIC_LIMIT`] rows or for an empty matrix.
    pub fn min_eigenvalue(&self) -> Option<f64> {
        let n = self.len();
        if n == 0 || n > EIGEN_DIAGNOSTIC_LIMIT {
            return None;
        }
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| self.values[[i, j]]);
        let eig = nalgebra::SymmetricEigen::new(m);
        eig.eigenvalues.iter().copied().reduce(f64::min)
    }

    /// `# {header json}` followed by one comma-separated row per graph, each
    /// value printed with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), KernelError> {
        let header = serde_json::to_string(&self.header)
            .map_err(|e| KernelError::Format(e.to_string()))?;
        writeln!(out, "# {header}")?;
        for row in self.values.rows() {
            let line = row
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, KernelError> {
        let mut lines = input.lines();
        let first = lines
            .next()
            .ok_or_else(|| KernelError::Format("empty file".into()))??;
        let header = Self::parse_header(&first)?;
        let n = header.n_graphs;
        let mut values = Array2::zeros((n, n));
        let mut rows = 0;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if rows == n {
                return Err(KernelError::Format("too many rows".into()));
            }
            let mut cols = 0;
            for (j, tok) in line.split(',').enumerate() {
                if j == n {
                    return Err(KernelError::Format(format!("row {rows} too long")));
                }
                values[[rows, j]] = tok
                    .trim()
                    .parse()
                    .map_err(|_| KernelError::Format(format!("bad value {tok:?}")))?;
                cols += 1;
            }
            if cols != n {
                return Err(KernelError::Format(format!("row {rows} has {cols} values")));
            }
            rows += 1;
        }
        if rows != n {
            return Err(KernelError::Format(format!("expected {n} rows, found {rows}")));
        }
        Ok(Self { values, header })
    }

    /// Parses only the header line of a Gram file.
    pub fn parse_header(line: &str) -> Result<GramHeader, KernelError> {
        let json = line
            .strip_prefix('#')
            .ok_or_else(|| KernelError::Format("missing '#' header".into()))?;
        serde_json::from_str(json.trim()).map_err(|e| KernelError::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(id: usize) -> Graph {
        Graph::new(id, vec![1; 3], &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn path3(id: usize) -> Graph {
        Graph::new(id, vec![1; 3], &[(0, 1), (1, 2)]).unwrap()
    }

    fn blcs(lambda: f64) -> KernelParams {
        KernelParams::new(RepresentationParams::basic(), lambda, OtSettings::default()).unwrap()
    }

    #[test]
    fn hand_traced_pair() {
        let a = build_basic(&triangle(0)).unwrap();
        let b = build_basic(&path3(1)).unwrap();
        let d = graph_distance(&a, &b, &OtSettings::default()).unwrap();
        assert!((d.value - 1.0 / 9.0).abs() < 1e-12);
        let k = kernel_value(&a, &b, &blcs(1.0)).unwrap();
        assert!((k - (-1.0f64 / 9.0).exp()).abs() < 1e-12);
        assert_eq!(graph_distance(&a, &a, &OtSettings::default()).unwrap().value, 0.0);
    }

    #[test]
    fn disjoint_alphabets_have_distance_one() {
        let a = build_basic(&triangle(0)).unwrap();
        let b = build_basic(&Graph::new(1, vec![2, 2], &[(0, 1)]).unwrap()).unwrap();
        let d = graph_distance(&a, &b, &OtSettings::default()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        let k = kernel_value(&a, &b, &blcs(10.0)).unwrap();
        assert!((k - (-10.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn kernel_decreases_in_lambda() {
        let a = build_basic(&triangle(0)).unwrap();
        let b = build_basic(&path3(1)).unwrap();
        let ks: Vec<f64> = [0.001, 0.1, 1.0, 10.0]
            .iter()
            .map(|&l| kernel_value(&a, &b, &blcs(l)).unwrap())
            .collect();
        assert!(ks.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn params_validated() {
        assert!(matches!(
            KernelParams::new(RepresentationParams::basic(), 0.0, OtSettings::default()),
            Err(KernelError::BadLambda(_))
        ));
        assert!(matches!(
            KernelParams::new(RepresentationParams::basic(), f64::INFINITY, OtSettings::default()),
            Err(KernelError::BadLambda(_))
        ));
        let bad = RepresentationParams {
            variant: Variant::Flcs,
            flcs: None,
        };
        assert!(matches!(bad.validate(), Err(KernelError::MissingFlcsParams)));
        let bad = RepresentationParams {
            variant: Variant::Blcs,
            flcs: Some(FlcsParams::new(0.5, 0.5).unwrap()),
        };
        assert!(matches!(bad.validate(), Err(KernelError::UnexpectedFlcsParams)));
    }

    #[test]
    fn small_grams() {
        let one = Dataset::new("one", vec![triangle(0)], vec![1]).unwrap();
        let g = gram_matrix(&one, &blcs(1.0), 1).unwrap();
        assert_eq!(g.values, ndarray::array![[1.0]]);

        let twins = Dataset::new("twins", vec![triangle(0), triangle(1)], vec![1, 1]).unwrap();
        let g = gram_matrix(&twins, &blcs(1.0), 1).unwrap();
        assert_eq!(g.values, ndarray::array![[1.0, 1.0], [1.0, 1.0]]);

        let pair = Dataset::new("pair", vec![triangle(0), path3(1)], vec![1, -1]).unwrap();
        let g = gram_matrix(&pair, &blcs(1.0), 1).unwrap();
        let k = (-1.0f64 / 9.0).exp();
        assert!((g.values[[0, 1]] - k).abs() < 1e-12);
        assert_eq!(g.values[[0, 1]], g.values[[1, 0]]);
        assert_eq!(g.values[[0, 0]], 1.0);
    }

    #[test]
    fn empty_graphs_excluded() {
        let ds = Dataset::new(
            "x",
            vec![triangle(0), Graph::new(1, vec![1], &[]).unwrap(), path3(2)],
            vec![1, 1, -1],
        )
        .unwrap();
        let g = gram_matrix(&ds, &blcs(1.0), 1).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.header.graph_ids, vec![0, 2]);
        assert_eq!(g.header.excluded, vec![1]);
    }

    #[test]
    fn csv_round_trip() {
        let ds = Dataset::new("pair", vec![triangle(0), path3(1)], vec![1, -1]).unwrap();
        let g = gram_matrix(&ds, &blcs(0.7), 1).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# {"));
        let back = GramMatrix::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, g);

        assert!(GramMatrix::read_csv("1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn eigen_diagnostic() {
        let ds = Dataset::new("pair", vec![triangle(0), path3(1)], vec![1, -1]).unwrap();
        let g = gram_matrix(&ds, &blcs(1.0), 1).unwrap();
        let k = (-1.0f64 / 9.0).exp();
        assert!((g.min_eigenvalue().unwrap() - (1.0 - k)).abs() < 1e-12);
    }
}
