use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use lcs_kernel::eval::cv::{cross_validate, Candidate, CvError, CvReport, KernelChoice};
use lcs_kernel::kernel::{distance_matrix, KernelError, KernelParams};
use lcs_kernel::ot::OtError;
use lcs_kernel::representation::{build_basic, build_fast, PathMeasure, RepresentationError};
use lcs_kernel::tudataset::load_tudataset;
use lcs_kernel::{Dataset, FlcsParams, GramMatrix, Variant};

use crate::config::{FastGrid, RunConfig, RHO_GRID, S_GRID};
use crate::CliError;

fn kernel_error(e: KernelError) -> CliError {
    match e {
        KernelError::BadLambda(_)
        | KernelError::MissingFlcsParams
        | KernelError::UnexpectedFlcsParams
        | KernelError::Ot(OtError::BadEpsilon(_))
        | KernelError::Representation(RepresentationError::RemovingRatio(_) | RepresentationError::MergingRadius(_)) => {
            CliError::Config(e.to_string())
        }
        KernelError::Io(_) => CliError::Io(e.to_string()),
        _ => CliError::Internal(e.to_string()),
    }
}

fn cv_error(e: CvError) -> CliError {
    match e {
        CvError::Folds(_) | CvError::Repeats | CvError::EmptyCGrid | CvError::TooFewGraphs { .. } => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Internal(e.to_string()),
    }
}

fn load(cfg: &RunConfig) -> Result<(Dataset, String), CliError> {
    let (dir, name) = cfg.dataset()?;
    let ds = load_tudataset(&dir, &name).map_err(|e| CliError::Io(e.to_string()))?;
    Ok((ds, name))
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Blcs => "blcs",
        Variant::Flcs => "flcs",
    }
}

fn describe(params: &KernelParams) -> String {
    let mut s = variant_name(params.representation.variant).to_owned();
    if let Some(f) = params.representation.flcs {
        s += &format!("-rho{}-s{}", f.removing_ratio(), f.merging_radius());
    }
    s + &format!("-lambda{}", params.lambda)
}

fn write_gram(gram: &GramMatrix, path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    gram.write_csv(BufWriter::new(file)).map_err(kernel_error)
}

fn report_warnings(gram: &GramMatrix) {
    if !gram.header.excluded.is_empty() {
        eprintln!(
            "warning: {} graphs have no shortest paths and were left out: {:?}",
            gram.header.excluded.len(),
            gram.header.excluded
        );
    }
    if !gram.header.warnings.is_empty() {
        eprintln!(
            "warning: Sinkhorn did not reach tolerance on {} pairs",
            gram.header.warnings.len()
        );
    }
}

pub fn gram(cfg: &RunConfig) -> Result<(), CliError> {
    let (params, _) = cfg.kernel_params(false)?[0];
    let (ds, name) = load(cfg)?;
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}-{}.csv", describe(&params))));
    let dm = distance_matrix(&ds, params.representation, &params.ot, cfg.workers()).map_err(kernel_error)?;
    let gram = dm.gram(params.lambda).map_err(kernel_error)?;
    write_gram(&gram, &out)?;
    report_warnings(&gram);
    let n = gram.len();
    println!(
        "{name}: {n}x{n} Gram ({}) in {:.2}s (representations {:.2}s, transport {:.2}s) -> {}",
        describe(&params),
        dm.seconds(),
        dm.representation_seconds,
        dm.transport_seconds,
        out.display()
    );
    if let Some(min) = gram.min_eigenvalue() {
        println!("smallest eigenvalue {min:.6e}");
    }
    Ok(())
}

/// Reads a cached Gram matrix if its header matches `params` and `ds`.
fn cached(path: &Path, params: &KernelParams, ds: &Dataset) -> Option<GramMatrix> {
    let file = File::open(path).ok()?;
    let gram = GramMatrix::read_csv(BufReader::new(file)).ok()?;
    let h = &gram.header;
    let fresh = h.params == *params && h.dataset == ds.name() && h.n_graphs + h.excluded.len() == ds.len();
    fresh.then_some(gram)
}

pub fn classify(cfg: &RunConfig) -> Result<(), CliError> {
    let combos = cfg.kernel_params(true)?;
    let cv = cfg.cv()?;
    let (ds, name) = load(cfg)?;
    let cache_dir = cfg.cache_dir.clone().unwrap_or_else(|| PathBuf::from("lcsk-cache"));
    let start = Instant::now();

    // Group the lambdas of each representation so its distances are
    // computed at most once.
    let mut groups: Vec<(FastGrid, Vec<KernelParams>)> = Vec::new();
    for (p, rs) in combos {
        match groups.iter_mut().find(|(r, ps)| *r == rs && ps[0].representation == p.representation) {
            Some((_, ps)) => ps.push(p),
            None => groups.push((rs, vec![p])),
        }
    }
    let mut grams: Vec<(KernelChoice, GramMatrix)> = Vec::new();
    let mut reused = 0;
    for (rs, params) in &groups {
        let paths: Vec<PathBuf> = params
            .iter()
            .map(|p| cache_dir.join(format!("{name}-{}.csv", describe(p))))
            .collect();
        let hits: Vec<Option<GramMatrix>> = params.iter().zip(&paths).map(|(p, path)| cached(path, p, &ds)).collect();
        let mut dm = None;
        for ((p, path), hit) in params.iter().zip(&paths).zip(hits) {
            let gram = match hit {
                Some(g) => {
                    reused += 1;
                    g
                }
                None => {
                    if dm.is_none() {
                        dm = Some(distance_matrix(&ds, p.representation, &p.ot, cfg.workers()).map_err(kernel_error)?);
                    }
                    let g = dm.as_ref().expect("computed").gram(p.lambda).map_err(kernel_error)?;
                    write_gram(&g, path)?;
                    g
                }
            };
            let choice = KernelChoice {
                lambda: p.lambda,
                rho: rs.map(|x| x.0),
                s: rs.map(|x| x.1),
            };
            grams.push((choice, gram));
        }
    }
    let kernel_seconds = start.elapsed().as_secs_f64();

    let ids = &grams[0].1.header.graph_ids;
    if grams.iter().any(|(_, g)| &g.header.graph_ids != ids) {
        return Err(CliError::Internal("Gram matrices cover different graphs".into()));
    }
    report_warnings(&grams[0].1);
    let labels: Vec<i64> = ids.iter().map(|&i| ds.class_labels()[i]).collect();
    let candidates: Vec<Candidate<'_>> = grams
        .iter()
        .map(|(choice, g)| Candidate {
            choice: *choice,
            gram: &g.values,
        })
        .collect();
    let report = cross_validate(&candidates, &labels, &cv, cfg.workers()).map_err(cv_error)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    let variant = variant_name(grams[0].1.header.params.representation.variant);
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}-{variant}-cv.json")));
    fs::write(&out, report.to_json() + "\n").map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    println!(
        "{} Gram matrices ({reused} from cache) in {kernel_seconds:.2}s, cross-validation in {:.2}s -> {}",
        grams.len(),
        report.timing.cross_validation_seconds,
        out.display()
    );
    println!("{}", summary(&name, variant, &report, start.elapsed().as_secs_f64()));
    Ok(())
}

/// `dataset, variant, mean ± std, best(C, lambda), seconds`.
pub fn summary(name: &str, variant: &str, report: &CvReport, seconds: f64) -> String {
    let b = &report.best_params;
    let mut best = format!("C={}, lambda={}", b.c, b.kernel.lambda);
    if let (Some(rho), Some(s)) = (b.kernel.rho, b.kernel.s) {
        best += &format!(", rho={rho}, s={s}");
    }
    format!(
        "{name}, {variant}, {:.2} ± {:.2}, best({best}), {seconds:.1}s",
        100.0 * report.mean_accuracy,
        100.0 * report.std_accuracy
    )
}

fn histogram(m: &PathMeasure) -> String {
    let mut by_len: BTreeMap<usize, (usize, u64)> = BTreeMap::new();
    for (x, &mass) in m.sequences().iter().zip(m.masses()) {
        let e = by_len.entry(x.len()).or_default();
        e.0 += 1;
        e.1 += mass;
    }
    by_len
        .iter()
        .map(|(len, (count, mass))| format!("{len}:{count}/{mass}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn inspect(cfg: &RunConfig, graph: usize) -> Result<(), CliError> {
    let rhos = cfg.rho_grid.clone().unwrap_or_else(|| RHO_GRID.to_vec());
    let ss = cfg.s_grid.clone().unwrap_or_else(|| S_GRID.to_vec());
    let sweep: Vec<FlcsParams> = rhos
        .iter()
        .flat_map(|&r| ss.iter().map(move |&s| (r, s)))
        .map(|(r, s)| FlcsParams::new(r, s).map_err(|e| CliError::Config(e.to_string())))
        .collect::<Result<_, _>>()?;
    let (ds, name) = load(cfg)?;
    let g = ds
        .graph(graph)
        .ok_or_else(|| CliError::Config(format!("{name} has graphs 0..{}, no graph {graph}", ds.len())))?;
    println!(
        "{name} graph {graph}: {} vertices, {} edges, class {}",
        g.n_vertices(),
        g.n_edges(),
        ds.class_labels()[graph]
    );
    let basic = match build_basic(g) {
        Ok(m) => m,
        Err(e @ RepresentationError::EmptyRepresentation(_)) => {
            println!("EmptyRepresentation: {e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Internal(e.to_string())),
    };
    println!("histograms list length:sequences/mass");
    println!(
        "blcs: {} sequences, mass {}, lengths {}",
        basic.len(),
        basic.total_mass(),
        histogram(&basic)
    );
    println!("{:>5} {:>5} {:>9} {:>6}  lengths", "rho", "s", "sequences", "mass");
    for p in sweep {
        let m = build_fast(g, p).map_err(|e| CliError::Internal(e.to_string()))?;
        println!(
            "{:>5} {:>5} {:>9} {:>6}  {}",
            p.removing_ratio(),
            p.merging_radius(),
            m.len(),
            m.total_mass(),
            histogram(&m)
        );
    }
    Ok(())
}
