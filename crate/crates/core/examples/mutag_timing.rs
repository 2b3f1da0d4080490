//! Timing of representation sizes and pairwise transport on a dataset subset.
//!
//! cargo run --release -p lcs-kernel --example mutag_timing -- data/MUTAG MUTAG 40

use std::time::Instant;

use lcs_kernel::kernel::{distance_matrix, RepresentationParams};
use lcs_kernel::ot::OtSettings;
use lcs_kernel::representation::{build_basic, build_fast};
use lcs_kernel::tudataset::load_tudataset;
use lcs_kernel::FlcsParams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let dir = args.get(1).map_or("data/MUTAG", String::as_str);
    let name = args.get(2).map_or("MUTAG", String::as_str);
    let n: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(40);

    let ds = load_tudataset(dir, name).expect("load");
    let fast = FlcsParams::new(0.8, 0.5).unwrap();
    let (mut basic_pts, mut fast_pts, mut max_len) = (0, 0, 0);
    for g in ds.graphs() {
        let b = build_basic(g).unwrap();
        max_len = max_len.max(b.sequences().iter().map(|s| s.len()).max().unwrap());
        basic_pts += b.len();
        fast_pts += build_fast(g, fast).unwrap().len();
    }
    println!(
        "{} graphs, mean support basic {:.1}, fast {:.1}, longest sequence {}",
        ds.len(),
        basic_pts as f64 / ds.len() as f64,
        fast_pts as f64 / ds.len() as f64,
        max_len
    );

    let ids: Vec<usize> = (0..n.min(ds.len())).collect();
    let sub = ds.subset(&ids);
    let pairs = ids.len() * (ids.len() - 1) / 2;
    let basics: Vec<_> = sub.graphs().iter().map(|g| build_basic(g).unwrap()).collect();
    let t = Instant::now();
    let mut acc = 0.0;
    for i in 0..basics.len() {
        for j in i + 1..basics.len() {
            acc += lcs_kernel::ot::ground_distance_matrix(&basics[i], &basics[j]).unwrap().entries()[[0, 0]];
        }
    }
    println!("ground matrices only: {:.2}s ({acc})", t.elapsed().as_secs_f64());
    let exact = OtSettings::default();
    let sinkhorn = OtSettings {
        exact_threshold: 0,
        ..OtSettings::default()
    };
    for (label, repr) in [
        ("basic", RepresentationParams::basic()),
        ("fast", RepresentationParams::fast(fast)),
    ] {
        for (solver, ot) in [("exact", exact), ("sinkhorn", sinkhorn)].into_iter().take(if std::env::var("SINKHORN").is_ok() { 2 } else { 1 }) {
            let t = Instant::now();
            let d = distance_matrix(&sub, repr, &ot, 1).unwrap();
            let secs = t.elapsed().as_secs_f64();
            println!(
                "{label:5} {solver:8} {pairs} pairs: {secs:.2}s ({:.3} ms/pair), warnings {}, d[0][1] {:.6}",
                1e3 * secs / pairs as f64,
                d.warnings.len(),
                d.values[[0, 1]]
            );
        }
    }
}
