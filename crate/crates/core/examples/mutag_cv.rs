//! Full MUTAG protocol: distance matrices, Gram matrices over the lambda grid,
//! and repeated nested cross-validation.
//!
//! cargo run --release -p lcs-kernel --example mutag_cv -- data/MUTAG MUTAG [blcs|flcs]

use std::time::Instant;

use lcs_kernel::eval::cv::{cross_validate, Candidate, CvConfig, KernelChoice, LAMBDA_GRID};
use lcs_kernel::kernel::{distance_matrix, RepresentationParams};
use lcs_kernel::ot::OtSettings;
use lcs_kernel::tudataset::load_tudataset;
use lcs_kernel::FlcsParams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let dir = args.get(1).map_or("data/MUTAG", String::as_str);
    let name = args.get(2).map_or("MUTAG", String::as_str);
    let variant = args.get(3).map_or("blcs", String::as_str);
    let ds = load_tudataset(dir, name).expect("load");

    let reprs: Vec<(RepresentationParams, Option<(f64, f64)>)> = if variant == "blcs" {
        vec![(RepresentationParams::basic(), None)]
    } else {
        let mut v = Vec::new();
        for rho in [0.6, 0.8, 1.0] {
            for s in [0.0, 0.2, 0.5, 0.8] {
                v.push((RepresentationParams::fast(FlcsParams::new(rho, s).unwrap()), Some((rho, s))));
            }
        }
        v
    };
    let mut grams = Vec::new();
    let t = Instant::now();
    for (repr, rs) in &reprs {
        let d = distance_matrix(&ds, *repr, &OtSettings::default(), 1).unwrap();
        assert!(d.excluded.is_empty());
        for &lambda in &LAMBDA_GRID {
            let choice = KernelChoice {
                lambda,
                rho: rs.map(|x| x.0),
                s: rs.map(|x| x.1),
            };
            grams.push((choice, d.gram(lambda).unwrap().values));
        }
    }
    println!("distance matrices: {:.1}s", t.elapsed().as_secs_f64());
    let cands: Vec<Candidate<'_>> = grams
        .iter()
        .map(|(choice, g)| Candidate { choice: *choice, gram: g })
        .collect();
    let t = Instant::now();
    let report = cross_validate(&cands, ds.class_labels(), &CvConfig::default(), 1).unwrap();
    println!(
        "cv: {:.1}s, accuracy {:.4} ± {:.4}, train {:.4}, best {:?}",
        t.elapsed().as_secs_f64(),
        report.mean_accuracy,
        report.std_accuracy,
        report.mean_train_accuracy,
        report.best_params
    );
}
