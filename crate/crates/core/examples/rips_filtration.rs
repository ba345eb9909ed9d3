//! Builds the Vietoris–Rips filtration of a small cloud and dumps it in
//! filtration order (`value dim vertices...`).

use tda_core::cloud::PointCloud;
use tda_core::rips::{build_filtration, DistanceMatrix};

fn main() {
    // a pentagon with one point in the middle
    let mut pts: Vec<[f64; 2]> = (0..5)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 5.0;
            [a.cos(), a.sin()]
        })
        .collect();
    pts.push([0.0, 0.0]);
    let dm = DistanceMatrix::euclidean(&PointCloud::from_points(&pts));

    let f = build_filtration(&dm, 2, None).unwrap();
    let mut per_dim = [0usize; 3];
    for s in f.simplices() {
        per_dim[s.dim()] += 1;
    }
    println!(
        "cutoff {:.4}, simplices by dimension {:?}",
        f.threshold(),
        per_dim
    );

    let cut = build_filtration(&dm, 2, Some(1.2)).unwrap();
    println!("with cutoff 1.2: {} simplices", cut.len());
    cut.write_debug(std::io::stdout()).unwrap();
}
