//! Persistence pairs of a noisy circle from each reduction strategy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use tda_core::cloud::PointCloud;
use tda_core::persistence::{diagrams, reduce, Reduction};
use tda_core::rips::{build_filtration, DistanceMatrix};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts: Vec<[f64; 2]> = (0..40)
        .map(|_| {
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = 1.0 + rng.gen_range(-0.1..0.1);
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let f = build_filtration(
        &DistanceMatrix::euclidean(&PointCloud::from_points(&pts)),
        2,
        None,
    )
    .unwrap();
    println!("{} simplices", f.len());

    let mut results = Vec::new();
    for algo in [Reduction::Standard, Reduction::Twist, Reduction::Cohomology] {
        let t = Instant::now();
        let r = reduce(&f, algo);
        println!("{algo:?}: {} pairs in {:?}", r.pairs.len(), t.elapsed());
        results.push(r);
    }
    assert!(results.windows(2).all(|w| w[0] == w[1]));

    let dgms = diagrams(&results[0], &f);
    let h1 = &dgms[1];
    let top = h1
        .points()
        .iter()
        .max_by(|a, b| a.persistence().total_cmp(&b.persistence()))
        .unwrap();
    println!(
        "H1 has {} bars; the circle is ({:.3}, {:.3})",
        h1.len(),
        top.birth,
        top.death
    );
}
