//! Optimal matchings between two diagrams for several degrees, plus the bottleneck distance.

use tda_core::persistence::PersistenceDiagram;
use tda_core::wasserstein::{bottleneck_distance, wasserstein_distance, Matched};

fn bar(d: &PersistenceDiagram, i: usize) -> (f64, f64) {
    (d.points()[i].birth, d.points()[i].death)
}

fn main() {
    let a = PersistenceDiagram::from_pairs(1, &[(0.0, 4.0), (1.0, 2.0), (3.0, 7.0)]);
    let b = PersistenceDiagram::from_pairs(1, &[(0.5, 4.5), (3.5, 6.0)]);

    for p in [1.0, 2.0, 3.0] {
        let r = wasserstein_distance(&a, &b, p).unwrap();
        println!("p = {p}: W = {:.6}", r.distance);
        for m in &r.matching {
            match *m {
                Matched::Pair(i, j) => println!("  {:?} -> {:?}", bar(&a, i), bar(&b, j)),
                Matched::LeftToDiagonal(i) => println!("  {:?} -> diagonal", bar(&a, i)),
                Matched::RightToDiagonal(j) => println!("  diagonal <- {:?}", bar(&b, j)),
            }
        }
    }
    println!("bottleneck = {}", bottleneck_distance(&a, &b).unwrap());
}
