//! Diagrams of the four-point square, at its native size and scaled.
//!
//!     cargo run --example square_demo -- 0.5

use tda_core::cloud::PointCloud;
use tda_core::persistence::{cloud_diagrams, HomologyOptions};

fn main() {
    let scale: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("scale"))
        .unwrap_or(1.0);
    let square =
        PointCloud::from_points(&[[2.0, 2.0], [2.0, 6.0], [6.0, 2.0], [6.0, 6.0]]).scaled(scale);
    let cd = cloud_diagrams(&square, &HomologyOptions::default()).unwrap();

    for d in &cd.diagrams {
        println!("H{}:", d.dim);
        for p in d.points() {
            let tag = if p.essential { "  (essential)" } else { "" };
            println!("  birth {:<8} death {}{tag}", p.birth, p.death);
        }
    }
    // with the essential class capped at the filtration cutoff
    println!("cutoff {}", cd.threshold);
    cd.finite(0).write_csv_rows(std::io::stdout(), 0).unwrap();
}
