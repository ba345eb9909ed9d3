//! Persistence landscape of a small diagram: levels, critical points and norms.

use tda_core::landscape::{build_landscape, lp_norm, LpNorm};
use tda_core::persistence::PersistenceDiagram;

fn main() {
    let d = PersistenceDiagram::from_pairs(1, &[(0.0, 4.0), (1.0, 3.0), (2.0, 6.0)]);
    let l = build_landscape(&d);
    for (k, level) in l.levels().iter().enumerate() {
        println!("lambda_{}: {:?}", k + 1, level.points());
    }
    for norm in [LpNorm::L1, LpNorm::L2] {
        println!("{norm:?} = {}", lp_norm(&l, norm).value);
    }
    println!("lambda_2(2.5) = {}", l.eval(2, 2.5));

    println!("\nlevel,x,y");
    let mut csv = Vec::new();
    l.write_csv(&mut csv).unwrap();
    print!(
        "{}",
        String::from_utf8(csv)
            .unwrap()
            .lines()
            .skip(1)
            .collect::<Vec<_>>()
            .join("\n")
    );
    println!();
}
