//! Quasihyperbolic distances from the center of the unit disk against the
//! closed form `k(0, r) = log(1/(1 - r))`, at several grid spacings.
//!
//! ```text
//! cargo run --release --example disk_quasihyperbolic
//! ```

use johnspace::fixtures::unit_disk;
use johnspace::qhmetric::{check_gp_length_bound, qh_distance};
use johnspace::{build_grid_space, Point};

fn main() -> johnspace::Result<()> {
    println!("{:>6} {:>5} {:>10} {:>10} {:>9} {:>10}", "h", "|x|", "k grid", "exact", "rel err", "GP margin");
    for h in [0.04, 0.02, 0.01] {
        let space = build_grid_space(&unit_disk(), h)?;
        let o = space.nearest_vertex(Point::ORIGIN).expect("origin is inside");
        for r in [0.3, 0.6, 0.9, 0.95] {
            let x = space.nearest_vertex(Point::new(r, 0.0)).expect("inside");
            let g = qh_distance(&space, o, x)?;
            // compare at the vertex actually reached, not the requested radius
            let rv = space.position(x).expect("grid vertex").norm();
            let exact = (1.0 / (1.0 - rv)).ln();
            println!(
                "{h:>6} {rv:>5.3} {:>10.5} {exact:>10.5} {:>9.2e} {:>10.2e}",
                g.value,
                (g.value - exact).abs() / exact,
                check_gp_length_bound(&g.curve)
            );
        }
    }
    Ok(())
}
