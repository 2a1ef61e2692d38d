//! Builds the doubling chain from basepoints near the slit tip to the center
//! and prints each stage.
//!
//! ```text
//! cargo run --release --example herron_chain
//! ```

use johnspace::constructions::{construct, max_chain_stages, CaseParams, QhGeodesicOracle};
use johnspace::fixtures::slit_rectangle;
use johnspace::qhmetric::epsilon;
use johnspace::{build_grid_space, Point};

fn main() -> johnspace::Result<()> {
    let h = 0.01;
    let space = build_grid_space(&slit_rectangle(), h)?;
    let x0 = space.nearest_vertex(Point::new(0.5, 0.5)).expect("center inside");
    let oracle = QhGeodesicOracle::new(&space, x0)?;
    let b = oracle.empirical_b(&space)?;
    println!("empirical b = {b:.4}");
    for start in [Point::new(1.03, 0.9), Point::new(1.5, 0.5), Point::new(0.2, 0.02)] {
        let x1 = space.nearest_vertex(start).expect("inside");
        let d1 = space.boundary_distance(x1);
        let params = CaseParams { lambda: 0.5, c: 1.1, b, eps: epsilon(h, d1) };
        let k = construct(&space, x1, &oracle, &params)?;
        println!(
            "from {start:?}: case {:?}, length {:.3}, {} stages (cap {})",
            k.case,
            k.curve.length(),
            k.stages.len(),
            max_chain_stages(d1, space.boundary_distance(x0))
        );
        for s in &k.stages {
            println!(
                "    d {:.3} -> {:.3}   qh length {:.3}",
                space.boundary_distance(s.from),
                space.boundary_distance(s.to),
                s.qh_len
            );
        }
    }
    Ok(())
}
