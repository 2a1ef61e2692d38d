//! Two rooms joined by a corridor of width w: the John constant grows like
//! 1/w as the corridor narrows, while local quasiconvexity stays intact.
//!
//! ```text
//! cargo run --release --example corridor_scaling
//! ```

use johnspace::fixtures::rooms_and_corridor;
use johnspace::john::{check_condition1, C1Options};
use johnspace::space::local_quasiconvexity_probe;
use johnspace::{build_grid_space, Point};

fn main() -> johnspace::Result<()> {
    let h = 0.01;
    println!("{:>6} {:>10} {:>10} {:>8}", "w", "a", "a * w", "LQC");
    for w in [0.4, 0.2, 0.1, 0.05] {
        let space = build_grid_space(&rooms_and_corridor(w), h)?;
        let x0 = space.nearest_vertex(Point::new(0.5, 0.5)).expect("room center");
        let samples = space.stratified_samples(150, h);
        let (_, profile) = check_condition1(&space, x0, &samples, C1Options::default())?;
        let lqc = local_quasiconvexity_probe(&space, 0.5, 1.1, 100, 42)?;
        println!("{w:>6} {:>10.3} {:>10.3} {:>8}", profile.a, profile.a * w, lqc.pass);
    }
    Ok(())
}
