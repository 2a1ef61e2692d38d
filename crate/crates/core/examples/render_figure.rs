//! Draws the carrot arcs of the L-shaped fixture to `carrot_arcs.svg`.
//!
//! ```text
//! cargo run --release --example render_figure -- [out.svg]
//! ```

use johnspace::fixtures::l_shape;
use johnspace::john::{check_condition1, C1Options};
use johnspace::render::{render_svg, Figure};
use johnspace::{build_grid_space, Point};

fn main() -> johnspace::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "carrot_arcs.svg".into());
    let domain = l_shape();
    let space = build_grid_space(&domain, 0.02)?;
    let x0 = space.nearest_vertex(Point::new(0.5, 0.5)).expect("center inside");
    let samples = space.stratified_samples(40, 0.02);
    let (_, profile) = check_condition1(&space, x0, &samples, C1Options::default())?;
    let mut fig = Figure::new(&domain);
    fig.curves = profile.curves.iter().map(|c| c.points().unwrap_or_default().to_vec()).collect();
    fig.stage_points = vec![space.position(x0).expect("grid vertex")];
    std::fs::write(&out, render_svg(&fig))?;
    println!("wrote {out} with {} arcs, a = {:.4}", fig.curves.len(), profile.a);
    Ok(())
}
