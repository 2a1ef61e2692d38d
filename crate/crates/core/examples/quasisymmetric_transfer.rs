//! Pushes the disk through `z |z|^{α - 1}` and compares the measured John
//! constant of the image with the bound assembled from the estimated `η`.
//!
//! ```text
//! cargo run --release --example quasisymmetric_transfer -- [alpha]
//! ```

use johnspace::fixtures::unit_disk;
use johnspace::john::{check_condition1, C1Options};
use johnspace::quasisym::{estimate_eta, push_space, theorem2_transfer, QuasiMap, TransferParams};
use johnspace::{build_grid_space, Point};

fn main() -> johnspace::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map_or(0.5, |s| s.parse().expect("exponent"));
    let h = 0.02;
    let disk = unit_disk();
    let map = QuasiMap::RadialPower { alpha, center: Point::new(0.3, 0.0) };

    let space = build_grid_space(&disk, h)?;
    let x0 = space.nearest_vertex(Point::ORIGIN).expect("origin inside");
    let samples = space.stratified_samples(200, h);
    let (_, source) = check_condition1(&space, x0, &samples, C1Options::default())?;

    let est = estimate_eta(&map, &disk, 8000, 42, None)?;
    for &k in &[0, 25, 50, 75, 100] {
        println!("eta_hat({:8.3}) = {:10.4}", est.t_grid[k], est.eta_hat[k]);
    }
    let image_domain = map.image_domain(&disk)?;
    let image = push_space(&map, &space, &image_domain, true)?;
    let t = theorem2_transfer(&image, x0, &samples, &TransferParams { lambda: 0.5, c: 1.1, eta: est.control(), a: source.a })?;
    println!("source a = {:.4}, image a' = {:.4}, ln(bound) = {:.1}, pass = {}", source.a, t.a_image, t.log_bound, t.report.pass);
    Ok(())
}
