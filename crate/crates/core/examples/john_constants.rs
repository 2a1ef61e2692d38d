//! Measures the length John constant of the reference fixtures and derives
//! the constants of the equivalent conditions from it.
//!
//! ```text
//! cargo run --release --example john_constants -- [h] [samples]
//! ```

use std::time::Instant;

use johnspace::constructions::ConstantLedger;
use johnspace::fixtures::standard_fixtures;
use johnspace::john::{check_condition1, C1Options};
use johnspace::build_grid_space;

fn main() -> johnspace::Result<()> {
    let mut args = std::env::args().skip(1);
    let h: f64 = args.next().map_or(0.02, |s| s.parse().expect("grid spacing"));
    let n: usize = args.next().map_or(200, |s| s.parse().expect("sample count"));
    for fx in standard_fixtures() {
        let start = Instant::now();
        let space = build_grid_space(&fx.domain, h)?;
        let x0 = space.nearest_vertex(fx.center).expect("nonempty grid");
        let samples = space.stratified_samples(n, h);
        let (report, profile) = check_condition1(&space, x0, &samples, C1Options::default())?;
        let ledger = ConstantLedger::from_carrot_constant(profile.a.max(1.0), 0.5, 1.1)?;
        println!(
            "{:8} vertices {:6}  a = {:.4}  b = {:.3}  b1 = {:.3}  b2 = {:.3}  b' = {:.3}  pass = {}  ({:.2?})",
            fx.name,
            space.vertex_count(),
            profile.a,
            ledger.get("b").unwrap(),
            ledger.get("b1").unwrap(),
            ledger.get("b2").unwrap(),
            ledger.get("b3").unwrap(),
            report.pass,
            start.elapsed()
        );
    }
    Ok(())
}
