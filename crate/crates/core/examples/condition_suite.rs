//! Checks all five conditions on one fixture with the constants derived from
//! the measured carrot constant, and prints each verdict.
//!
//! ```text
//! cargo run --release --example condition_suite -- [disk|square|l_shape|slit] [h]
//! ```

use johnspace::constructions::{
    case_constant, construct, derive_c2_from_c1, derive_c3_from_c2, derive_phi_from_c1, max_chain_stages, CaseParams,
    QhGeodesicOracle,
};
use johnspace::fixtures::standard_fixtures;
use johnspace::john::{
    check_condition1, check_condition2, check_condition3, check_condition4, check_condition5, C1Options,
    NaturalOptions,
};
use johnspace::qhmetric::epsilon;
use johnspace::{build_grid_space, PolyCurve};

fn main() -> johnspace::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "l_shape".into());
    let h: f64 = args.next().map_or(0.02, |s| s.parse().expect("grid spacing"));
    let fx = standard_fixtures().into_iter().find(|f| f.name == name).expect("unknown fixture");

    let space = build_grid_space(&fx.domain, h)?;
    let x0 = space.nearest_vertex(fx.center).expect("nonempty grid");
    let samples = space.stratified_samples(200, h);
    let d_min = samples.iter().map(|&v| space.boundary_distance(v)).fold(space.boundary_distance(x0), f64::min);
    let eps = epsilon(h, d_min);

    let (r1, profile) = check_condition1(&space, x0, &samples, C1Options::default())?;
    let a = profile.a.max(1.0);
    let (b, b1, b2) = derive_c2_from_c1(a)?;
    let b3 = derive_c3_from_c2(b, b1, b2);
    let phi = derive_phi_from_c1(a)?;
    let curves = &profile.curves;

    let oracle = QhGeodesicOracle::new(&space, x0)?;
    let b_emp = oracle.empirical_b(&space)?;
    let params = CaseParams { lambda: 0.5, c: 1.1, b: b_emp, eps };
    let built: Vec<PolyCurve> =
        samples.iter().map(|&x| construct(&space, x, &oracle, &params).map(|k| k.curve)).collect::<Result<_, _>>()?;
    let stage_cap = max_chain_stages(d_min, space.boundary_distance(x0)) as f64;

    let reports = [
        r1,
        check_condition2(&space, x0, curves, b, b1, b2, eps),
        check_condition3(&space, x0, curves, b3, eps)?,
        check_condition4(&space, x0, &built, case_constant(0.5, 1.1, b_emp), eps * stage_cap),
        check_condition5(&space, x0, curves, a, &|t| phi.eval(t), eps, NaturalOptions::default()),
    ];
    println!("{name}: h = {h}, {} vertices, a = {:.4}, empirical b = {b_emp:.3}, eps = {eps:.3}", space.vertex_count(), profile.a);
    for r in &reports {
        println!("  {}  pass = {:5}  worst margin = {:>12.4}", r.condition, r.pass, r.worst_margin);
    }
    Ok(())
}
