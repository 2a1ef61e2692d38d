//! The `johnspace` command line: `analyze`, `chain`, `qs` and `render`.
//!
//! Exit codes: 0 when every checked property holds, 1 when one fails (the
//! output carries the witness), 2 for usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    case_constant, construct, max_chain_stages, Case, CaseParams, ConstantLedger, Phi, QhGeodesicOracle, Stage,
};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::john::{
    check_condition1, check_condition2, check_condition3, check_condition4, check_condition5,
    min_diameter_carrot_constant, C1Options, NaturalOptions,
};
use crate::qhmetric::{epsilon, PolyCurve};
use crate::quasisym::{
    check_coarse_qh_claim, check_diameter_carrot_image, check_relative_distance_claim, coarse_qh_constants,
    estimate_eta, eta_inverse_control, push_space, sample_pairs, theorem2_transfer, EtaEstimate, QuasiMap,
    TransferParams,
};
use crate::render::{render_svg, Figure};
use crate::report::{ConditionId, ConditionReport, MarginTracker, NodeRef, Witness};
use crate::space::{build_grid_space, local_quasiconvexity_probe, DiscreteSpace};
use crate::VertexId;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "johnspace", version, about = "Numerical checks for length John spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check conditions 1-5 at a center; writes a JSON report.
    Analyze(AnalyzeArgs),
    /// Build the case A/B/C quasiconvex carrot arc from a basepoint; writes curve JSON and SVG.
    Chain(ChainArgs),
    /// Transfer the John property through a quasisymmetric map; writes a JSON report.
    Qs(QsArgs),
    /// Draw a report produced by another subcommand as SVG.
    Render(RenderArgs),
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{x:?}: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{y:?}: {e}"))?;
    Ok(Point::new(x, y))
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("expected a count >= 1, got {s:?}")),
    }
}

/// Options shared by the space-building subcommands.
#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    /// Domain JSON file.
    #[arg(long)]
    pub domain: PathBuf,
    /// John center `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Point,
    /// Grid spacing h.
    #[arg(long, default_value_t = 0.02, value_parser = parse_positive)]
    pub grid: f64,
    #[arg(long, default_value_t = 200, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Constant overrides as inline JSON or a file path, e.g. `{"lambda":0.5,"c":1.1}`.
    #[arg(long)]
    pub constants: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Start point `x,y` of the constructed curve.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub basepoint: Point,
    #[arg(long, default_value = "chain.json")]
    pub out: PathBuf,
    /// SVG path; defaults to `--out` with an `.svg` extension.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct QsArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Map JSON file, e.g. `{"kind":"radial_power","alpha":0.5,"center":[0,0]}`.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = 4000)]
    pub triples: usize,
    #[arg(long, default_value_t = 1000, value_parser = parse_count)]
    pub pairs: usize,
    #[arg(long, default_value = "qs.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Report JSON written by `analyze`, `chain` or `qs`.
    #[arg(long)]
    pub report: PathBuf,
    /// SVG path; defaults to the report path with an `.svg` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Constants that may be set with `--constants`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    /// Carrot constant used instead of the measured one.
    pub a: Option<f64>,
    /// Condition-3 constant used by the constructions instead of the empirical one.
    pub b: Option<f64>,
    pub a_max: Option<f64>,
}

pub const DEFAULT_LAMBDA: f64 = 0.5;
/// Octile grid paths stretch straight segments by up to `1.0824`.
pub const DEFAULT_C: f64 = 1.1;

impl Overrides {
    pub fn parse(src: Option<&str>) -> Result<Self> {
        let Some(src) = src else { return Ok(Overrides::default()) };
        let text = if src.trim_start().starts_with('{') { src.to_string() } else { std::fs::read_to_string(src)? };
        let o: Overrides = serde_json::from_str(&text)?;
        let lambda = o.lambda.unwrap_or(DEFAULT_LAMBDA);
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1), got {lambda}")));
        }
        if !(o.c.unwrap_or(DEFAULT_C) >= 1.0) {
            return Err(Error::InvalidArgument("c must be at least 1".into()));
        }
        Ok(o)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(DEFAULT_LAMBDA)
    }

    pub fn c(&self) -> f64 {
        self.c.unwrap_or(DEFAULT_C)
    }
}

/// Space, center vertex, samples and tolerance built from [`SpaceArgs`].
pub struct Setup {
    pub domain: Domain,
    pub space: DiscreteSpace,
    pub center: VertexId,
    pub samples: Vec<VertexId>,
    pub eps: f64,
    pub overrides: Overrides,
}

pub fn load_domain(path: &Path) -> Result<Domain> {
    Domain::from_json(&std::fs::read_to_string(path)?)
}

fn vertex_at(space: &DiscreteSpace, domain: &Domain, p: Point) -> Result<VertexId> {
    domain.boundary_distance(p)?;
    space.nearest_vertex(p).ok_or(Error::OutsideDomain(p))
}

impl Setup {
    pub fn new(args: &SpaceArgs) -> Result<Self> {
        let overrides = Overrides::parse(args.constants.as_deref())?;
        let domain = load_domain(&args.domain)?;
        let space = build_grid_space(&domain, args.grid)?;
        let center = vertex_at(&space, &domain, args.center)?;
        let mut samples = space.stratified_samples(args.samples, args.grid);
        if samples.is_empty() {
            samples = space.stratified_samples(args.samples, 0.0);
        }
        let d_min = samples
            .iter()
            .chain([&center])
            .map(|&v| space.boundary_distance(v))
            .fold(f64::INFINITY, f64::min);
        let eps = epsilon(args.grid, d_min);
        Ok(Setup { domain, space, center, samples, eps, overrides })
    }
}

fn curve_points(c: &PolyCurve) -> Vec<Point> {
    c.points().map(<[Point]>::to_vec).unwrap_or_default()
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn is_property_failure(e: &Error) -> bool {
    matches!(e, Error::BoundViolated { .. } | Error::OracleContract { .. } | Error::Construction(_))
}

/// Output of `analyze`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub command: String,
    pub domain: Domain,
    pub grid: f64,
    pub seed: u64,
    pub center: NodeRef,
    pub samples: usize,
    pub eps: f64,
    /// Measured carrot constant `max a(x)`.
    pub a: f64,
    pub basepoint_constants: Vec<f64>,
    pub constants: ConstantLedger,
    pub conditions: Vec<ConditionReport>,
    /// Local quasiconvexity probe; informative, not part of `pass`.
    pub hypothesis: Option<ConditionReport>,
    pub curves: Vec<Vec<Point>>,
    pub pass: bool,
}

fn failure_report(condition: ConditionId, margin: f64, witness: Witness) -> ConditionReport {
    let mut t = MarginTracker::new();
    t.observe(margin, witness);
    t.finish(condition, Default::default())
}

pub fn analyze(args: &AnalyzeArgs) -> Result<AnalyzeReport> {
    let setup = Setup::new(&args.space)?;
    let Setup { domain, space, center: x0, samples, eps, overrides } = setup;
    let (lambda, c) = (overrides.lambda(), overrides.c());
    let opts = C1Options { a_max: overrides.a_max, target: overrides.a };
    let (r1, profile) = check_condition1(&space, x0, &samples, opts)?;
    let mut report = AnalyzeReport {
        command: "analyze".into(),
        domain,
        grid: args.space.grid,
        seed: args.space.seed,
        center: space.node_ref(x0),
        samples: samples.len(),
        eps,
        a: profile.a,
        basepoint_constants: profile.constants.clone(),
        constants: ConstantLedger::default(),
        conditions: vec![r1],
        hypothesis: None,
        curves: profile.curves.iter().map(curve_points).collect(),
        pass: false,
    };
    if !profile.all_feasible() {
        return Ok(report);
    }

    let a = overrides.a.unwrap_or(profile.a).max(1.0);
    let mut ledger = ConstantLedger::from_carrot_constant(a, lambda, c)?;
    let g = |k: &str| ledger.get(k).expect("ledger entry");
    let curves = &profile.curves;
    let r2 = check_condition2(&space, x0, curves, g("b"), g("b1"), g("b2"), eps);
    let r3 = check_condition3(&space, x0, curves, g("b3"), eps)?;
    let phi = Phi { b1: g("phi_b1"), b2: g("phi_b2") };
    let r5 = check_condition5(&space, x0, curves, a, &|t| phi.eval(t), eps, NaturalOptions::default());

    let oracle = QhGeodesicOracle::new(&space, x0)?;
    let b = match overrides.b {
        Some(b) => b,
        None => oracle.empirical_b(&space)?,
    };
    let d0 = space.boundary_distance(x0);
    let stage_cap = samples
        .iter()
        .map(|&v| max_chain_stages(space.boundary_distance(v), d0))
        .max()
        .unwrap_or(1);
    let params = CaseParams { lambda, c, b, eps };
    let built: Vec<(VertexId, Result<PolyCurve>)> = samples
        .par_iter()
        .map(|&x| (x, construct(&space, x, &oracle, &params).map(|k| k.curve)))
        .collect();
    let a4 = case_constant(lambda, c, b);
    let mut ok = Vec::new();
    let mut failed = None;
    for (x, res) in built {
        match res {
            Ok(curve) => ok.push(curve),
            Err(e) if is_property_failure(&e) => {
                let margin = match e {
                    Error::BoundViolated { lhs, rhs, .. } => rhs - lhs,
                    Error::OracleContract { qh_len, b, .. } => b - qh_len,
                    _ => f64::MIN,
                };
                failed.get_or_insert((x, margin));
            }
            Err(e) => return Err(e),
        }
    }
    let r4 = match failed {
        None => check_condition4(&space, x0, &ok, a4, eps * stage_cap as f64),
        Some((x, margin)) => failure_report(
            ConditionId::C4,
            margin.min(-f64::MIN_POSITIVE),
            Witness { curve: None, basepoint: space.node_ref(x), point: space.node_ref(x) },
        ),
    };
    ledger.insert("b_oracle", b, "3 (empirical)");
    ledger.insert("a4", a4, "3=>4");
    report.hypothesis = Some(local_quasiconvexity_probe(&space, lambda.min(0.5), c, 50, args.space.seed)?);
    report.conditions.extend([r2, r3, r4, r5]);
    report.conditions.sort_by_key(|r| r.condition);
    report.constants = ledger;
    report.pass = report.conditions.iter().all(|r| r.pass);
    Ok(report)
}

/// Output of `chain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub command: String,
    pub domain: Domain,
    pub basepoint: NodeRef,
    pub center: NodeRef,
    pub case: Option<Case>,
    pub vertices: Vec<VertexId>,
    pub points: Vec<Point>,
    pub stages: Vec<Stage>,
    pub stage_points: Vec<Point>,
    pub lambda: f64,
    pub c: f64,
    pub b: f64,
    pub eps: f64,
    pub curves: Vec<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

pub fn chain(args: &ChainArgs) -> Result<ChainReport> {
    let overrides = Overrides::parse(args.space.constants.as_deref())?;
    let domain = load_domain(&args.space.domain)?;
    let space = build_grid_space(&domain, args.space.grid)?;
    let x0 = vertex_at(&space, &domain, args.space.center)?;
    let x1 = vertex_at(&space, &domain, args.basepoint)?;
    let oracle = QhGeodesicOracle::new(&space, x0)?;
    let b = match overrides.b {
        Some(b) => b,
        None => oracle.empirical_b(&space)?,
    };
    let d_min = space.boundary_distance(x1).min(space.boundary_distance(x0));
    let eps = epsilon(args.space.grid, d_min);
    let params = CaseParams { lambda: overrides.lambda(), c: overrides.c(), b, eps };
    let mut report = ChainReport {
        command: "chain".into(),
        domain,
        basepoint: space.node_ref(x1),
        center: space.node_ref(x0),
        case: None,
        vertices: Vec::new(),
        points: Vec::new(),
        stages: Vec::new(),
        stage_points: Vec::new(),
        lambda: params.lambda,
        c: params.c,
        b,
        eps,
        curves: Vec::new(),
        error: None,
        pass: false,
    };
    match construct(&space, x1, &oracle, &params) {
        Ok(k) => {
            report.case = Some(k.case);
            report.vertices = k.curve.vertices().map(<[VertexId]>::to_vec).unwrap_or_default();
            report.points = curve_points(&k.curve);
            report.stage_points = k
                .stages
                .iter()
                .map(|s| s.from)
                .chain(k.stages.last().map(|s| s.to))
                .filter_map(|v| space.position(v))
                .collect();
            report.stages = k.stages;
            report.curves = vec![report.points.clone()];
            report.pass = true;
        }
        Err(e) if is_property_failure(&e) => report.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Output of `qs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QsReport {
    pub command: String,
    pub domain: Domain,
    pub image_domain: Domain,
    pub map: QuasiMap,
    pub grid: f64,
    pub seed: u64,
    pub a_source: f64,
    pub a_image: f64,
    pub log_bound: f64,
    pub eps: f64,
    pub eta: EtaEstimate,
    /// Transfer, diameter-carrot image, relative distance, coarse qh distortion.
    pub conditions: Vec<ConditionReport>,
    pub curves: Vec<Vec<Point>>,
    pub pass: bool,
}

pub fn qs(args: &QsArgs) -> Result<QsReport> {
    let map = QuasiMap::from_json(&std::fs::read_to_string(&args.map)?)?;
    let setup = Setup::new(&args.space)?;
    let Setup { domain, space, center: x0, samples, eps, overrides } = setup;
    let (lambda, c) = (overrides.lambda(), overrides.c());
    let (r1, profile) = check_condition1(&space, x0, &samples, C1Options { a_max: overrides.a_max, target: None })?;
    let image_domain = map.image_domain(&domain)?;
    let image = push_space(&map, &space, &image_domain, true)?;
    let est = estimate_eta(&map, &domain, args.triples, args.space.seed, None)?;
    let eta = est.control();
    let curves = &profile.curves;
    let d_img_min = samples
        .iter()
        .chain([&x0])
        .map(|&v| image.boundary_distance(v))
        .fold(f64::INFINITY, f64::min);
    let eps = eps.max(epsilon(image.spacing(), d_img_min));

    let mut report = QsReport {
        command: "qs".into(),
        domain,
        image_domain: image_domain.clone(),
        map: map.clone(),
        grid: args.space.grid,
        seed: args.space.seed,
        a_source: profile.a,
        a_image: f64::NAN,
        log_bound: f64::NAN,
        eps,
        eta: est,
        conditions: vec![r1],
        curves: curves.iter().map(curve_points).collect(),
        pass: false,
    };
    if !profile.all_feasible() {
        report.a_image = 0.0;
        report.log_bound = 0.0;
        return Ok(report);
    }
    let transfer = theorem2_transfer(&image, x0, &samples, &TransferParams { lambda, c, eta: eta.clone(), a: profile.a })?;
    let a_diam = curves
        .iter()
        .map(|k| min_diameter_carrot_constant(k, Some(&space)))
        .fold(0.0, f64::max);
    let claim_carrot = check_diameter_carrot_image(curves, &map, &image_domain, a_diam, &eta, eps)?;
    let claim_rel = check_relative_distance_claim(curves, &map, &image_domain, &eta_inverse_control(eta.clone()), eps)?;
    let pairs = sample_pairs(&space, args.pairs, args.space.seed);
    let claim_k = check_coarse_qh_claim(&pairs, &space, &image, coarse_qh_constants(&eta, lambda, c), eps)?;
    report.a_image = transfer.a_image;
    report.log_bound = transfer.log_bound;
    report.conditions = vec![report.conditions.remove(0), transfer.report, claim_carrot, claim_rel, claim_k];
    report.pass = report.conditions.iter().all(|r| r.pass);
    Ok(report)
}

/// The fields `render` reads from any report.
#[derive(Clone, Debug, Deserialize)]
struct RenderInput {
    domain: Domain,
    #[serde(default)]
    curves: Vec<Vec<Point>>,
    #[serde(default)]
    stage_points: Vec<Point>,
    #[serde(default)]
    conditions: Vec<RenderCondition>,
}

/// The parts of a condition verdict that are drawn.
#[derive(Clone, Debug, Deserialize)]
struct RenderCondition {
    pass: bool,
    #[serde(default)]
    witness: Option<Witness>,
}

/// SVG of a report: outline, its curves, stage points and the witnesses of
/// failed conditions.
pub fn render_report(json: &str) -> Result<String> {
    let input: RenderInput = serde_json::from_str(json)?;
    let mut fig = Figure::new(&input.domain);
    fig.curves = input.curves;
    fig.stage_points = input.stage_points;
    for c in &input.conditions {
        fig.add_witness_if_failed(c.pass, c.witness);
    }
    Ok(render_svg(&fig))
}

fn exit_for(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Analyze(a) => {
            let r = analyze(a)?;
            write_json(&a.out, &r)?;
            Ok(exit_for(r.pass))
        }
        Command::Chain(a) => {
            let r = chain(a)?;
            write_json(&a.out, &r)?;
            let svg = a.svg.clone().unwrap_or_else(|| a.out.with_extension("svg"));
            let mut fig = Figure::new(&r.domain);
            fig.curves = r.curves.clone();
            fig.stage_points = r.stage_points.clone();
            write_atomic(&svg, render_svg(&fig).as_bytes())?;
            if let Some(e) = &r.error {
                eprintln!("johnspace: {e}");
            }
            Ok(exit_for(r.pass))
        }
        Command::Qs(a) => {
            let r = qs(a)?;
            write_json(&a.out, &r)?;
            Ok(exit_for(r.pass))
        }
        Command::Render(a) => {
            let svg = render_report(&std::fs::read_to_string(&a.report)?)?;
            let out = a.out.clone().unwrap_or_else(|| a.report.with_extension("svg"));
            write_atomic(&out, svg.as_bytes())?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("johnspace: {e}");
            if is_property_failure(&e) {
                EXIT_FAIL
            } else {
                EXIT_USAGE
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points_and_overrides() {
        assert_eq!(parse_point("0.5,-0.25").unwrap(), Point::new(0.5, -0.25));
        assert!(parse_point("1;2").is_err());
        assert!(parse_positive("-1").is_err());
        let o = Overrides::parse(Some(r#"{"lambda":0.4,"b":2}"#)).unwrap();
        assert_eq!((o.lambda(), o.c(), o.b), (0.4, DEFAULT_C, Some(2.0)));
        assert!(Overrides::parse(Some(r#"{"lambda":1.5}"#)).is_err());
        assert!(Overrides::parse(Some(r#"{"gamma":1}"#)).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["johnspace", "analyze"]), EXIT_USAGE);
        assert_eq!(run(["johnspace", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["johnspace", "--help"]), EXIT_PASS);
    }
}
