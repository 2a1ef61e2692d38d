//! Numerical toolkit for length John spaces.
//!
//! The crate discretizes noncomplete metric spaces (planar polygonal domains,
//! an analytic disk, and abstract boundary-marked graphs) and checks, instance
//! by instance, the five equivalent characterizations of length John spaces,
//! the curve constructions relating them, and the transfer of the John
//! property under quasisymmetric maps.
//!
//! Module map:
//!
//! - [`domain`], [`space`]: the metric spaces, `d(z)`, grid discretization.
//! - [`qhmetric`]: lengths, quasihyperbolic lengths and distances, geodesics.
//! - [`john`]: carrot arcs and the five condition checkers.
//! - [`constructions`]: constant derivations and the case A/B/C curve constructions.
//! - [`quasisym`]: explicit quasisymmetric maps, `η` estimation, transfer checks.
//! - [`cli`], [`render`]: the `johnspace` command line front end and SVG output.
//! - [`fixtures`]: the reference domains used by tests and examples.

pub mod cli;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod john;
pub mod qhmetric;
pub mod quasisym;
pub mod render;
pub mod report;
mod search;
pub mod space;

/// Index of a vertex in a [`space::DiscreteSpace`].
pub type VertexId = usize;

pub use domain::{Disk, Domain, PolygonalDomain};
pub use error::{Error, Result};
pub use geom::Point;
pub use qhmetric::{GeodesicResult, PolyCurve};
pub use report::{ConditionId, ConditionReport, Witness};
pub use space::{build_grid_space, graph_space, DiscreteSpace, GraphSpace};
