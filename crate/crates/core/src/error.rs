use thiserror::Error;

use crate::geom::Point;
use crate::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid graph space: {0}")]
    InvalidGraph(String),

    #[error("point ({}, {}) is not inside the domain", .0.x, .0.y)]
    OutsideDomain(Point),

    #[error("discretization is empty or unusable: {0}")]
    Resolution(String),

    #[error("curve touches the boundary (d = {dist:e} at vertex {index})")]
    DegenerateCurve { index: usize, dist: f64 },

    #[error("vertex {to} is unreachable from vertex {from}")]
    Unreachable { from: VertexId, to: VertexId },

    #[error("vertex {0} does not exist in the space")]
    UnknownVertex(VertexId),

    #[error("malformed curve: {0}")]
    MalformedCurve(String),

    #[error("case routing: {0}")]
    CaseRouting(String),

    #[error("oracle curve from vertex {from} has qh length {qh_len} > b = {b}")]
    OracleContract { from: VertexId, qh_len: f64, b: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("bound violated: {what}: {lhs} > {rhs}")]
    BoundViolated { what: String, lhs: f64, rhs: f64 },

    #[error("map is singular at ({}, {})", .0.x, .0.y)]
    SingularPoint(Point),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
