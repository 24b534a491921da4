use nalgebra::Vector2;
use thiserror::Error;

use crate::solver::GridSolution;
use crate::sweep::SweepReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("polygon area {0:e} is below tolerance")]
    ZeroArea(f64),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    /// Solver ran out of iterations; the best iterate is attached.
    #[error("solver did not converge: residual {:e} after {} iterations", .0.residual_inf, .0.iterations)]
    SolveNotConverged(Box<GridSolution>),
    #[error("dilated ellipsoid never meets the clip region")]
    EmptyIntersection,
    #[error("unknown problem name `{0}`")]
    UnknownName(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("growth condition violated at ({:.6}, {:.6}): phi = {phi:e}, admissible [{lower:e}, {upper:e}]", .point.x, .point.y)]
    GrowthViolated {
        point: Vector2<f64>,
        phi: f64,
        lower: f64,
        upper: f64,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("grid too coarse: {0} interior nodes")]
    TooCoarse(usize),
    #[error("iterate is not discretely convex (worst second difference {0:e})")]
    NonConvexIterate(f64),
    #[error("solution dips below its boundary tangent by {0:e}")]
    NegativeValues(f64),
    #[error("section resolves only {0} grid nodes")]
    EmptySection(usize),
    #[error("section centroid height {0:e} is degenerate")]
    DegenerateCentroid(f64),
    #[error("point ({:.6}, {:.6}) lies outside the barrier's validity region", .0.x, .0.y)]
    OutsideRegion(Vector2<f64>),
    #[error("point ({:.6}, {:.6}) lies on the kink line theta = pi/2", .0.x, .0.y)]
    KinkPoint(Vector2<f64>),
    #[error("barrier exceeds boundary data by {excess:e} at ({:.6}, {:.6})", .point.x, .point.y)]
    BoundaryDominanceFails { point: Vector2<f64>, excess: f64 },
    #[error("need at least {needed} unflagged rows, have {have}")]
    TooFewRows { needed: usize, have: usize },
    /// A level of a sweep failed; rows computed before it are attached.
    #[error("sweep stopped after {} rows: {cause}", .partial.rows.len())]
    SweepAborted { partial: Box<SweepReport>, cause: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
