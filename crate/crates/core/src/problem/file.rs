//! On-disk JSON layout of a problem.

use serde::{Deserialize, Serialize};

use super::{BoundaryData, BoundaryFn, ConvexDomain, ProblemSpec, Rhs, Shape};
use crate::error::Error;
use crate::geometry::{Point, Polytope};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    name: Option<String>,
    domain: DomainFile,
    f: RhsFile,
    lambda: f64,
    #[serde(rename = "Lambda")]
    lambda_max: f64,
    phi: PhiFile,
    mu: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum DomainFile {
    Polygon { vertices: Vec<[f64; 2]>, rho: f64 },
    DiskCap { center: [f64; 2], radius: f64, rho: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RhsFile {
    Constant { value: f64 },
    Piecewise { cells: CellsFile },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellsFile {
    x_breaks: Vec<f64>,
    y_breaks: Vec<f64>,
    values: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiFile {
    #[serde(rename = "type")]
    kind: String,
    coeffs: Vec<f64>,
}

impl TryFrom<ProblemFile> for ProblemSpec {
    type Error = Error;

    fn try_from(file: ProblemFile) -> Result<Self, Error> {
        let domain = match file.domain {
            DomainFile::Polygon { vertices, rho } => {
                let poly = Polytope::new(vertices.iter().map(|v| Point::new(v[0], v[1])).collect())?;
                ConvexDomain::polygon(poly, rho)
            }
            DomainFile::DiskCap { center, radius, rho } => {
                if !(radius > 0.0) {
                    return Err(Error::InvalidProblem(format!("disk radius {radius}")));
                }
                ConvexDomain::disk_cap(Point::new(center[0], center[1]), radius, rho)
            }
        };
        let rhs = match file.f {
            RhsFile::Constant { value } => Rhs::Constant(value),
            RhsFile::Piecewise { cells } => {
                Rhs::Piecewise { x_breaks: cells.x_breaks, y_breaks: cells.y_breaks, values: cells.values }
            }
        };
        let pivot = Point::new(0.0, domain.rho());
        let phi = BoundaryFn::from_kind_and_coeffs(&file.phi.kind, &file.phi.coeffs, pivot)?;
        if !(file.mu > 0.0 && file.mu <= 1.0) {
            return Err(Error::InvalidProblem(format!("mu = {} outside (0, 1]", file.mu)));
        }
        let spec = ProblemSpec {
            name: file.name.unwrap_or_else(|| "custom".into()),
            domain,
            rhs,
            lambda: file.lambda,
            lambda_max: file.lambda_max,
            boundary: BoundaryData { phi, mu: file.mu },
        };
        spec.check_pinching()?;
        Ok(spec)
    }
}

impl From<ProblemSpec> for ProblemFile {
    fn from(spec: ProblemSpec) -> Self {
        let rho = spec.domain.rho();
        let domain = match spec.domain.shape() {
            Shape::Polygon(p) => DomainFile::Polygon {
                vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
                rho,
            },
            Shape::DiskCap { center, radius } => {
                DomainFile::DiskCap { center: [center.x, center.y], radius: *radius, rho }
            }
        };
        let f = match spec.rhs {
            Rhs::Constant(value) => RhsFile::Constant { value },
            Rhs::Piecewise { x_breaks, y_breaks, values } => {
                RhsFile::Piecewise { cells: CellsFile { x_breaks, y_breaks, values } }
            }
        };
        let (kind, coeffs) = spec.boundary.phi.kind_and_coeffs();
        ProblemFile {
            name: Some(spec.name),
            domain,
            f,
            lambda: spec.lambda,
            lambda_max: spec.lambda_max,
            phi: PhiFile { kind: kind.into(), coeffs },
            mu: spec.boundary.mu,
        }
    }
}
