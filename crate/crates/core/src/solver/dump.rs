//! Portable solution dump: `solution.csv` with `x1,x2,u` rows (interior nodes,
//! then boundary points) and a `solution.json` sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::build_grid;
use super::GridSolution;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub spacing: f64,
    pub width: usize,
    pub residual_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    pub interior_nodes: usize,
    pub boundary_nodes: usize,
    #[serde(default = "unit_scale")]
    pub phi_scale: f64,
    #[serde(default)]
    pub phi_shift: [f64; 3],
    pub problem: ProblemSpec,
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct Row {
    x1: f64,
    x2: f64,
    u: f64,
}

impl GridSolution {
    pub fn meta(&self) -> SolutionMeta {
        SolutionMeta {
            spacing: self.grid.spacing(),
            width: self.grid.width(),
            residual_inf: self.residual_inf,
            iterations: self.iterations,
            converged: self.converged,
            interior_nodes: self.grid.len(),
            boundary_nodes: self.grid.boundary().len(),
            phi_scale: self.phi_scale,
            phi_shift: self.phi_shift,
            problem: self.spec.clone(),
        }
    }

    /// Writes `solution.csv` and `solution.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("solution.csv"))?;
        for (p, u) in self.samples() {
            w.serialize(Row { x1: p.x, x2: p.y, u })?;
        }
        w.flush()?;
        std::fs::write(dir.join("solution.json"), serde_json::to_string_pretty(&self.meta())?)?;
        Ok(())
    }
}

/// Reads a dump written by [`GridSolution::write`], rebuilding the grid from
/// the embedded problem.
pub fn load_solution(dir: &Path) -> Result<GridSolution> {
    let meta: SolutionMeta = serde_json::from_str(&std::fs::read_to_string(dir.join("solution.json"))?)?;
    let grid = build_grid(&meta.problem.domain, meta.spacing, meta.width)?;
    if grid.len() != meta.interior_nodes || grid.boundary().len() != meta.boundary_nodes {
        return Err(Error::InvalidProblem("solution dump does not match its grid".into()));
    }
    let mut r = csv::Reader::from_path(dir.join("solution.csv"))?;
    let rows: Vec<Row> = r.deserialize().collect::<std::result::Result<_, _>>()?;
    if rows.len() != grid.len() + grid.boundary().len() {
        return Err(Error::InvalidProblem(format!(
            "solution dump has {} rows, grid needs {}",
            rows.len(),
            grid.len() + grid.boundary().len()
        )));
    }
    let tol = 1e-9 * meta.spacing;
    let points = grid.nodes().iter().chain(grid.boundary());
    if let Some((row, _)) = rows.iter().zip(points).find(|(r, p)| (r.x1 - p.x).abs() > tol || (r.x2 - p.y).abs() > tol) {
        return Err(Error::InvalidProblem(format!("dump point ({}, {}) is not on the grid", row.x1, row.x2)));
    }
    let n = grid.len();
    Ok(GridSolution {
        values: rows[..n].iter().map(|r| r.u).collect(),
        boundary_values: rows[n..].iter().map(|r| r.u).collect(),
        spec: meta.problem,
        grid,
        residual_inf: meta.residual_inf,
        iterations: meta.iterations,
        converged: meta.converged,
        phi_scale: meta.phi_scale,
        phi_shift: meta.phi_shift,
    })
}
