//! Monotone wide-stencil finite differences for `det D^2 u = f` with
//! Dirichlet data.

mod dump;
mod grid;
mod newton;
mod operator;

pub use dump::{load_solution, SolutionMeta};
pub use grid::{build_grid, Arm, Grid, Target};
pub use newton::{solve, solve_on_grid, SolveOptions};
pub use operator::{ma_operator, min_second_difference};

use crate::geometry::Point;
use crate::problem::ProblemSpec;

/// Discrete solution: interior node values plus boundary values at every
/// arm exit point.
#[derive(Clone, Debug)]
pub struct GridSolution {
    pub spec: ProblemSpec,
    pub grid: Grid,
    pub values: Vec<f64>,
    pub boundary_values: Vec<f64>,
    pub residual_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Continuous boundary data is `phi_scale * phi - (a + b1 x1 + b2 x2)`
    /// with `phi_shift = [a, b1, b2]`, matching the operations applied to the samples.
    pub phi_scale: f64,
    pub phi_shift: [f64; 3],
}

impl GridSolution {
    /// Wraps sampled values, e.g. an exact solution, with residual and
    /// iteration fields zeroed.
    pub fn from_function(spec: &ProblemSpec, grid: Grid, g: impl Fn(Point) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&p| g(p)).collect();
        let boundary_values = grid.boundary().iter().map(|&p| g(p)).collect();
        Self {
            spec: spec.clone(),
            grid,
            values,
            boundary_values,
            residual_inf: 0.0,
            iterations: 0,
            converged: true,
            phi_scale: 1.0,
            phi_shift: [0.0; 3],
        }
    }

    /// Every sample as `(point, value)`: interior nodes first, then boundary points.
    pub fn samples(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        let inner = self.grid.nodes().iter().copied().zip(self.values.iter().copied());
        let outer = self.grid.boundary().iter().copied().zip(self.boundary_values.iter().copied());
        inner.chain(outer)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    /// `u - g` over all samples.
    pub fn max_error(&self, g: impl Fn(Point) -> f64) -> f64 {
        self.samples().map(|(p, v)| (v - g(p)).abs()).fold(0.0, f64::max)
    }

    /// Boundary data at any point of `∂Ω`, transformed like the samples.
    pub fn boundary_value(&self, p: Point) -> f64 {
        let [a, b1, b2] = self.phi_shift;
        self.phi_scale * self.spec.boundary.phi.eval(p) - (a + b1 * p.x + b2 * p.y)
    }

    /// Subtracts the affine function `a + b1 x1 + b2 x2`.
    pub fn subtract_affine(&mut self, a: f64, b1: f64, b2: f64) {
        let g = |p: &Point| a + b1 * p.x + b2 * p.y;
        for (v, p) in self.values.iter_mut().zip(self.grid.nodes()) {
            *v -= g(p);
        }
        for (v, p) in self.boundary_values.iter_mut().zip(self.grid.boundary()) {
            *v -= g(p);
        }
        self.phi_shift[0] += a;
        self.phi_shift[1] += b1;
        self.phi_shift[2] += b2;
    }

    /// `beta u`.
    pub fn scaled(&self, beta: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().chain(out.boundary_values.iter_mut()).for_each(|v| *v *= beta);
        out.phi_scale *= beta;
        out.phi_shift = self.phi_shift.map(|c| c * beta);
        out
    }
}

/// `MA_W[u] - f` at every interior node.
pub fn ma_residual(u: &GridSolution) -> Vec<f64> {
    ma_operator(&u.grid, &u.values, &u.boundary_values)
        .into_iter()
        .zip(u.grid.nodes())
        .map(|(m, &p)| m - u.spec.rhs.eval(p))
        .collect()
}

/// Worst directional second difference of the solution.
pub fn convexity_check(u: &GridSolution) -> f64 {
    min_second_difference(&u.grid, &u.values, &u.boundary_values)
}
