use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::Solve;
use faer::Col;

use super::grid::{build_grid, Grid, Target};
use super::operator::{difference_weights, linearize, min_second_difference, second_difference};
use super::GridSolution;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Iteration budgets for [`solve_on_grid`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub max_newton: usize,
    /// Explicit relaxation steps allowed in total when Newton stalls.
    pub max_relaxation: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_newton: 200, max_relaxation: 50_000 }
    }
}

/// Builds the grid and solves; see [`solve_on_grid`].
pub fn solve(spec: &ProblemSpec, spacing: f64, width: usize, tol: f64) -> Result<GridSolution> {
    let grid = build_grid(&spec.domain, spacing, width)?;
    solve_on_grid(spec, grid, tol, SolveOptions::default())
}

/// Damped semismooth Newton on the convexified scheme, started from the
/// Poisson problem `Δu = 2 sqrt(f)`, with explicit relaxation as fallback.
///
/// Returns `SolveNotConverged` carrying the best iterate when the budgets
/// run out.
pub fn solve_on_grid(spec: &ProblemSpec, grid: Grid, tol: f64, opts: SolveOptions) -> Result<GridSolution> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::Precondition(format!("tolerance {tol:e} outside [1e-12, 1e-4]")));
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let f: Vec<f64> = grid.nodes().iter().map(|&p| spec.rhs.eval(p)).collect();
    let ub: Vec<f64> = grid.boundary().iter().map(|&p| spec.boundary.phi.eval(p)).collect();

    let mut u = match coarse_start(spec, &grid, &ub, &f, tol, opts) {
        Some(u) => u,
        None => {
            let lap: Vec<f64> = f.iter().map(|v| 2.0 * v.sqrt()).collect();
            poisson_start(&grid, &ub, &lap, None)?
        }
    };
    let mut lin = linearize(&grid, &u, &ub, &f);
    let mut res = norm_inf(&lin.residual);
    let mut best = (res, u.clone());
    let mut iterations = 0;
    let mut newton = 0;
    let mut relaxed = 0;

    while res > tol && newton < opts.max_newton {
        newton += 1;
        iterations += 1;
        let step = newton_step(&grid, &lin)?;
        let merit = sum_sq(&lin.residual);
        let mut t = 1.0;
        let mut accepted = false;
        while t >= 1.0 / 1024.0 {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            let trial_lin = linearize(&grid, &trial, &ub, &f);
            if sum_sq(&trial_lin.residual) <= (1.0 - 1e-4 * t) * merit {
                u = trial;
                lin = trial_lin;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // Stalled: smooth with pointwise relaxation before the next Newton step.
            let budget = (opts.max_relaxation - relaxed).min(200);
            if budget == 0 {
                break;
            }
            relax(&grid, &mut u, &ub, &f, budget);
            relaxed += budget;
            iterations += budget;
            lin = linearize(&grid, &u, &ub, &f);
        }
        res = norm_inf(&lin.residual);
        if res < best.0 {
            best = (res, u.clone());
        }
    }

    let (residual_inf, values) = best;
    let converged = residual_inf <= tol;
    let solution = GridSolution {
        spec: spec.clone(),
        grid,
        values,
        boundary_values: ub,
        residual_inf,
        iterations,
        converged,
        phi_scale: 1.0,
        phi_shift: [0.0; 3],
    };
    if !converged {
        return Err(Error::SolveNotConverged(Box::new(solution)));
    }
    let worst = min_second_difference(&solution.grid, &solution.values, &solution.boundary_values);
    if worst < -1e-9 * solution.max_abs().max(1.0) {
        return Err(Error::NonConvexIterate(worst));
    }
    Ok(solution)
}

fn norm_inf(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn sparse_solve(n: usize, triplets: &[Triplet<usize, usize, f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, triplets)
        .map_err(|e| Error::DegenerateInput(format!("sparse assembly: {e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::DegenerateInput(format!("sparse factorization: {e:?}")))?;
    let b = Col::<f64>::from_fn(n, |i| rhs[i]);
    let x = lu.solve(&b);
    Ok((0..n).map(|i| x[i]).collect())
}

/// Adds `coef * D_dir` at row `k` to the system, moving boundary terms to `rhs`.
fn push_difference(
    grid: &Grid,
    k: usize,
    dir: usize,
    coef: f64,
    ub: &[f64],
    triplets: &mut Vec<Triplet<usize, usize, f64>>,
    rhs: &mut f64,
) {
    for (target, w) in difference_weights(grid, k, dir) {
        triplets.push(Triplet::new(k, k, -coef * w));
        match target {
            Target::Node(j) => triplets.push(Triplet::new(k, j, coef * w)),
            Target::Boundary(j) => *rhs -= coef * w * ub[j],
        }
    }
}

/// Solves the discrete `Δu = lap`; `lap = 2 sqrt(f)` makes this exact for
/// radial solutions.
///
/// With `known = Some((mask, values))` only nodes with `mask[k] == false`
/// are unknowns; the rest keep `values` and act as Dirichlet data.
fn poisson_start(grid: &Grid, ub: &[f64], lap: &[f64], known: Option<(&[bool], &[f64])>) -> Result<Vec<f64>> {
    let n = grid.len();
    let free: Vec<usize> = match known {
        Some((mask, _)) => (0..n).filter(|&k| !mask[k]).collect(),
        None => (0..n).collect(),
    };
    let mut row = vec![usize::MAX; n];
    for (r, &k) in free.iter().enumerate() {
        row[k] = r;
    }
    let mut triplets = Vec::with_capacity(5 * free.len());
    let mut rhs = vec![0.0; free.len()];
    for (r, &k) in free.iter().enumerate() {
        rhs[r] = lap[k];
        for dir in [0, 1] {
            for (target, w) in difference_weights(grid, k, dir) {
                triplets.push(Triplet::new(r, r, -w));
                match target {
                    Target::Node(j) if row[j] != usize::MAX => triplets.push(Triplet::new(r, row[j], w)),
                    Target::Node(j) => rhs[r] -= w * known.map_or(0.0, |(_, v)| v[j]),
                    Target::Boundary(j) => rhs[r] -= w * ub[j],
                }
            }
        }
    }
    let x = if free.is_empty() { Vec::new() } else { sparse_solve(free.len(), &triplets, &rhs)? };
    let mut u = known.map_or_else(|| vec![0.0; n], |(_, v)| v.to_vec());
    for (r, &k) in free.iter().enumerate() {
        u[k] = x[r];
    }
    Ok(u)
}

/// Grids larger than this start from the solution on the grid of twice the spacing.
const NESTED_THRESHOLD: usize = 12_000;

/// Biquadratic interpolation of a coarse solve; nodes without a full 3x3
/// block of coarse neighbors are filled by a local Poisson solve matching
/// the coarse Laplacian.
///
/// Bilinear interpolation would leave second differences alternating
/// between zero and twice their true value, which the product operator
/// punishes; the biquadratic one reproduces quadratics exactly.
fn coarse_start(
    spec: &ProblemSpec,
    grid: &Grid,
    ub: &[f64],
    f: &[f64],
    tol: f64,
    opts: SolveOptions,
) -> Option<Vec<f64>> {
    if grid.len() < NESTED_THRESHOLD {
        return None;
    }
    let coarse_grid = build_grid(&spec.domain, 2.0 * grid.spacing(), grid.width()).ok()?;
    let coarse = match solve_on_grid(spec, coarse_grid, tol.max(1e-8), opts) {
        Ok(s) => s,
        Err(Error::SolveNotConverged(s)) => *s,
        Err(_) => return None,
    };
    let cg = &coarse.grid;
    let basis = |s: f64| [0.5 * s * (s - 1.0), 1.0 - s * s, 0.5 * s * (s + 1.0)];
    let mut known = vec![false; grid.len()];
    let mut values = vec![0.0; grid.len()];
    'nodes: for (k, p) in grid.nodes().iter().enumerate() {
        let (x, y) = (p.x / cg.spacing(), p.y / cg.spacing());
        let (i, j) = (x.round(), y.round());
        let (bx, by) = (basis(x - i), basis(y - j));
        let (i, j) = (i as i64, j as i64);
        let mut v = 0.0;
        for (b, wy) in by.iter().enumerate() {
            for (a, wx) in bx.iter().enumerate() {
                match cg.node_at(i + a as i64 - 1, j + b as i64 - 1) {
                    Some(n) => v += wx * wy * coarse.values[n],
                    None => continue 'nodes,
                }
            }
        }
        values[k] = v;
        known[k] = true;
    }
    let coarse_lap: Vec<f64> = (0..cg.len())
        .map(|n| {
            second_difference(cg, &coarse.values, &coarse.boundary_values, n, 0)
                + second_difference(cg, &coarse.values, &coarse.boundary_values, n, 1)
        })
        .collect();
    let lap: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(f)
        .map(|(p, fk)| {
            let (i, j) = ((p.x / cg.spacing()).round() as i64, (p.y / cg.spacing()).round() as i64);
            (0..=3i64)
                .flat_map(|r| (-r..=r).flat_map(move |a| (-r..=r).map(move |b| (a, b))))
                .find_map(|(a, b)| cg.node_at(i + a, j + b))
                .map_or(2.0 * fk.sqrt(), |n| coarse_lap[n])
        })
        .collect();
    poisson_start(grid, ub, &lap, Some((&known, &values))).ok()
}

/// Solves `J δ = -G` for the generalized Jacobian of the active pairs.
fn newton_step(grid: &Grid, lin: &super::operator::Linearization) -> Result<Vec<f64>> {
    let n = grid.len();
    let mut triplets = Vec::with_capacity(5 * n);
    // Boundary values are fixed, so their contributions drop out of J.
    let zeros = vec![0.0; grid.boundary().len()];
    let mut scratch = 0.0;
    for k in 0..n {
        let (pair, da, db) = lin.active[k];
        push_difference(grid, k, 2 * pair, da, &zeros, &mut triplets, &mut scratch);
        push_difference(grid, k, 2 * pair + 1, db, &zeros, &mut triplets, &mut scratch);
    }
    let rhs: Vec<f64> = lin.residual.iter().map(|r| -r).collect();
    sparse_solve(n, &triplets, &rhs)
}

/// Explicit steps `u <- u + dt (MA - f)` with per-node stable `dt`.
fn relax(grid: &Grid, u: &mut Vec<f64>, ub: &[f64], f: &[f64], steps: usize) {
    let h2 = grid.spacing() * grid.spacing();
    for _ in 0..steps {
        let lin = linearize(grid, u, ub, f);
        for k in 0..grid.len() {
            let (pair, da, db) = lin.active[k];
            let diag: f64 = [(2 * pair, da), (2 * pair + 1, db)]
                .iter()
                .map(|&(dir, c)| c * difference_weights(grid, k, dir).iter().map(|w| w.1).sum::<f64>())
                .sum();
            let dt = (h2 / 8.0).min(0.9 / diag.max(f64::MIN_POSITIVE));
            u[k] += dt * lin.residual[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::make_standard_problem;
    use crate::solver::ma_residual;

    #[test]
    fn radial_is_reproduced() {
        let spec = make_standard_problem("radial").unwrap();
        let sol = solve(&spec, 1.0 / 32.0, 2, 1e-10).unwrap();
        assert!(sol.converged && sol.residual_inf <= 1e-10);
        assert!(sol.max_error(|p| p.norm_squared()) < 1e-9);
        assert!(sol.iterations < 100_000);
    }

    #[test]
    fn boundary_values_are_data() {
        let spec = make_standard_problem("sheared").unwrap();
        let sol = solve(&spec, 1.0 / 32.0, 4, 1e-9).unwrap();
        for (p, v) in sol.grid.boundary().iter().zip(&sol.boundary_values) {
            assert_eq!(*v, spec.boundary.phi.eval(*p));
        }
        assert!(ma_residual(&sol).iter().all(|r| r.abs() <= 1e-9));
    }

    #[test]
    fn tolerance_precondition() {
        let spec = make_standard_problem("radial").unwrap();
        assert!(matches!(solve(&spec, 1.0 / 32.0, 2, 1e-3), Err(Error::Precondition(_))));
    }

    #[test]
    fn exhausted_budget_returns_best_iterate() {
        let spec = make_standard_problem("sheared").unwrap();
        let grid = build_grid(&spec.domain, 1.0 / 32.0, 4).unwrap();
        let opts = SolveOptions { max_newton: 1, max_relaxation: 0 };
        match solve_on_grid(&spec, grid, 1e-12, opts) {
            Err(Error::SolveNotConverged(best)) => {
                assert!(!best.converged);
                assert!(best.residual_inf > 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }
}
