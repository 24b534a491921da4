//! Wide-stencil Monge–Ampère operator and its Newton linearization.

use super::grid::{Grid, Target};

/// Second difference of `u` at `node` along direction `dir`, per unit length
/// squared. Nonuniform arms use the three-point formula, exact on quadratics.
#[inline]
pub(crate) fn second_difference(grid: &Grid, u: &[f64], ub: &[f64], node: usize, dir: usize) -> f64 {
    let value = |t: Target| match t {
        Target::Node(k) => u[k],
        Target::Boundary(k) => ub[k],
    };
    let p = grid.arm(node, dir, 0);
    let m = grid.arm(node, dir, 1);
    let c = u[node];
    2.0 / (p.len + m.len) * ((value(p.target) - c) / p.len + (value(m.target) - c) / m.len)
}

/// `max(a,0) max(b,0) + min(a,0) + min(b,0)`: the pair determinant on convex
/// arguments, extended monotonically to non-convex ones.
#[inline]
fn pair_value(a: f64, b: f64) -> f64 {
    a.max(0.0) * b.max(0.0) + a.min(0.0) + b.min(0.0)
}

/// `MA_W[u] = min over orthogonal pairs of max(D_e u, 0) max(D_e⊥ u, 0)` at every node.
pub fn ma_operator(grid: &Grid, u: &[f64], ub: &[f64]) -> Vec<f64> {
    (0..grid.len())
        .map(|k| {
            (0..grid.width())
                .map(|p| {
                    let a = second_difference(grid, u, ub, k, 2 * p);
                    let b = second_difference(grid, u, ub, k, 2 * p + 1);
                    a.max(0.0) * b.max(0.0)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Smallest directional second difference over all nodes and directions.
pub fn min_second_difference(grid: &Grid, u: &[f64], ub: &[f64]) -> f64 {
    let mut worst = f64::INFINITY;
    for k in 0..grid.len() {
        for d in 0..grid.directions().len() {
            worst = worst.min(second_difference(grid, u, ub, k, d));
        }
    }
    worst
}

/// Convexified residual `min_pairs pair_value - f` with, per node, the
/// active pair and the partial derivatives with respect to its two differences.
pub(crate) struct Linearization {
    pub residual: Vec<f64>,
    pub active: Vec<(usize, f64, f64)>,
}

pub(crate) fn linearize(grid: &Grid, u: &[f64], ub: &[f64], f: &[f64]) -> Linearization {
    let n = grid.len();
    let mut residual = Vec::with_capacity(n);
    let mut active = Vec::with_capacity(n);
    for k in 0..n {
        let mut best = (f64::INFINITY, 0, 0.0, 0.0);
        for p in 0..grid.width() {
            let a = second_difference(grid, u, ub, k, 2 * p);
            let b = second_difference(grid, u, ub, k, 2 * p + 1);
            let v = pair_value(a, b);
            if v < best.0 {
                let da = if a > 0.0 { b.max(0.0) } else { 1.0 };
                let db = if b > 0.0 { a.max(0.0) } else { 1.0 };
                best = (v, p, da, db);
            }
        }
        residual.push(best.0 - f[k]);
        active.push((best.1, best.2, best.3));
    }
    Linearization { residual, active }
}

/// Coefficients of one second difference: `(target, weight)` pairs and the
/// diagonal weight, so that `D = sum w_t u_t - w_c u_c`.
#[inline]
pub(crate) fn difference_weights(grid: &Grid, node: usize, dir: usize) -> [(Target, f64); 2] {
    let p = grid.arm(node, dir, 0);
    let m = grid.arm(node, dir, 1);
    let s = 2.0 / (p.len + m.len);
    [(p.target, s / p.len), (m.target, s / m.len)]
}
