use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::problem::ConvexDomain;

/// Lattice points closer than this many spacings to `∂Ω` are not unknowns;
/// their neighbors reach the boundary directly. Keeping every arm at least
/// this long bounds the conditioning of the nonuniform differences.
const NODE_CLEARANCE: f64 = 0.1;

/// First-quadrant stencil directions, each paired with its rotation by 90°.
const PRIMITIVE: [[i32; 2]; 8] = [[1, 0], [1, 1], [2, 1], [1, 2], [3, 1], [1, 3], [3, 2], [2, 3]];

/// Where one stencil arm ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    Node(usize),
    Boundary(usize),
}

/// One half of a centered difference: its far end and physical length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    pub target: Target,
    pub len: f64,
}

/// Cartesian grid clipped to a convex domain, with arms for every stencil
/// direction of every interior node.
#[derive(Clone, Debug)]
pub struct Grid {
    spacing: f64,
    width: usize,
    dirs: Vec<[i32; 2]>,
    nodes: Vec<Point>,
    lattice: Vec<[i64; 2]>,
    boundary: Vec<Point>,
    arms: Vec<Arm>,
    lookup_origin: [i64; 2],
    lookup_shape: [usize; 2],
    lookup: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Grid {
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of orthogonal direction pairs.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Stencil directions; entries `2k` and `2k + 1` form the `k`-th orthogonal pair.
    pub fn directions(&self) -> &[[i32; 2]] {
        &self.dirs
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn boundary(&self) -> &[Point] {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lattice coordinates `(i, j)` of node `k`, located at `(i h, j h)`.
    pub fn lattice(&self, k: usize) -> [i64; 2] {
        self.lattice[k]
    }

    /// Node at lattice position `(i, j)`, if it is an unknown.
    pub fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        let (a, b) = (i - self.lookup_origin[0], j - self.lookup_origin[1]);
        if a < 0 || b < 0 || a as usize >= self.lookup_shape[0] || b as usize >= self.lookup_shape[1] {
            return None;
        }
        let v = self.lookup[b as usize * self.lookup_shape[0] + a as usize];
        (v != NONE).then_some(v as usize)
    }

    /// Lattice index range covered by the node lookup, `[lo, hi)` per axis.
    pub fn lattice_bounds(&self) -> ([i64; 2], [i64; 2]) {
        let lo = self.lookup_origin;
        (lo, [lo[0] + self.lookup_shape[0] as i64, lo[1] + self.lookup_shape[1] as i64])
    }

    /// Arm of `node` along direction `dir`, forward (`side = 0`) or backward.
    #[inline]
    pub fn arm(&self, node: usize, dir: usize, side: usize) -> Arm {
        self.arms[(node * self.dirs.len() + dir) * 2 + side]
    }

    pub fn arm_end(&self, arm: Arm) -> Point {
        match arm.target {
            Target::Node(k) => self.nodes[k],
            Target::Boundary(k) => self.boundary[k],
        }
    }
}

/// Lattice `h Z^2` clipped to `domain` with `width` orthogonal direction pairs.
pub fn build_grid(domain: &ConvexDomain, spacing: f64, width: usize) -> Result<Grid> {
    if !(spacing > 0.0 && spacing <= domain.rho() / 8.0) {
        return Err(Error::Precondition(format!(
            "spacing {spacing} must lie in (0, rho/8 = {}]",
            domain.rho() / 8.0
        )));
    }
    if !(2..=8).contains(&width) {
        return Err(Error::Precondition(format!("stencil width {width} outside [2, 8]")));
    }
    let dirs: Vec<[i32; 2]> = PRIMITIVE[..width].iter().flat_map(|&[a, b]| [[a, b], [-b, a]]).collect();

    let (lo, hi) = domain.bounding_box();
    let i0 = (lo.x / spacing).floor() as i64 - 1;
    let j0 = (lo.y / spacing).floor() as i64 - 1;
    let nx = ((hi.x / spacing).ceil() as i64 - i0 + 2) as usize;
    let ny = ((hi.y / spacing).ceil() as i64 - j0 + 2) as usize;
    let mut lookup = vec![NONE; nx * ny];
    let mut nodes = Vec::new();
    let mut lattice = Vec::new();
    for b in 0..ny {
        for a in 0..nx {
            let (i, j) = (i0 + a as i64, j0 + b as i64);
            let p = Point::new(i as f64 * spacing, j as f64 * spacing);
            if domain.interior_distance(p) >= NODE_CLEARANCE * spacing {
                lookup[b * nx + a] = nodes.len() as u32;
                nodes.push(p);
                lattice.push([i, j]);
            }
        }
    }
    if nodes.len() < 100 {
        return Err(Error::TooCoarse(nodes.len()));
    }

    let mut grid = Grid {
        spacing,
        width,
        dirs,
        nodes,
        lattice,
        boundary: Vec::new(),
        arms: Vec::new(),
        lookup_origin: [i0, j0],
        lookup_shape: [nx, ny],
        lookup,
    };
    let mut arms = Vec::with_capacity(grid.nodes.len() * grid.dirs.len() * 2);
    let mut boundary = Vec::new();
    for k in 0..grid.nodes.len() {
        let p = grid.nodes[k];
        let [i, j] = grid.lattice[k];
        for &[a, b] in &grid.dirs {
            for sign in [1i64, -1] {
                let (da, db) = (sign * a as i64, sign * b as i64);
                let step = Point::new(da as f64, db as f64) * spacing;
                let arm = match grid.node_at(i + da, j + db) {
                    Some(n) => Arm { target: Target::Node(n), len: step.norm() },
                    None => {
                        let t = domain.exit(p, step);
                        boundary.push(p + step * t);
                        Arm { target: Target::Boundary(boundary.len() - 1), len: t * step.norm() }
                    }
                };
                arms.push(arm);
            }
        }
    }
    grid.arms = arms;
    grid.boundary = boundary;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn half_disk() -> ConvexDomain {
        ConvexDomain::disk_cap(Point::zeros(), 1.0, 0.45)
    }

    #[test]
    fn half_disk_node_count() {
        let g = build_grid(&half_disk(), 1.0 / 64.0, 2).unwrap();
        let expect = PI / 2.0 * 64.0 * 64.0;
        assert!((g.len() as f64 - expect).abs() < 0.05 * expect, "{}", g.len());
    }

    #[test]
    fn spacing_and_width_preconditions() {
        let d = half_disk();
        assert!(matches!(build_grid(&d, 0.1, 2), Err(Error::Precondition(_))));
        assert!(matches!(build_grid(&d, 0.01, 1), Err(Error::Precondition(_))));
        assert!(matches!(build_grid(&d, 0.01, 9), Err(Error::Precondition(_))));
    }

    #[test]
    fn too_coarse() {
        // Only reachable when rho overstates the domain size.
        let d = ConvexDomain::disk_cap(Point::zeros(), 0.2, 0.8);
        assert!(matches!(build_grid(&d, 0.1, 2), Err(Error::TooCoarse(_))));
    }

    #[test]
    fn axis_rays_end_on_circle() {
        let center = Point::new(0.0, 0.5);
        let d = ConvexDomain::disk_cap(center, 0.5, 0.5);
        let g = build_grid(&d, 1.0 / 128.0, 2).unwrap();
        for k in 0..g.len() {
            for dir in [0, 1] {
                for side in [0, 1] {
                    let arm = g.arm(k, dir, side);
                    let end = g.arm_end(arm);
                    assert!(((end - g.nodes()[k]).norm() - arm.len).abs() < 1e-14);
                    if let Target::Boundary(_) = arm.target {
                        assert!(((end - center).norm() - 0.5).abs() < 1e-12);
                        assert!(arm.len >= NODE_CLEARANCE * g.spacing());
                    }
                }
            }
        }
    }

    #[test]
    fn stencil_directions() {
        let g = build_grid(&half_disk(), 1.0 / 32.0, 4).unwrap();
        assert_eq!(g.directions(), &[[1, 0], [0, 1], [1, 1], [-1, 1], [2, 1], [-1, 2], [1, 2], [-2, 1]]);
        for pair in g.directions().chunks(2) {
            assert_eq!(pair[0][0] * pair[1][0] + pair[0][1] * pair[1][1], 0);
        }
    }

    #[test]
    fn interior_arms_are_symmetric() {
        let g = build_grid(&half_disk(), 1.0 / 32.0, 3).unwrap();
        for k in 0..g.len() {
            for d in 0..g.directions().len() {
                if let Target::Node(n) = g.arm(k, d, 0).target {
                    assert_eq!(g.arm(n, d, 1).target, Target::Node(k));
                }
            }
        }
    }
}
