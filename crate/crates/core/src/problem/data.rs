use crate::error::{Error, Result};
use crate::geometry::Point;

/// Dirichlet data prescribed on the boundary curve.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryFn {
    Constant(f64),
    /// `c0 + c1 x1 + c2 x2 + c11 x1^2 + c12 x1 x2 + c22 x2^2`.
    Polynomial([f64; 6]),
    /// Boundary samples interpolated linearly in the polar angle about `pivot`.
    Table { pivot: Point, entries: Vec<(f64, Point, f64)> },
}

impl BoundaryFn {
    pub fn quadratic(c11: f64, c12: f64, c22: f64) -> Self {
        BoundaryFn::Polynomial([0.0, 0.0, 0.0, c11, c12, c22])
    }

    pub fn table(pivot: Point, samples: &[(Point, f64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidProblem("boundary table needs at least 3 samples".into()));
        }
        let mut entries: Vec<(f64, Point, f64)> = samples
            .iter()
            .map(|&(p, v)| ((p - pivot).y.atan2((p - pivot).x), p, v))
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(BoundaryFn::Table { pivot, entries })
    }

    pub fn eval(&self, x: Point) -> f64 {
        match self {
            BoundaryFn::Constant(c) => *c,
            BoundaryFn::Polynomial(c) => {
                c[0] + c[1] * x.x + c[2] * x.y + c[3] * x.x * x.x + c[4] * x.x * x.y + c[5] * x.y * x.y
            }
            BoundaryFn::Table { pivot, entries } => {
                let d = x - pivot;
                let t = d.y.atan2(d.x);
                let n = entries.len();
                let hi = entries.partition_point(|e| e.0 <= t);
                let (a, b) = if hi == 0 || hi == n {
                    (&entries[n - 1], &entries[0])
                } else {
                    (&entries[hi - 1], &entries[hi])
                };
                let mut span = b.0 - a.0;
                let mut off = t - a.0;
                if span <= 0.0 {
                    span += 2.0 * std::f64::consts::PI;
                }
                if off < 0.0 {
                    off += 2.0 * std::f64::consts::PI;
                }
                let s = (off / span).clamp(0.0, 1.0);
                a.2 + (b.2 - a.2) * s
            }
        }
    }

    /// Coefficients as stored in problem files.
    pub(crate) fn kind_and_coeffs(&self) -> (&'static str, Vec<f64>) {
        match self {
            BoundaryFn::Constant(c) => ("constant", vec![*c]),
            BoundaryFn::Polynomial(c) if c[..3].iter().all(|&v| v == 0.0) => {
                ("quadratic", vec![c[3], c[4], c[5]])
            }
            BoundaryFn::Polynomial(c) => ("polynomial", c.to_vec()),
            BoundaryFn::Table { entries, .. } => {
                ("table", entries.iter().flat_map(|(_, p, v)| [p.x, p.y, *v]).collect())
            }
        }
    }

    pub(crate) fn from_kind_and_coeffs(kind: &str, coeffs: &[f64], pivot: Point) -> Result<Self> {
        let bad = |n: &str| Error::InvalidProblem(format!("phi of type `{kind}` needs {n} coefficients"));
        match kind {
            "constant" => match coeffs {
                [c] => Ok(BoundaryFn::Constant(*c)),
                _ => Err(bad("1")),
            },
            "quadratic" => match coeffs {
                [a, b, c] => Ok(BoundaryFn::quadratic(*a, *b, *c)),
                _ => Err(bad("3")),
            },
            "polynomial" => {
                let c: [f64; 6] = coeffs.try_into().map_err(|_| bad("6"))?;
                Ok(BoundaryFn::Polynomial(c))
            }
            "table" => {
                if coeffs.len() % 3 != 0 {
                    return Err(bad("a multiple of 3"));
                }
                let samples: Vec<(Point, f64)> =
                    coeffs.chunks(3).map(|c| (Point::new(c[0], c[1]), c[2])).collect();
                BoundaryFn::table(pivot, &samples)
            }
            other => Err(Error::InvalidProblem(format!("unknown phi type `{other}`"))),
        }
    }
}

/// Boundary data with its quadratic growth constant.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    pub phi: BoundaryFn,
    pub mu: f64,
}

/// Right-hand side `f`: constant or piecewise constant on a rectangular partition.
#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    Constant(f64),
    /// `values[j][i]` holds `f` on the cell between `y_breaks[j-1..j]` and
    /// `x_breaks[i-1..i]`; outer cells extend to infinity.
    Piecewise { x_breaks: Vec<f64>, y_breaks: Vec<f64>, values: Vec<Vec<f64>> },
}

impl Rhs {
    pub fn eval(&self, x: Point) -> f64 {
        match self {
            Rhs::Constant(v) => *v,
            Rhs::Piecewise { x_breaks, y_breaks, values } => {
                let i = x_breaks.partition_point(|&b| b <= x.x);
                let j = y_breaks.partition_point(|&b| b <= x.y);
                values[j][i]
            }
        }
    }

    pub fn cell_values(&self) -> Vec<f64> {
        match self {
            Rhs::Constant(v) => vec![*v],
            Rhs::Piecewise { values, .. } => values.iter().flatten().copied().collect(),
        }
    }

    /// `f` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Rhs::Constant(v) => Rhs::Constant(v * factor),
            Rhs::Piecewise { x_breaks, y_breaks, values } => Rhs::Piecewise {
                x_breaks: x_breaks.clone(),
                y_breaks: y_breaks.clone(),
                values: values.iter().map(|r| r.iter().map(|v| v * factor).collect()).collect(),
            },
        }
    }

    pub(crate) fn check_shape(&self) -> Result<()> {
        if let Rhs::Piecewise { x_breaks, y_breaks, values } = self {
            let sorted = |b: &Vec<f64>| b.windows(2).all(|w| w[0] < w[1]);
            if !sorted(x_breaks) || !sorted(y_breaks) {
                return Err(Error::InvalidProblem("partition breaks must increase".into()));
            }
            if values.len() != y_breaks.len() + 1 || values.iter().any(|r| r.len() != x_breaks.len() + 1) {
                return Err(Error::InvalidProblem("cell table does not match the breaks".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_eval() {
        let phi = BoundaryFn::quadratic(2.0, 2.0, 1.0);
        let x = Point::new(0.3, -0.2);
        let exact = x.x * x.x + (x.x + x.y).powi(2);
        assert!((phi.eval(x) - exact).abs() < 1e-15);
    }

    #[test]
    fn table_interpolates_in_angle() {
        let pivot = Point::new(0.0, 0.5);
        let samples: Vec<(Point, f64)> = (0..8)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 4.0;
                (pivot + Point::new(t.cos(), t.sin()) * 0.5, k as f64)
            })
            .collect();
        let phi = BoundaryFn::table(pivot, &samples).unwrap();
        let t: f64 = std::f64::consts::PI / 8.0;
        let mid = pivot + Point::new(t.cos(), t.sin()) * 0.5;
        assert!((phi.eval(mid) - 0.5).abs() < 1e-12);
        assert!((phi.eval(samples[3].0) - 3.0).abs() < 1e-12);
        // Wrap-around between the last and first entries.
        let t: f64 = -std::f64::consts::PI / 8.0;
        let wrap = pivot + Point::new(t.cos(), t.sin()) * 0.5;
        assert!((phi.eval(wrap) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn piecewise_rhs_lookup() {
        let f = Rhs::Piecewise {
            x_breaks: vec![0.0],
            y_breaks: vec![0.5],
            values: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
        };
        f.check_shape().unwrap();
        assert_eq!(f.eval(Point::new(-0.1, 0.1)), 1.0);
        assert_eq!(f.eval(Point::new(0.1, 0.1)), 2.0);
        assert_eq!(f.eval(Point::new(-0.1, 0.6)), 3.0);
        assert_eq!(f.eval(Point::new(0.1, 0.6)), 4.0);
    }
}
