//! Level sweeps: one solve, then section metrics on a geometric ladder of
//! heights, scaling-law fits and report emission.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::section::{
    effective_mu, extract_section, graph_growth, john_normalize, sliding_map, tangent_normalize, GraphGrowth, TangentPlane,
};
use crate::solver::{solve, GridSolution};

/// Default doubling threshold for [`check_b_doubling`].
pub const DEFAULT_C0: f64 = 0.25;
/// Rows with a semi-axis shorter than this many grid spacings are flagged.
pub const MIN_AXIS_CELLS: f64 = 3.0;
/// Minimum number of unflagged rows for a fit.
pub const MIN_FIT_ROWS: usize = 5;
/// Drift values below this are treated as noise by the no-growth test.
pub const DRIFT_FLOOR: f64 = 0.02;

pub const CSV_HEADER: [&str; 11] =
    ["h", "area", "b", "nu1", "d1", "d2", "k_in", "k_out", "centroid_offset", "axis_angle", "flags"];

/// `hmax, hmax/2, ..., hmax/2^(levels-1)`.
pub fn ladder(hmax: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|k| hmax / 2f64.powi(k as i32)).collect()
}

/// Checks that `hs` lies in `(0, 1)`, halves at every step and has at least 8 levels.
pub fn check_ladder(hs: &[f64]) -> Result<()> {
    if hs.len() < 8 {
        return Err(Error::Precondition(format!("ladder needs at least 8 levels, got {}", hs.len())));
    }
    if let Some(h) = hs.iter().find(|h| !(**h > 0.0 && **h < 1.0)) {
        return Err(Error::Precondition(format!("level {h} outside (0, 1)")));
    }
    if let Some(w) = hs.windows(2).find(|w| (w[0] / w[1] - 2.0).abs() > 1e-9) {
        return Err(Error::Precondition(format!("ladder ratio {} is not 2", w[0] / w[1])));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSettings {
    pub spacing: f64,
    pub width: usize,
    pub tol: f64,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings { spacing: 1.0 / 256.0, width: 4, tol: 1e-8 }
    }
}

/// One level of a sweep. `flags` is empty or a `;`-separated list of
/// `unresolved` and `misaligned`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub area: f64,
    pub b: f64,
    pub nu1: f64,
    pub d1: f64,
    pub d2: f64,
    pub k_in: f64,
    pub k_out: f64,
    pub centroid_offset: f64,
    pub axis_angle: f64,
    pub flags: String,
}

impl SweepRow {
    pub fn flagged(&self) -> bool {
        !self.flags.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuDrift {
    /// Largest `|nu_h - nu_{h/2}|` over adjacent unflagged rows.
    pub max_drift: f64,
    /// `max |nu| / (1 + |ln h|)`.
    pub c_bound: f64,
    /// Least-squares fit `|nu| ≈ intercept + slope |ln h|`.
    pub slope: f64,
    pub intercept: f64,
    /// Drift shows no growth: the second half of the ladder stays within
    /// twice the first half, or below [`DRIFT_FLOOR`].
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingEvent {
    pub h: f64,
    pub t: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BDoubling {
    pub c0: f64,
    pub events: Vec<DoublingEvent>,
    /// Levels with `b <= c0` and no doubling in `[c0 h, h]`.
    pub unmatched: Vec<f64>,
    pub b_floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fits {
    pub volume_exponent: Option<f64>,
    pub nu_drift: Option<NuDrift>,
    pub b_doubling: BDoubling,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Largest `k0` with `k0 h <= |S_h| <= h / k0` on unflagged rows.
    pub k0: f64,
    /// Extremes of `k_out / k_in` over all rows.
    pub k_ratio_min: f64,
    pub k_ratio_max: f64,
    pub b_floor: f64,
    /// Extremes of `d_i / h^{1/2}` over unflagged rows.
    pub d_min: f64,
    pub d_max: f64,
    /// Every pair `h1 < h2` has `b(h1)/b(h2) >= (h1/h2)^{1/2}`.
    pub b_monotone: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub residual_inf: f64,
    pub iterations: usize,
    pub interior_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub problem: String,
    pub settings: SolveSettings,
    pub solve: SolveSummary,
    pub tangent: TangentPlane,
    pub mu_effective: f64,
    pub rows: Vec<SweepRow>,
    /// Boundary-graph growth per row, aligned with `rows`.
    pub graph_growth: Vec<GraphGrowth>,
    pub fits: Fits,
    pub constants: Constants,
}

/// Solves `spec` once and analyzes the section at every level of `hs`.
///
/// A failing level stops the sweep with [`Error::SweepAborted`] carrying
/// the rows computed so far.
pub fn run_sweep(spec: &ProblemSpec, hs: &[f64], settings: SolveSettings) -> Result<(SweepReport, GridSolution)> {
    check_ladder(hs)?;
    let u = solve(spec, settings.spacing, settings.width, settings.tol)?;
    let report = analyze(&u, hs, settings)?;
    Ok((report, u))
}

/// Section analysis of an existing solution.
pub fn analyze(u: &GridSolution, hs: &[f64], settings: SolveSettings) -> Result<SweepReport> {
    check_ladder(hs)?;
    let (un, tangent) = tangent_normalize(u)?;
    let mu = effective_mu(&un, 4000);
    let mut report = SweepReport {
        problem: u.spec.name.clone(),
        settings,
        solve: SolveSummary { residual_inf: u.residual_inf, iterations: u.iterations, interior_nodes: u.grid.len() },
        tangent,
        mu_effective: mu,
        rows: Vec::new(),
        graph_growth: Vec::new(),
        fits: Fits { volume_exponent: None, nu_drift: None, b_doubling: check_b_doubling(&[], DEFAULT_C0) },
        constants: constants(&[]),
    };
    let spacing = u.grid.spacing();
    for &h in hs {
        let level = || -> Result<_> {
            let s = extract_section(&un, h)?;
            let m = sliding_map(&s)?;
            let met = john_normalize(&s, &m, &u.spec.domain, spacing)?;
            Ok((met, graph_growth(&un, &s, &m, mu)))
        };
        let (met, growth) = match level() {
            Ok(v) => v,
            Err(cause) => {
                finish(&mut report);
                return Err(Error::SweepAborted { partial: Box::new(report), cause: Box::new(cause) });
            }
        };
        let mut flags = Vec::new();
        if met.d[0].min(met.d[1]) < MIN_AXIS_CELLS * spacing {
            flags.push("unresolved");
        }
        if met.misaligned {
            flags.push("misaligned");
        }
        report.rows.push(SweepRow {
            h,
            area: met.area,
            b: met.b,
            nu1: met.nu,
            d1: met.d[0],
            d2: met.d[1],
            k_in: met.k_in,
            k_out: met.k_out,
            centroid_offset: met.centroid_offset,
            axis_angle: met.axis_angle,
            flags: flags.join(";"),
        });
        report.graph_growth.push(growth);
    }
    finish(&mut report);
    Ok(report)
}

fn finish(r: &mut SweepReport) {
    r.fits = Fits {
        volume_exponent: fit_volume_exponent(&r.rows).ok(),
        nu_drift: check_nu_drift(&r.rows).ok(),
        b_doubling: check_b_doubling(&r.rows, DEFAULT_C0),
    };
    r.constants = constants(&r.rows);
}

fn unflagged(rows: &[SweepRow]) -> Result<Vec<&SweepRow>> {
    let good: Vec<&SweepRow> = rows.iter().filter(|r| !r.flagged()).collect();
    if good.len() < MIN_FIT_ROWS {
        return Err(Error::TooFewRows { needed: MIN_FIT_ROWS, have: good.len() });
    }
    Ok(good)
}

/// Least-squares slope and intercept of `y` against `x`.
fn line_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log |S_h|` against `log h` over unflagged rows.
pub fn fit_volume_exponent(rows: &[SweepRow]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = unflagged(rows)?.iter().map(|r| (r.h.ln(), r.area.ln())).collect();
    Ok(line_fit(&pts).0)
}

/// Adjacent drift of `nu` and its growth statistics over unflagged rows.
pub fn check_nu_drift(rows: &[SweepRow]) -> Result<NuDrift> {
    let good = unflagged(rows)?;
    let drifts: Vec<f64> = good.windows(2).map(|w| (w[0].nu1 - w[1].nu1).abs()).collect();
    let max_drift = drifts.iter().copied().fold(0.0, f64::max);
    let half = drifts.len() / 2;
    let first = drifts[..half].iter().copied().fold(0.0, f64::max);
    let last = drifts[half..].iter().copied().fold(0.0, f64::max);
    let c_bound = good.iter().map(|r| r.nu1.abs() / (1.0 + r.h.ln().abs())).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = good.iter().map(|r| (r.h.ln().abs(), r.nu1.abs())).collect();
    let (slope, intercept) = line_fit(&pts);
    Ok(NuDrift { max_drift, c_bound, slope, intercept, pass: last <= 2.0 * first || last <= DRIFT_FLOOR })
}

/// For each row with `b(h) <= c0`, looks for a lower level `t h`,
/// `t ∈ [c0, 1]`, with `b(t h) / b(h) > 2`.
pub fn check_b_doubling(rows: &[SweepRow], c0: f64) -> BDoubling {
    let mut events = Vec::new();
    let mut unmatched = Vec::new();
    for r in rows.iter().filter(|r| r.b <= c0) {
        let hit = rows
            .iter()
            .filter(|q| q.h <= r.h && q.h >= c0 * r.h * (1.0 - 1e-12))
            .map(|q| DoublingEvent { h: r.h, t: q.h / r.h, ratio: q.b / r.b })
            .find(|e| e.ratio > 2.0);
        match hit {
            Some(e) => events.push(e),
            None => unmatched.push(r.h),
        }
    }
    let b_floor = finite(rows.iter().map(|r| r.b).fold(f64::INFINITY, f64::min));
    BDoubling { c0, events, unmatched, b_floor }
}

fn constants(rows: &[SweepRow]) -> Constants {
    let good: Vec<&SweepRow> = rows.iter().filter(|r| !r.flagged()).collect();
    let k0 = good.iter().map(|r| (r.area / r.h).min(r.h / r.area)).fold(f64::INFINITY, f64::min);
    let ratios = rows.iter().map(|r| r.k_out / r.k_in);
    let k_ratio_min = ratios.clone().fold(f64::INFINITY, f64::min);
    let k_ratio_max = ratios.fold(0.0, f64::max);
    let ds = good.iter().flat_map(|r| [r.d1 / r.h.sqrt(), r.d2 / r.h.sqrt()]);
    let d_min = ds.clone().fold(f64::INFINITY, f64::min);
    let d_max = ds.fold(0.0, f64::max);
    let b_monotone = rows.iter().all(|lo| {
        rows.iter().filter(|hi| hi.h > lo.h).all(|hi| lo.b / hi.b >= (lo.h / hi.h).sqrt())
    });
    Constants {
        k0: finite(k0),
        k_ratio_min: finite(k_ratio_min),
        k_ratio_max,
        b_floor: finite(rows.iter().map(|r| r.b).fold(f64::INFINITY, f64::min)),
        d_min: finite(d_min),
        d_max,
        b_monotone,
    }
}

/// Empty minima are reported as 0 so that reports stay valid JSON.
fn finite(x: f64) -> f64 {
    if x.is_finite() { x } else { 0.0 }
}

/// Acceptance tolerances applied by [`SweepReport::checks`].
pub const VOLUME_EXPONENT_TOL: f64 = 0.05;
pub const MAX_K_RATIO: f64 = 3.0;
pub const MAX_K_RATIO_VARIATION: f64 = 1.5;
pub const MIN_B_FLOOR: f64 = 0.1;
pub const CENTROID_OFFSET_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl SweepReport {
    /// Pass/fail diagnostics of the report.
    pub fn checks(&self) -> Vec<SweepCheck> {
        let c = &self.constants;
        let check = |name: &str, pass: bool, detail: String| SweepCheck { name: name.into(), pass, detail };
        let exponent = self.fits.volume_exponent;
        let drift = self.fits.nu_drift;
        let offset = self.rows.iter().map(|r| r.centroid_offset / r.h.sqrt()).fold(0.0, f64::max);
        vec![
            check(
                "volume exponent",
                exponent.is_some_and(|e| (e - 1.0).abs() <= VOLUME_EXPONENT_TOL),
                format!("{exponent:?}, target 1 ± {VOLUME_EXPONENT_TOL}"),
            ),
            check("nu drift", drift.is_some_and(|d| d.pass), format!("{:?}", drift.map(|d| d.max_drift))),
            check("k_out/k_in", c.k_ratio_max <= MAX_K_RATIO, format!("max {:.4} <= {MAX_K_RATIO}", c.k_ratio_max)),
            check(
                "k_out/k_in variation",
                c.k_ratio_max <= MAX_K_RATIO_VARIATION * c.k_ratio_min,
                format!("{:.4} <= {MAX_K_RATIO_VARIATION}", c.k_ratio_max / c.k_ratio_min),
            ),
            check("volume sandwich", c.k0 > 0.0, format!("k0 = {:.4}", c.k0)),
            check("b floor", c.b_floor >= MIN_B_FLOOR, format!("{:.4} >= {MIN_B_FLOOR}", c.b_floor)),
            check("b monotone", c.b_monotone, String::new()),
            check(
                "centroid offset",
                offset <= CENTROID_OFFSET_TOL,
                format!("max offset / sqrt(h) = {offset:.3e}"),
            ),
            check(
                "graph growth",
                self.graph_growth.iter().all(|g| g.pass),
                format!("mu = {:.4}", self.mu_effective),
            ),
        ]
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes `report.csv` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.to_csv()?)?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        Ok(())
    }

    /// Human-readable fit summary.
    pub fn summary(&self) -> String {
        let c = &self.constants;
        let f = &self.fits;
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
        let mut out = format!(
            "problem {}: {} rows ({} flagged), spacing {}, width {}\n",
            self.problem,
            self.rows.len(),
            self.rows.iter().filter(|r| r.flagged()).count(),
            self.settings.spacing,
            self.settings.width
        );
        out += &format!("  volume exponent      {}\n", opt(f.volume_exponent));
        match &f.nu_drift {
            Some(d) => {
                out += &format!(
                    "  nu drift             max {:.4}, C {:.4}, slope {:.4}, no growth: {}\n",
                    d.max_drift, d.c_bound, d.slope, d.pass
                )
            }
            None => out += "  nu drift             n/a\n",
        }
        out += &format!(
            "  k_out/k_in           [{:.4}, {:.4}], variation {:.4}\n",
            c.k_ratio_min,
            c.k_ratio_max,
            c.k_ratio_max / c.k_ratio_min
        );
        out += &format!("  k0                   {:.4}\n", c.k0);
        out += &format!("  d_i / sqrt(h)        [{:.4}, {:.4}]\n", c.d_min, c.d_max);
        out += &format!(
            "  b floor              {:.4} (monotone: {}, doubling events {} at c0 = {})\n",
            c.b_floor,
            c.b_monotone,
            f.b_doubling.events.len(),
            f.b_doubling.c0
        );
        let gg = self.graph_growth.iter().all(|g| g.pass);
        out += &format!("  graph growth         mu {:.4}, all rows pass: {gg}\n", self.mu_effective);
        out
    }
}
