//! Grid scans, window extraction and refinement, and energy minimization.
//!
//! The first grid axis is the row axis (the energy for moment models, `x2` for
//! the coupled models). Rows are evaluated in parallel and merged by index, so
//! results do not depend on the number of worker threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BootError, Result};
use crate::models::{ModelId, ModelSpec, SearchPoint};
use crate::psd::{is_psd_scaled, PsdVerdict, Scaling, DEFAULT_TOL_SCALE};

pub const DEFAULT_REFINE_ITERS: u32 = 40;

/// Matrix size used when none is given.
pub const DEFAULT_K: usize = 8;

/// Companion steps on each side of the tracked point during multi-dimensional refinement.
pub const LOCAL_RADIUS: usize = 8;

/// Shrink factor and number of rounds for the local search around a grid minimum.
pub const MINIMIZE_SHRINK: f64 = 10.0;
pub const MINIMIZE_ROUNDS: usize = 2;

/// Refinement grid half-width in coarse steps.
pub const MINIMIZE_HALF_WIDTH: f64 = 5.0;

const MAX_GRID_POINTS: u64 = 200_000_000;
const GOLDEN_ITERS: usize = 80;

/// One grid dimension: points `lo + i * step` for `i = 0..len` not exceeding `hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, step: f64) -> Self {
        Self {
            name: name.into(),
            lo,
            hi,
            step,
        }
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(BootError::InvalidGrid {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite()) {
            return bad("bounds and step must be finite");
        }
        if self.lo >= self.hi {
            return bad("need lo < hi");
        }
        if self.step <= 0.0 {
            return bad("need step > 0");
        }
        Ok(())
    }
}

/// Grid, matrix size and tolerance of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    #[serde(rename = "K")]
    pub k: usize,
    pub tol_scale: f64,
    pub refine_iters: u32,
    #[serde(default)]
    pub scaling: Scaling,
    /// Search for isolated feasible points between infeasible 1D samples.
    /// `None` enables it for the 2x2 model only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<bool>,
    /// Keep every feasible point (disables early exit along companion axes).
    #[serde(default)]
    pub collect_points: bool,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>, k: usize) -> Self {
        Self {
            axes,
            k,
            tol_scale: DEFAULT_TOL_SCALE,
            refine_iters: DEFAULT_REFINE_ITERS,
            scaling: Scaling::default(),
            probe: None,
            collect_points: false,
        }
    }

    /// Single energy axis.
    pub fn energy(lo: f64, hi: f64, step: f64, k: usize) -> Self {
        Self::new(vec![Axis::new("E", lo, hi, step)], k)
    }

    pub fn with_tol(mut self, tol_scale: f64) -> Self {
        self.tol_scale = tol_scale;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_probe(mut self, probe: bool) -> Self {
        self.probe = Some(probe);
        self
    }

    pub fn with_points(mut self, collect: bool) -> Self {
        self.collect_points = collect;
        self
    }

    pub fn with_refine_iters(mut self, iters: u32) -> Self {
        self.refine_iters = iters;
        self
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn point_count(&self) -> u64 {
        self.axes.iter().map(|a| a.len() as u64).product()
    }

    pub fn validate(&self, model: &ModelSpec) -> Result<()> {
        let dims = model.search_dims();
        let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        if names != dims {
            return Err(BootError::DimensionMismatch {
                expected: dims.iter().map(|s| s.to_string()).collect(),
                found: names.iter().map(|s| s.to_string()).collect(),
            });
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        if self.k < 2 {
            return Err(BootError::InvalidGrid {
                name: "K".into(),
                reason: format!("need K >= 2, got {}", self.k),
            });
        }
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(BootError::InvalidGrid {
                name: "tol_scale".into(),
                reason: "must be positive".into(),
            });
        }
        if self.point_count() > MAX_GRID_POINTS {
            return Err(BootError::InvalidGrid {
                name: "grid".into(),
                reason: format!("{} points exceeds the limit of {MAX_GRID_POINTS}", self.point_count()),
            });
        }
        Ok(())
    }

    fn probing(&self, model: &ModelSpec) -> bool {
        self.axes.len() == 1 && self.probe.unwrap_or(model.id() == ModelId::TwoByTwo)
    }

    fn bounds_text(&self) -> String {
        self.axes
            .iter()
            .map(|a| format!("{} in [{}, {}]", a.name, a.lo, a.hi))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Verdict at one point plus the largest moment used.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEval {
    pub verdict: PsdVerdict,
    pub max_moment: f64,
}

/// Feasibility of a single point. Per-point conditions (singular rows, singular
/// closed forms, overflow) come back as `Err` for the caller to skip.
pub fn evaluate_point(model: &ModelSpec, point: &SearchPoint, k: usize, tol_scale: f64, scaling: Scaling) -> Result<PointEval> {
    let pm = model.bootstrap_matrix(point, k)?;
    let verdict = is_psd_scaled(&pm.matrix, tol_scale, scaling)?;
    Ok(PointEval {
        verdict,
        max_moment: pm.max_moment,
    })
}

fn is_skip(e: &BootError) -> bool {
    matches!(
        e,
        BootError::SingularRecursion { .. } | BootError::SingularPoint { .. } | BootError::NonFinite { .. }
    )
}

/// A grid point that passed the PSD test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasiblePoint {
    pub coords: Vec<f64>,
    pub point: SearchPoint,
    pub min_eigenvalue: f64,
}

/// A maximal run of feasible energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleWindow {
    pub e_lo: f64,
    pub e_hi: f64,
    /// Feasible point inside the window with the largest margin.
    pub witness: SearchPoint,
    #[serde(rename = "K")]
    pub k: usize,
    /// Feasible points at the two edges.
    pub lo_point: SearchPoint,
    pub hi_point: SearchPoint,
    /// Nearest infeasible energies outside the window; `None` at the grid boundary.
    pub below: Option<f64>,
    pub above: Option<f64>,
}

impl FeasibleWindow {
    pub fn width(&self) -> f64 {
        self.e_hi - self.e_lo
    }

    pub fn contains(&self, e: f64) -> bool {
        self.e_lo <= e && e <= self.e_hi
    }

    pub fn contains_within(&self, e: f64, slack: f64) -> bool {
        self.e_lo - slack <= e && e <= self.e_hi + slack
    }
}

/// Lowest feasible energy and where it was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinEnergy {
    pub e_min: f64,
    pub argmin: SearchPoint,
    pub coords: Vec<f64>,
    /// Grid step of the last round, per axis.
    pub step: Vec<f64>,
    pub rounds: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanStats {
    pub points_tested: u64,
    pub points_skipped: u64,
    pub points_feasible: u64,
    pub probes: u64,
    pub max_moment_magnitude: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub windows: Vec<FeasibleWindow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub feasible_points: Vec<FeasiblePoint>,
    pub min_energy: Option<MinEnergy>,
    pub stats: ScanStats,
}

impl ScanResult {
    /// Copy with timing zeroed, for comparisons across runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.stats.runtime_ms = 0.0;
        r
    }

    pub fn window_containing(&self, e: f64) -> Option<&FeasibleWindow> {
        self.windows.iter().find(|w| w.contains(e))
    }
}

#[derive(Debug, Default)]
struct Row {
    tested: u64,
    skipped: u64,
    feasible: u64,
    max_moment: f64,
    /// First feasible point in companion order, with its margin.
    first: Option<(SearchPoint, f64)>,
    /// Margin over the row when it has a single point.
    margin: Option<f64>,
    points: Vec<FeasiblePoint>,
    best: Option<(f64, usize, SearchPoint, Vec<f64>)>,
}

fn companion_count(axes: &[Axis]) -> usize {
    axes.iter().map(Axis::len).product()
}

fn companion_coords(axes: &[Axis], mut flat: usize, out: &mut [f64]) {
    for (slot, axis) in out.iter_mut().zip(axes).rev() {
        let n = axis.len();
        *slot = axis.value(flat % n);
        flat /= n;
    }
}

fn scan_row(model: &ModelSpec, grid: &GridSpec, row: usize, early_exit: bool, track_min: bool) -> Result<Row> {
    let row_val = grid.axes[0].value(row);
    let rest = &grid.axes[1..];
    let n = companion_count(rest);
    let mut out = Row::default();
    let mut coords = vec![0.0; grid.axes.len()];
    coords[0] = row_val;
    for flat in 0..n {
        companion_coords(rest, flat, &mut coords[1..]);
        let point = model.point_from_coords(&coords)?;
        out.tested += 1;
        let eval = match evaluate_point(model, &point, grid.k, grid.tol_scale, grid.scaling) {
            Ok(ev) => ev,
            Err(e) if is_skip(&e) => {
                out.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        out.max_moment = out.max_moment.max(eval.max_moment);
        let margin = eval.verdict.margin();
        if n == 1 {
            out.margin = Some(margin);
        }
        if !eval.verdict.feasible {
            continue;
        }
        out.feasible += 1;
        if track_min {
            let better = out.best.as_ref().is_none_or(|(e, _, _, _)| point.e < *e);
            if better {
                out.best = Some((point.e, flat, point.clone(), coords.clone()));
            }
        }
        if grid.collect_points {
            out.points.push(FeasiblePoint {
                coords: coords.clone(),
                point: point.clone(),
                min_eigenvalue: eval.verdict.min_eigenvalue,
            });
        }
        if out.first.is_none() {
            out.first = Some((point, margin));
            if early_exit {
                break;
            }
        }
    }
    Ok(out)
}

fn golden_max(f: impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64) -> Option<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Some(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Scans every grid point and extracts feasible windows (or, for the coupled
/// models, the lowest feasible energy on the grid).
pub fn scan(model: &ModelSpec, grid: &GridSpec) -> Result<ScanResult> {
    let start = Instant::now();
    model.validate()?;
    grid.validate(model)?;
    let energy_axis = model.id().energy_is_axis();
    let early_exit = energy_axis && !grid.collect_points;
    let n_rows = grid.axes[0].len();

    let rows: Vec<Row> = (0..n_rows)
        .into_par_iter()
        .map(|i| scan_row(model, grid, i, early_exit, !energy_axis))
        .collect::<Result<_>>()?;

    let mut stats = ScanStats::default();
    for r in &rows {
        stats.points_tested += r.tested;
        stats.points_skipped += r.skipped;
        stats.points_feasible += r.feasible;
        stats.max_moment_magnitude = stats.max_moment_magnitude.max(r.max_moment);
    }

    let mut min_energy = None;
    let mut windows = Vec::new();
    if energy_axis {
        windows = extract_windows(grid, &rows);
        if grid.probing(model) {
            let found = probe_isolated(model, grid, &rows, &mut stats);
            windows.extend(found);
            windows.sort_by(|a, b| a.e_lo.total_cmp(&b.e_lo));
        }
    } else {
        let step = grid.axes.iter().map(|a| a.step).collect();
        min_energy = rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.best.as_ref().map(|b| (i, b)))
            .min_by(|(ia, a), (ib, b)| a.0.total_cmp(&b.0).then((ia, a.1).cmp(&(ib, b.1))))
            .map(|(_, (e, _, p, c))| MinEnergy {
                e_min: *e,
                argmin: p.clone(),
                coords: c.clone(),
                step,
                rounds: 0,
            });
    }

    let feasible_points = rows.into_iter().flat_map(|r| r.points).collect();
    stats.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(ScanResult {
        model: *model,
        grid: grid.clone(),
        windows,
        feasible_points,
        min_energy,
        stats,
    })
}

fn extract_windows(grid: &GridSpec, rows: &[Row]) -> Vec<FeasibleWindow> {
    let axis = &grid.axes[0];
    let mut windows = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        if rows[i].first.is_none() {
            i += 1;
            continue;
        }
        let lo = i;
        while i + 1 < rows.len() && rows[i + 1].first.is_some() {
            i += 1;
        }
        let hi = i;
        let mut best = lo;
        for j in lo..=hi {
            if rows[j].first.as_ref().unwrap().1 > rows[best].first.as_ref().unwrap().1 {
                best = j;
            }
        }
        windows.push(FeasibleWindow {
            e_lo: axis.value(lo),
            e_hi: axis.value(hi),
            witness: rows[best].first.as_ref().unwrap().0.clone(),
            k: grid.k,
            lo_point: rows[lo].first.as_ref().unwrap().0.clone(),
            hi_point: rows[hi].first.as_ref().unwrap().0.clone(),
            below: (lo > 0).then(|| axis.value(lo - 1)),
            above: (hi + 1 < rows.len()).then(|| axis.value(hi + 1)),
        });
        i += 1;
    }
    windows
}

/// Looks for feasible points hidden between grid samples where the margin
/// peaks while staying negative.
fn probe_isolated(model: &ModelSpec, grid: &GridSpec, rows: &[Row], stats: &mut ScanStats) -> Vec<FeasibleWindow> {
    let axis = &grid.axes[0];
    let margin_at = |e: f64| -> Option<f64> {
        evaluate_point(model, &SearchPoint::energy(e), grid.k, grid.tol_scale, grid.scaling)
            .ok()
            .map(|ev| ev.verdict.margin())
    };
    let mut found = Vec::new();
    for i in 1..rows.len().saturating_sub(1) {
        let (Some(l), Some(c), Some(r)) = (rows[i - 1].margin, rows[i].margin, rows[i + 1].margin) else {
            continue;
        };
        if c > 0.0 || l > 0.0 || r > 0.0 || c < l || c < r {
            continue;
        }
        stats.probes += 1;
        let Some((e, m)) = golden_max(margin_at, axis.value(i - 1), axis.value(i + 1)) else {
            continue;
        };
        if m >= 0.0 {
            let p = SearchPoint::energy(e);
            // The neighbor samples on either side of the peak are infeasible.
            let (below, above) = if e < axis.value(i) {
                (axis.value(i - 1), axis.value(i))
            } else {
                (axis.value(i), axis.value(i + 1))
            };
            found.push(FeasibleWindow {
                e_lo: e,
                e_hi: e,
                witness: p.clone(),
                k: grid.k,
                lo_point: p.clone(),
                hi_point: p,
                below: Some(below),
                above: Some(above),
            });
        }
    }
    found
}

/// Local companion search used while refining multi-dimensional windows.
struct Tracker<'a> {
    model: &'a ModelSpec,
    grid: &'a GridSpec,
}

impl Tracker<'_> {
    /// Nearest feasible companion point to `center` at energy `e`, scanning a
    /// box of `LOCAL_RADIUS` steps on the global lattice.
    fn feasible_near(&self, e: f64, center: &[f64]) -> Result<Option<Vec<f64>>> {
        let rest = &self.grid.axes[1..];
        if rest.is_empty() {
            let ok = self.feasible(&[e])?;
            return Ok(ok.then(Vec::new));
        }
        let ranges: Vec<(i64, i64, i64)> = rest
            .iter()
            .zip(center)
            .map(|(a, &c)| {
                let ci = ((c - a.lo) / a.step).round() as i64;
                let lo = (ci - LOCAL_RADIUS as i64).max(0);
                let hi = (ci + LOCAL_RADIUS as i64).min(a.len() as i64 - 1);
                (ci, lo, hi)
            })
            .collect();
        let mut offsets: Vec<Vec<i64>> = vec![Vec::new()];
        for &(_, lo, hi) in &ranges {
            offsets = offsets
                .into_iter()
                .flat_map(|p| {
                    (lo..=hi).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        offsets.sort_by_key(|idx| {
            let d: i64 = idx.iter().zip(&ranges).map(|(v, (c, _, _))| (v - c).pow(2)).sum();
            (d, idx.clone())
        });
        for idx in offsets {
            let mut coords = vec![e];
            coords.extend(idx.iter().zip(rest).map(|(&v, a)| a.value(v as usize)));
            if self.feasible(&coords)? {
                return Ok(Some(coords[1..].to_vec()));
            }
        }
        Ok(None)
    }

    fn feasible(&self, coords: &[f64]) -> Result<bool> {
        let p = self.model.point_from_coords(coords)?;
        match evaluate_point(self.model, &p, self.grid.k, self.grid.tol_scale, self.grid.scaling) {
            Ok(ev) => Ok(ev.verdict.feasible),
            Err(e) if is_skip(&e) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Bisects between a feasible `inner` and infeasible `outer` energy.
    fn bisect(&self, mut inner: f64, mut outer: f64, mut center: Vec<f64>, iters: u32) -> Result<(f64, f64, Vec<f64>)> {
        for _ in 0..iters {
            let mid = 0.5 * (inner + outer);
            if mid == inner || mid == outer {
                break;
            }
            match self.feasible_near(mid, &center)? {
                Some(c) => {
                    inner = mid;
                    center = c;
                }
                None => outer = mid,
            }
        }
        Ok((inner, outer, center))
    }
}

/// Sharpens the edges of a window by bisection between its outermost feasible
/// and innermost infeasible samples.
pub fn refine_window(model: &ModelSpec, window: &FeasibleWindow, grid: &GridSpec) -> Result<FeasibleWindow> {
    grid.validate(model)?;
    if !model.id().energy_is_axis() {
        return Err(BootError::Unsupported(model.id().to_string()));
    }
    let witness_ok = match evaluate_point(model, &window.witness, grid.k, grid.tol_scale, grid.scaling) {
        Ok(ev) => ev.verdict.feasible,
        Err(e) if is_skip(&e) => false,
        Err(e) => return Err(e),
    };
    if !witness_ok {
        return Err(BootError::WitnessLost {
            energy: window.witness.e,
        });
    }
    let tracker = Tracker { model, grid };
    let mut out = window.clone();
    out.k = grid.k;
    if let Some(below) = window.below {
        let (inner, outer, center) =
            tracker.bisect(window.e_lo, below, window.lo_point.free_moments.clone(), grid.refine_iters)?;
        out.e_lo = inner;
        out.below = Some(outer);
        out.lo_point = SearchPoint::new(inner, center);
    }
    if let Some(above) = window.above {
        let (inner, outer, center) =
            tracker.bisect(window.e_hi, above, window.hi_point.free_moments.clone(), grid.refine_iters)?;
        out.e_hi = inner;
        out.above = Some(outer);
        out.hi_point = SearchPoint::new(inner, center);
    }
    Ok(out)
}

/// Scan followed by `refine_window` on every window.
pub fn scan_refined(model: &ModelSpec, grid: &GridSpec) -> Result<ScanResult> {
    let start = Instant::now();
    let mut result = scan(model, grid)?;
    result.windows = result
        .windows
        .par_iter()
        .map(|w| refine_window(model, w, grid))
        .collect::<Result<_>>()?;
    result.stats.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(result)
}

/// Lowest feasible energy over an `(x2, p2)` grid, followed by
/// [`MINIMIZE_ROUNDS`] rounds on shrunken grids around the argmin.
pub fn minimize_energy_feasible(model: &ModelSpec, grid: &GridSpec) -> Result<MinEnergy> {
    minimize_energy_feasible_with(model, grid, MINIMIZE_ROUNDS)
}

pub fn minimize_energy_feasible_with(model: &ModelSpec, grid: &GridSpec, rounds: usize) -> Result<MinEnergy> {
    if model.id().energy_is_axis() {
        return Err(BootError::Unsupported(model.id().to_string()));
    }
    let coarse = scan(model, grid)?;
    let mut best = coarse.min_energy.ok_or_else(|| BootError::NoFeasiblePoint {
        bounds: grid.bounds_text(),
    })?;
    let mut current = grid.clone();
    for round in 1..=rounds {
        let axes = current
            .axes
            .iter()
            .zip(&grid.axes)
            .zip(&best.coords)
            .map(|((a, orig), &c)| {
                let half = MINIMIZE_HALF_WIDTH * a.step;
                let step = a.step / MINIMIZE_SHRINK;
                let lo = (c - half).max(orig.lo);
                let hi = (c + half).min(orig.hi);
                Axis::new(a.name.clone(), lo, hi.max(lo + step), step)
            })
            .collect();
        current = GridSpec { axes, ..current };
        if let Some(m) = scan(model, &current)?.min_energy {
            if m.e_min <= best.e_min {
                best = m;
            }
        }
        best.rounds = round;
    }
    Ok(best)
}
