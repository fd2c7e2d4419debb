//! Basin-of-attraction grids over the `ζ`-plane.
//!
//! Each cell center is turned into the initial state `ρ(ζ, λ)` (a pure state
//! when `λ = 1`), iterated with the protocol, and labelled by the first stable
//! cycle it approaches. Labels are deterministic: rows are processed in
//! parallel but every cell is written by exactly one worker and the
//! classification of a cell never depends on another.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fano::{self, CycleSearch, StabilityReport};
use crate::protocol::{protocol_step, LocalUnitary};
use crate::qstate::{self, state_from_zeta, werner_mix, DensityMatrix2Q, PureState2Q, RiemannPoint};

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_ITERS_PURE: usize = 200;
pub const DEFAULT_MAX_ITERS_MIXED: usize = 400;
/// Purity above which a stable cycle counts as a genuine mixed attractor
/// rather than the maximally mixed state.
const MIXED_PURITY_FLOOR: f64 = 0.25 + 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasinLabel {
    Bell,
    SeparableCycle,
    MixedCycle,
    Unresolved,
}

impl BasinLabel {
    pub const ALL: [BasinLabel; 4] = [
        BasinLabel::Bell,
        BasinLabel::SeparableCycle,
        BasinLabel::MixedCycle,
        BasinLabel::Unresolved,
    ];

    pub fn rgb(self) -> [u8; 3] {
        match self {
            BasinLabel::Bell => [0, 0, 255],
            BasinLabel::SeparableCycle => [0, 160, 0],
            BasinLabel::MixedCycle => [255, 220, 0],
            BasinLabel::Unresolved => [0, 0, 0],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BasinLabel::Bell => "bell",
            BasinLabel::SeparableCycle => "separable",
            BasinLabel::MixedCycle => "mixed",
            BasinLabel::Unresolved => "unresolved",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        BasinLabel::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for BasinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why a cell ended up [`BasinLabel::Unresolved`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    /// The orbit reached `𝟙/4`, an exact fixed point that carries no label.
    MaximallyMixed,
    /// No target cycle was reached within the iteration budget.
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub label: BasinLabel,
    /// Iteration at which the target was first approached (confirmed one period later).
    pub steps: usize,
    pub diagnostic: Option<Diagnostic>,
}

impl Classification {
    fn unresolved(steps: usize, diagnostic: Diagnostic) -> Self {
        Classification {
            label: BasinLabel::Unresolved,
            steps,
            diagnostic: Some(diagnostic),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub width: usize,
    pub height: usize,
    pub lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// Classify four sub-cell points per cell and keep the majority label.
    pub supersample: bool,
}

impl GridSpec {
    /// The `[-2, 2]²` window with default budget and tolerance for `lambda`.
    pub fn square(size: usize, lambda: f64) -> Self {
        GridSpec {
            re_min: -2.0,
            re_max: 2.0,
            im_min: -2.0,
            im_max: 2.0,
            width: size,
            height: size,
            lambda,
            max_iters: default_max_iters(lambda),
            tol: DEFAULT_TOL,
            supersample: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::param("viewport", "need finite re_min < re_max and im_min < im_max"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::param("resolution", "width and height must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be positive"));
        }
        qstate::check_lambda(self.lambda)
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    /// Center of column `i`, row `j` (row 0 at `im_max`).
    ///
    /// Written so that mirrored cells of a symmetric window get exactly
    /// negated coordinates.
    pub fn cell_center(&self, i: usize, j: usize) -> RiemannPoint {
        let re = axis_point(self.re_min, self.re_max, i, self.width);
        let im = axis_point(self.im_max, self.im_min, j, self.height);
        RiemannPoint::new(re, im)
    }

    fn sample_points(&self, i: usize, j: usize) -> Vec<RiemannPoint> {
        if !self.supersample {
            return vec![self.cell_center(i, j)];
        }
        let mut pts = Vec::with_capacity(4);
        for dj in 0..2 {
            for di in 0..2 {
                let re = axis_point(self.re_min, self.re_max, 2 * i + di, 2 * self.width);
                let im = axis_point(self.im_max, self.im_min, 2 * j + dj, 2 * self.height);
                pts.push(RiemannPoint::new(re, im));
            }
        }
        pts
    }
}

pub fn default_max_iters(lambda: f64) -> usize {
    if lambda >= 1.0 {
        DEFAULT_MAX_ITERS_PURE
    } else {
        DEFAULT_MAX_ITERS_MIXED
    }
}

fn axis_point(start: f64, end: f64, k: usize, n: usize) -> f64 {
    let a = (2 * n - 2 * k - 1) as f64;
    let b = (2 * k + 1) as f64;
    (start * a + end * b) / (2 * n) as f64
}

/// Parses `re_min,re_max,im_min,im_max`.
pub fn parse_viewport(s: &str) -> Result<[f64; 4]> {
    let parse_err = |reason: &str| Error::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(parse_err("expected four comma-separated numbers"));
    }
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = f64::from_str(p).map_err(|_| parse_err("not a number"))?;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Targets {
    Pure(Vec<(BasinLabel, Vec<PureState2Q>)>),
    Mixed(Vec<(Option<BasinLabel>, Vec<DensityMatrix2Q>)>),
}

/// Attractor targets for one noise level, built once and reused for every cell.
#[derive(Debug, Clone)]
pub struct Classifier {
    lambda: f64,
    max_iters: usize,
    tol: f64,
    targets: Targets,
    unitary: LocalUnitary,
}

impl Classifier {
    /// At `λ = 1` the targets are the analytic pure attractors; below that they
    /// are the stable cycles returned by a default [`CycleSearch`] that also
    /// seeds at `lambda` itself.
    pub fn new(lambda: f64, max_iters: usize, tol: f64) -> Result<Self> {
        qstate::check_lambda(lambda)?;
        if lambda >= 1.0 {
            return Self::build(lambda, max_iters, tol, None);
        }
        let mut search = CycleSearch::default();
        if lambda > 0.0 && !search.lambdas.contains(&lambda) {
            search.lambdas.push(lambda);
        }
        let found = fano::find_mixed_cycles(&search)?;
        Self::build(lambda, max_iters, tol, Some(&found.cycles))
    }

    /// Uses the given cycle reports as targets (only the stable ones count).
    pub fn with_cycles(lambda: f64, max_iters: usize, tol: f64, cycles: &[StabilityReport]) -> Result<Self> {
        qstate::check_lambda(lambda)?;
        Self::build(lambda, max_iters, tol, (lambda < 1.0).then_some(cycles))
    }

    fn build(lambda: f64, max_iters: usize, tol: f64, cycles: Option<&[StabilityReport]>) -> Result<Self> {
        if max_iters == 0 {
            return Err(Error::param("max_iters", "must be positive"));
        }
        if !(tol > 0.0) {
            return Err(Error::param("tol", "must be positive"));
        }
        let targets = match cycles {
            None => Targets::Pure(vec![
                (BasinLabel::Bell, vec![PureState2Q::phi_plus()]),
                (
                    BasinLabel::SeparableCycle,
                    vec![PureState2Q::basis(0), PureState2Q::plus_plus()],
                ),
            ]),
            Some(reports) => {
                let mut t: Vec<(Option<BasinLabel>, Vec<DensityMatrix2Q>)> = reports
                    .iter()
                    .filter(|r| r.stable)
                    .map(|r| (cycle_label(&r.cycle), r.cycle.clone()))
                    .collect();
                let mm = DensityMatrix2Q::maximally_mixed();
                if !t.iter().any(|(_, c)| c.len() == 1 && qstate::trace_distance(&c[0], &mm) < 1e-9) {
                    t.push((None, vec![mm]));
                }
                Targets::Mixed(t)
            }
        };
        Ok(Classifier {
            lambda,
            max_iters,
            tol,
            targets,
            unitary: LocalUnitary::hadamard(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Labels of the mixed-state targets in matching order (`None` marks `𝟙/4`).
    pub fn target_labels(&self) -> Vec<Option<BasinLabel>> {
        match &self.targets {
            Targets::Pure(t) => t.iter().map(|(l, _)| Some(*l)).collect(),
            Targets::Mixed(t) => t.iter().map(|(l, _)| *l).collect(),
        }
    }

    pub fn classify(&self, zeta: RiemannPoint) -> Classification {
        match &self.targets {
            Targets::Pure(t) => self.run(state_from_zeta(zeta), t, |a, b, tol| {
                // 1 - |<a|b>|² < tol² is the pure-state trace distance test.
                1.0 - a.inner(b).norm_sqr() < tol * tol
            }),
            Targets::Mixed(t) => match werner_mix(zeta, self.lambda) {
                Ok(rho) => self.run(rho, t, qstate::trace_distance_below),
                Err(_) => Classification::unresolved(0, Diagnostic::NoConvergence),
            },
        }
    }

    fn run<S, L>(&self, start: S, targets: &[(L, Vec<S>)], close: impl Fn(&S, &S, f64) -> bool) -> Classification
    where
        S: crate::protocol::ProtocolState,
        L: Copy + Into<Option<BasinLabel>>,
    {
        let step = |s: &S| protocol_step(s, &self.unitary).map(|o| o.state);
        let mut x = start;
        for t in 0..=self.max_iters {
            let hit = targets.iter().find_map(|(label, members)| {
                members
                    .iter()
                    .position(|m| close(&x, m, self.tol))
                    .map(|k| (*label, members, k))
            });
            if let Some((label, members, k)) = hit {
                let p = members.len();
                if t + p > self.max_iters {
                    break;
                }
                let mut y = x.clone();
                for _ in 0..p {
                    match step(&y) {
                        Ok(next) => y = next,
                        Err(_) => return Classification::unresolved(t, Diagnostic::NoConvergence),
                    }
                }
                if close(&y, &members[k], self.tol) {
                    return match label.into() {
                        Some(label) => Classification {
                            label,
                            steps: t,
                            diagnostic: None,
                        },
                        None => Classification::unresolved(t, Diagnostic::MaximallyMixed),
                    };
                }
            }
            if t == self.max_iters {
                break;
            }
            match step(&x) {
                Ok(next) => x = next,
                Err(_) => return Classification::unresolved(t, Diagnostic::NoConvergence),
            }
        }
        Classification::unresolved(self.max_iters, Diagnostic::NoConvergence)
    }
}

/// Label of a stable cycle by its physical content; `None` for `𝟙/4`.
pub fn cycle_label(cycle: &[DensityMatrix2Q]) -> Option<BasinLabel> {
    let pure = cycle.iter().all(|m| (qstate::purity(m) - 1.0).abs() < 1e-8);
    if pure {
        let entangled = cycle.iter().all(|m| (qstate::reduced_entropy(m) - 1.0).abs() < 1e-6);
        let separable = cycle.iter().all(|m| qstate::reduced_entropy(m) < 1e-6);
        if entangled {
            return Some(BasinLabel::Bell);
        }
        if separable {
            return Some(BasinLabel::SeparableCycle);
        }
    }
    if cycle.iter().any(|m| qstate::purity(m) > MIXED_PURITY_FLOOR) {
        Some(BasinLabel::MixedCycle)
    } else {
        None
    }
}

/// One-off classification; builds a fresh [`Classifier`] (and, for `λ < 1`,
/// runs the cycle search). Use a shared classifier for many points.
pub fn classify_point(zeta: RiemannPoint, lambda: f64, max_iters: usize, tol: f64) -> Result<Classification> {
    Ok(Classifier::new(lambda, max_iters, tol)?.classify(zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LabelCounts {
    pub cells: usize,
    pub bell: usize,
    pub separable: usize,
    pub mixed: usize,
    pub unresolved: usize,
}

impl LabelCounts {
    pub fn get(&self, label: BasinLabel) -> usize {
        match label {
            BasinLabel::Bell => self.bell,
            BasinLabel::SeparableCycle => self.separable,
            BasinLabel::MixedCycle => self.mixed,
            BasinLabel::Unresolved => self.unresolved,
        }
    }

    pub fn fraction(&self, label: BasinLabel) -> f64 {
        self.get(label) as f64 / self.cells.max(1) as f64
    }
}

impl fmt::Display for LabelCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cells={} bell={} separable={} mixed={} unresolved={}",
            self.cells, self.bell, self.separable, self.mixed, self.unresolved
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    pub spec: GridSpec,
    /// Row-major from the top-left cell.
    pub labels: Vec<BasinLabel>,
    pub steps: Vec<u32>,
    /// Cells whose orbit ended on `𝟙/4`.
    pub maximally_mixed: usize,
}

impl BasinGrid {
    /// Builds a grid from explicit labels, with all steps zero.
    pub fn from_labels(spec: GridSpec, labels: Vec<BasinLabel>) -> Result<Self> {
        if labels.len() != spec.cells() {
            return Err(Error::param("labels", "length must equal width*height"));
        }
        let steps = vec![0; labels.len()];
        Ok(BasinGrid {
            spec,
            labels,
            steps,
            maximally_mixed: 0,
        })
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    pub fn height(&self) -> usize {
        self.spec.height
    }

    pub fn label(&self, i: usize, j: usize) -> BasinLabel {
        self.labels[j * self.spec.width + i]
    }

    pub fn counts(&self) -> LabelCounts {
        let mut c = LabelCounts {
            cells: self.labels.len(),
            ..Default::default()
        };
        for l in &self.labels {
            match l {
                BasinLabel::Bell => c.bell += 1,
                BasinLabel::SeparableCycle => c.separable += 1,
                BasinLabel::MixedCycle => c.mixed += 1,
                BasinLabel::Unresolved => c.unresolved += 1,
            }
        }
        c
    }

    pub fn write_ppm<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&render_ppm(self))?;
        Ok(())
    }

    /// CSV dump with header `re,im,label,steps`, one row per cell.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(w);
        writeln!(w, "re,im,label,steps")?;
        for j in 0..self.height() {
            for i in 0..self.width() {
                let z = self.spec.cell_center(i, j);
                let c = z.finite().unwrap_or_default();
                let k = j * self.width() + i;
                writeln!(w, "{:.8e},{:.8e},{},{}", c.re, c.im, self.labels[k], self.steps[k])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Classifies every cell using a rayon pool of `threads` workers (`None` uses the global pool).
pub fn compute_basin_with_threads(spec: &GridSpec, threads: Option<usize>) -> Result<BasinGrid> {
    spec.validate()?;
    match threads {
        None => compute_in_current_pool(spec),
        Some(0) => Err(Error::param("threads", "must be positive")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter {
                    name: "threads",
                    reason: e.to_string(),
                })?;
            pool.install(|| compute_in_current_pool(spec))
        }
    }
}

pub fn compute_basin(spec: &GridSpec) -> Result<BasinGrid> {
    compute_basin_with_threads(spec, None)
}

/// Same as [`compute_basin`] but with a prepared classifier, whose λ,
/// iteration budget and tolerance override the spec's.
pub fn compute_basin_with(spec: &GridSpec, classifier: &Classifier) -> Result<BasinGrid> {
    spec.validate()?;
    let w = spec.width;
    let mut cells = vec![(BasinLabel::Unresolved, 0u32, false); spec.cells()];
    cells.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        for (i, slot) in row.iter_mut().enumerate() {
            let results: Vec<Classification> = spec
                .sample_points(i, j)
                .into_iter()
                .map(|z| classifier.classify(z))
                .collect();
            let c = majority(&results);
            *slot = (
                c.label,
                c.steps as u32,
                c.diagnostic == Some(Diagnostic::MaximallyMixed),
            );
        }
    });
    Ok(BasinGrid {
        spec: *spec,
        labels: cells.iter().map(|c| c.0).collect(),
        steps: cells.iter().map(|c| c.1).collect(),
        maximally_mixed: cells.iter().filter(|c| c.2).count(),
    })
}

fn compute_in_current_pool(spec: &GridSpec) -> Result<BasinGrid> {
    let classifier = Classifier::new(spec.lambda, spec.max_iters, spec.tol)?;
    compute_basin_with(spec, &classifier)
}

/// Most frequent label, ties broken in [`BasinLabel::ALL`] order; steps is the
/// smallest among samples carrying that label.
fn majority(results: &[Classification]) -> Classification {
    let best = BasinLabel::ALL
        .iter()
        .copied()
        .max_by_key(|l| {
            let n = results.iter().filter(|r| r.label == *l).count();
            (n, std::cmp::Reverse(l.code()))
        })
        .unwrap_or(BasinLabel::Unresolved);
    *results
        .iter()
        .filter(|r| r.label == best)
        .min_by_key(|r| r.steps)
        .unwrap_or(&results[0])
}

/// Binary PPM (P6, maxval 255), row 0 at the top.
pub fn render_ppm(grid: &BasinGrid) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", grid.width(), grid.height());
    let mut out = Vec::with_capacity(header.len() + 3 * grid.labels.len());
    out.extend_from_slice(header.as_bytes());
    for l in &grid.labels {
        out.extend_from_slice(&l.rgb());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub dimension: f64,
    pub r2: f64,
    /// Number of box sizes used in the fit.
    pub scales: usize,
}

/// Cells with a 4-neighbor of a different label.
pub fn boundary_mask(grid: &BasinGrid) -> Vec<bool> {
    let (w, h) = (grid.width(), grid.height());
    let mut mask = vec![false; w * h];
    for j in 0..h {
        for i in 0..w {
            let l = grid.label(i, j);
            let differs = (i > 0 && grid.label(i - 1, j) != l)
                || (i + 1 < w && grid.label(i + 1, j) != l)
                || (j > 0 && grid.label(i, j - 1) != l)
                || (j + 1 < h && grid.label(i, j + 1) != l);
            mask[j * w + i] = differs;
        }
    }
    mask
}

/// Box-counting dimension of the label boundary.
///
/// Box sides run over powers of two from one cell up to an eighth of the
/// shorter grid side; the estimate is the least-squares slope of
/// `log N(s)` against `log(1/s)`.
pub fn boundary_dimension(grid: &BasinGrid) -> Result<DimensionEstimate> {
    let first = grid.labels.first().copied();
    if grid.labels.iter().all(|l| Some(*l) == first) {
        return Err(Error::DegenerateGrid);
    }
    let (w, h) = (grid.width(), grid.height());
    let mask = boundary_mask(grid);
    let max_side = (w.min(h) / 8).max(1);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut s = 1;
    while s <= max_side {
        let (bw, bh) = (w.div_ceil(s), h.div_ceil(s));
        let mut occupied = vec![false; bw * bh];
        for j in 0..h {
            for i in 0..w {
                if mask[j * w + i] {
                    occupied[(j / s) * bw + i / s] = true;
                }
            }
        }
        let n = occupied.iter().filter(|b| **b).count();
        xs.push(-(s as f64).ln());
        ys.push((n as f64).ln());
        s *= 2;
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateGrid);
    }
    let (slope, r2) = least_squares(&xs, &ys);
    Ok(DimensionEstimate {
        dimension: slope,
        r2,
        scales: xs.len(),
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Number of 4-connected regions carrying `label`.
pub fn connected_components(grid: &BasinGrid, label: BasinLabel) -> usize {
    let (w, h) = (grid.width(), grid.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if seen[start] || grid.labels[start] != label {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % w, k / w);
            let mut visit = |n: usize| {
                if !seen[n] && grid.labels[n] == label {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(k - 1);
            }
            if i + 1 < w {
                visit(k + 1);
            }
            if j > 0 {
                visit(k - w);
            }
            if j + 1 < h {
                visit(k + w);
            }
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub distinct_labels: usize,
    pub labels: Vec<BasinLabel>,
    /// Smallest distance between two sampled points with different labels,
    /// `None` when every sample got the same label.
    pub min_separation_with_distinct_labels: Option<f64>,
}

/// Classifies `samples` points drawn uniformly from the disk `|ζ - center| < radius`.
pub fn sensitivity_probe(
    center: RiemannPoint,
    radius: f64,
    lambda: f64,
    samples: usize,
    seed: u64,
) -> Result<SensitivityReport> {
    let c = center
        .finite()
        .ok_or_else(|| Error::param("center", "must be finite"))?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::param("radius", "must be positive"));
    }
    if samples < 2 {
        return Err(Error::param("samples", "need at least two"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            c + num_complex::Complex64::from_polar(r, phi)
        })
        .collect();
    let classifier = Classifier::new(lambda, default_max_iters(lambda), DEFAULT_TOL)?;
    let labels: Vec<BasinLabel> = points
        .par_iter()
        .map(|z| classifier.classify(RiemannPoint::from_complex(*z)).label)
        .collect();
    let mut distinct: Vec<BasinLabel> = labels.clone();
    distinct.sort();
    distinct.dedup();
    let mut best: Option<f64> = None;
    for a in 0..samples {
        for b in a + 1..samples {
            if labels[a] != labels[b] {
                let d = (points[a] - points[b]).norm();
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
    }
    Ok(SensitivityReport {
        distinct_labels: distinct.len(),
        labels: distinct,
        min_separation_with_distinct_labels: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexdyn::{self, Parity};

    fn pure() -> Classifier {
        Classifier::new(1.0, DEFAULT_MAX_ITERS_PURE, DEFAULT_TOL).unwrap()
    }

    fn spec(width: usize, height: usize) -> GridSpec {
        GridSpec {
            width,
            height,
            ..GridSpec::square(1, 1.0)
        }
    }

    #[test]
    fn pure_examples() {
        let c = pure();
        let one = c.classify(RiemannPoint::ONE);
        assert_eq!((one.label, one.steps), (BasinLabel::Bell, 0));
        assert_eq!(c.classify(RiemannPoint::real(0.3)).label, BasinLabel::SeparableCycle);
        assert_eq!(c.classify(RiemannPoint::real(2.0)).label, BasinLabel::SeparableCycle);
        assert_eq!(c.classify(RiemannPoint::Infinity).label, BasinLabel::SeparableCycle);
        assert_eq!(c.classify(RiemannPoint::real(-1.0)).label, BasinLabel::Bell);
    }

    #[test]
    fn zero_lambda_is_diagnosed() {
        let c = Classifier::with_cycles(0.0, 50, DEFAULT_TOL, &[]).unwrap();
        let out = c.classify(RiemannPoint::new(0.4, 0.7));
        assert_eq!(out.label, BasinLabel::Unresolved);
        assert_eq!(out.diagnostic, Some(Diagnostic::MaximallyMixed));
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn unresolved_when_budget_is_too_small() {
        let c = Classifier::new(1.0, 1, DEFAULT_TOL).unwrap();
        let out = c.classify(RiemannPoint::real(0.6));
        assert_eq!(out.label, BasinLabel::Unresolved);
        assert_eq!(out.diagnostic, Some(Diagnostic::NoConvergence));
    }

    #[test]
    fn agrees_with_reduced_parity() {
        let c = pure();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let z = RiemannPoint::new(rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5));
            let parity = complexdyn::iterate_reduced(z, 200, 1e-6).unwrap().label;
            let expect = match parity {
                Parity::EvenZero => BasinLabel::SeparableCycle,
                Parity::OddZero => BasinLabel::Bell,
                Parity::Unresolved => continue,
            };
            assert_eq!(c.classify(z).label, expect, "ζ = {z}");
        }
    }

    #[test]
    fn cell_centers_are_mirror_exact() {
        let s = spec(7, 5);
        for j in 0..5 {
            for i in 0..7 {
                let a = s.cell_center(i, j).finite().unwrap();
                let b = s.cell_center(6 - i, 4 - j).finite().unwrap();
                assert_eq!(a, -b);
            }
        }
        assert_eq!(s.cell_center(3, 2), RiemannPoint::ZERO);
        assert!(s.cell_center(0, 0).finite().unwrap().im > 0.0);
    }

    #[test]
    fn viewport_parsing() {
        assert_eq!(parse_viewport("-2, 2,-1.5,1.5").unwrap(), [-2.0, 2.0, -1.5, 1.5]);
        assert!(parse_viewport("1,2,3").is_err());
        assert!(parse_viewport("a,2,3,4").is_err());
        let mut s = spec(2, 2);
        s.re_min = 3.0;
        assert!(s.validate().is_err());
        assert!(spec(0, 2).validate().is_err());
    }

    #[test]
    fn ppm_bytes() {
        let g = BasinGrid::from_labels(spec(1, 1), vec![BasinLabel::Bell]).unwrap();
        assert_eq!(render_ppm(&g), b"P6\n1 1\n255\n\x00\x00\xff".to_vec());
        let g = BasinGrid::from_labels(spec(2, 1), vec![BasinLabel::Bell, BasinLabel::MixedCycle]).unwrap();
        let bytes = render_ppm(&g);
        assert_eq!(&bytes[bytes.len() - 6..], &[0x00, 0x00, 0xFF, 0xFF, 0xDC, 0x00]);
        assert!(bytes.starts_with(b"P6\n2 1\n255\n"));
    }

    #[test]
    fn csv_layout() {
        let g = compute_basin(&spec(2, 2)).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "re,im,label,steps");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "-1.00000000e0,1.00000000e0,bell,10");
    }

    #[test]
    fn single_cell_summary() {
        let mut s = spec(1, 1);
        s.re_min = 0.5;
        s.re_max = 1.5;
        s.im_min = -0.5;
        s.im_max = 0.5;
        let g = compute_basin(&s).unwrap();
        assert_eq!(g.counts().to_string(), "cells=1 bell=1 separable=0 mixed=0 unresolved=0");
    }

    #[test]
    fn small_grid_is_symmetric_and_thread_independent() {
        let s = spec(40, 40);
        let a = compute_basin_with_threads(&s, Some(1)).unwrap();
        let b = compute_basin_with_threads(&s, Some(3)).unwrap();
        assert_eq!(a, b);
        for j in 0..40 {
            for i in 0..40 {
                assert_eq!(a.label(i, j), a.label(39 - i, j));
                assert_eq!(a.label(i, j), a.label(i, 39 - j));
            }
        }
    }

    #[test]
    fn supersampling_keeps_symmetry() {
        let s = GridSpec {
            supersample: true,
            ..spec(16, 16)
        };
        let g = compute_basin(&s).unwrap();
        for j in 0..16 {
            for i in 0..16 {
                assert_eq!(g.label(i, j), g.label(15 - i, 15 - j));
            }
        }
    }

    #[test]
    fn box_counting_fixtures() {
        let n = 512;
        let half: Vec<_> = (0..n * n)
            .map(|k| if k % n < n / 2 { BasinLabel::Bell } else { BasinLabel::SeparableCycle })
            .collect();
        let d = boundary_dimension(&BasinGrid::from_labels(spec(n, n), half).unwrap()).unwrap();
        assert!((d.dimension - 1.0).abs() < 0.05, "{d:?}");
        let checker: Vec<_> = (0..n * n)
            .map(|k| if (k % n + k / n) % 2 == 0 { BasinLabel::Bell } else { BasinLabel::SeparableCycle })
            .collect();
        let d = boundary_dimension(&BasinGrid::from_labels(spec(n, n), checker).unwrap()).unwrap();
        assert!((d.dimension - 2.0).abs() < 0.1, "{d:?}");
        let flat = BasinGrid::from_labels(spec(4, 4), vec![BasinLabel::Bell; 16]).unwrap();
        assert!(matches!(boundary_dimension(&flat), Err(Error::DegenerateGrid)));
    }

    #[test]
    fn component_counting() {
        use BasinLabel::{Bell as B, SeparableCycle as S};
        let g = BasinGrid::from_labels(spec(4, 3), vec![B, S, B, B, S, S, S, S, B, S, S, B]).unwrap();
        assert_eq!(connected_components(&g, B), 4);
        assert_eq!(connected_components(&g, S), 1);
    }

    #[test]
    fn sensitivity_examples() {
        let zero = sensitivity_probe(RiemannPoint::ZERO, 0.1, 1.0, 200, 1).unwrap();
        assert_eq!(zero.labels, vec![BasinLabel::SeparableCycle]);
        assert_eq!(zero.min_separation_with_distinct_labels, None);
        let one = sensitivity_probe(RiemannPoint::ONE, 0.05, 1.0, 200, 1).unwrap();
        assert_eq!(one.labels, vec![BasinLabel::Bell]);
        let za = complexdyn::compute_constants().zeta_a;
        let edge = sensitivity_probe(RiemannPoint::real(za), 1e-3, 1.0, 200, 1).unwrap();
        assert!(edge.distinct_labels >= 2);
        assert!(sensitivity_probe(RiemannPoint::ZERO, 0.0, 1.0, 10, 1).is_err());
        assert_eq!(
            sensitivity_probe(RiemannPoint::ONE, 0.5, 1.0, 50, 9).unwrap(),
            sensitivity_probe(RiemannPoint::ONE, 0.5, 1.0, 50, 9).unwrap()
        );
    }

    #[test]
    fn mixed_labels_of_known_cycles() {
        assert_eq!(cycle_label(&[PureState2Q::phi_plus().density()]), Some(BasinLabel::Bell));
        assert_eq!(
            cycle_label(&[PureState2Q::basis(0).density(), PureState2Q::plus_plus().density()]),
            Some(BasinLabel::SeparableCycle)
        );
        assert_eq!(cycle_label(&[fano::correlated_mixture()]), Some(BasinLabel::MixedCycle));
        assert_eq!(cycle_label(&[DensityMatrix2Q::maximally_mixed()]), None);
    }
}
