//! The reduced one-variable dynamics on the Riemann sphere.
//!
//! For states `|00⟩ + ζ|11⟩` one protocol round produces
//! `|00⟩ + |11⟩ + f(ζ)(|01⟩ + |10⟩)` and two rounds give back the family with
//! parameter `g(ζ) = f(f(ζ))`, where
//!
//! ```text
//! f(ζ) = (1 - ζ²) / (1 + ζ²),      g(ζ) = 2ζ² / (1 + ζ⁴).
//! ```
//!
//! `f` has critical points `0` and `∞` and a single superattracting 2-cycle
//! `{0, 1}`. Orbits that reach `0` at an even index correspond to the separable
//! cycle of the state dynamics, orbits that reach it at an odd index to `Φ+`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::RiemannPoint;

/// Beyond this modulus evaluations switch to the chart `w = 1/ζ`.
pub const CHART_SWITCH: f64 = 1e6;
pub const CLASSIFY_TOL: f64 = 1e-9;
pub const SUPERATTRACTING_TOL: f64 = 1e-12;
pub const CYCLE_CLOSURE_TOL: f64 = 1e-10;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const MAX_CYCLE_PERIOD: usize = 6;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `f(ζ) = (1-ζ²)/(1+ζ²)`; `f(∞) = -1`, `f(±i) = ∞`.
pub fn eval_f(z: RiemannPoint) -> RiemannPoint {
    match z {
        RiemannPoint::Infinity => RiemannPoint::real(-1.0),
        RiemannPoint::Finite(z) if z.norm() > CHART_SWITCH => {
            let w2 = z.inv().powi(2);
            RiemannPoint::Finite((w2 - ONE) / (w2 + ONE))
        }
        RiemannPoint::Finite(z) => {
            let z2 = z * z;
            let den = ONE + z2;
            if den.norm_sqr() == 0.0 {
                RiemannPoint::Infinity
            } else {
                RiemannPoint::from_complex((ONE - z2) / den)
            }
        }
    }
}

/// `g(ζ) = 2ζ²/(1+ζ⁴)`; `g(∞) = 0`.
pub fn eval_g(z: RiemannPoint) -> RiemannPoint {
    match z {
        RiemannPoint::Infinity => RiemannPoint::ZERO,
        RiemannPoint::Finite(z) if z.norm() > CHART_SWITCH => {
            let w2 = z.inv().powi(2);
            RiemannPoint::Finite(w2 * 2.0 / (w2 * w2 + ONE))
        }
        RiemannPoint::Finite(z) => {
            let z2 = z * z;
            let den = ONE + z2 * z2;
            if den.norm_sqr() == 0.0 {
                RiemannPoint::Infinity
            } else {
                RiemannPoint::from_complex(z2 * 2.0 / den)
            }
        }
    }
}

/// `f'(ζ) = -4ζ/(1+ζ²)²`, defined away from the poles `±i` and `∞`.
pub fn derivative_f(z: RiemannPoint) -> Result<Complex64> {
    let Some(z) = z.finite() else {
        return Err(Error::Pole(z.to_string()));
    };
    let den = (ONE + z * z).powi(2);
    let d = z * -4.0 / den;
    if den.norm_sqr() == 0.0 || !(d.re.is_finite() && d.im.is_finite()) {
        return Err(Error::Pole(RiemannPoint::Finite(z).to_string()));
    }
    Ok(d)
}

pub fn critical_points() -> Vec<RiemannPoint> {
    vec![RiemannPoint::ZERO, RiemannPoint::Infinity]
}

/// `[z, f(z), …, f^(len-1)(z)]`.
pub fn orbit(z: RiemannPoint, len: usize) -> Vec<RiemannPoint> {
    std::iter::successors(Some(z), |&p| Some(eval_f(p)))
        .take(len)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl CycleKind {
    pub fn from_multiplier(m: Complex64) -> Self {
        let a = m.norm();
        if a < SUPERATTRACTING_TOL {
            CycleKind::Superattracting
        } else if (a - 1.0).abs() <= CLASSIFY_TOL {
            CycleKind::Indifferent
        } else if a < 1.0 {
            CycleKind::Attracting
        } else {
            CycleKind::Repelling
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, CycleKind::Superattracting | CycleKind::Attracting)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub period: usize,
    pub points: Vec<RiemannPoint>,
    pub multiplier: Complex64,
    pub classification: CycleKind,
}

impl CycleReport {
    /// Builds a report for the orbit of `start`, checking that it closes after `period` steps.
    pub fn from_orbit(start: RiemannPoint, period: usize) -> Result<Self> {
        let points = orbit(start, period);
        let back = eval_f(*points.last().expect("period ≥ 1"));
        let residual = back.chordal_distance(&start);
        if residual > CYCLE_CLOSURE_TOL {
            return Err(Error::NotACycle { residual });
        }
        let multiplier = points
            .iter()
            .map(|&p| derivative_f(p))
            .product::<Result<Complex64>>()?;
        Ok(CycleReport {
            period,
            classification: CycleKind::from_multiplier(multiplier),
            points,
            multiplier,
        })
    }

    pub fn contains(&self, z: RiemannPoint, tol: f64) -> bool {
        self.points.iter().any(|p| p.chordal_distance(&z) < tol)
    }
}

/// Residual of the fixed-point cubic `ζ³ + ζ² + ζ - 1`.
pub fn fixed_point_cubic(z: Complex64) -> Complex64 {
    ((z + ONE) * z + ONE) * z - ONE
}

fn polish_cubic_root(mut z: Complex64) -> Complex64 {
    for _ in 0..50 {
        let d = (z * 3.0 + 2.0) * z + ONE;
        let step = fixed_point_cubic(z) / d;
        z -= step;
        if step.norm() <= 1e-17 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// The three fixed points of `f`, the roots of `ζ³ + ζ² + ζ - 1 = 0`.
///
/// The real root comes first, followed by the complex pair (positive imaginary part first).
pub fn fixed_points_f() -> Result<Vec<CycleReport>> {
    let real = polish_cubic_root(Complex64::new(compute_constants().zeta_a, 0.0));
    // Deflate: ζ³+ζ²+ζ-1 = (ζ - r)(ζ² + (1+r)ζ + 1/r).
    let b = ONE + real;
    let c = real.inv();
    let disc = (b * b - c * 4.0).sqrt();
    let upper = polish_cubic_root((-b + disc) * 0.5);
    let lower = polish_cubic_root((-b - disc) * 0.5);
    let (up, down) = if upper.im >= lower.im {
        (upper, lower)
    } else {
        (lower, upper)
    };
    [real, up, down]
        .into_iter()
        .map(|z| CycleReport::from_orbit(RiemannPoint::Finite(z), 1))
        .collect()
}

/// Values and derivatives of the homogeneous pair `(P, Q)` with `f^p = P/Q`.
/// Returns `(F, F')` for `F = P - ζQ`, up to a common scale factor.
fn periodic_equation(z: Complex64, period: usize) -> (Complex64, Complex64) {
    let (mut p, mut q) = (z, ONE);
    let (mut dp, mut dq) = (ONE, Complex64::new(0.0, 0.0));
    for _ in 0..period {
        let np = q * q - p * p;
        let nq = q * q + p * p;
        let ndp = (q * dq - p * dp) * 2.0;
        let ndq = (q * dq + p * dp) * 2.0;
        let s = np.norm().max(nq.norm());
        let s = if s > 0.0 { s } else { 1.0 };
        p = np / s;
        q = nq / s;
        dp = ndp / s;
        dq = ndq / s;
    }
    (p - z * q, dp - q - z * dq)
}

fn newton_periodic(mut z: Complex64, period: usize) -> Option<Complex64> {
    for _ in 0..200 {
        let (f, df) = periodic_equation(z, period);
        if df.norm_sqr() == 0.0 {
            return None;
        }
        let step = f / df;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            // A couple of extra iterations to settle at machine precision.
            for _ in 0..2 {
                let (f, df) = periodic_equation(z, period);
                if df.norm_sqr() > 0.0 {
                    z -= f / df;
                }
            }
            return Some(z);
        }
    }
    None
}

/// Radical inverse in the given base (van der Corput / Halton component).
fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while n > 0 {
        out += (n % base) as f64 * inv;
        n /= base;
        inv /= base as f64;
    }
    out
}

/// Halton starts: `disk_starts` in `|ζ| ≤ 4` and a tenth as many in the chart around `∞`.
fn newton_starts(disk_starts: usize) -> impl Iterator<Item = Complex64> {
    let disk = (1..=disk_starts as u64).map(|n| {
        let r = 4.0 * radical_inverse(n, 2).sqrt();
        let t = std::f64::consts::TAU * radical_inverse(n, 3);
        Complex64::from_polar(r, t)
    });
    let outer = (1..=(disk_starts / 10).max(1) as u64).map(|n| {
        let r = 0.25 * radical_inverse(n, 2).sqrt();
        let t = std::f64::consts::TAU * radical_inverse(n, 3);
        Complex64::from_polar(r.max(1e-3), t).inv()
    });
    disk.chain(outer)
}

/// Number of points of exact period `p` for a degree-2 rational map.
pub fn expected_periodic_points(p: usize) -> usize {
    fn mobius(n: usize) -> i64 {
        let mut n = n;
        let mut k = 0u32;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                n /= d;
                if n.is_multiple_of(d) {
                    return 0;
                }
                k += 1;
            }
            d += 1;
        }
        if n > 1 {
            k += 1;
        }
        if k.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
    let total: i64 = (1..=p)
        .filter(|&d| p.is_multiple_of(d))
        .map(|d| mobius(p / d) * ((1i64 << d) + 1))
        .sum();
    total as usize
}

fn exact_period(z: RiemannPoint, period: usize) -> Option<usize> {
    let mut p = z;
    for k in 1..=period {
        p = eval_f(p);
        if p.chordal_distance(&z) < CLASSIFY_TOL {
            return Some(k);
        }
    }
    None
}

/// All cycles of `f` with period `1..=max_period`, found by multi-start Newton on
/// `P_p(ζ) - ζ Q_p(ζ) = 0` and deduplicated by orbit.
///
/// Fails with [`Error::NoConvergence`] when fewer distinct periodic points are
/// resolved than the degree count `Σ_{d|p} μ(p/d)(2^d + 1)` predicts.
pub fn cycles_of_f(max_period: usize) -> Result<Vec<CycleReport>> {
    if max_period == 0 || max_period > MAX_CYCLE_PERIOD {
        return Err(Error::param(
            "max_period",
            format!("{max_period} is outside 1..={MAX_CYCLE_PERIOD}"),
        ));
    }
    let mut all = Vec::new();
    for period in 1..=max_period {
        let expected = expected_periodic_points(period);
        let mut found: Vec<CycleReport> = Vec::new();
        let mut starts = 10_000;
        loop {
            for s in newton_starts(starts) {
                let Some(root) = newton_periodic(s, period) else {
                    continue;
                };
                let rp = RiemannPoint::Finite(root);
                if exact_period(rp, period) != Some(period)
                    || found.iter().any(|c| c.contains(rp, CLASSIFY_TOL))
                {
                    continue;
                }
                if let Ok(report) = CycleReport::from_orbit(rp, period) {
                    found.push(report);
                }
            }
            if found.len() * period >= expected || starts >= 160_000 {
                break;
            }
            starts *= 4;
        }
        if found.len() * period != expected {
            return Err(Error::NoConvergence(format!(
                "period {period}: resolved {} periodic points, expected {expected}",
                found.len() * period
            )));
        }
        found.sort_by(|a, b| {
            let key = |c: &CycleReport| {
                c.points
                    .iter()
                    .filter_map(|p| p.finite())
                    .map(|z| (z.re, z.im))
                    .fold((f64::INFINITY, f64::INFINITY), |m, v| if v < m { v } else { m })
            };
            key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
        });
        all.extend(found);
    }
    Ok(all)
}

/// Landmarks of the real-line basin structure.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Constants {
    /// `(17 + 3√33)^(1/3)`.
    pub a: f64,
    /// Repelling real fixed point of `f`; bounds the even-zero interval around 0.
    pub zeta_a: f64,
    /// Outer edge of the odd-zero intervals, `f(ζ_B) = -ζ_A`.
    pub zeta_b: f64,
    /// Radius of the largest disk around 0 on which `|g(ζ)| < |ζ|`.
    pub zeta_c: f64,
}

pub const ZETA_C_ANGLES: usize = 4096;

pub fn compute_constants() -> Constants {
    let a = (17.0 + 3.0 * 33f64.sqrt()).cbrt();
    let zeta_a = (a - 1.0 - 2.0 / a) / 3.0;
    let zeta_b = ((-2.0 + 2.0 * a + a * a) / (2.0 + 4.0 * a - a * a)).sqrt();
    Constants {
        a,
        zeta_a,
        zeta_b,
        zeta_c: contraction_radius(ZETA_C_ANGLES),
    }
}

/// `max_θ |g(r e^{iθ})|` over `angles` equally spaced angles.
fn max_modulus_on_circle(r: f64, angles: usize) -> f64 {
    (0..angles)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / angles as f64;
            eval_g(RiemannPoint::Finite(Complex64::from_polar(r, t))).norm()
        })
        .fold(0.0, f64::max)
}

/// First radius at which `max_{|ζ|=r} |g(ζ)| < r` stops holding, by bisection.
pub fn contraction_radius(angles: usize) -> f64 {
    let holds = |r: f64| max_modulus_on_circle(r, angles) < r;
    let (mut lo, mut hi) = (0.1, 0.9);
    debug_assert!(holds(lo) && !holds(hi));
    while hi - lo > 1e-16 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    EvenZero,
    OddZero,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedOrbit {
    pub label: Parity,
    /// Index of the first iterate inside the `tol`-ball around 0 (or `max_iters`).
    pub steps: usize,
}

/// Iterates `f` from `z0` until an iterate enters `|ζ| < tol`.
pub fn iterate_reduced(z0: RiemannPoint, max_iters: usize, tol: f64) -> Result<ReducedOrbit> {
    if max_iters == 0 {
        return Err(Error::param("max_iters", "must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("{tol} is not positive")));
    }
    let mut z = z0;
    for k in 0..=max_iters {
        if z.norm() < tol {
            let label = if k.is_multiple_of(2) {
                Parity::EvenZero
            } else {
                Parity::OddZero
            };
            return Ok(ReducedOrbit { label, steps: k });
        }
        z = eval_f(z);
    }
    Ok(ReducedOrbit {
        label: Parity::Unresolved,
        steps: max_iters,
    })
}
