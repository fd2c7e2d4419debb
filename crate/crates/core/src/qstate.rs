//! Two-qubit states, the `ζ`-parametrised family and the scalar metrics used by
//! the rest of the crate.
//!
//! Amplitudes and matrix entries are indexed in the computational basis
//! `|00⟩, |01⟩, |10⟩, |11⟩` (index `2·a + b` for qubits `a`, `b`).

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiemannPoint {
    Finite(Complex64),
    Infinity,
}

impl RiemannPoint {
    pub const ZERO: RiemannPoint = RiemannPoint::Finite(ZERO);
    pub const ONE: RiemannPoint = RiemannPoint::Finite(ONE);

    pub fn new(re: f64, im: f64) -> Self {
        RiemannPoint::Finite(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0)
    }

    /// Maps non-finite complex values onto `Infinity`.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            RiemannPoint::Finite(z)
        } else {
            RiemannPoint::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RiemannPoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            RiemannPoint::Finite(z) => Some(z),
            RiemannPoint::Infinity => None,
        }
    }

    /// `1/ζ` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> Self {
        match *self {
            RiemannPoint::Infinity => RiemannPoint::ZERO,
            RiemannPoint::Finite(z) if z == ZERO => RiemannPoint::Infinity,
            RiemannPoint::Finite(z) => RiemannPoint::from_complex(z.inv()),
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            RiemannPoint::Finite(z) => RiemannPoint::Finite(z.conj()),
            RiemannPoint::Infinity => RiemannPoint::Infinity,
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            RiemannPoint::Finite(z) => RiemannPoint::Finite(-z),
            RiemannPoint::Infinity => RiemannPoint::Infinity,
        }
    }

    /// Modulus, `+∞` for the point at infinity.
    pub fn norm(&self) -> f64 {
        match *self {
            RiemannPoint::Finite(z) => z.norm(),
            RiemannPoint::Infinity => f64::INFINITY,
        }
    }

    /// Chordal distance on the Riemann sphere,
    /// `2|z-w| / sqrt((1+|z|²)(1+|w|²))`, in `[0, 2]`.
    pub fn chordal_distance(&self, other: &RiemannPoint) -> f64 {
        match (*self, *other) {
            (RiemannPoint::Infinity, RiemannPoint::Infinity) => 0.0,
            (RiemannPoint::Finite(z), RiemannPoint::Infinity)
            | (RiemannPoint::Infinity, RiemannPoint::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (RiemannPoint::Finite(z), RiemannPoint::Finite(w)) => {
                // Work in the chart where both points are small to avoid overflow.
                if z.norm() > 1.0 && w.norm() > 1.0 {
                    let (zi, wi) = (z.inv(), w.inv());
                    2.0 * (zi - wi).norm()
                        / ((1.0 + zi.norm_sqr()) * (1.0 + wi.norm_sqr())).sqrt()
                } else {
                    2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
                }
            }
        }
    }
}

impl From<Complex64> for RiemannPoint {
    fn from(z: Complex64) -> Self {
        RiemannPoint::from_complex(z)
    }
}

impl From<f64> for RiemannPoint {
    fn from(x: f64) -> Self {
        RiemannPoint::real(x)
    }
}

impl fmt::Display for RiemannPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiemannPoint::Infinity => write!(f, "inf"),
            RiemannPoint::Finite(z) if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) => {
                write!(f, "{}-{}i", z.re, -z.im)
            }
            RiemannPoint::Finite(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` and `inf`/`∞`.
impl FromStr for RiemannPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = t.to_ascii_lowercase();
        if matches!(lower.as_str(), "inf" | "+inf" | "infinity" | "∞") {
            return Ok(RiemannPoint::Infinity);
        }
        if t.is_empty() {
            return Err(err("empty input"));
        }
        let parse_real = |x: &str| -> Result<f64> {
            let v: f64 = x.parse().map_err(|_| err("malformed number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err("components must be finite; use `inf` for the point at infinity"))
            }
        };
        let parse_imag = |x: &str| -> Result<f64> {
            match x {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => parse_real(x),
            }
        };
        let Some(body) = t.strip_suffix('i') else {
            return Ok(RiemannPoint::real(parse_real(&t)?));
        };
        // Split at the last sign that is not the leading sign and not part of an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        });
        match split {
            Some(k) => Ok(RiemannPoint::new(
                parse_real(&body[..k])?,
                parse_imag(&body[k..])?,
            )),
            None => Ok(RiemannPoint::new(0.0, parse_imag(body)?)),
        }
    }
}

/// Normalised two-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState2Q {
    amps: [Complex64; 4],
}

impl PureState2Q {
    /// Accepts amplitudes that are already normalised.
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        check_finite(&amps)?;
        let n: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "amplitudes have squared norm {n}, expected 1"
            )));
        }
        Ok(PureState2Q { amps })
    }

    /// Rescales arbitrary non-zero amplitudes onto the unit sphere.
    pub fn normalized(amps: [Complex64; 4]) -> Result<Self> {
        check_finite(&amps)?;
        // Scale by the largest modulus first so tiny or huge inputs do not under/overflow.
        let m = amps.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            return Err(Error::InvalidState("zero vector has no direction".into()));
        }
        let scaled = amps.map(|c| c / m);
        let n = scaled.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Ok(PureState2Q {
            amps: scaled.map(|c| c / n),
        })
    }

    pub(crate) fn from_normalized_unchecked(amps: [Complex64; 4]) -> Self {
        PureState2Q { amps }
    }

    pub fn basis(index: usize) -> Self {
        assert!(index < 4, "basis index out of range");
        let mut amps = [ZERO; 4];
        amps[index] = ONE;
        PureState2Q { amps }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState2Q {
            amps: [h, ZERO, ZERO, h],
        }
    }

    /// `|++⟩ = ½(|00⟩+|01⟩+|10⟩+|11⟩)`.
    pub fn plus_plus() -> Self {
        PureState2Q {
            amps: [Complex64::new(0.5, 0.0); 4],
        }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState2Q) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Euclidean distance after removing the relative global phase.
    pub fn phase_distance(&self, other: &PureState2Q) -> f64 {
        let ov = other.inner(self);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b * phase).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Trace distance between the two projectors, `sqrt(1 - |⟨a|b⟩|²)`.
    pub fn trace_distance(&self, other: &PureState2Q) -> f64 {
        (1.0 - self.inner(other).norm_sqr()).max(0.0).sqrt()
    }

    pub fn to_vector(&self) -> Vector4<Complex64> {
        Vector4::from_column_slice(&self.amps)
    }

    pub fn density(&self) -> DensityMatrix2Q {
        density_from_state(self)
    }
}

fn check_finite(amps: &[Complex64]) -> Result<()> {
    if amps.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidState("non-finite amplitude".into()))
    }
}

/// Hermitian, unit-trace 4×4 matrix.
///
/// [`DensityMatrix2Q::new`] also checks positivity. Matrices produced by the
/// crate's own maps are Hermitian and trace one by construction; points built
/// through [`crate::fano::from_fano`] may sit slightly outside the physical
/// set, see [`DensityMatrix2Q::is_physical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2Q {
    m: Matrix4<Complex64>,
}

impl DensityMatrix2Q {
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        if m.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        let herm = (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (residual {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let rho = DensityMatrix2Q { m };
        let min_eig = rho.eigenvalues()[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    /// Symmetrises `m` and divides by its real trace. No positivity check.
    pub(crate) fn from_matrix_normalized(m: Matrix4<Complex64>) -> Self {
        let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = h.trace().re;
        DensityMatrix2Q {
            m: h.map(|c| c / tr),
        }
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<Complex64>) -> Self {
        DensityMatrix2Q { m }
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix2Q {
            m: Matrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    /// Diagonal density matrix; the entries must sum to one.
    pub fn diagonal_state(diag: [f64; 4]) -> Result<Self> {
        let mut m = Matrix4::zeros();
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        DensityMatrix2Q::new(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [
            self.m[(0, 0)].re,
            self.m[(1, 1)].re,
            self.m[(2, 2)].re,
            self.m[(3, 3)].re,
        ]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.m)
    }

    pub fn is_physical(&self) -> bool {
        self.eigenvalues()[0] >= -PSD_TOL
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &DensityMatrix2Q) -> f64 {
        (self.m - other.m).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_entry_deviation(&self, other: &DensityMatrix2Q) -> f64 {
        (self.m - other.m).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Single-qubit state of the first qubit.
    pub fn reduced_first(&self) -> Matrix2<Complex64> {
        let m = &self.m;
        Matrix2::new(
            m[(0, 0)] + m[(1, 1)],
            m[(0, 2)] + m[(1, 3)],
            m[(2, 0)] + m[(3, 1)],
            m[(2, 2)] + m[(3, 3)],
        )
    }
}

/// `𝒩(ζ)(|00⟩ + ζ|11⟩)` with `𝒩(ζ) = (1+|ζ|²)^(-1/2)`; `ζ = ∞` gives `|11⟩`.
pub fn state_from_zeta(zeta: RiemannPoint) -> PureState2Q {
    match zeta {
        RiemannPoint::Infinity => PureState2Q::basis(3),
        RiemannPoint::Finite(z) => {
            let r = z.norm();
            // Divide by the larger of (1, |ζ|) first; hypot avoids overflow of |ζ|².
            let amps = if r <= 1.0 {
                let n = 1.0 / 1.0f64.hypot(r);
                [Complex64::new(n, 0.0), ZERO, ZERO, z * n]
            } else {
                let w = 1.0 / r;
                let n = 1.0 / 1.0f64.hypot(w);
                [Complex64::new(w * n, 0.0), ZERO, ZERO, (z / r) * n]
            };
            PureState2Q { amps }
        }
    }
}

pub fn density_from_state(psi: &PureState2Q) -> DensityMatrix2Q {
    let v = psi.to_vector();
    DensityMatrix2Q {
        m: v * v.adjoint(),
    }
}

/// `λ|Ψ(ζ)⟩⟨Ψ(ζ)| + (1-λ)/4 · 𝟙`.
pub fn werner_mix(zeta: RiemannPoint, lambda: f64) -> Result<DensityMatrix2Q> {
    check_lambda(lambda)?;
    let pure = density_from_state(&state_from_zeta(zeta));
    let noise = Matrix4::<Complex64>::identity() * Complex64::new((1.0 - lambda) / 4.0, 0.0);
    Ok(DensityMatrix2Q {
        m: pure.m * Complex64::new(lambda, 0.0) + noise,
    })
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::param("lambda", format!("{lambda} is outside [0, 1]")))
    }
}

/// `-p log₂ p - (1-p) log₂(1-p)` with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// Von Neumann entropy (bits) of either single-qubit marginal.
pub fn entanglement_entropy(psi: &PureState2Q) -> f64 {
    let c = psi.amplitudes();
    // Reduced state M M† with M = [[c00, c01], [c10, c11]]; its determinant is |det M|².
    let det = (c[0] * c[3] - c[1] * c[2]).norm_sqr();
    binary_entropy(schmidt_small_weight(det))
}

/// Smaller eigenvalue of a unit-trace 2×2 positive matrix with determinant `det`.
fn schmidt_small_weight(det: f64) -> f64 {
    let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
    let large = 0.5 * (1.0 + disc);
    (det / large).clamp(0.0, 0.5)
}

/// Von Neumann entropy (bits) of the first-qubit marginal of `rho`.
pub fn reduced_entropy(rho: &DensityMatrix2Q) -> f64 {
    let r = rho.reduced_first();
    let tr = (r[(0, 0)] + r[(1, 1)]).re;
    let det = (r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)]).re / (tr * tr);
    binary_entropy(schmidt_small_weight(det))
}

pub fn purity(rho: &DensityMatrix2Q) -> f64 {
    // Tr(ρ²) = Σ|ρ_ik|² for Hermitian ρ.
    rho.m.iter().map(|c| c.norm_sqr()).sum()
}

/// `½ Σ |eig(a - b)|`.
pub fn trace_distance(a: &DensityMatrix2Q, b: &DensityMatrix2Q) -> f64 {
    let d = a.m - b.m;
    0.5 * hermitian_eigenvalues(&d).iter().map(|e| e.abs()).sum::<f64>()
}

/// Trace distance with cheap Frobenius bounds: `‖d‖_F/2 ≤ T ≤ ‖d‖_F`.
/// Only falls back to the eigen-decomposition when the bounds straddle `tol`.
pub(crate) fn trace_distance_below(a: &DensityMatrix2Q, b: &DensityMatrix2Q, tol: f64) -> bool {
    let fro = a.frobenius_distance(b);
    if fro < tol {
        true
    } else if 0.5 * fro >= tol {
        false
    } else {
        trace_distance(a, b) < tol
    }
}

fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = h.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Pure state with amplitudes drawn uniformly from the unit box, then normalised.
/// Meant for seeded test batches, not for Haar-distributed sampling.
pub fn random_pure_state<R: rand::Rng + ?Sized>(rng: &mut R) -> PureState2Q {
    loop {
        let amps: [Complex64; 4] = std::array::from_fn(|_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        if let Ok(psi) = PureState2Q::normalized(amps) {
            return psi;
        }
    }
}

/// `A A† / Tr(A A†)` for a box-uniform complex 4×4 `A`, almost surely full rank.
pub fn random_density_matrix<R: rand::Rng + ?Sized>(rng: &mut R) -> DensityMatrix2Q {
    let a = Matrix4::from_fn(|_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    DensityMatrix2Q::from_matrix_normalized(a * a.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn random_samplers_are_seeded_and_physical() {
        use rand::SeedableRng;
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut b = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let rho = random_density_matrix(&mut a);
            assert!(rho.is_physical());
            assert_eq!(rho, random_density_matrix(&mut b));
            let psi = random_pure_state(&mut a);
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
            assert_eq!(psi, random_pure_state(&mut b));
        }
    }

    #[test]
    fn zeta_family_landmarks() {
        assert_eq!(state_from_zeta(RiemannPoint::ZERO), PureState2Q::basis(0));
        assert_eq!(state_from_zeta(RiemannPoint::Infinity), PureState2Q::basis(3));
        let bell = state_from_zeta(RiemannPoint::ONE);
        assert!(bell.phase_distance(&PureState2Q::phi_plus()) < 1e-15);
    }

    #[test]
    fn zeta_family_extreme_magnitudes_stay_normalised() {
        for z in [1e-300, 1e-8, 1e8, 1e154, 1e300] {
            let s = state_from_zeta(RiemannPoint::new(z, -z));
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12, "{z}");
        }
    }

    #[test]
    fn density_examples() {
        let r = density_from_state(&PureState2Q::basis(0));
        for i in 0..4 {
            for k in 0..4 {
                let expect = if i == 0 && k == 0 { 1.0 } else { 0.0 };
                assert_eq!(r.entry(i, k), c(expect));
            }
        }
        let b = PureState2Q::phi_plus().density();
        for (i, k) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(b.entry(i, k).re, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(b.entry(1, 1).re, 0.0);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState2Q::new([c(h), ZERO, c(h), ZERO]).unwrap();
        let rho = psi.density();
        assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-15);
        let ev = rho.eigenvalues();
        assert_abs_diff_eq!(ev[3], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(purity(&rho), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn werner_limits() {
        let z = RiemannPoint::new(0.3, -1.7);
        let pure = werner_mix(z, 1.0).unwrap();
        assert!(pure.max_entry_deviation(&state_from_zeta(z).density()) < 1e-15);
        let mixed = werner_mix(z, 0.0).unwrap();
        assert!(mixed.max_entry_deviation(&DensityMatrix2Q::maximally_mixed()) < 1e-15);

        let w = werner_mix(RiemannPoint::ONE, 0.75).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let mut expect = if i == k { 0.0625 } else { 0.0 };
                if (i == 0 || i == 3) && (k == 0 || k == 3) {
                    expect += 0.375;
                }
                assert_abs_diff_eq!(w.entry(i, k).re, expect, epsilon = 1e-15);
            }
        }
        assert!(matches!(
            werner_mix(z, 1.5),
            Err(Error::InvalidParameter { name: "lambda", .. })
        ));
        assert!(werner_mix(z, -1e-9).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entanglement_entropy(&PureState2Q::basis(0)), 0.0);
        assert_abs_diff_eq!(entanglement_entropy(&PureState2Q::phi_plus()), 1.0, epsilon = 1e-12);
        // Binary entropy of 1/4, computed independently with numpy.
        let s = state_from_zeta(RiemannPoint::real(3f64.sqrt()));
        assert_abs_diff_eq!(entanglement_entropy(&s), 0.811_278_124_459_132_8, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced_entropy(&s.density()), 0.811_278_124_459_132_8, epsilon = 1e-12);
    }

    #[test]
    fn purity_examples() {
        assert_abs_diff_eq!(purity(&DensityMatrix2Q::maximally_mixed()), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(purity(&PureState2Q::plus_plus().density()), 1.0, epsilon = 1e-15);
        // 0.75² + 2·0.75·0.0625 + 4·0.0625², checked with a standalone numpy script.
        let w = werner_mix(RiemannPoint::ONE, 0.75).unwrap();
        assert_abs_diff_eq!(purity(&w), 0.671875, epsilon = 1e-14);
    }

    #[test]
    fn trace_distance_examples() {
        let a = PureState2Q::basis(0).density();
        assert_eq!(trace_distance(&a, &a), 0.0);
        let b = PureState2Q::basis(3).density();
        assert_abs_diff_eq!(trace_distance(&a, &b), 1.0, epsilon = 1e-14);
        let rho1 = DensityMatrix2Q::diagonal_state([0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(
            trace_distance(&rho1, &DensityMatrix2Q::maximally_mixed()),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(PureState2Q::new([c(1.0), c(1.0), ZERO, ZERO]).is_err());
        assert!(PureState2Q::normalized([ZERO; 4]).is_err());
        assert!(PureState2Q::normalized([c(f64::NAN), ZERO, ZERO, ZERO]).is_err());
        let mut m = Matrix4::<Complex64>::zeros();
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(DensityMatrix2Q::new(m).is_err());
        m[(1, 1)] = c(0.0);
        assert!(DensityMatrix2Q::new(m).is_err());
        let mut nh = Matrix4::<Complex64>::identity() * c(0.25);
        nh[(0, 1)] = c(0.1);
        assert!(DensityMatrix2Q::new(nh).is_err());
    }

    #[test]
    fn parses_complex_literals() {
        let cases = [
            ("1+0i", RiemannPoint::new(1.0, 0.0)),
            ("0.5-2i", RiemannPoint::new(0.5, -2.0)),
            ("-1e-3+4.5e2i", RiemannPoint::new(-1e-3, 450.0)),
            ("1e-3-1e+2i", RiemannPoint::new(1e-3, -100.0)),
            ("i", RiemannPoint::new(0.0, 1.0)),
            ("-i", RiemannPoint::new(0.0, -1.0)),
            ("2-i", RiemannPoint::new(2.0, -1.0)),
            ("3i", RiemannPoint::new(0.0, 3.0)),
            ("-0.25", RiemannPoint::real(-0.25)),
            ("inf", RiemannPoint::Infinity),
            (" 1 + 2i ", RiemannPoint::new(1.0, 2.0)),
        ];
        for (s, expect) in cases {
            assert_eq!(s.parse::<RiemannPoint>().unwrap(), expect, "{s}");
        }
        for bad in ["", "abc", "1+2", "nan", "1+infi", "i2"] {
            assert!(bad.parse::<RiemannPoint>().is_err(), "{bad}");
        }
        let p = RiemannPoint::new(0.5, -2.0);
        assert_eq!(p.to_string().parse::<RiemannPoint>().unwrap(), p);
    }

    #[test]
    fn chordal_distance_handles_infinity() {
        let big = RiemannPoint::real(1e300);
        assert!(big.chordal_distance(&RiemannPoint::Infinity) < 1e-299);
        assert_abs_diff_eq!(
            RiemannPoint::ZERO.chordal_distance(&RiemannPoint::Infinity),
            2.0
        );
        assert_eq!(RiemannPoint::ZERO.recip(), RiemannPoint::Infinity);
        assert_eq!(RiemannPoint::Infinity.recip(), RiemannPoint::ZERO);
    }

    fn zeta_strategy() -> impl Strategy<Value = RiemannPoint> {
        prop_oneof![
            1 => Just(RiemannPoint::Infinity),
            10 => (-8.0f64..8.0, -8.0f64..8.0, -3.0f64..3.0)
                .prop_map(|(a, b, e)| RiemannPoint::new(a * 10f64.powf(e), b * 10f64.powf(e))),
        ]
    }

    fn rho_strategy() -> impl Strategy<Value = DensityMatrix2Q> {
        proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
            let a = nalgebra::Matrix4::from_fn(|i, k| Complex64::new(v[4 * i + k], v[16 + 4 * i + k]));
            DensityMatrix2Q::from_matrix_normalized(a * a.adjoint())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn zeta_states_are_normalised(z in zeta_strategy()) {
            prop_assert!((state_from_zeta(z).norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn entropy_symmetric_under_inversion(z in zeta_strategy()) {
            prop_assume!(z != RiemannPoint::ZERO);
            let a = entanglement_entropy(&state_from_zeta(z));
            let b = entanglement_entropy(&state_from_zeta(z.recip()));
            prop_assert!((a - b).abs() < 1e-10);
        }

        #[test]
        fn metrics_stay_in_range(a in rho_strategy(), b in rho_strategy(), c in rho_strategy()) {
            let p = purity(&a);
            prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&p));
            let (ab, bc, ac) = (trace_distance(&a, &b), trace_distance(&b, &c), trace_distance(&a, &c));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
            prop_assert!(ac <= ab + bc + 1e-10);
            prop_assert_eq!(trace_distance_below(&a, &b, 0.3), ab < 0.3);
        }

        #[test]
        fn werner_spectrum_is_lifted(z in zeta_strategy(), lambda in 0.0f64..=1.0) {
            let w = werner_mix(z, lambda).unwrap();
            prop_assert!(w.eigenvalues()[0] >= (1.0 - lambda) / 4.0 - 1e-12);
        }
    }
}
