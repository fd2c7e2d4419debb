//! Pauli-product (Fano) coordinates of two-qubit density matrices, the
//! protocol step in those coordinates, finite-difference Jacobians and a
//! seeded search for attracting cycles of the mixed-state dynamics.
//!
//! Coordinates are `r_{μν} = Tr[ρ (σ_μ ⊗ σ_ν)]` for `μ, ν ∈ {0, x, y, z}`,
//! stored at index `4μ + ν`, so that `ρ = ¼ Σ r_{μν} σ_μ ⊗ σ_ν` and `r_{00} = 1`.

use std::sync::OnceLock;

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::complexdyn;
use crate::error::{Error, Result};
use crate::protocol::{self, LocalUnitary};
use crate::qstate::{self, state_from_zeta, werner_mix, DensityMatrix2Q, PureState2Q, RiemannPoint};

pub const FREE_COORDS: usize = 15;
pub const DEFAULT_JACOBIAN_STEP: f64 = 1e-6;
pub const CLOSURE_TOL: f64 = 1e-9;
pub const STABILITY_MARGIN: f64 = 1e-9;
pub const DEDUP_TOL: f64 = 1e-6;
/// Consecutive matches required before a lag is accepted as the period.
pub const SUSTAIN_STEPS: usize = 10;

pub type Jacobian = SMatrix<f64, FREE_COORDS, FREE_COORDS>;

const LABELS: [char; 4] = ['0', 'x', 'y', 'z'];

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    let (o, z, i) = (
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        3 => [[o, z], [z, -o]],
        _ => unreachable!("Pauli index out of range"),
    }
}

fn basis() -> &'static [Matrix4<Complex64>; 16] {
    static BASIS: OnceLock<[Matrix4<Complex64>; 16]> = OnceLock::new();
    BASIS.get_or_init(|| {
        std::array::from_fn(|idx| {
            let (a, b) = (pauli(idx / 4), pauli(idx % 4));
            Matrix4::from_fn(|r, c| a[r / 2][c / 2] * b[r % 2][c % 2])
        })
    })
}

/// Name of coordinate `idx`, e.g. `"xy"` for `σ_x ⊗ σ_y`.
pub fn coordinate_name(idx: usize) -> String {
    format!("{}{}", LABELS[idx / 4], LABELS[idx % 4])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoVector(pub [f64; 16]);

impl FanoVector {
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[4 * mu + nu]
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.0
    }
}

pub fn to_fano(rho: &DensityMatrix2Q) -> FanoVector {
    let m = rho.matrix();
    FanoVector(std::array::from_fn(|idx| {
        let p = &basis()[idx];
        // Tr(ρP) = Σ_ik ρ_ik P_ki
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for k in 0..4 {
                acc += m[(i, k)] * p[(k, i)];
            }
        }
        acc.re
    }))
}

/// Inverse of [`to_fano`]. Positivity of the result is not checked.
pub fn from_fano(v: &FanoVector) -> Result<DensityMatrix2Q> {
    if v.0.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidState("non-finite Fano coordinate".into()));
    }
    if (v.0[0] - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "r_00 = {} but must equal 1",
            v.0[0]
        )));
    }
    let mut m = Matrix4::<Complex64>::zeros();
    for (coef, p) in v.0.iter().zip(basis().iter()) {
        if *coef != 0.0 {
            m += p * Complex64::new(0.25 * coef, 0.0);
        }
    }
    Ok(DensityMatrix2Q::from_matrix_unchecked(m))
}

/// One protocol round (`H ⊗ H`) in Fano coordinates.
pub fn step_fano(v: &FanoVector) -> Result<FanoVector> {
    step_fano_with(v, &LocalUnitary::hadamard())
}

pub fn step_fano_with(v: &FanoVector, u: &LocalUnitary) -> Result<FanoVector> {
    let rho = from_fano(v)?;
    let out = protocol::protocol_step(&rho, u)?;
    Ok(to_fano(&out.state))
}

/// Central-difference Jacobian of one step at `v` in the 15 free coordinates.
pub fn jacobian_point(v: &FanoVector, h: f64, u: &LocalUnitary) -> Result<Jacobian> {
    let mut j = Jacobian::zeros();
    for k in 0..FREE_COORDS {
        let (mut plus, mut minus) = (*v, *v);
        plus.0[k + 1] += h;
        minus.0[k + 1] -= h;
        let (fp, fm) = (step_fano_with(&plus, u)?, step_fano_with(&minus, u)?);
        for row in 0..FREE_COORDS {
            let d = (fp.0[row + 1] - fm.0[row + 1]) / (2.0 * h);
            if !d.is_finite() {
                return Err(Error::IllConditioned(format!(
                    "non-finite derivative in direction {}",
                    coordinate_name(k + 1)
                )));
            }
            j[(row, k)] = d;
        }
    }
    Ok(j)
}

/// Largest trace distance between `step(points[i])` and `points[i+1]` around the cycle.
pub fn cycle_closure(points: &[FanoVector], u: &LocalUnitary) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        let next = from_fano(&points[(i + 1) % points.len()])?;
        let image = from_fano(&step_fano_with(p, u)?)?;
        worst = worst.max(qstate::trace_distance(&image, &next));
    }
    Ok(worst)
}

/// Jacobian of the period map, `J(x_{p-1}) ⋯ J(x_0)`, at the first point of the cycle.
///
/// Perturbed points are used as they are even when they leave the physical set:
/// the map is rational in the coordinates and its linearisation is what matters.
pub fn jacobian_cycle(points: &[FanoVector], h: f64) -> Result<Jacobian> {
    jacobian_cycle_with(points, h, &LocalUnitary::hadamard())
}

pub fn jacobian_cycle_with(points: &[FanoVector], h: f64, u: &LocalUnitary) -> Result<Jacobian> {
    if points.is_empty() {
        return Err(Error::param("points", "cycle is empty"));
    }
    if !(1e-8..=1e-4).contains(&h) {
        return Err(Error::param("h", format!("{h} is outside [1e-8, 1e-4]")));
    }
    let residual = cycle_closure(points, u)?;
    if residual >= CLOSURE_TOL {
        return Err(Error::NotACycle { residual });
    }
    points.iter().try_fold(Jacobian::identity(), |acc, p| {
        Ok(jacobian_point(p, h, u)? * acc)
    })
}

/// Eigenvalue moduli of `j`, largest first.
pub fn eigenvalue_magnitudes(j: &Jacobian) -> Vec<f64> {
    let mut mags: Vec<f64> = j.complex_eigenvalues().iter().map(|c| c.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    mags
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub cycle: Vec<DensityMatrix2Q>,
    pub period: usize,
    /// Moduli of the period-map Jacobian eigenvalues, largest first.
    pub eigenvalue_magnitudes: Vec<f64>,
    pub stable: bool,
}

impl StabilityReport {
    pub fn analyse(cycle: Vec<DensityMatrix2Q>, h: f64) -> Result<Self> {
        let points: Vec<FanoVector> = cycle.iter().map(to_fano).collect();
        let j = jacobian_cycle(&points, h)?;
        let eigenvalue_magnitudes = eigenvalue_magnitudes(&j);
        let stable = eigenvalue_magnitudes
            .iter()
            .all(|m| *m < 1.0 - STABILITY_MARGIN);
        Ok(StabilityReport {
            period: cycle.len(),
            cycle,
            eigenvalue_magnitudes,
            stable,
        })
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalue_magnitudes.first().copied().unwrap_or(0.0)
    }

    /// Smallest trace distance from `rho` to a member of the cycle.
    pub fn distance_to(&self, rho: &DensityMatrix2Q) -> f64 {
        self.cycle
            .iter()
            .map(|m| qstate::trace_distance(m, rho))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_pure(&self) -> bool {
        self.cycle.iter().all(|m| (qstate::purity(m) - 1.0).abs() < 1e-8)
    }

    pub fn same_cycle(&self, other: &[DensityMatrix2Q], tol: f64) -> bool {
        self.cycle.len() == other.len() && self.distance_to(&other[0]) < tol
    }
}

/// `½(|00⟩⟨00| + |11⟩⟨11|)`.
pub fn correlated_mixture() -> DensityMatrix2Q {
    DensityMatrix2Q::diagonal_state([0.5, 0.0, 0.0, 0.5]).expect("valid state")
}

/// `¼(|00⟩⟨00| + |11⟩⟨11| + (|01⟩+|10⟩)(⟨01|+⟨10|))`, the partner of
/// [`correlated_mixture`] as usually tabulated, without a `|00⟩⟨11|` coherence.
pub fn tabulated_partner() -> DensityMatrix2Q {
    let q = Complex64::new(0.25, 0.0);
    let mut m = Matrix4::zeros();
    m[(0, 0)] = q;
    m[(3, 3)] = q;
    for i in 1..=2 {
        for k in 1..=2 {
            m[(i, k)] = q;
        }
    }
    DensityMatrix2Q::new(m).expect("valid state")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSearch {
    /// Noise levels of the Werner-type seeds.
    pub lambdas: Vec<f64>,
    /// ζ seeds per λ, laid out on a square grid over `[-extent, extent]²`.
    pub seeds_per_lambda: usize,
    pub extent: f64,
    pub max_period: usize,
    /// Trace-distance tolerance for period detection.
    pub tol: f64,
    pub max_iters: usize,
    pub jacobian_step: f64,
    /// Also analyse the maximally mixed state and the repelling pure 2-cycles
    /// built on the fixed points of `f`, which forward iteration cannot reach.
    pub include_unstable: bool,
}

impl Default for CycleSearch {
    fn default() -> Self {
        CycleSearch {
            lambdas: (1..=9).map(|k| k as f64 / 10.0).collect(),
            seeds_per_lambda: 64,
            extent: 2.0,
            max_period: 4,
            tol: 1e-9,
            max_iters: 400,
            jacobian_step: DEFAULT_JACOBIAN_STEP,
            include_unstable: false,
        }
    }
}

impl CycleSearch {
    pub fn with_lambdas(lambdas: Vec<f64>) -> Self {
        CycleSearch {
            lambdas,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::param("lambdas", "at least one noise level is required"));
        }
        for &l in &self.lambdas {
            qstate::check_lambda(l)?;
        }
        if self.seeds_per_lambda == 0 {
            return Err(Error::param("seeds", "must be positive"));
        }
        if self.max_period == 0 || self.max_iters == 0 {
            return Err(Error::param("max_period", "period and iteration limits must be positive"));
        }
        if !(self.tol > 0.0) || !(self.extent > 0.0) {
            return Err(Error::param("tol", "tolerance and extent must be positive"));
        }
        Ok(())
    }

    /// Seeds in a fixed order: λ-major, then grid rows top to bottom.
    pub fn seeds(&self) -> Vec<Seed> {
        let side = (self.seeds_per_lambda as f64).sqrt().ceil() as usize;
        let coord = |k: usize| {
            let t = (2 * k + 1) as f64 / (2 * side) as f64;
            self.extent * (2.0 * t - 1.0)
        };
        let mut out = Vec::new();
        for &lambda in &self.lambdas {
            let zetas = (0..side)
                .flat_map(|row| (0..side).map(move |col| (row, col)))
                .take(self.seeds_per_lambda)
                .map(|(row, col)| RiemannPoint::new(coord(col), -coord(row)));
            out.extend(zetas.map(|zeta| Seed { zeta, lambda }));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub zeta: RiemannPoint,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleSearchOutcome {
    pub cycles: Vec<StabilityReport>,
    /// Seeds whose orbits showed no periodicity within the iteration budget.
    pub unresolved: Vec<Seed>,
}

impl CycleSearchOutcome {
    pub fn stable(&self) -> impl Iterator<Item = &StabilityReport> {
        self.cycles.iter().filter(|c| c.stable)
    }
}

/// Iterates a state until the orbit settles on a cycle of period `≤ max_period`.
///
/// A lag `p` is accepted once `T(x_t, x_{t-p}) < tol` holds for
/// [`SUSTAIN_STEPS`] consecutive steps; the smallest such lag wins. The cycle is
/// then polished by further iteration and returned in canonical rotation.
pub fn detect_cycle(
    start: &DensityMatrix2Q,
    max_period: usize,
    tol: f64,
    max_iters: usize,
) -> Result<Option<Vec<DensityMatrix2Q>>> {
    let u = LocalUnitary::hadamard();
    let window = 2 * max_period + 1;
    let mut history: Vec<DensityMatrix2Q> = Vec::with_capacity(window);
    let mut runs = vec![0usize; max_period + 1];
    let mut x = *start;
    for _ in 0..max_iters {
        x = protocol::protocol_step(&x, &u)?.state;
        if history.len() == window {
            history.remove(0);
        }
        history.push(x);
        let n = history.len();
        for p in 1..=max_period {
            if n > p && qstate::trace_distance_below(&history[n - 1], &history[n - 1 - p], tol) {
                runs[p] += 1;
            } else {
                runs[p] = 0;
            }
        }
        if let Some(p) = (1..=max_period).find(|&p| runs[p] >= SUSTAIN_STEPS) {
            return polish_cycle(x, p, &u).map(Some);
        }
    }
    Ok(None)
}

fn polish_cycle(mut x: DensityMatrix2Q, period: usize, u: &LocalUnitary) -> Result<Vec<DensityMatrix2Q>> {
    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let mut members = Vec::with_capacity(period);
        let mut y = x;
        for _ in 0..period {
            members.push(y);
            y = protocol::protocol_step(&y, u)?.state;
        }
        let closure = qstate::trace_distance(&y, &x);
        if closure < 1e-13 || closure >= best {
            return Ok(canonical_rotation(members));
        }
        best = closure;
        x = y;
    }
    Err(Error::NoConvergence("cycle polishing did not settle".into()))
}

/// Rotates the cycle to start at the member with the largest `Σ ρ_jj²`,
/// ties broken by the lexicographically largest Fano vector.
fn canonical_rotation(mut members: Vec<DensityMatrix2Q>) -> Vec<DensityMatrix2Q> {
    let key = |m: &DensityMatrix2Q| {
        let d: f64 = m.diagonal().iter().map(|x| x * x).sum();
        ((d * 1e9).round(), to_fano(m).0.map(|x| (x * 1e9).round()))
    };
    let start = (0..members.len())
        .max_by(|&a, &b| {
            let (ka, kb) = (key(&members[a]), key(&members[b]));
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a))
        })
        .unwrap_or(0);
    members.rotate_left(start);
    members
}

/// Cycles that forward iteration cannot find: `𝟙/4` and, for every fixed point
/// `ζ*` of `f`, the pure 2-cycle `{Ψ(ζ*), US Ψ(ζ*)}`.
pub fn unstable_candidates() -> Result<Vec<Vec<DensityMatrix2Q>>> {
    let u = LocalUnitary::hadamard();
    let mut out = vec![vec![DensityMatrix2Q::maximally_mixed()]];
    for fp in complexdyn::fixed_points_f()? {
        let psi: PureState2Q = state_from_zeta(fp.points[0]);
        let next = protocol::protocol_step(&psi, &u)?.state;
        out.push(canonical_rotation(vec![psi.density(), next.density()]));
    }
    Ok(out)
}

/// Werner-seeded search for the cycles of the mixed-state dynamics.
///
/// Seeds are processed in parallel; the merge into the deduplicated cycle list
/// happens in seed order, so the result does not depend on the thread count.
pub fn find_mixed_cycles(search: &CycleSearch) -> Result<CycleSearchOutcome> {
    search.validate()?;
    let seeds = search.seeds();
    let detected: Vec<Result<Option<Vec<DensityMatrix2Q>>>> = seeds
        .par_iter()
        .map(|s| {
            let rho = werner_mix(s.zeta, s.lambda)?;
            detect_cycle(&rho, search.max_period, search.tol, search.max_iters)
        })
        .collect();

    let mut cycles: Vec<Vec<DensityMatrix2Q>> = Vec::new();
    let mut unresolved = Vec::new();
    for (seed, found) in seeds.iter().zip(detected) {
        match found? {
            Some(c) => {
                if !cycles.iter().any(|k| same_orbit(k, &c)) {
                    cycles.push(c);
                }
            }
            None => unresolved.push(*seed),
        }
    }
    if search.include_unstable {
        for c in unstable_candidates()? {
            if !cycles.iter().any(|k| same_orbit(k, &c)) {
                cycles.push(c);
            }
        }
    }
    let reports = cycles
        .into_par_iter()
        .map(|c| StabilityReport::analyse(c, search.jacobian_step))
        .collect::<Result<Vec<_>>>()?;
    Ok(CycleSearchOutcome {
        cycles: reports,
        unresolved,
    })
}

fn same_orbit(a: &[DensityMatrix2Q], b: &[DensityMatrix2Q]) -> bool {
    a.len() == b.len()
        && a.iter()
            .any(|m| qstate::trace_distance(m, &b[0]) < DEDUP_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn h() -> LocalUnitary {
        LocalUnitary::hadamard()
    }

    #[test]
    fn maximally_mixed_has_trivial_coordinates() {
        let v = to_fano(&DensityMatrix2Q::maximally_mixed());
        assert_eq!(v.0[0], 1.0);
        assert!(v.0[1..].iter().all(|x| x.abs() < 1e-16));
    }

    #[test]
    fn bell_state_coordinates() {
        let v = to_fano(&PureState2Q::phi_plus().density());
        for idx in 0..16 {
            let expect = match coordinate_name(idx).as_str() {
                "00" | "xx" | "zz" => 1.0,
                "yy" => -1.0,
                _ => 0.0,
            };
            assert_abs_diff_eq!(v.0[idx], expect, epsilon = 1e-15);
        }
        assert_eq!(v.get(2, 2), v.0[10]);
    }

    #[test]
    fn from_fano_rejects_bad_normalisation() {
        let mut v = to_fano(&DensityMatrix2Q::maximally_mixed());
        v.0[0] = 1.1;
        assert!(from_fano(&v).is_err());
        v.0[0] = 1.0;
        v.0[3] = f64::NAN;
        assert!(from_fano(&v).is_err());
    }

    #[test]
    fn step_examples() {
        let v = to_fano(&DensityMatrix2Q::maximally_mixed());
        let out = step_fano(&v).unwrap();
        for (a, b) in out.0.iter().zip(v.0.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        // ρ1 maps to ½(Φ+ + Ψ+) = ¼(𝟙 + σx⊗σx).
        let out = step_fano(&to_fano(&correlated_mixture())).unwrap();
        for idx in 0..16 {
            let expect = if idx == 0 || idx == 5 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(out.0[idx], expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn jacobian_rejects_bad_inputs() {
        let mm = to_fano(&DensityMatrix2Q::maximally_mixed());
        assert!(jacobian_cycle(&[mm], 1e-2).is_err());
        assert!(jacobian_cycle(&[], 1e-6).is_err());
        let not_fixed = to_fano(&correlated_mixture());
        assert!(matches!(
            jacobian_cycle(&[not_fixed], 1e-6),
            Err(Error::NotACycle { .. })
        ));
    }

    #[test]
    fn bell_fixed_point_is_superattracting() {
        let v = to_fano(&PureState2Q::phi_plus().density());
        let mags = eigenvalue_magnitudes(&jacobian_cycle(&[v], DEFAULT_JACOBIAN_STEP).unwrap());
        assert_eq!(mags.len(), 15);
        assert!(mags[0] < 1e-4, "{mags:?}");
    }

    #[test]
    fn separable_cycle_is_superattracting() {
        let pts = [
            to_fano(&PureState2Q::basis(0).density()),
            to_fano(&PureState2Q::plus_plus().density()),
        ];
        let mags = eigenvalue_magnitudes(&jacobian_cycle(&pts, DEFAULT_JACOBIAN_STEP).unwrap());
        assert!(mags[0] < 1e-4, "{mags:?}");
    }

    #[test]
    fn maximally_mixed_jacobian_is_nilpotent() {
        // Diagonal perturbations are doubled by the selection but H⊗H turns
        // them into coherences, which the next selection squares away.
        let v = to_fano(&DensityMatrix2Q::maximally_mixed());
        let j = jacobian_cycle(&[v], DEFAULT_JACOBIAN_STEP).unwrap();
        assert!(j.norm() > 0.5);
        assert!((j * j).norm() < 1e-8);
        assert!(eigenvalue_magnitudes(&j)[0] < 1e-4);
    }

    #[test]
    fn jacobian_is_insensitive_to_step_size() {
        let cycles = [
            vec![to_fano(&PureState2Q::phi_plus().density())],
            vec![to_fano(&correlated_mixture()), step_fano(&to_fano(&correlated_mixture())).unwrap()],
            vec![to_fano(&DensityMatrix2Q::maximally_mixed())],
        ];
        for pts in &cycles {
            let a = eigenvalue_magnitudes(&jacobian_cycle(pts, 1e-6).unwrap());
            let b = eigenvalue_magnitudes(&jacobian_cycle(pts, 5e-7).unwrap());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-4, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn detects_the_mixed_two_cycle() {
        let seed = werner_mix(RiemannPoint::new(0.9, 0.9), 0.75).unwrap();
        let cycle = detect_cycle(&seed, 4, 1e-9, 400).unwrap().unwrap();
        assert_eq!(cycle.len(), 2);
        assert!(qstate::trace_distance(&cycle[0], &correlated_mixture()) < 1e-8);
        let partner = &cycle[1];
        let tab = tabulated_partner();
        for i in 0..4 {
            assert_abs_diff_eq!(partner.diagonal()[i], tab.diagonal()[i], epsilon = 1e-8);
        }
        assert_abs_diff_eq!(partner.entry(0, 3).re, 0.25, epsilon = 1e-8);
        assert_abs_diff_eq!(qstate::trace_distance(partner, &tab), 0.25, epsilon = 1e-8);
    }

    #[test]
    fn seeds_follow_the_grid() {
        let s = CycleSearch {
            lambdas: vec![0.5, 0.75],
            seeds_per_lambda: 4,
            ..Default::default()
        };
        let seeds = s.seeds();
        assert_eq!(seeds.len(), 8);
        assert_eq!(seeds[0].zeta, RiemannPoint::new(-1.0, 1.0));
        assert_eq!(seeds[3].zeta, RiemannPoint::new(1.0, -1.0));
        assert_eq!(seeds[4].lambda, 0.75);
        assert!(find_mixed_cycles(&CycleSearch::with_lambdas(vec![1.5])).is_err());
    }

    #[test]
    fn unstable_candidates_include_repelling_pure_cycles() {
        let cands = unstable_candidates().unwrap();
        assert_eq!(cands.len(), 4);
        for c in &cands[1..] {
            let r = StabilityReport::analyse(c.clone(), DEFAULT_JACOBIAN_STEP).unwrap();
            assert!(!r.stable);
            // In the pure directions the period map has multiplier f'(ζ*)².
            assert!(r.spectral_radius() > 1.5);
        }
    }

    fn rho_strategy() -> impl Strategy<Value = DensityMatrix2Q> {
        proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
            let a = Matrix4::from_fn(|i, k| Complex64::new(v[4 * i + k], v[16 + 4 * i + k]));
            DensityMatrix2Q::from_matrix_normalized(a * a.adjoint())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn fano_roundtrip(rho in rho_strategy()) {
            let back = from_fano(&to_fano(&rho)).unwrap();
            prop_assert!(back.max_entry_deviation(&rho) < 1e-13);
            let v = to_fano(&rho);
            prop_assert!(v.0.iter().all(|x| x.abs() <= 1.0 + 1e-12));
        }

        #[test]
        fn fano_step_matches_matrix_step(rho in rho_strategy()) {
            let direct = to_fano(&protocol::protocol_step(&rho, &h()).unwrap().state);
            let via = step_fano(&to_fano(&rho)).unwrap();
            for (a, b) in direct.0.iter().zip(via.0.iter()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
