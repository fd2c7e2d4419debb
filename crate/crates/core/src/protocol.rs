//! One round of the purification protocol and its iteration.
//!
//! Two identical pairs are combined with bilateral CNOTs (kept pair controls,
//! sacrificed pair targets); the target pair is measured and the kept pair is
//! accepted only on outcome `00`. In the computational basis this squares every
//! amplitude (pure states) or every matrix entry (mixed states). The accepted
//! pair is then rotated by the local unitary `u ⊗ u`, by default `H ⊗ H`.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{self, DensityMatrix2Q, PureState2Q};

pub const UNITARITY_TOL: f64 = 1e-10;

/// Single-qubit unitary applied identically to both qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalUnitary {
    single: Matrix2<Complex64>,
    pair: Matrix4<Complex64>,
}

impl LocalUnitary {
    pub fn new(single: Matrix2<Complex64>) -> Result<Self> {
        if single.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NotUnitary {
                residual: f64::INFINITY,
            });
        }
        let residual = (single.adjoint() * single - Matrix2::identity())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if residual > UNITARITY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(LocalUnitary {
            single,
            pair: single.kronecker(&single),
        })
    }

    /// `H_ij = (-1)^(i·j) / √2`.
    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(Matrix2::new(h, h, h, -h)).expect("Hadamard is unitary")
    }

    pub fn single(&self) -> &Matrix2<Complex64> {
        &self.single
    }

    /// `u ⊗ u`.
    pub fn pair(&self) -> &Matrix4<Complex64> {
        &self.pair
    }
}

impl Default for LocalUnitary {
    fn default() -> Self {
        Self::hadamard()
    }
}

/// Result of one accepted round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<S> {
    pub state: S,
    /// Probability that the `00` outcome is observed.
    pub success_probability: f64,
    /// Output pairs per input pair: half the pairs are consumed as targets.
    pub yield_factor: f64,
}

impl<S> StepOutcome<S> {
    fn new(state: S, success_probability: f64) -> Self {
        StepOutcome {
            state,
            success_probability,
            yield_factor: 0.5 * success_probability,
        }
    }

    fn map<T>(self, f: impl FnOnce(S) -> T) -> StepOutcome<T> {
        StepOutcome {
            state: f(self.state),
            success_probability: self.success_probability,
            yield_factor: self.yield_factor,
        }
    }
}

/// States the protocol can act on.
pub trait ProtocolState: Clone + Send + Sync {
    fn select(&self) -> Result<StepOutcome<Self>>;
    fn apply_local(&self, u: &LocalUnitary) -> Self;
    /// Entropy (bits) of the first-qubit marginal.
    fn entropy(&self) -> f64;
    fn purity(&self) -> f64;
    fn to_density(&self) -> DensityMatrix2Q;
}

impl ProtocolState for PureState2Q {
    fn select(&self) -> Result<StepOutcome<Self>> {
        Ok(selection_step_pure(self))
    }

    fn apply_local(&self, u: &LocalUnitary) -> Self {
        let v = u.pair() * self.to_vector();
        renormalize([v[0], v[1], v[2], v[3]])
    }

    fn entropy(&self) -> f64 {
        qstate::entanglement_entropy(self)
    }

    fn purity(&self) -> f64 {
        1.0
    }

    fn to_density(&self) -> DensityMatrix2Q {
        self.density()
    }
}

impl ProtocolState for DensityMatrix2Q {
    fn select(&self) -> Result<StepOutcome<Self>> {
        selection_step_mixed(self)
    }

    fn apply_local(&self, u: &LocalUnitary) -> Self {
        let k = u.pair();
        DensityMatrix2Q::from_matrix_normalized(k * self.matrix() * k.adjoint())
    }

    fn entropy(&self) -> f64 {
        qstate::reduced_entropy(self)
    }

    fn purity(&self) -> f64 {
        qstate::purity(self)
    }

    fn to_density(&self) -> DensityMatrix2Q {
        *self
    }
}

fn renormalize(amps: [Complex64; 4]) -> PureState2Q {
    let n = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    PureState2Q::from_normalized_unchecked(amps.map(|c| c / n))
}

/// `c_i → c_i² / sqrt(Σ|c_j|⁴)`, accepted with probability `Σ|c_j|⁴ ≥ 1/4`.
pub fn selection_step_pure(psi: &PureState2Q) -> StepOutcome<PureState2Q> {
    let sq = psi.amplitudes().map(|c| c * c);
    let p: f64 = sq.iter().map(|c| c.norm_sqr()).sum();
    StepOutcome::new(renormalize(sq), p)
}

/// Entry-wise square in the computational basis, normalised by `Σ_j ρ_jj²`.
pub fn selection_step_mixed(rho: &DensityMatrix2Q) -> Result<StepOutcome<DensityMatrix2Q>> {
    let p: f64 = rho.diagonal().iter().map(|d| d * d).sum();
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidState(format!(
            "acceptance probability {p} is not positive"
        )));
    }
    let sq = rho.matrix().map(|c| c * c);
    Ok(StepOutcome::new(
        DensityMatrix2Q::from_matrix_normalized(sq),
        p,
    ))
}

pub fn apply_local_unitary<S: ProtocolState>(state: &S, u: &LocalUnitary) -> S {
    state.apply_local(u)
}

/// Selection followed by `u ⊗ u`.
pub fn protocol_step<S: ProtocolState>(state: &S, u: &LocalUnitary) -> Result<StepOutcome<S>> {
    Ok(state.select()?.map(|s| s.apply_local(u)))
}

/// Index of qubit `q` (0 = A1, 1 = A2, 2 = B1, 3 = B2) in the 16-dim space.
fn qubit_mask(q: usize) -> usize {
    1 << (3 - q)
}

fn cnot_16(control: usize, target: usize) -> DMatrix<Complex64> {
    let (cm, tm) = (qubit_mask(control), qubit_mask(target));
    let mut m = DMatrix::zeros(16, 16);
    for x in 0..16 {
        let y = if x & cm != 0 { x ^ tm } else { x };
        m[(y, x)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Brute-force reference for [`selection_step_mixed`].
///
/// Builds `ρ ⊗ ρ` on qubits `(A1, A2, B1, B2)`, applies `CNOT(A1→B1)` and
/// `CNOT(A2→B2)`, projects `B1 = B2 = 0`, and traces out the `B` pair.
pub fn circuit_oracle(rho: &DensityMatrix2Q) -> Result<StepOutcome<DensityMatrix2Q>> {
    let single = DMatrix::from_fn(4, 4, |i, k| rho.entry(i, k));
    let joint = single.kronecker(&single);
    let gates = cnot_16(1, 3) * cnot_16(0, 2);
    let evolved = &gates * joint * gates.adjoint();

    let mut projector = DMatrix::<Complex64>::zeros(16, 16);
    for a in 0..4 {
        projector[(4 * a, 4 * a)] = Complex64::new(1.0, 0.0);
    }
    let projected = &projector * evolved * &projector;

    let mut kept = Matrix4::<Complex64>::zeros();
    for a in 0..4 {
        for a2 in 0..4 {
            kept[(a, a2)] = (0..4).map(|b| projected[(4 * a + b, 4 * a2 + b)]).sum();
        }
    }
    let p = kept.trace().re;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidState(format!(
            "acceptance probability {p} is not positive"
        )));
    }
    Ok(StepOutcome::new(
        DensityMatrix2Q::from_matrix_unchecked(kept.map(|c| c / p)),
        p,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<S> {
    pub step: usize,
    pub state: S,
    pub entropy: f64,
    pub purity: f64,
    pub success_probability: f64,
    pub cumulative_yield: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub records: Vec<StepRecord<S>>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&StepRecord<S>> {
        self.records.last()
    }
}

/// Applies `max_steps` protocol rounds; record `k` holds the state after round `k` (1-based).
pub fn run_trajectory<S: ProtocolState>(
    initial: &S,
    u: &LocalUnitary,
    max_steps: usize,
) -> Result<Trajectory<S>> {
    let mut records = Vec::with_capacity(max_steps);
    let mut state = initial.clone();
    let mut cumulative_yield = 1.0;
    for step in 1..=max_steps {
        let out = protocol_step(&state, u)?;
        cumulative_yield *= out.yield_factor;
        state = out.state;
        records.push(StepRecord {
            step,
            entropy: state.entropy(),
            purity: state.purity(),
            success_probability: out.success_probability,
            cumulative_yield,
            state: state.clone(),
        });
    }
    Ok(Trajectory { records })
}
