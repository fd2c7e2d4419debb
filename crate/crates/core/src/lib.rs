//! Simulation and analysis of the nonlinear dynamics generated by iterating a
//! two-qubit entanglement-purification step (pairwise CNOTs, post-selection on
//! the `00` outcome, then a local `H ⊗ H`).
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`]: pure and mixed two-qubit states, the `ζ`-family
//!   `|00⟩ + ζ|11⟩`, entropy, purity and trace distance.
//! * [`protocol`]: the selection step, the local unitary, full protocol steps,
//!   trajectories and a brute-force 16×16 circuit reference.
//! * [`complexdyn`]: the reduced maps `f(ζ) = (1-ζ²)/(1+ζ²)` and `g = f∘f` on
//!   the Riemann sphere, cycles, multipliers and the real-line basin constants.
//! * [`fano`]: Pauli-product coordinates, numerical Jacobians and discovery of
//!   stable mixed-state cycles.
//! * [`basin`]: parallel basin-of-attraction grids, PPM/CSV output and a
//!   box-counting estimate of the basin boundary.
//! * [`cli`]: the command implementations behind the `purichaos` binary.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` everywhere; the first qubit is the
//! most significant bit of the index.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basin;
pub mod cli;
pub mod complexdyn;
pub mod error;
pub mod fano;
pub mod protocol;
pub mod qstate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qstate::{DensityMatrix2Q, PureState2Q, RiemannPoint};
