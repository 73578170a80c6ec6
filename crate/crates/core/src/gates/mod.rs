//! Single-qubit gates on the 4-dot encoding.
//!
//! With vertical tunnelling only (A↔D, B↔C) the two-electron dynamics live
//! in the span of `|0⟩ = a†c†|vac⟩`, `|1⟩ = b†d†|vac⟩` and the same-edge
//! configurations `|ε₀⟩ = a†b†|vac⟩`, `|ε₁⟩ = c†d†|vac⟩`, in that order.
//! Energies and times inside this module are in units of the ε-state
//! energy δ (and 1/δ) unless a name says otherwise.

mod design;
mod fidelity;
mod hubbard;
mod noisy;
mod phase;

pub use design::{
    design_gate, leakage, logical_block, max_transient_population, population_trace,
    rotation_error, GateDesign, GateKind,
};
pub use fidelity::{average_fidelity, cardinal_states, FidelityResult, NoisyGate, StateFidelity};
pub use hubbard::{
    eigensystem, evolve_symmetric, hamiltonian, propagate_noiseless, EigenSystem, HubbardModel,
};
pub use noisy::{dipole_gate, gate_traps, propagate_dipole_noisy, propagate_noisy, GateTrap};
pub use phase::{phase_angle, phase_gate, PhaseGatePulse};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

pub type Unitary4 = Matrix4<Complex64>;
pub type Unitary2 = Matrix2<Complex64>;

/// ‖U†U − I‖ (Frobenius) for a square complex matrix.
pub fn unitarity_defect<const N: usize>(u: &nalgebra::SMatrix<Complex64, N, N>) -> f64 {
    (u.adjoint() * u - nalgebra::SMatrix::<Complex64, N, N>::identity()).norm()
}
