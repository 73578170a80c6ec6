use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Unitary4;
use crate::error::{ensure, Result};

/// Two electrons on four dots with vertical tunnelling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardModel {
    /// Energy of the ε-states relative to the logical states, rad/s.
    pub delta: f64,
    /// Tunnelling rate, rad/s.
    pub omega: f64,
}

impl HubbardModel {
    pub fn new(delta: f64, omega: f64) -> Result<Self> {
        ensure(delta > 0.0 && delta.is_finite(), || {
            format!("delta must be positive, got {delta}")
        })?;
        ensure(omega >= 0.0 && omega.is_finite(), || {
            format!("omega must be non-negative, got {omega}")
        })?;
        Ok(HubbardModel { delta, omega })
    }

    /// Ω/δ.
    pub fn reduced_omega(&self) -> f64 {
        self.omega / self.delta
    }
}

/// H₀ + H_tunnel in units of δ.
pub fn hamiltonian(model: &HubbardModel) -> Matrix4<f64> {
    let w = model.reduced_omega();
    Matrix4::new(
        0.0, 0.0, w, w, //
        0.0, 0.0, w, w, //
        w, w, 1.0, 0.0, //
        w, w, 0.0, 1.0,
    )
}

/// Closed-form spectrum. Columns of `vectors` are the normalised ψ₁..ψ₄.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    /// E₁..E₄ in units of δ.
    pub energies: [f64; 4],
    pub vectors: Matrix4<f64>,
    /// Ω = 0: E₃ = E₂ and E₄ = E₁.
    pub degenerate: bool,
}

pub fn eigensystem(model: &HubbardModel) -> EigenSystem {
    let w = model.reduced_omega();
    let s = (1.0 + 16.0 * w * w).sqrt();
    // ψ₃ ∝ a(|0⟩+|1⟩) + |ε₀⟩+|ε₁⟩ and ψ₄ ∝ (|0⟩+|1⟩) − a(|ε₀⟩+|ε₁⟩) with
    // a = 4Ω/(s+1); the second form is ψ₄ rescaled so it stays finite at Ω = 0.
    let a = 4.0 * w / (s + 1.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let n34 = 1.0 / (2.0 + 2.0 * a * a).sqrt();
    let psi1 = Vector4::new(h, -h, 0.0, 0.0);
    let psi2 = Vector4::new(0.0, 0.0, h, -h);
    let psi3 = Vector4::new(a, a, 1.0, 1.0) * n34;
    let psi4 = Vector4::new(1.0, 1.0, -a, -a) * n34;
    EigenSystem {
        energies: [0.0, 1.0, (1.0 + s) / 2.0, (1.0 - s) / 2.0],
        vectors: Matrix4::from_columns(&[psi1, psi2, psi3, psi4]),
        degenerate: w == 0.0,
    }
}

/// exp(−iHt) from the closed-form eigensystem; `t` in units of 1/δ.
pub fn propagate_noiseless(model: &HubbardModel, t: f64) -> Unitary4 {
    let es = eigensystem(model);
    spectral_exp(&es.vectors, &es.energies, t)
}

/// exp(−iHt) for a real symmetric 4×4 `h` by numerical diagonalisation.
pub fn evolve_symmetric(h: &Matrix4<f64>, t: f64) -> Unitary4 {
    let eig = SymmetricEigen::new(*h);
    let e: [f64; 4] = eig.eigenvalues.into();
    spectral_exp(&eig.eigenvectors, &e, t)
}

fn spectral_exp(v: &Matrix4<f64>, energies: &[f64; 4], t: f64) -> Unitary4 {
    let mut u = Unitary4::zeros();
    for (k, &e) in energies.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * t);
        let col = v.column(k);
        for i in 0..4 {
            for j in 0..4 {
                u[(i, j)] += phase * (col[i] * col[j]);
            }
        }
    }
    u
}
