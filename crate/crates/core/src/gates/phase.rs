use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Unitary2;
use crate::electrostatics::PhysicalConstants;
use crate::error::{ensure, Result};

/// Piecewise-constant bias V₀ − V₁ between the two diagonal dot pairs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseGatePulse {
    /// (duration in s, bias in V)
    pub segments: Vec<(f64, f64)>,
}

impl PhaseGatePulse {
    pub fn constant(bias: f64, duration: f64) -> Self {
        PhaseGatePulse {
            segments: vec![(duration, bias)],
        }
    }

    pub fn then(mut self, bias: f64, duration: f64) -> Self {
        self.segments.push((duration, bias));
        self
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.0).sum()
    }

    /// ∫(V₀ − V₁) dt, V·s.
    pub fn area(&self) -> f64 {
        self.segments.iter().map(|(dt, v)| dt * v).sum()
    }
}

/// φ = (2e/ħ) ∫(V₀ − V₁) dt. Two electrons see the bias, hence the 2.
pub fn phase_angle(
    pulse: &PhaseGatePulse,
    constants: &PhysicalConstants,
    wrap: bool,
) -> Result<f64> {
    ensure(
        pulse
            .segments
            .iter()
            .all(|(dt, v)| *dt >= 0.0 && dt.is_finite() && v.is_finite()),
        || "pulse segments need finite, non-negative durations".into(),
    )?;
    let phi = 2.0 * constants.electron_charge * pulse.area() / constants.hbar;
    Ok(if wrap { phi.rem_euclid(TAU) } else { phi })
}

/// diag(1, e^{iφ}).
pub fn phase_gate(phi: f64) -> Unitary2 {
    Unitary2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, phi),
    )
}
