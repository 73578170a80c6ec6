//! Trap-induced on-site shifts and qubit–trap couplings.
//!
//! All energies are angular frequencies (energy / ħ, rad/s).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::geometry::{BasisState, QubitGeometry, TrapEnsemble, TrapSite, Vec3};
use crate::stats::linear_fit;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Elementary charge, C.
    pub electron_charge: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// F/m.
    pub vacuum_permittivity: f64,
    pub relative_permittivity: f64,
    /// Replaces q²/(4π ε₀ ε_r ħ) when set (rad/s · m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_override: Option<f64>,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            electron_charge: 1.602_176_634e-19,
            hbar: 1.054_571_817e-34,
            vacuum_permittivity: 8.854_187_812_8e-12,
            relative_permittivity: 11.7,
            coupling_override: None,
        }
    }
}

impl PhysicalConstants {
    pub fn with_relative_permittivity(mut self, eps_r: f64) -> Self {
        self.relative_permittivity = eps_r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.electron_charge,
            self.hbar,
            self.vacuum_permittivity,
            self.relative_permittivity,
        ]
        .iter()
        .all(|v| *v > 0.0 && !v.is_nan());
        ensure(all_positive, || {
            "physical constants must be positive".into()
        })?;
        if let Some(k) = self.coupling_override {
            ensure(k >= 0.0 && k.is_finite(), || {
                format!("coupling override must be non-negative, got {k}")
            })?;
        }
        Ok(())
    }

    /// κ such that a unit charge at distance r shifts a dot by κ / r (rad/s).
    pub fn coupling_constant(&self) -> f64 {
        self.coupling_override.unwrap_or_else(|| {
            self.electron_charge.powi(2)
                / (4.0 * PI * self.vacuum_permittivity * self.relative_permittivity * self.hbar)
        })
    }
}

/// Shift of a dot's on-site energy when the trap is charged (ξ = +1).
pub fn onsite_shift(trap: &TrapSite, dot: Vec3, constants: &PhysicalConstants) -> Result<f64> {
    let r = trap.position.distance(dot);
    if !(r > 0.0) {
        return Err(Error::Singular { trap: 0, dot: 0 });
    }
    Ok(constants.coupling_constant() / r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapCoupling {
    pub trap_index: usize,
    /// Logical splitting induced by the trap (state 0 minus state 1), rad/s.
    pub k: f64,
    /// Per-dot on-site shift, rad/s, indexed like the geometry's dots.
    pub per_dot_shifts: Vec<f64>,
}

impl TrapCoupling {
    /// Summed shift over the dots occupied in `state`.
    pub fn state_shift(&self, geom: &QubitGeometry, state: BasisState) -> Option<f64> {
        geom.occupancy(state)
            .map(|occ| occ.iter().map(|&i| self.per_dot_shifts[i]).sum())
    }

    /// Shifts of every basis state of the encoding, in basis order.
    pub fn basis_shifts(&self, geom: &QubitGeometry) -> Vec<f64> {
        geom.kind()
            .basis()
            .iter()
            .map(|&s| self.state_shift(geom, s).expect("basis state of own kind"))
            .collect()
    }
}

pub fn trap_coupling(
    trap_index: usize,
    trap: &TrapSite,
    geom: &QubitGeometry,
    constants: &PhysicalConstants,
) -> Result<TrapCoupling> {
    let per_dot_shifts = geom
        .dots()
        .iter()
        .enumerate()
        .map(|(dot, &p)| {
            onsite_shift(trap, p, constants).map_err(|_| Error::Singular {
                trap: trap_index,
                dot,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut c = TrapCoupling {
        trap_index,
        k: 0.0,
        per_dot_shifts,
    };
    let s0 = c.state_shift(geom, BasisState::Zero).unwrap_or(0.0);
    let s1 = c.state_shift(geom, BasisState::One).unwrap_or(0.0);
    c.k = s0 - s1;
    Ok(c)
}

pub fn ensemble_couplings(
    ensemble: &TrapEnsemble,
    geom: &QubitGeometry,
    constants: &PhysicalConstants,
) -> Result<Vec<TrapCoupling>> {
    ensemble
        .traps
        .iter()
        .enumerate()
        .map(|(i, t)| trap_coupling(i, t, geom, constants))
        .collect()
}

/// Root-sum-square coupling governing the short-time coherence decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceSummary {
    pub k_eff: f64,
}

impl CoherenceSummary {
    pub fn from_ks(ks: impl IntoIterator<Item = f64>) -> Self {
        CoherenceSummary {
            k_eff: ks.into_iter().map(|k| k * k).sum::<f64>().sqrt(),
        }
    }

    /// Time for the coherence to fall from 1 to `p` in the parabolic regime.
    /// Infinite when nothing couples.
    pub fn tau_p(&self, p: f64) -> f64 {
        (2.0 * (1.0 - p)).sqrt() / self.k_eff
    }
}

pub fn effective_coupling(couplings: &[TrapCoupling]) -> CoherenceSummary {
    CoherenceSummary::from_ks(couplings.iter().map(|c| c.k))
}

/// Far-field power law of |k| against trap distance along `direction`,
/// measured from the qubit centroid.
pub fn scaling_exponent(
    geom: &QubitGeometry,
    direction: Vec3,
    distances: &[f64],
    constants: &PhysicalConstants,
) -> Result<f64> {
    ensure(distances.len() >= 5, || {
        format!("need at least 5 distances, got {}", distances.len())
    })?;
    let dir = direction
        .normalized()
        .ok_or_else(|| Error::InvalidParameter("direction must be a non-zero vector".into()))?;
    let origin = geom.centroid();
    let mut log_r = Vec::with_capacity(distances.len());
    let mut log_k = Vec::with_capacity(distances.len());
    for &r in distances {
        ensure(r > 0.0 && r.is_finite(), || {
            format!("distance must be positive, got {r}")
        })?;
        let trap = TrapSite {
            position: origin + dir * r,
            rate: 1.0,
        };
        let c = trap_coupling(0, &trap, geom, constants)?;
        let scale: f64 = c.per_dot_shifts.iter().sum();
        if c.k.abs() <= 1e-12 * scale {
            return Err(Error::InvalidParameter(format!(
                "coupling vanishes at r = {r:e} m; direction lies on a symmetry axis"
            )));
        }
        log_r.push(r.ln());
        log_k.push(c.k.abs().ln());
    }
    Ok(linear_fit(&log_r, &log_k).0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformFieldResult {
    /// Energy of state 0 evaluated at the array centroid, rad/s.
    pub common_mode: f64,
    /// ε₀ − ε₁, rad/s.
    pub splitting: f64,
}

/// Logical-state energies in a uniform field `field` (V/m). A dot at `r`
/// sits at potential V = −E·r; its energy is qV/ħ.
///
/// The splitting is built from the charge displacements relative to the
/// centroid, so an ideal 4-dot array yields exactly zero.
pub fn uniform_field_energies(
    geom: &QubitGeometry,
    field: Vec3,
    constants: &PhysicalConstants,
) -> UniformFieldResult {
    let q_over_hbar = constants.electron_charge / constants.hbar;
    let c = geom.centroid();
    let displacement = |state| -> (Vec3, usize) {
        let occ = geom.occupancy(state).expect("logical state");
        let sum = occ
            .iter()
            .fold(Vec3::ZERO, |acc, &i| acc + (geom.dots()[i] - c));
        (sum, occ.len())
    };
    let (d0, n0) = displacement(BasisState::Zero);
    let (d1, _) = displacement(BasisState::One);
    let potential_at_centroid = -field.dot(c);
    UniformFieldResult {
        common_mode: q_over_hbar * n0 as f64 * potential_at_centroid,
        splitting: q_over_hbar * -field.dot(d0 - d1),
    }
}
