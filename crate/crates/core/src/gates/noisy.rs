//! Gate propagation under telegraph noise: the trap signs are constant
//! between switches, so the propagator is an ordered product of exact
//! segment exponentials.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{evolve_symmetric, hamiltonian, HubbardModel, Unitary2, Unitary4};
use crate::electrostatics::TrapCoupling;
use crate::error::{ensure, Error, Result};
use crate::geometry::{QubitGeometry, TrapEnsemble};
use crate::telegraph::{merged_segments, SwitchingRecord};

/// One trap as seen by a gate: its switching rate and the energy shift of
/// each basis state when the trap sign is +1 (rad/s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateTrap {
    pub rate: f64,
    pub shifts: Vec<f64>,
}

/// Basis-state shifts from per-dot couplings (state 0: A+C, state 1: B+D,
/// ε₀: A+B, ε₁: C+D for the 4-dot array), multiplied by `scale`.
pub fn gate_traps(
    ensemble: &TrapEnsemble,
    couplings: &[TrapCoupling],
    geom: &QubitGeometry,
    scale: f64,
) -> Vec<GateTrap> {
    couplings
        .iter()
        .map(|c| GateTrap {
            rate: ensemble.traps[c.trap_index].rate,
            shifts: c
                .basis_shifts(geom)
                .into_iter()
                .map(|s| s * scale)
                .collect(),
        })
        .collect()
}

fn check_records(
    traps: &[GateTrap],
    records: &[SwitchingRecord],
    horizon: f64,
    dim: usize,
) -> Result<f64> {
    ensure(traps.len() == records.len(), || {
        format!(
            "{} traps but {} switching records",
            traps.len(),
            records.len()
        )
    })?;
    ensure(traps.iter().all(|t| t.shifts.len() == dim), || {
        format!("every trap needs {dim} basis shifts")
    })?;
    match records.first() {
        None => Ok(horizon),
        Some(r) if (r.horizon - horizon).abs() <= 1e-12 * horizon => Ok(r.horizon),
        Some(_) => Err(Error::HorizonMismatch),
    }
}

/// 4-level propagator over the gate time `t_f` (units of 1/δ); the records
/// run on the physical time axis `[0, t_f/δ]`.
pub fn propagate_noisy(
    model: &HubbardModel,
    traps: &[GateTrap],
    records: &[SwitchingRecord],
    t_f: f64,
) -> Result<Unitary4> {
    ensure(t_f >= 0.0, || {
        format!("gate time must be non-negative, got {t_f}")
    })?;
    if t_f == 0.0 {
        return Ok(Unitary4::identity());
    }
    let horizon = check_records(traps, records, t_f / model.delta, 4)?;
    let h0 = hamiltonian(model);
    let mut u = Unitary4::identity();
    for seg in merged_segments(records, horizon)? {
        let mut h = h0;
        for (trap, &sign) in traps.iter().zip(&seg.signs) {
            for b in 0..4 {
                h[(b, b)] += f64::from(sign) * trap.shifts[b] / model.delta;
            }
        }
        u = evolve_symmetric(&h, seg.duration() * model.delta) * u;
    }
    Ok(u)
}

/// exp(−i(Ω₂σ_x + bσ_z)t).
fn dipole_step(omega2: f64, bias: f64, t: f64) -> Unitary2 {
    let a = omega2.hypot(bias);
    if a == 0.0 {
        return Unitary2::identity();
    }
    let (s, c) = (a * t).sin_cos();
    let (nx, nz) = (omega2 / a, bias / a);
    Unitary2::new(
        Complex64::new(c, -s * nz),
        Complex64::new(0.0, -s * nx),
        Complex64::new(0.0, -s * nx),
        Complex64::new(c, s * nz),
    )
}

/// Noiseless 2-dot drive H = Ω₂σ_x for `t` seconds.
pub fn dipole_gate(omega2: f64, t: f64) -> Unitary2 {
    dipole_step(omega2, 0.0, t)
}

/// 2-dot propagator under H = Ω₂σ_x + Σ_j ξ_j diag(s₀ⱼ, s₁ⱼ). Only the
/// traceless part (s₀ⱼ − s₁ⱼ)/2 = kⱼ/2 matters; the common mode is a
/// global phase.
pub fn propagate_dipole_noisy(
    omega2: f64,
    traps: &[GateTrap],
    records: &[SwitchingRecord],
    t_f: f64,
) -> Result<Unitary2> {
    ensure(t_f >= 0.0, || {
        format!("gate time must be non-negative, got {t_f}")
    })?;
    if t_f == 0.0 {
        return Ok(Unitary2::identity());
    }
    let horizon = check_records(traps, records, t_f, 2)?;
    let mut u = Unitary2::identity();
    for seg in merged_segments(records, horizon)? {
        let bias: f64 = traps
            .iter()
            .zip(&seg.signs)
            .map(|(t, &s)| f64::from(s) * 0.5 * (t.shifts[0] - t.shifts[1]))
            .sum();
        u = dipole_step(omega2, bias, seg.duration()) * u;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{design_gate, propagate_noiseless, rotation_error, unitarity_defect};
    use nalgebra::Matrix4;

    fn diag_shift(traps: &[GateTrap], signs: &[i8]) -> Matrix4<f64> {
        let mut d = Matrix4::zeros();
        for (t, &s) in traps.iter().zip(signs) {
            for b in 0..4 {
                d[(b, b)] += f64::from(s) * t.shifts[b];
            }
        }
        d
    }

    /// Scaling-and-squaring Taylor exponential of −iHt, independent of the
    /// eigen-decomposition path.
    fn expm_taylor(h: &Matrix4<f64>, t: f64) -> Unitary4 {
        let a: Unitary4 = h.map(|x| Complex64::new(0.0, -x * t));
        let norm = a.norm();
        let squarings = (norm.log2().ceil().max(0.0) as i32) + 4;
        let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
        let mut term = Unitary4::identity();
        let mut sum = Unitary4::identity();
        for k in 1..30 {
            term = term * scaled / Complex64::new(k as f64, 0.0);
            sum += term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    fn records(
        n: usize,
        horizon: f64,
        switches: &[Vec<f64>],
        signs: &[i8],
    ) -> Vec<SwitchingRecord> {
        (0..n)
            .map(|j| SwitchingRecord {
                switch_times: switches[j].clone(),
                initial_sign: signs[j],
                horizon,
            })
            .collect()
    }

    #[test]
    fn without_noise_matches_noiseless() {
        let d = design_gate(4, 3).unwrap();
        let model = d.model(3.84e12).unwrap();
        let u = propagate_noisy(&model, &[], &[], d.t_f).unwrap();
        assert!((u - propagate_noiseless(&model, d.t_f)).norm() < 1e-12);
        let zero_traps = vec![
            GateTrap {
                rate: 2e8,
                shifts: vec![0.0; 4]
            };
            2
        ];
        let recs = records(2, d.t_f / model.delta, &[vec![1e-12], vec![]], &[1, -1]);
        let u = propagate_noisy(&model, &zero_traps, &recs, d.t_f).unwrap();
        assert!((u - propagate_noiseless(&model, d.t_f)).norm() < 1e-12);
    }

    #[test]
    fn segment_product_matches_taylor_oracle() {
        let d = design_gate(2, 1).unwrap();
        let model = d.model(1e12).unwrap();
        let horizon = d.t_f / model.delta;
        let traps = vec![
            GateTrap {
                rate: 1.0,
                shifts: vec![3e10, -1e10, 5e10, 2e10],
            },
            GateTrap {
                rate: 1.0,
                shifts: vec![-2e10, 4e10, 1e10, -6e10],
            },
        ];
        let switch_a = 0.3 * horizon;
        let switch_b = 0.7 * horizon;
        let recs = records(2, horizon, &[vec![switch_a], vec![switch_b]], &[1, -1]);
        let u = propagate_noisy(&model, &traps, &recs, d.t_f).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);

        let h0 = hamiltonian(&model);
        let bounds = [0.0, switch_a, switch_b, horizon];
        let signs = [[1i8, -1], [-1, -1], [-1, 1]];
        let mut want = Unitary4::identity();
        for (w, s) in bounds.windows(2).zip(signs) {
            let h = h0 + diag_shift(&traps, &s) / model.delta;
            want = expm_taylor(&h, (w[1] - w[0]) * model.delta) * want;
        }
        assert!((u - want).norm() < 1e-10, "{}", (u - want).norm());
    }

    #[test]
    fn common_mode_noise_is_a_global_phase() {
        let d = design_gate(2, 1).unwrap();
        let model = d.model(1e12).unwrap();
        let horizon = d.t_f / model.delta;
        let traps = vec![GateTrap {
            rate: 1.0,
            shifts: vec![7e10; 4],
        }];
        let recs = records(1, horizon, &[vec![0.4 * horizon]], &[1]);
        let u = propagate_noisy(&model, &traps, &recs, d.t_f).unwrap();
        assert!(rotation_error(&u, &d.target()) < 1e-12);
    }

    #[test]
    fn mismatched_records_rejected() {
        let d = design_gate(2, 1).unwrap();
        let model = d.model(1e12).unwrap();
        let traps = vec![GateTrap {
            rate: 1.0,
            shifts: vec![0.0; 4],
        }];
        let recs = records(1, 1.0, &[vec![]], &[1]);
        assert!(matches!(
            propagate_noisy(&model, &traps, &recs, d.t_f),
            Err(Error::HorizonMismatch)
        ));
        assert!(propagate_noisy(&model, &traps, &[], d.t_f).is_err());
    }

    #[test]
    fn dipole_drive_closed_form() {
        let t_f = 5e-11;
        let omega2 = std::f64::consts::PI / (4.0 * t_f);
        let u = dipole_gate(omega2, t_f);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[(0, 0)] - Complex64::new(h, 0.0)).norm() < 1e-14);
        assert!((u[(1, 0)] - Complex64::new(0.0, -h)).norm() < 1e-14);

        let traps = vec![GateTrap {
            rate: 1.0,
            shifts: vec![1e10, -1e10],
        }];
        let recs = records(1, t_f, &[vec![2e-11]], &[1]);
        let u = propagate_dipole_noisy(omega2, &traps, &recs, t_f).unwrap();
        assert!(unitarity_defect(&u) < 1e-13);
        // First segment: bias +1e10, second: −1e10.
        let want = dipole_step(omega2, -1e10, 3e-11) * dipole_step(omega2, 1e10, 2e-11);
        assert!((u - want).norm() < 1e-14);
    }
}
