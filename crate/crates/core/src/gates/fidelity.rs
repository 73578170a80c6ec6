//! Average gate fidelity over the six cardinal Bloch states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Vector2, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    dipole_gate, propagate_dipole_noisy, propagate_noisy, GateDesign, GateTrap, HubbardModel,
    Unitary2,
};
use crate::error::{ensure, Result};
use crate::rng::stream_rng;
use crate::stats::{mean, std_error};
use crate::telegraph::{sample_record_with, InitialSign, SwitchingRecord};

/// A gate to be run under trap noise, with its ideal logical action.
#[derive(Clone, Debug, PartialEq)]
pub enum NoisyGate {
    /// 4-dot gate; `t_f` in units of 1/δ.
    Quadrupole {
        model: HubbardModel,
        t_f: f64,
        target: Unitary2,
    },
    /// 2-dot gate H = Ω₂σ_x for `t_f_s` seconds.
    Dipole { omega2: f64, t_f_s: f64 },
}

impl NoisyGate {
    pub fn quadrupole(design: &GateDesign, delta: f64) -> Result<Self> {
        Ok(NoisyGate::Quadrupole {
            model: design.model(delta)?,
            t_f: design.t_f,
            target: design.target(),
        })
    }

    /// σ_x^{π/2} on the 2-dot qubit: Ω₂ = π/(4 t_f).
    pub fn dipole_half_pi(t_f_s: f64) -> Self {
        NoisyGate::Dipole {
            omega2: PI / (4.0 * t_f_s),
            t_f_s,
        }
    }

    pub fn duration_s(&self) -> f64 {
        match self {
            NoisyGate::Quadrupole { model, t_f, .. } => t_f / model.delta,
            NoisyGate::Dipole { t_f_s, .. } => *t_f_s,
        }
    }

    pub fn basis_dim(&self) -> usize {
        match self {
            NoisyGate::Quadrupole { .. } => 4,
            NoisyGate::Dipole { .. } => 2,
        }
    }

    fn ideal(&self) -> Unitary2 {
        match self {
            NoisyGate::Quadrupole { target, .. } => *target,
            NoisyGate::Dipole { omega2, t_f_s } => dipole_gate(*omega2, *t_f_s),
        }
    }

    /// Final state projected onto the logical subspace (not renormalised,
    /// so leakage shows up as lost fidelity).
    fn run(
        &self,
        traps: &[GateTrap],
        records: &[SwitchingRecord],
        psi: &Vector2<Complex64>,
    ) -> Result<Vector2<Complex64>> {
        match self {
            NoisyGate::Quadrupole { model, t_f, .. } => {
                let u = propagate_noisy(model, traps, records, *t_f)?;
                let full =
                    u * Vector4::new(psi[0], psi[1], Complex64::default(), Complex64::default());
                Ok(Vector2::new(full[0], full[1]))
            }
            NoisyGate::Dipole { omega2, t_f_s } => {
                Ok(propagate_dipole_noisy(*omega2, traps, records, *t_f_s)? * psi)
            }
        }
    }
}

/// |±z⟩, |±x⟩, |±y⟩ in the logical basis.
pub fn cardinal_states() -> [(&'static str, Vector2<Complex64>); 6] {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, FRAC_1_SQRT_2);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [
        ("+z", Vector2::new(one, zero)),
        ("-z", Vector2::new(zero, one)),
        ("+x", Vector2::new(r, r)),
        ("-x", Vector2::new(r, -r)),
        ("+y", Vector2::new(r, i)),
        ("-y", Vector2::new(r, -i)),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFidelity {
    pub state: String,
    pub fidelity: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    /// Mean over states and trajectories.
    pub fidelity: f64,
    /// 1 − fidelity.
    pub error: f64,
    /// Standard error of `fidelity` over all samples.
    pub stderr: f64,
    pub per_state: Vec<StateFidelity>,
    pub n_traj_per_state: usize,
    /// Per-sample fidelities, state-major.
    #[serde(skip)]
    pub samples: Vec<f64>,
}

impl FidelityResult {
    /// Per-sample errors 1 − f.
    pub fn error_samples(&self) -> Vec<f64> {
        self.samples.iter().map(|f| 1.0 - f).collect()
    }
}

/// Run `n_traj` noise realisations for each cardinal input state and
/// compare each output with the ideal gate's output. Trap `j` of trajectory
/// `n` for input state `s` draws from the stream `(seed, s, n, j)`.
pub fn average_fidelity(
    gate: &NoisyGate,
    traps: &[GateTrap],
    n_traj: usize,
    seed: u64,
) -> Result<FidelityResult> {
    ensure(n_traj >= 1, || {
        "need at least one trajectory per state".into()
    })?;
    let dim = gate.basis_dim();
    ensure(traps.iter().all(|t| t.shifts.len() == dim), || {
        format!("gate traps need {dim} basis shifts each")
    })?;
    let horizon = gate.duration_s();
    let ideal = gate.ideal();
    let states = cardinal_states();

    let samples: Vec<f64> = (0..states.len() * n_traj)
        .into_par_iter()
        .map(|item| -> Result<f64> {
            let (s, traj) = (item / n_traj, item % n_traj);
            let psi = &states[s].1;
            let records = traps
                .iter()
                .enumerate()
                .map(|(j, t)| {
                    let mut rng = stream_rng(seed, &[s as u64, traj as u64, j as u64]);
                    sample_record_with(t.rate, InitialSign::Symmetric, horizon, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            let out = gate.run(traps, &records, psi)?;
            let want = ideal * psi;
            Ok(want.dotc(&out).norm_sqr())
        })
        .collect::<Result<_>>()?;

    let per_state = states
        .iter()
        .enumerate()
        .map(|(s, (label, _))| {
            let chunk = &samples[s * n_traj..(s + 1) * n_traj];
            StateFidelity {
                state: (*label).to_string(),
                fidelity: mean(chunk),
                stderr: std_error(chunk),
            }
        })
        .collect();
    let fidelity = mean(&samples);
    Ok(FidelityResult {
        fidelity,
        error: 1.0 - fidelity,
        stderr: std_error(&samples),
        per_state,
        n_traj_per_state: n_traj,
        samples,
    })
}
