use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::Vector4;
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{propagate_noiseless, HubbardModel, Unitary2, Unitary4};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// π/2 rotation about the equatorial axis at angle γ.
    HalfPi,
    /// Logical NOT.
    Not,
}

/// Tunnelling rate and timing for which the 4-dot evolution closes on the
/// logical subspace.
///
/// Choosing 4Ω = √((n/m)² − 1) makes E₃ and E₄ rational, so at
/// t_f = 2jmπ/n the ε-amplitudes vanish again while |0⟩ and |1⟩ have
/// equal weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDesign {
    pub n: u32,
    pub m: u32,
    pub j: u32,
    /// Ω in units of δ.
    pub omega: f64,
    /// Gate time in units of 1/δ.
    pub t_f: f64,
    /// Rotation-axis angle, reduced to [0, 2π).
    pub gamma: f64,
    pub kind: GateKind,
    /// Largest ε-population reached from any logical input, (n² − m²)/n².
    pub max_transient_population: f64,
    /// m (n² − m²)/n², proportional to the time-integrated ε-population.
    pub integrated_population_scale: f64,
}

pub fn design_gate(n: u32, m: u32) -> Result<GateDesign> {
    let invalid = |reason: &str| Error::InvalidDesign {
        n,
        m,
        reason: reason.to_string(),
    };
    if m < 1 {
        return Err(invalid("m must be positive"));
    }
    if n % 2 != 0 {
        return Err(invalid("n must be even"));
    }
    if n <= m {
        return Err(invalid("n must exceed m"));
    }
    if n.gcd(&m) != 1 {
        return Err(invalid("n and m must be coprime"));
    }
    // Smallest positive j with j·m ≡ n/2 (mod n).
    let ext = i64::from(m).extended_gcd(&i64::from(n));
    let m_inv = ext.x.rem_euclid(i64::from(n));
    let j = (i64::from(n / 2) * m_inv).rem_euclid(i64::from(n)) as u32;

    let (nf, mf) = (f64::from(n), f64::from(m));
    let t_f = 2.0 * f64::from(j) * mf * PI / nf;
    if 2 * j != n {
        return Err(invalid("no half-π timing for this pair"));
    }
    let pop = (nf * nf - mf * mf) / (nf * nf);
    Ok(GateDesign {
        n,
        m,
        j,
        omega: ((nf / mf).powi(2) - 1.0).sqrt() / 4.0,
        t_f,
        gamma: (PI * f64::from(n - m) / 2.0).rem_euclid(TAU),
        kind: GateKind::HalfPi,
        max_transient_population: pop,
        integrated_population_scale: mf * pop,
    })
}

impl GateDesign {
    /// Same tunnelling, run for 2πm: a logical NOT.
    pub fn not_gate(&self) -> GateDesign {
        GateDesign {
            t_f: 2.0 * PI * f64::from(self.m),
            kind: GateKind::Not,
            ..*self
        }
    }

    pub fn model(&self, delta: f64) -> Result<HubbardModel> {
        HubbardModel::new(delta, self.omega * delta)
    }

    /// Gate time in seconds for ε-energy `delta` (rad/s).
    pub fn duration_s(&self, delta: f64) -> f64 {
        self.t_f / delta
    }

    /// Intended logical unitary (up to global phase):
    /// |0⟩ ↦ (|0⟩ + e^{iγ}|1⟩)/√2, |1⟩ ↦ (|0⟩ − e^{iγ}|1⟩)/√2 up to a
    /// per-column phase for the π/2 gate; σ_x for the NOT.
    pub fn target(&self) -> Unitary2 {
        match self.kind {
            GateKind::HalfPi => {
                let e = Complex64::from_polar(1.0, self.gamma);
                Unitary2::new(
                    Complex64::new(1.0, 0.0),
                    -e.conj(),
                    e,
                    Complex64::new(1.0, 0.0),
                ) * Complex64::new(FRAC_1_SQRT_2, 0.0)
            }
            GateKind::Not => Unitary2::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ),
        }
    }
}

/// Restriction of a 4-level propagator to the logical subspace.
pub fn logical_block(u: &Unitary4) -> Unitary2 {
    u.fixed_view::<2, 2>(0, 0).into_owned()
}

/// 1 − |Tr(V†U_L)|/2: zero iff the logical block equals `target` up to a
/// global phase (given no leakage).
pub fn rotation_error(u: &Unitary4, target: &Unitary2) -> f64 {
    let tr = (target.adjoint() * logical_block(u)).trace();
    (1.0 - tr.norm() / 2.0).max(0.0)
}

/// Largest population left outside the logical subspace over all logical
/// inputs: the top singular value squared of the ε←logical block.
pub fn leakage(u: &Unitary4) -> f64 {
    let b = u.fixed_view::<2, 2>(2, 0).into_owned();
    let g = b.adjoint() * b;
    let tr = (g[(0, 0)] + g[(1, 1)]).re;
    let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
    0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())
}

/// Worst-case ε-population over `samples + 1` evenly spaced times in
/// `[0, t_f]` (units of 1/δ).
pub fn max_transient_population(model: &HubbardModel, t_f: f64, samples: usize) -> f64 {
    (0..=samples)
        .map(|i| leakage(&propagate_noiseless(model, t_f * i as f64 / samples as f64)))
        .fold(0.0, f64::max)
}

/// Populations (p0, p1, pε₀, pε₁) of a noiseless evolution from `initial`.
pub fn population_trace(
    model: &HubbardModel,
    initial: &Vector4<Complex64>,
    times: &[f64],
) -> Vec<[f64; 4]> {
    times
        .iter()
        .map(|&t| {
            let psi = propagate_noiseless(model, t) * initial;
            [
                psi[0].norm_sqr(),
                psi[1].norm_sqr(),
                psi[2].norm_sqr(),
                psi[3].norm_sqr(),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_j(n: u32, m: u32) -> u32 {
        (1..=n).find(|j| (j * m) % n == n / 2).unwrap()
    }

    #[test]
    fn design_examples() {
        let d = design_gate(2, 1).unwrap();
        assert!((d.omega - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(d.j, 1);
        assert!((d.t_f - PI).abs() < 1e-15);
        assert!((d.gamma - PI / 2.0).abs() < 1e-15);
        assert_eq!(d.kind, GateKind::HalfPi);

        let d = design_gate(4, 1).unwrap();
        assert!((d.omega - 15f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(d.j, 2);
        assert!((d.t_f - PI).abs() < 1e-15);
        assert!((d.gamma - 1.5 * PI).abs() < 1e-15);

        let d = design_gate(62, 61).unwrap();
        assert!((4.0 * d.omega - ((62.0f64 / 61.0).powi(2) - 1.0).sqrt()).abs() < 1e-15);
        assert!((d.t_f - 61.0 * PI).abs() < 1e-12);
        assert!((d.max_transient_population - 123.0 / 3844.0).abs() < 1e-15);
        assert!((d.max_transient_population - 0.032).abs() < 5e-4);
    }

    #[test]
    fn j_matches_enumeration() {
        for n in (2..=40).step_by(2) {
            for m in 1..n {
                if n.gcd(&m) != 1 {
                    assert!(design_gate(n, m).is_err());
                    continue;
                }
                let d = design_gate(n, m).unwrap();
                assert_eq!(d.j, brute_force_j(n, m), "n={n} m={m}");
                assert!((d.t_f - 2.0 * f64::from(d.j * m) * PI / f64::from(n)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_pairs_rejected() {
        for (n, m) in [(3, 1), (2, 2), (4, 2), (2, 3), (4, 0)] {
            assert!(
                matches!(design_gate(n, m), Err(Error::InvalidDesign { .. })),
                "{n},{m}"
            );
        }
    }

    #[test]
    fn half_pi_gate_maps_zero_as_advertised() {
        let d = design_gate(2, 1).unwrap();
        let u = propagate_noiseless(&d.model(1.0).unwrap(), d.t_f);
        let out = u.column(0);
        // (|0⟩ + i|1⟩)/√2 up to global phase.
        let phase = out[0] / out[0].norm();
        let want = [FRAC_1_SQRT_2, 0.0];
        assert!((out[0] / phase - Complex64::new(want[0], 0.0)).norm() < 1e-12);
        assert!((out[1] / phase - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-12);
        assert!(out[2].norm() < 1e-12 && out[3].norm() < 1e-12);
        assert!(rotation_error(&u, &d.target()) < 1e-12);
        let not = d.not_gate();
        let u2 = propagate_noiseless(&d.model(1.0).unwrap(), not.t_f);
        assert!(rotation_error(&u2, &not.target()) < 1e-12);
        assert!(leakage(&u2) < 1e-12);
    }

    #[test]
    fn transient_population_from_zero_is_half_the_worst_case() {
        let d = design_gate(4, 3).unwrap();
        let model = d.model(1.0).unwrap();
        let times: Vec<f64> = (0..=4000).map(|i| d.t_f * i as f64 / 4000.0).collect();
        let zero = Vector4::new(
            Complex64::new(1.0, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::default(),
        );
        let trace = population_trace(&model, &zero, &times);
        let peak = trace.iter().map(|p| p[2] + p[3]).fold(0.0, f64::max);
        assert!((peak - 0.5 * d.max_transient_population).abs() < 1e-4);
        assert!(trace
            .iter()
            .all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
        let worst = max_transient_population(&model, d.t_f, 4000);
        assert!((worst - d.max_transient_population).abs() < 1e-4);
    }
}
