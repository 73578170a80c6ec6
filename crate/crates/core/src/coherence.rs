//! Coherence decay of a qubit dephased by independent telegraph fluctuators.
//!
//! A fluctuator with coupling k and switching rate λ adds H = k ξ(t) σ_z / 2,
//! so the off-diagonal element picks up exp(−i k ∫ξ). The noise average has
//! the closed form
//!
//! ```text
//! e^{−λt} [cos ωt + (λ/ω) sin ωt],   ω = √(k² − λ²)
//! ```
//!
//! continued to the hyperbolic form when k < λ. Many independent
//! fluctuators multiply.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::electrostatics::TrapCoupling;
use crate::error::{ensure, Error, Result};
use crate::geometry::TrapEnsemble;
use crate::rng::stream_rng;
use crate::telegraph::{sample_record_with, InitialSign};

/// Coupling and switching rate of one trap as seen by one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fluctuator {
    /// rad/s
    pub k: f64,
    /// Hz
    pub rate: f64,
}

/// Pair up an ensemble's switching rates with its couplings.
pub fn fluctuators(ensemble: &TrapEnsemble, couplings: &[TrapCoupling]) -> Vec<Fluctuator> {
    couplings
        .iter()
        .map(|c| Fluctuator {
            k: c.k,
            rate: ensemble.traps[c.trap_index].rate,
        })
        .collect()
}

/// ρ₀₁(t)/ρ₀₁(0) sampled on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTrace {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    /// 0 for analytic traces.
    pub n_trajectories: usize,
    /// Standard error of the complex trajectory mean; zeros for analytic
    /// traces.
    pub stderr: Vec<f64>,
}

impl CoherenceTrace {
    fn analytic(times: &[f64], values: impl Iterator<Item = f64>) -> Self {
        CoherenceTrace {
            times: times.to_vec(),
            values: values.map(|v| Complex64::new(v, 0.0)).collect(),
            n_trajectories: 0,
            stderr: vec![0.0; times.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    ensure(
        times.iter().all(|t| *t >= 0.0 && t.is_finite()) && times.windows(2).all(|w| w[0] <= w[1]),
        || "time grid must be non-negative, finite and ascending".into(),
    )
}

/// Noise-averaged coherence factor of one fluctuator at time `t`.
pub fn single_factor(k: f64, lambda: f64, t: f64) -> f64 {
    let k = k.abs();
    if t == 0.0 {
        return 1.0;
    }
    if k > lambda {
        let w = (k - lambda).sqrt() * (k + lambda).sqrt();
        let wt = w * t;
        // sin(ωt)/ω written as t·sinc(ωt) stays finite as ω → 0.
        let sinc = if wt.abs() < 1e-8 {
            1.0 - wt * wt / 6.0
        } else {
            wt.sin() / wt
        };
        (-lambda * t).exp() * (wt.cos() + lambda * t * sinc)
    } else if k == lambda {
        (-lambda * t).exp() * (1.0 + lambda * t)
    } else {
        let nu = (lambda - k).sqrt() * (lambda + k).sqrt();
        let nt = nu * t;
        if nt < 1.0 {
            let sinhc = if nt < 1e-8 {
                1.0 + nt * nt / 6.0
            } else {
                nt.sinh() / nt
            };
            (-lambda * t).exp() * (nt.cosh() + lambda * t * sinhc)
        } else {
            // ½[(1 + λ/ν) e^{−(λ−ν)t} + (1 − λ/ν) e^{−(λ+ν)t}], with
            // λ − ν = k²/(λ + ν) to avoid cancellation.
            let slow = k * k / (lambda + nu);
            0.5 * ((1.0 + lambda / nu) * (-slow * t).exp()
                + (1.0 - lambda / nu) * (-(lambda + nu) * t).exp())
        }
    }
}

pub fn analytic_single(k: f64, lambda: f64, times: &[f64]) -> Result<CoherenceTrace> {
    ensure(k >= 0.0 && k.is_finite(), || {
        format!("coupling must be non-negative, got {k}")
    })?;
    ensure(lambda > 0.0 && lambda.is_finite(), || {
        format!("rate must be positive, got {lambda}")
    })?;
    check_times(times)?;
    Ok(CoherenceTrace::analytic(
        times,
        times.iter().map(|&t| single_factor(k, lambda, t)),
    ))
}

/// Product of single-fluctuator factors.
pub fn analytic_many(fluct: &[Fluctuator], times: &[f64]) -> Result<CoherenceTrace> {
    for f in fluct {
        ensure(f.k.is_finite(), || "coupling must be finite".into())?;
        ensure(f.rate > 0.0 && f.rate.is_finite(), || {
            format!("rate must be positive, got {}", f.rate)
        })?;
    }
    check_times(times)?;
    Ok(CoherenceTrace::analytic(
        times,
        times.iter().map(|&t| {
            fluct
                .iter()
                .map(|f| single_factor(f.k, f.rate, t))
                .product()
        }),
    ))
}

/// Parabolic onset 1 − k_eff² t² / 2.
pub fn short_time(k_eff: f64, times: &[f64]) -> CoherenceTrace {
    CoherenceTrace::analytic(
        times,
        times.iter().map(|&t| 1.0 - 0.5 * (k_eff * t).powi(2)),
    )
}

/// Trajectories per work chunk; fixed so the reduction order never depends
/// on the thread count.
const CHUNK: usize = 64;

/// Monte Carlo average of exp(−i Σ_j k_j ∫₀ᵗ ξ_j) over `n_traj` independent
/// noise realisations. Trap `j` of trajectory `n` draws from the stream
/// `(seed, n, j)`.
pub fn mc_dephasing(
    fluct: &[Fluctuator],
    times: &[f64],
    n_traj: usize,
    seed: u64,
) -> Result<CoherenceTrace> {
    ensure(n_traj >= 1, || "need at least one trajectory".into())?;
    check_times(times)?;
    let horizon = times.last().copied().unwrap_or(0.0);
    let nt = times.len();
    if horizon == 0.0 || fluct.is_empty() {
        return Ok(CoherenceTrace {
            times: times.to_vec(),
            values: vec![Complex64::new(1.0, 0.0); nt],
            n_trajectories: n_traj,
            stderr: vec![0.0; nt],
        });
    }

    let chunks: Vec<Result<Accum>> = (0..n_traj.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Accum::new(nt);
            let mut phase = vec![0.0; nt];
            let mut integral = vec![0.0; nt];
            for traj in c * CHUNK..((c + 1) * CHUNK).min(n_traj) {
                phase.iter_mut().for_each(|p| *p = 0.0);
                for (j, f) in fluct.iter().enumerate() {
                    if f.k == 0.0 {
                        continue;
                    }
                    let mut rng = stream_rng(seed, &[traj as u64, j as u64]);
                    let rec =
                        sample_record_with(f.rate, InitialSign::Symmetric, horizon, &mut rng)?;
                    rec.integrate_sorted(times, &mut integral);
                    for (p, i) in phase.iter_mut().zip(&integral) {
                        *p += f.k * i;
                    }
                }
                acc.add(&phase);
            }
            Ok(acc)
        })
        .collect();

    let mut total = Accum::new(nt);
    for c in chunks {
        total.merge(&c?);
    }
    Ok(total.finish(times, n_traj))
}

struct Accum {
    sum: Vec<Complex64>,
    sum_sq: Vec<f64>,
}

impl Accum {
    fn new(n: usize) -> Self {
        Accum {
            sum: vec![Complex64::new(0.0, 0.0); n],
            sum_sq: vec![0.0; n],
        }
    }

    fn add(&mut self, phase: &[f64]) {
        for ((s, q), &p) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(phase) {
            *s += Complex64::from_polar(1.0, -p);
            *q += 1.0;
        }
    }

    fn merge(&mut self, other: &Accum) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
    }

    fn finish(self, times: &[f64], n: usize) -> CoherenceTrace {
        let nf = n as f64;
        let values: Vec<Complex64> = self.sum.iter().map(|s| s / nf).collect();
        let stderr = values
            .iter()
            .zip(&self.sum_sq)
            .map(|(m, q)| {
                if n < 2 {
                    return 0.0;
                }
                let var = ((q - nf * m.norm_sqr()) / (nf - 1.0)).max(0.0);
                (var / nf).sqrt()
            })
            .collect();
        CoherenceTrace {
            times: times.to_vec(),
            values,
            n_trajectories: n,
            stderr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayMethod {
    AnalyticCrossing,
    McCrossing,
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTime {
    pub p: f64,
    /// seconds
    pub tau: f64,
    pub method: DecayMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum DecayOutcome {
    Reached(DecayTime),
    /// |ρ₀₁| never dropped below `p` before `horizon`.
    NotReached {
        p: f64,
        horizon: f64,
    },
}

impl DecayOutcome {
    pub fn tau(&self) -> Option<f64> {
        match self {
            DecayOutcome::Reached(d) => Some(d.tau),
            DecayOutcome::NotReached { .. } => None,
        }
    }
}

/// First time |value| falls below `p`, linearly interpolated between the
/// bracketing samples.
pub fn decay_time(trace: &CoherenceTrace, p: f64) -> Result<DecayOutcome> {
    ensure(p > 0.0 && p < 1.0, || {
        format!("threshold must lie in (0, 1), got {p}")
    })?;
    let first = trace
        .values
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trace".into()))?;
    ensure((first - 1.0).norm() < 1e-9, || {
        "trace must start at 1".into()
    })?;
    let method = if trace.n_trajectories == 0 {
        DecayMethod::AnalyticCrossing
    } else {
        DecayMethod::McCrossing
    };
    let mags: Vec<f64> = trace.values.iter().map(|v| v.norm()).collect();
    match mags.iter().position(|&m| m < p) {
        Some(i) => {
            let (t0, t1) = (trace.times[i - 1], trace.times[i]);
            let (m0, m1) = (mags[i - 1], mags[i]);
            let tau = t0 + (m0 - p) / (m0 - m1) * (t1 - t0);
            Ok(DecayOutcome::Reached(DecayTime { p, tau, method }))
        }
        None => Ok(DecayOutcome::NotReached {
            p,
            horizon: trace.times.last().copied().unwrap_or(0.0),
        }),
    }
}

/// √(2(1−p)) / k_eff.
pub fn decay_time_formula(k_eff: f64, p: f64) -> Result<DecayTime> {
    ensure(p > 0.0 && p < 1.0, || {
        format!("threshold must lie in (0, 1), got {p}")
    })?;
    Ok(DecayTime {
        p,
        tau: (2.0 * (1.0 - p)).sqrt() / k_eff,
        method: DecayMethod::Formula,
    })
}

/// `n` evenly spaced samples on `[0, horizon]`.
pub fn linear_time_grid(horizon: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| horizon * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Roughly `n` samples: `0`, half log-spaced over `[1e-3 h, h]` and half
/// linear over `(0, h]`, merged and deduplicated. Resolves both the
/// parabolic onset and an oscillatory tail.
pub fn hybrid_time_grid(horizon: f64, n: usize) -> Vec<f64> {
    if n < 4 {
        return linear_time_grid(horizon, n);
    }
    let half = (n - 1) / 2;
    let lo = (horizon * 1e-3).ln();
    let hi = horizon.ln();
    let mut grid: Vec<f64> = (0..half)
        .map(|i| (lo + (hi - lo) * i as f64 / (half - 1) as f64).exp())
        .collect();
    let lin = n - 1 - half;
    grid.extend((1..=lin).map(|i| horizon * i as f64 / lin as f64));
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * horizon);
    if let Some(last) = grid.last_mut() {
        *last = horizon;
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_never_decays() {
        let times = linear_time_grid(1e-8, 50);
        let tr = analytic_single(0.0, 2e8, &times).unwrap();
        assert!(tr.values.iter().all(|v| (v.re - 1.0).abs() < 1e-12));
    }

    #[test]
    fn slow_switching_gives_coherent_precession() {
        let k = 1e9;
        let v = single_factor(k, 1.0, 5e-9);
        assert!((v - (k * 5e-9).cos()).abs() < 1e-6);
    }

    #[test]
    fn branches_join_continuously() {
        let lambda = 2e8;
        let t = 3e-9;
        let at = single_factor(lambda, lambda, t);
        for eps in [1e-6, 1e-9] {
            let above = single_factor(lambda * (1.0 + eps), lambda, t);
            let below = single_factor(lambda * (1.0 - eps), lambda, t);
            assert!((above - at).abs() < 1e-5, "{above} {at}");
            assert!((below - at).abs() < 1e-5, "{below} {at}");
        }
        // Overdamped: the two forms agree where they hand over.
        let k = 0.3 * lambda;
        let nu = (lambda * lambda - k * k).sqrt();
        let t_switch = 1.0 / nu;
        let a = single_factor(k, lambda, t_switch * (1.0 - 1e-12));
        let b = single_factor(k, lambda, t_switch * (1.0 + 1e-12));
        assert!((a - b).abs() < 1e-9);
        // Deep overdamped tail stays finite and positive.
        let tail = single_factor(1e3, 1e9, 1e-3);
        assert!(tail.is_finite() && tail > 0.0 && tail < 1.0);
    }

    #[test]
    fn analytic_values_bounded() {
        for &k in &[0.0, 1e7, 2e8, 5e8, 1e9, 1e10] {
            for &lambda in &[1e6, 2e8, 1e9] {
                for i in 0..200 {
                    let v = single_factor(k, lambda, i as f64 * 1e-10);
                    assert!(
                        (-1.0 - 1e-12..=1.0 + 1e-12).contains(&v),
                        "k={k} l={lambda} v={v}"
                    );
                }
            }
        }
    }

    #[test]
    fn product_form_identities() {
        let times = linear_time_grid(2e-8, 40);
        let f = Fluctuator { k: 7e8, rate: 2e8 };
        let one = analytic_many(&[f], &times).unwrap();
        assert_eq!(one, analytic_single(f.k, f.rate, &times).unwrap());
        let two = analytic_many(&[f, f], &times).unwrap();
        for (a, b) in two.values.iter().zip(&one.values) {
            assert!((a.re - b.re * b.re).abs() < 1e-15);
        }
        let none = analytic_many(&[], &times).unwrap();
        assert!(none.values.iter().all(|v| v.re == 1.0));
    }

    #[test]
    fn decay_time_examples() {
        let k_eff = 1e9;
        let times = linear_time_grid(3e-10, 3001);
        let tr = short_time(k_eff, &times);
        assert_eq!(tr.values[0].re, 1.0);
        let d = decay_time(&tr, 0.99).unwrap().tau().unwrap();
        assert!((d - 1.414_213_562e-10).abs() < 1e-15, "{d}");
        let f = decay_time_formula(k_eff, 0.99).unwrap();
        assert!((f.tau - 0.02f64.sqrt() / k_eff).abs() < 1e-24);

        let flat = analytic_single(0.0, 1e8, &times).unwrap();
        assert!(matches!(
            decay_time(&flat, 0.01).unwrap(),
            DecayOutcome::NotReached { .. }
        ));
        assert!(decay_time(&tr, 1.0).is_err());
        assert!(decay_time(&tr, 0.0).is_err());
    }

    #[test]
    fn mc_without_traps_is_flat() {
        let times = linear_time_grid(1e-8, 20);
        let tr = mc_dephasing(&[], &times, 10, 1).unwrap();
        assert!(tr.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert!(mc_dephasing(&[], &times, 0, 1).is_err());
    }

    #[test]
    fn mc_is_deterministic_and_thread_independent() {
        let times = linear_time_grid(1e-8, 30);
        let fl = [
            Fluctuator { k: 1e9, rate: 2e8 },
            Fluctuator { k: 3e8, rate: 1e9 },
        ];
        let a = mc_dephasing(&fl, &times, 300, 5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| mc_dephasing(&fl, &times, 300, 5).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, mc_dephasing(&fl, &times, 300, 6).unwrap());
    }

    #[test]
    fn hybrid_grid_shape() {
        let g = hybrid_time_grid(1e-9, 400);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.len() > 390 && g.len() <= 400);
        assert!(g[1] <= 1.1e-12);
    }
}
