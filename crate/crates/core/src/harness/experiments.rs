//! Figure-level studies. Each is a pure function of the config (and seed).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::coherence::{
    analytic_many, decay_time, decay_time_formula, fluctuators, hybrid_time_grid, linear_time_grid,
    mc_dephasing, CoherenceTrace, DecayOutcome, DecayTime,
};
use crate::electrostatics::{effective_coupling, ensemble_couplings, PhysicalConstants};
use crate::error::Result;
use crate::gates::{
    average_fidelity, design_gate, gate_traps, population_trace, propagate_noiseless,
    FidelityResult, GateDesign, NoisyGate,
};
use crate::geometry::{perturb_geometry, GeometrySet, QubitGeometry, QubitKind, TrapEnsemble};
use crate::rng::stream_seed;
use crate::stats::{bootstrap_ratio_ci, linear_fit, mean, median, Spread};

// Stream tags keep each experiment's random draws independent.
const ENSEMBLE: u64 = 1;
const TRAJECTORIES: u64 = 2;
const PERTURBATION: u64 = 3;
const BOOTSTRAP: u64 = 4;

/// Below this a gate error is treated as numerically zero.
pub const ERROR_FLOOR: f64 = 1e-12;

/// `a / b`, or `None` when `b` is zero.
pub fn ratio(a: f64, b: f64) -> Option<f64> {
    (b != 0.0).then(|| a / b)
}

/// Ensemble `index` at density slot `slot`.
pub fn draw_ensemble(
    cfg: &RunConfig,
    geoms: &GeometrySet,
    density: f64,
    slot: u64,
    index: u64,
) -> Result<TrapEnsemble> {
    let mut avoid = geoms.dipole.dots().to_vec();
    avoid.extend_from_slice(geoms.quadrupole.dots());
    cfg.sampler(density)?
        .sample(stream_seed(cfg.seed, &[ENSEMBLE, slot, index]), &avoid)
}

fn keff(ens: &TrapEnsemble, geom: &QubitGeometry, c: &PhysicalConstants) -> Result<f64> {
    Ok(effective_coupling(&ensemble_couplings(ens, geom, c)?).k_eff)
}

// ---------------------------------------------------------------------------
// Coherence decay

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub p: f64,
    pub analytic: DecayOutcome,
    pub mc: DecayOutcome,
    pub formula: DecayTime,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingDecay {
    pub kind: QubitKind,
    pub k_eff: f64,
    pub horizon_s: f64,
    pub mc: CoherenceTrace,
    pub analytic: CoherenceTrace,
    pub decay_times: Vec<DecayReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayComparison {
    pub ensemble: TrapEnsemble,
    pub dipole: EncodingDecay,
    pub quadrupole: EncodingDecay,
    /// k_eff(2QD) / k_eff(4QD).
    pub ratio: Option<f64>,
}

fn encoding_decay(
    cfg: &RunConfig,
    ens: &TrapEnsemble,
    geom: &QubitGeometry,
    tag: u64,
) -> Result<EncodingDecay> {
    let c = cfg.constants();
    let couplings = ensemble_couplings(ens, geom, &c)?;
    let k_eff = effective_coupling(&couplings).k_eff;
    let fl = fluctuators(ens, &couplings);
    let horizon_s = match cfg.horizon_s {
        Some(h) => h,
        None if k_eff > 0.0 => 6.0 / k_eff,
        None => 1e-6,
    };
    let times = hybrid_time_grid(horizon_s, cfg.time_points);
    let analytic = analytic_many(&fl, &times)?;
    let mc = mc_dephasing(
        &fl,
        &times,
        cfg.n_trajectories,
        stream_seed(cfg.seed, &[TRAJECTORIES, tag]),
    )?;
    let decay_times = cfg
        .thresholds
        .iter()
        .map(|&p| {
            Ok(DecayReport {
                p,
                analytic: decay_time(&analytic, p)?,
                mc: decay_time(&mc, p)?,
                formula: decay_time_formula(k_eff, p)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EncodingDecay {
        kind: geom.kind(),
        k_eff,
        horizon_s,
        mc,
        analytic,
        decay_times,
    })
}

/// One trap distribution, shared by both encodings; Monte Carlo and
/// analytic coherence for each.
pub fn run_decay_comparison(cfg: &RunConfig) -> Result<DecayComparison> {
    cfg.validate()?;
    let geoms = cfg.geometries()?;
    let ensemble = draw_ensemble(cfg, &geoms, cfg.density_per_m2, 0, 0)?;
    run_decay_comparison_on(cfg, &geoms, ensemble)
}

/// As [`run_decay_comparison`] with caller-supplied geometry and traps.
pub fn run_decay_comparison_on(
    cfg: &RunConfig,
    geoms: &GeometrySet,
    ensemble: TrapEnsemble,
) -> Result<DecayComparison> {
    geoms.validate()?;
    let dipole = encoding_decay(cfg, &ensemble, &geoms.dipole, 2)?;
    let quadrupole = encoding_decay(cfg, &ensemble, &geoms.quadrupole, 4)?;
    let ratio = ratio(dipole.k_eff, quadrupole.k_eff);
    Ok(DecayComparison {
        ensemble,
        dipole,
        quadrupole,
        ratio,
    })
}

// ---------------------------------------------------------------------------
// Decay times against coupling

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTimeRow {
    pub distribution: usize,
    pub keff2_radps: f64,
    pub keff4_radps: f64,
    pub tau2_s: Option<f64>,
    pub tau4_s: Option<f64>,
    /// τ(2QD)/τ(4QD).
    pub tau_ratio: Option<f64>,
    /// k_eff(4QD)/k_eff(2QD); equals `tau_ratio` in the parabolic regime.
    pub keff_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTimeStudy {
    pub p: f64,
    pub rows: Vec<DecayTimeRow>,
    /// Log-log slope of τ_p against k_eff, both encodings pooled.
    pub slope: Option<f64>,
    /// Median of |tau_ratio / keff_ratio − 1| over rows where both exist.
    pub diagonal_median_deviation: Option<f64>,
    /// Encodings (counted individually) whose coherence never fell to p.
    pub not_reached: usize,
}

fn analytic_decay_time(
    cfg: &RunConfig,
    ens: &TrapEnsemble,
    geom: &QubitGeometry,
    p: f64,
) -> Result<(f64, Option<f64>)> {
    let c = cfg.constants();
    let couplings = ensemble_couplings(ens, geom, &c)?;
    let k_eff = effective_coupling(&couplings).k_eff;
    if k_eff == 0.0 {
        return Ok((0.0, None));
    }
    let horizon = 4.0 * decay_time_formula(k_eff, p)?.tau;
    let times = linear_time_grid(horizon, cfg.time_points.max(200));
    let trace = analytic_many(&fluctuators(ens, &couplings), &times)?;
    Ok((k_eff, decay_time(&trace, p)?.tau()))
}

/// τ_p (analytic crossing) and k_eff for each of `n_distributions`
/// ensembles, for both encodings.
pub fn run_decaytime_study(cfg: &RunConfig) -> Result<DecayTimeStudy> {
    cfg.validate()?;
    let p = cfg.thresholds[0];
    let geoms = cfg.geometries()?;
    let rows = (0..cfg.n_distributions)
        .into_par_iter()
        .map(|i| {
            let ens = draw_ensemble(cfg, &geoms, cfg.density_per_m2, 0, i as u64)?;
            let (k2, t2) = analytic_decay_time(cfg, &ens, &geoms.dipole, p)?;
            let (k4, t4) = analytic_decay_time(cfg, &ens, &geoms.quadrupole, p)?;
            Ok(DecayTimeRow {
                distribution: i,
                keff2_radps: k2,
                keff4_radps: k4,
                tau2_s: t2,
                tau4_s: t4,
                tau_ratio: t2.zip(t4).and_then(|(a, b)| ratio(a, b)),
                keff_ratio: ratio(k4, k2),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut log_k = Vec::new();
    let mut log_t = Vec::new();
    let mut not_reached = 0;
    for r in &rows {
        for (k, t) in [(r.keff2_radps, r.tau2_s), (r.keff4_radps, r.tau4_s)] {
            match t {
                Some(t) if k > 0.0 => {
                    log_k.push(k.ln());
                    log_t.push(t.ln());
                }
                _ => not_reached += 1,
            }
        }
    }
    let spread = log_k.iter().any(|&x| (x - log_k[0]).abs() > 1e-9);
    let slope = (log_k.len() >= 2 && spread).then(|| linear_fit(&log_k, &log_t).0);
    let deviations: Vec<f64> = rows
        .iter()
        .filter_map(|r| Some((r.tau_ratio? / r.keff_ratio? - 1.0).abs()))
        .collect();
    Ok(DecayTimeStudy {
        p,
        rows,
        slope,
        diagonal_median_deviation: (!deviations.is_empty()).then(|| median(&deviations)),
        not_reached,
    })
}

// ---------------------------------------------------------------------------
// Density sweep

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub density_per_m2: f64,
    pub ratio_mean: f64,
    pub ratio_median: f64,
    pub ratio_p10: f64,
    pub ratio_p90: f64,
    /// Mean 2QD k_eff, 1e9 rad/s.
    pub keff2_mean: f64,
    /// Mean 4QD k_eff, 1e9 rad/s.
    pub keff4_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub n_distributions: usize,
}

/// Decoupling ratio k_eff(2QD)/k_eff(4QD) statistics per density.
pub fn run_density_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let geoms = cfg.geometries()?;
    let c = cfg.constants();
    let n = cfg.n_distributions;
    let items: Vec<(usize, usize)> = (0..cfg.densities_per_m2.len())
        .flat_map(|d| (0..n).map(move |i| (d, i)))
        .collect();
    let pairs = items
        .par_iter()
        .map(|&(d, i)| {
            let ens = draw_ensemble(cfg, &geoms, cfg.densities_per_m2[d], d as u64, i as u64)?;
            Ok((
                keff(&ens, &geoms.dipole, &c)?,
                keff(&ens, &geoms.quadrupole, &c)?,
            ))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let rows = cfg
        .densities_per_m2
        .iter()
        .zip(pairs.chunks(n))
        .map(|(&density, chunk)| {
            let ratios: Vec<f64> = chunk.iter().filter_map(|&(k2, k4)| ratio(k2, k4)).collect();
            let s = Spread::of(&ratios);
            SweepRow {
                density_per_m2: density,
                ratio_mean: s.mean,
                ratio_median: s.median,
                ratio_p10: s.p10,
                ratio_p90: s.p90,
                keff2_mean: mean(&chunk.iter().map(|p| p.0).collect::<Vec<_>>()) / 1e9,
                keff4_mean: mean(&chunk.iter().map(|p| p.1).collect::<Vec<_>>()) / 1e9,
            }
        })
        .collect();
    Ok(SweepResult {
        rows,
        n_distributions: n,
    })
}

// ---------------------------------------------------------------------------
// Placement error

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRow {
    pub sigma: f64,
    pub density_per_m2: f64,
    pub ratio_median_of_means: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationStudy {
    pub rows: Vec<PerturbationRow>,
    /// Spread over distributions of the per-distribution mean ratio, in
    /// the same order as `rows`.
    pub spreads: Vec<Spread>,
    pub n_distributions: usize,
    pub n_perturbations: usize,
}

/// For each density and sigma: the median over trap distributions of the
/// mean decoupling ratio over random dot displacements. Displacement
/// directions are shared across sigmas, so the sigmas differ only in scale.
pub fn run_perturbation_study(cfg: &RunConfig) -> Result<PerturbationStudy> {
    cfg.validate()?;
    let geoms = cfg.geometries()?;
    let c = cfg.constants();
    let (nd, np) = (cfg.n_distributions, cfg.n_perturbations);
    let mut rows = Vec::new();
    let mut spreads = Vec::new();
    for (d, &density) in cfg.densities_per_m2.iter().enumerate() {
        let ensembles = (0..nd)
            .map(|i| draw_ensemble(cfg, &geoms, density, d as u64, i as u64))
            .collect::<Result<Vec<_>>>()?;
        for &sigma in &cfg.sigmas {
            let means = ensembles
                .par_iter()
                .enumerate()
                .map(|(i, ens)| {
                    let mut ratios = Vec::with_capacity(np);
                    for j in 0..np {
                        let s2 =
                            stream_seed(cfg.seed, &[PERTURBATION, d as u64, i as u64, j as u64, 2]);
                        let s4 =
                            stream_seed(cfg.seed, &[PERTURBATION, d as u64, i as u64, j as u64, 4]);
                        let g2 = perturb_geometry(&geoms.dipole, sigma, s2)?;
                        let g4 = perturb_geometry(&geoms.quadrupole, sigma, s4)?;
                        if let Some(r) = ratio(keff(ens, &g2, &c)?, keff(ens, &g4, &c)?) {
                            ratios.push(r);
                        }
                    }
                    Ok(mean(&ratios))
                })
                .collect::<Result<Vec<f64>>>()?;
            let spread = Spread::of(&means);
            rows.push(PerturbationRow {
                sigma,
                density_per_m2: density,
                ratio_median_of_means: spread.median,
            });
            spreads.push(spread);
        }
    }
    Ok(PerturbationStudy {
        rows,
        spreads,
        n_distributions: nd,
        n_perturbations: np,
    })
}

// ---------------------------------------------------------------------------
// Gates

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSweepRow {
    pub keff_radps: f64,
    pub err_2qd: f64,
    pub err_4qd: f64,
    /// E₂/E₄; `None` when E₄ is numerically zero.
    pub ratio: Option<f64>,
    pub stderr_2qd: f64,
    pub stderr_4qd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GatePointSummary {
    pub keff_radps: f64,
    /// k_eff of the scaled traps as seen by the 4-dot qubit.
    pub keff4_radps: f64,
    /// Bootstrap 90% interval for E₂/E₄.
    pub ratio_ci90: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateErrorStudy {
    pub design: GateDesign,
    pub delta_radps: f64,
    pub t_f_s: f64,
    pub omega2_radps: f64,
    pub n_traj_per_state: usize,
    pub rows: Vec<GateSweepRow>,
    pub points: Vec<GatePointSummary>,
}

/// Traps for both encodings, rescaled so the 2-dot k_eff equals `target`
/// (raw couplings when `None`). Returns the 2-dot and 4-dot gate traps and
/// the two effective couplings after scaling.
pub fn scaled_gate_traps(
    cfg: &RunConfig,
    geoms: &GeometrySet,
    ens: &TrapEnsemble,
    target: Option<f64>,
) -> Result<(
    Vec<crate::gates::GateTrap>,
    Vec<crate::gates::GateTrap>,
    f64,
    f64,
)> {
    let c = cfg.constants();
    let c2 = ensemble_couplings(ens, &geoms.dipole, &c)?;
    let c4 = ensemble_couplings(ens, &geoms.quadrupole, &c)?;
    let k2 = effective_coupling(&c2).k_eff;
    let k4 = effective_coupling(&c4).k_eff;
    let scale = match target {
        Some(t) if k2 > 0.0 => t / k2,
        Some(_) => 0.0,
        None => 1.0,
    };
    Ok((
        gate_traps(ens, &c2, &geoms.dipole, scale),
        gate_traps(ens, &c4, &geoms.quadrupole, scale),
        k2 * scale,
        k4 * scale,
    ))
}

/// The 2-dot gate matching `design`: Ω₂ = π/(4 t_π/2), run for the same
/// duration as the 4-dot gate (twice t_π/2 for a NOT).
fn dipole_counterpart(cfg: &RunConfig, design: &GateDesign) -> Result<NoisyGate> {
    let delta = cfg.gate.delta_radps;
    let half = design_gate(cfg.gate.n, cfg.gate.m)?.duration_s(delta);
    Ok(NoisyGate::Dipole {
        omega2: std::f64::consts::PI / (4.0 * half),
        t_f_s: design.duration_s(delta),
    })
}

/// Error of the 2-dot and 4-dot π/2 gates (same duration) against the
/// coupling strength of one rescaled trap distribution.
pub fn run_gate_error_study(cfg: &RunConfig) -> Result<GateErrorStudy> {
    cfg.validate()?;
    let design = cfg.gate.design()?;
    let delta = cfg.gate.delta_radps;
    let geoms = cfg.geometries()?;
    let ens = draw_ensemble(cfg, &geoms, cfg.density_per_m2, 0, 0)?;
    let g4 = NoisyGate::quadrupole(&design, delta)?;
    let t_f_s = g4.duration_s();
    let g2 = dipole_counterpart(cfg, &design)?;
    let NoisyGate::Dipole {
        omega2: omega2_radps,
        ..
    } = g2
    else {
        unreachable!()
    };
    let n = cfg.n_trajectories;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (i, &target) in cfg.keff_sweep_radps.iter().enumerate() {
        let (t2, t4, k2, k4) = scaled_gate_traps(cfg, &geoms, &ens, Some(target))?;
        let seed = stream_seed(cfg.seed, &[TRAJECTORIES, i as u64]);
        let r2 = average_fidelity(&g2, &t2, n, seed)?;
        let r4 = average_fidelity(&g4, &t4, n, seed)?;
        let defined = r4.error > ERROR_FLOOR;
        let ci = defined.then(|| {
            let (lo, hi) = bootstrap_ratio_ci(
                &r2.error_samples(),
                &r4.error_samples(),
                cfg.bootstrap_resamples,
                0.9,
                stream_seed(cfg.seed, &[BOOTSTRAP, i as u64]),
            );
            [lo, hi]
        });
        rows.push(GateSweepRow {
            keff_radps: k2,
            err_2qd: r2.error,
            err_4qd: r4.error,
            ratio: if defined {
                ratio(r2.error, r4.error)
            } else {
                None
            },
            stderr_2qd: r2.stderr,
            stderr_4qd: r4.stderr,
        });
        points.push(GatePointSummary {
            keff_radps: k2,
            keff4_radps: k4,
            ratio_ci90: ci,
        });
    }
    Ok(GateErrorStudy {
        design,
        delta_radps: delta,
        t_f_s,
        omega2_radps,
        n_traj_per_state: n,
        rows,
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationRow {
    pub time: f64,
    pub p0: f64,
    pub p1: f64,
    pub pe0: f64,
    pub pe1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSimulation {
    pub design: GateDesign,
    pub delta_radps: f64,
    pub t_f_s: f64,
    pub rotation_error: f64,
    pub leakage: f64,
    pub keff_2qd_radps: f64,
    pub keff_4qd_radps: f64,
    pub fidelity_4qd: FidelityResult,
    pub fidelity_2qd: FidelityResult,
    #[serde(skip)]
    pub populations: Vec<PopulationRow>,
}

/// Noiseless population trace from |0⟩ (times in seconds) plus the noisy
/// average fidelity of the designed gate under one trap distribution.
pub fn run_gate_simulation(cfg: &RunConfig) -> Result<GateSimulation> {
    cfg.validate()?;
    let design = cfg.gate.design()?;
    let delta = cfg.gate.delta_radps;
    let model = design.model(delta)?;
    let times = linear_time_grid(design.t_f, cfg.gate.time_points);
    let zero = nalgebra::Vector4::new(
        num_complex::Complex64::new(1.0, 0.0),
        Default::default(),
        Default::default(),
        Default::default(),
    );
    let populations = population_trace(&model, &zero, &times)
        .into_iter()
        .zip(&times)
        .map(|(p, &t)| PopulationRow {
            time: t / delta,
            p0: p[0],
            p1: p[1],
            pe0: p[2],
            pe1: p[3],
        })
        .collect();
    let u = propagate_noiseless(&model, design.t_f);
    let geoms = cfg.geometries()?;
    let ens = draw_ensemble(cfg, &geoms, cfg.density_per_m2, 0, 0)?;
    let (t2, t4, k2, k4) = scaled_gate_traps(cfg, &geoms, &ens, cfg.gate.keff_radps)?;
    let g4 = NoisyGate::quadrupole(&design, delta)?;
    let g2 = dipole_counterpart(cfg, &design)?;
    let seed = stream_seed(cfg.seed, &[TRAJECTORIES]);
    Ok(GateSimulation {
        design,
        delta_radps: delta,
        t_f_s: design.duration_s(delta),
        rotation_error: crate::gates::rotation_error(&u, &design.target()),
        leakage: crate::gates::leakage(&u),
        keff_2qd_radps: k2,
        keff_4qd_radps: k4,
        fidelity_4qd: average_fidelity(&g4, &t4, cfg.n_trajectories, seed)?,
        fidelity_2qd: average_fidelity(&g2, &t2, cfg.n_trajectories, seed)?,
        populations,
    })
}
