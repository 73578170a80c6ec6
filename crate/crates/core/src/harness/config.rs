//! Run configuration: presets, JSON config files and environment overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::electrostatics::PhysicalConstants;
use crate::error::{Error, Result};
use crate::gates::{design_gate, GateDesign};
use crate::geometry::{GeometrySet, TrapSampler, Vec3, NM};

pub const SEED_ENV: &str = "CHARGEQUBIT_SEED";
pub const OUT_ENV: &str = "CHARGEQUBIT_OUT";

/// Gate parameters for `gate` and `gate-sweep`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateConfig {
    pub n: u32,
    pub m: u32,
    /// Detuning δ, rad/s.
    pub delta_radps: f64,
    /// Run the NOT gate (twice the π/2 duration) instead of the π/2 gate.
    pub not: bool,
    /// Rescale the sampled traps so the 2-dot k_eff equals this (rad/s).
    /// `None` keeps the raw couplings.
    pub keff_radps: Option<f64>,
    /// Samples in the population trace.
    pub time_points: usize,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            n: 62,
            m: 61,
            delta_radps: 3.84e12,
            not: false,
            keff_radps: None,
            time_points: 401,
        }
    }
}

impl GateConfig {
    pub fn design(&self) -> Result<GateDesign> {
        let d = design_gate(self.n, self.m)?;
        Ok(if self.not { d.not_gate() } else { d })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Preset or experiment label.
    pub experiment: String,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub side_length_nm: f64,
    /// Depth of the dot plane below the trap plane.
    pub depth_nm: f64,
    /// Traps per ensemble; the window is sized as count / density.
    pub trap_count: usize,
    /// Density for single-density experiments, m⁻².
    pub density_per_m2: f64,
    /// Densities for sweeps, m⁻².
    pub densities_per_m2: Vec<f64>,
    /// Trap switching rate λ, Hz.
    pub rate_hz: f64,
    pub min_dot_distance_nm: f64,
    pub relative_permittivity: f64,
    /// Overrides q²/(4πε₀ε_rħ) (rad/s·m) when set.
    pub coupling_constant: Option<f64>,
    pub n_distributions: usize,
    pub n_trajectories: usize,
    pub n_perturbations: usize,
    /// Dot displacement standard deviations, in units of the side length.
    pub sigmas: Vec<f64>,
    pub time_points: usize,
    /// Coherence time window; `None` picks 6/k_eff per encoding.
    pub horizon_s: Option<f64>,
    /// Coherence thresholds p for decay times; the first is the headline.
    pub thresholds: Vec<f64>,
    pub gate: GateConfig,
    /// Target 2-dot k_eff values for the gate-error sweep, rad/s.
    pub keff_sweep_radps: Vec<f64>,
    pub bootstrap_resamples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: "fig2".into(),
            seed: 1,
            output_dir: None,
            side_length_nm: 20.0,
            depth_nm: 20.0,
            trap_count: 100,
            density_per_m2: 1e12,
            densities_per_m2: log_space(1e12, 1e16, 5),
            rate_hz: 2e8,
            min_dot_distance_nm: 1.0,
            relative_permittivity: 11.7,
            coupling_constant: None,
            n_distributions: 50,
            n_trajectories: 200,
            n_perturbations: 100,
            sigmas: vec![0.0, 0.05, 0.1, 0.2, 0.3],
            time_points: 400,
            horizon_s: None,
            thresholds: vec![0.99, 0.9, 0.5],
            gate: GateConfig::default(),
            keff_sweep_radps: vec![1e9, 2e9, 5e9, 1e10, 2e10, 5e10],
            bootstrap_resamples: 2000,
        }
    }
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

pub const PRESETS: &[&str] = &[
    "fig2",
    "fig3",
    "fig4",
    "fig4-full",
    "fig5",
    "fig5-full",
    "fig6",
];

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = RunConfig {
            experiment: name.to_string(),
            ..RunConfig::default()
        };
        let cfg = match name {
            "fig2" => base,
            "fig3" => RunConfig {
                n_distributions: 50,
                ..base
            },
            "fig4" => RunConfig {
                n_distributions: 50,
                ..base
            },
            "fig4-full" => RunConfig {
                n_distributions: 100,
                densities_per_m2: log_space(1e12, 1e16, 9),
                ..base
            },
            "fig5" => RunConfig {
                n_distributions: 100,
                n_perturbations: 100,
                densities_per_m2: vec![1e12, 1e14, 1e16],
                ..base
            },
            "fig5-full" => RunConfig {
                n_distributions: 500,
                n_perturbations: 1000,
                densities_per_m2: vec![1e12, 1e14, 1e16],
                ..base
            },
            "fig6" => RunConfig {
                n_trajectories: 50,
                ..base
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown preset '{other}' (known: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(cfg)
    }

    /// Parse a config file. A run manifest is accepted too; its embedded
    /// config is used.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let inner = match value.get("config") {
            Some(c) if value.get("version").is_some() => c.clone(),
            _ => value,
        };
        let cfg: RunConfig = serde_json::from_value(inner)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Apply `CHARGEQUBIT_SEED` and `CHARGEQUBIT_OUT` from `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(s) = lookup(SEED_ENV) {
            self.seed = s
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={s} is not an unsigned integer")))?;
        }
        if let Some(dir) = lookup(OUT_ENV) {
            if !dir.is_empty() {
                self.output_dir = Some(PathBuf::from(dir));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let cfg = Error::Config;
        if !positive(self.side_length_nm) || !positive(self.depth_nm) {
            return Err(cfg("side_length_nm and depth_nm must be positive".into()));
        }
        for (name, v) in [
            ("trap_count", self.trap_count),
            ("n_distributions", self.n_distributions),
            ("n_trajectories", self.n_trajectories),
            ("n_perturbations", self.n_perturbations),
            ("bootstrap_resamples", self.bootstrap_resamples),
        ] {
            if v == 0 {
                return Err(cfg(format!("{name} must be positive")));
            }
        }
        if self.time_points < 2 || self.gate.time_points < 2 {
            return Err(cfg("time_points must be at least 2".into()));
        }
        if !positive(self.density_per_m2) || !self.densities_per_m2.iter().all(|&d| positive(d)) {
            return Err(cfg("densities must be positive".into()));
        }
        if self.densities_per_m2.is_empty() {
            return Err(cfg("densities_per_m2 must not be empty".into()));
        }
        if !positive(self.rate_hz) {
            return Err(cfg("rate_hz must be positive".into()));
        }
        if !(self.min_dot_distance_nm >= 0.0) {
            return Err(cfg("min_dot_distance_nm must be non-negative".into()));
        }
        if !self.sigmas.iter().all(|s| *s >= 0.0 && s.is_finite()) {
            return Err(cfg("sigmas must be non-negative".into()));
        }
        if matches!(self.horizon_s, Some(h) if !positive(h)) {
            return Err(cfg("horizon_s must be positive".into()));
        }
        if !self.thresholds.iter().all(|p| *p > 0.0 && *p < 1.0) || self.thresholds.is_empty() {
            return Err(cfg("thresholds must lie in (0, 1)".into()));
        }
        if !self
            .keff_sweep_radps
            .iter()
            .all(|k| *k >= 0.0 && k.is_finite())
        {
            return Err(cfg("keff_sweep_radps must be non-negative".into()));
        }
        if !positive(self.gate.delta_radps) {
            return Err(cfg("gate.delta_radps must be positive".into()));
        }
        if matches!(self.gate.keff_radps, Some(k) if !(k >= 0.0 && k.is_finite())) {
            return Err(cfg("gate.keff_radps must be non-negative".into()));
        }
        self.gate.design()?;
        self.constants().validate()?;
        Ok(())
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants {
            coupling_override: self.coupling_constant,
            ..PhysicalConstants::default().with_relative_permittivity(self.relative_permittivity)
        }
    }

    pub fn geometries(&self) -> Result<GeometrySet> {
        GeometrySet::ideal(self.side_length_nm * NM, self.depth_nm * NM)
    }

    /// Fixed-count sampler centred over the qubits, traps in the z = 0 plane.
    pub fn sampler(&self, density: f64) -> Result<TrapSampler> {
        Ok(
            TrapSampler::fixed_count(self.trap_count, density, Vec3::ZERO, 0.0, self.rate_hz)?
                .with_min_dot_distance(self.min_dot_distance_nm * NM),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in PRESETS {
            RunConfig::preset(p).unwrap().validate().unwrap();
        }
        assert!(RunConfig::preset("fig9").is_err());
    }

    #[test]
    fn json_round_trip_and_manifest_form() {
        let cfg = RunConfig::preset("fig5").unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        let manifest = format!(r#"{{"version":"0.1.0","config":{text}}}"#);
        assert_eq!(RunConfig::from_json(&manifest).unwrap(), cfg);
        let partial = RunConfig::from_json(r#"{"seed": 9, "gate": {"n": 4, "m": 3}}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.gate.delta_radps, 3.84e12);
        assert!(RunConfig::from_json(r#"{"sede": 9}"#).is_err());
        assert!(RunConfig::from_json(r#"{"n_trajectories": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"gate": {"n": 3, "m": 1}}"#).is_err());
    }

    #[test]
    fn env_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_env(|k| match k {
            SEED_ENV => Some("42".into()),
            OUT_ENV => Some("/tmp/x".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.output_dir, Some(PathBuf::from("/tmp/x")));
        assert!(cfg.apply_env(|_| Some("nope".into())).is_err());
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e12, 1e16, 5);
        assert_eq!(v.len(), 5);
        assert!((v[0] - 1e12).abs() < 1.0 && (v[4] / 1e16 - 1.0).abs() < 1e-12);
        assert!((v[2] / 1e14 - 1.0).abs() < 1e-12);
    }
}
