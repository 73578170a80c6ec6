//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::config::RunConfig;
use super::experiments::{
    draw_ensemble, ratio, run_decay_comparison_on, run_decaytime_study, run_density_sweep,
    run_gate_error_study, run_gate_simulation, run_perturbation_study, EncodingDecay,
};
use super::output::{Format, Manifest, OutputDir, MANIFEST};
use crate::electrostatics::{effective_coupling, ensemble_couplings, TrapCoupling};
use crate::error::{Error, Result};
use crate::geometry::{GeometrySet, TrapEnsemble, TrapsDoc};

#[derive(Debug, Parser)]
#[command(
    name = "chargequbit",
    version,
    about = "Charge-trap noise and gate simulations for dipole and quadrupole charge qubits"
)]
pub struct Cli {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON config file (a run manifest also works).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// fig2, fig3, fig4, fig4-full, fig5, fig5-full or fig6.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct InputFiles {
    /// JSON with `dipole` and `quadrupole` geometries.
    #[arg(long)]
    pub geometry_file: Option<PathBuf>,
    /// JSON trap list.
    #[arg(long)]
    pub traps_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-trap couplings for both encodings.
    Couplings(InputFiles),
    /// Coherence decay, Monte Carlo and analytic, for one trap distribution.
    Decay(InputFiles),
    /// Decay times against effective coupling over many distributions.
    Decaytimes,
    /// Decoupling ratio against trap density.
    SweepDensity,
    /// Decoupling ratio under dot placement error.
    Perturb,
    /// Gate design and simulation.
    #[command(subcommand)]
    Gate(GateCommand),
    /// Gate error of both encodings against coupling strength.
    GateSweep,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    /// NOT gate instead of the π/2 rotation.
    #[arg(long)]
    pub not: bool,
}

#[derive(Debug, Subcommand)]
pub enum GateCommand {
    /// Print the design record as JSON.
    Design(GateArgs),
    /// Population trace and noisy fidelity.
    Simulate {
        #[command(flatten)]
        gate: GateArgs,
        /// Rescale traps to this 2-dot k_eff, rad/s.
        #[arg(long)]
        keff: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Couplings(_) => "couplings",
            Command::Decay(_) => "decay",
            Command::Decaytimes => "decaytimes",
            Command::SweepDensity => "sweep-density",
            Command::Perturb => "perturb",
            Command::Gate(GateCommand::Design(_)) => "gate design",
            Command::Gate(GateCommand::Simulate { .. }) => "gate simulate",
            Command::GateSweep => "gate-sweep",
        }
    }

    fn default_preset(&self) -> &'static str {
        match self {
            Command::Couplings(_) | Command::Decay(_) => "fig2",
            Command::Decaytimes => "fig3",
            Command::SweepDensity => "fig4",
            Command::Perturb => "fig5",
            Command::Gate(_) | Command::GateSweep => "fig6",
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit
/// code: 0 success, 1 runtime failure, 2 usage or configuration error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let recorded: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match run(cli, recorded, |k| std::env::var(k).ok()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                2
            } else {
                1
            }
        }
    }
}

/// Resolve the config: preset (or config file), then environment, then flags.
pub fn resolve_config(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::preset(
            cli.preset
                .as_deref()
                .unwrap_or(cli.command.default_preset()),
        )?,
    };
    cfg.apply_env(env)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    let gate_args = match &cli.command {
        Command::Gate(GateCommand::Design(g)) => Some(g),
        Command::Gate(GateCommand::Simulate { gate, keff }) => {
            if keff.is_some() {
                cfg.gate.keff_radps = *keff;
            }
            Some(gate)
        }
        _ => None,
    };
    if let Some(g) = gate_args {
        cfg.gate.n = g.n.unwrap_or(cfg.gate.n);
        cfg.gate.m = g.m.unwrap_or(cfg.gate.m);
        cfg.gate.not |= g.not;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli, args: Vec<String>, env: impl Fn(&str) -> Option<String>) -> Result<()> {
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be positive".into()));
    }
    let cfg = resolve_config(&cli, env)?;
    let work = || execute(&cli, &cfg, args);
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?
            .install(work),
        None => work(),
    }
}

fn output_dir(cfg: &RunConfig, format: Format) -> Result<OutputDir> {
    let dir = cfg.output_dir.as_deref().ok_or_else(|| {
        Error::Config("this command writes files; pass --out <dir> or set CHARGEQUBIT_OUT".into())
    })?;
    OutputDir::create(dir, format)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn load_inputs(
    cfg: &RunConfig,
    files: &InputFiles,
    manifest: &mut Manifest,
) -> Result<(GeometrySet, TrapEnsemble)> {
    let geoms = match &files.geometry_file {
        Some(p) => {
            manifest.inputs.push(p.display().to_string());
            let g: GeometrySet = read_json(p)?;
            g.validate()?;
            g
        }
        None => cfg.geometries()?,
    };
    let ensemble = match &files.traps_file {
        Some(p) => {
            manifest.inputs.push(p.display().to_string());
            TrapEnsemble::try_from(read_json::<TrapsDoc>(p)?)?
        }
        None => draw_ensemble(cfg, &geoms, cfg.density_per_m2, 0, 0)?,
    };
    Ok((geoms, ensemble))
}

#[derive(Serialize)]
struct CouplingRow {
    trap_index: usize,
    x_nm: f64,
    y_nm: f64,
    z_nm: f64,
    lambda_hz: f64,
    k_radps: f64,
}

fn coupling_rows(ens: &TrapEnsemble, couplings: &[TrapCoupling]) -> Vec<CouplingRow> {
    couplings
        .iter()
        .map(|c| {
            let t = &ens.traps[c.trap_index];
            let [x_nm, y_nm, z_nm] = t.position.to_nm();
            CouplingRow {
                trap_index: c.trap_index,
                x_nm,
                y_nm,
                z_nm,
                lambda_hz: t.rate,
                k_radps: c.k,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct TraceRow {
    t_s: f64,
    re: f64,
    im: f64,
    stderr: f64,
    analytic: f64,
}

fn trace_rows(d: &EncodingDecay) -> Vec<TraceRow> {
    d.mc.times
        .iter()
        .zip(&d.mc.values)
        .zip(&d.mc.stderr)
        .zip(&d.analytic.values)
        .map(|(((&t_s, v), &stderr), a)| TraceRow {
            t_s,
            re: v.re,
            im: v.im,
            stderr,
            analytic: a.re,
        })
        .collect()
}

fn decay_summary(d: &EncodingDecay) -> serde_json::Value {
    let tau_p: serde_json::Map<String, serde_json::Value> = d
        .decay_times
        .iter()
        .map(|r| {
            (
                format!("{}", r.p),
                serde_json::to_value(r).expect("serialisable"),
            )
        })
        .collect();
    serde_json::json!({
        "kind": d.kind,
        "k_eff": d.k_eff,
        "horizon_s": d.horizon_s,
        "n_trajectories": d.mc.n_trajectories,
        "tau_p": tau_p,
    })
}

/// Stdout is informational; a closed pipe is not an error.
fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn execute(cli: &Cli, cfg: &RunConfig, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let mut manifest = Manifest::new(cli.command.name(), args, cfg);

    if let Command::Gate(GateCommand::Design(_)) = &cli.command {
        let design = cfg.gate.design()?;
        print_json(&design)?;
        if cfg.output_dir.is_some() {
            let mut out = output_dir(cfg, cli.format)?;
            out.json("design.json", &design)?;
            finish(out, manifest, start)?;
        }
        return Ok(());
    }

    let mut out = output_dir(cfg, cli.format)?;
    match &cli.command {
        Command::Couplings(files) => {
            let (geoms, ens) = load_inputs(cfg, files, &mut manifest)?;
            let c = cfg.constants();
            let c2 = ensemble_couplings(&ens, &geoms.dipole, &c)?;
            let c4 = ensemble_couplings(&ens, &geoms.quadrupole, &c)?;
            out.table("couplings_2qd", &coupling_rows(&ens, &c2))?;
            out.table("couplings_4qd", &coupling_rows(&ens, &c4))?;
            out.json("traps.json", &TrapsDoc::from(&ens))?;
            let (k2, k4) = (effective_coupling(&c2).k_eff, effective_coupling(&c4).k_eff);
            let summary = serde_json::json!({
                "k_eff_2qd": k2,
                "k_eff_4qd": k4,
                "ratio": ratio(k2, k4),
            });
            out.json("summary.json", &summary)?;
            print_json(&summary)?;
        }
        Command::Decay(files) => {
            let (geoms, ens) = load_inputs(cfg, files, &mut manifest)?;
            let r = run_decay_comparison_on(cfg, &geoms, ens)?;
            out.table("decay_2qd", &trace_rows(&r.dipole))?;
            out.table("decay_4qd", &trace_rows(&r.quadrupole))?;
            out.json("traps.json", &TrapsDoc::from(&r.ensemble))?;
            let summary = serde_json::json!({
                "k_eff_2qd": r.dipole.k_eff,
                "k_eff_4qd": r.quadrupole.k_eff,
                "ratio": r.ratio,
                "dipole": decay_summary(&r.dipole),
                "quadrupole": decay_summary(&r.quadrupole),
            });
            out.json("summary.json", &summary)?;
            print_json(&summary)?;
        }
        Command::Decaytimes => {
            let s = run_decaytime_study(cfg)?;
            out.table("decaytimes", &s.rows)?;
            let summary = serde_json::json!({
                "p": s.p,
                "slope": s.slope,
                "diagonal_median_deviation": s.diagonal_median_deviation,
                "not_reached": s.not_reached,
                "n_distributions": s.rows.len(),
            });
            out.json("summary.json", &summary)?;
            print_json(&summary)?;
        }
        Command::SweepDensity => {
            let s = run_density_sweep(cfg)?;
            out.table("sweep_density", &s.rows)?;
            print_json(&s)?;
        }
        Command::Perturb => {
            let s = run_perturbation_study(cfg)?;
            out.table("perturb", &s.rows)?;
            out.json("summary.json", &s)?;
            print_json(&s.rows)?;
        }
        Command::Gate(GateCommand::Simulate { .. }) => {
            let s = run_gate_simulation(cfg)?;
            out.table("populations", &s.populations)?;
            out.json("fidelity.json", &s)?;
            print_json(&s)?;
        }
        Command::GateSweep => {
            let s = run_gate_error_study(cfg)?;
            out.table("gate_sweep", &s.rows)?;
            out.json("summary.json", &s)?;
            print_json(&s.rows)?;
        }
        Command::Gate(GateCommand::Design(_)) => unreachable!(),
    }
    finish(out, manifest, start)
}

fn finish(out: OutputDir, mut manifest: Manifest, start: Instant) -> Result<()> {
    manifest.outputs = out.written().to_vec();
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(out.path().join(MANIFEST), text)?;
    Ok(())
}
