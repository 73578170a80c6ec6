//! Robustness of the decoupling ratio to random dot displacements.

use chargequbit::harness::{run_perturbation_study, RunConfig};

fn main() -> chargequbit::Result<()> {
    let cfg = RunConfig {
        n_distributions: 40,
        n_perturbations: 40,
        ..RunConfig::preset("fig5")?
    };
    let s = run_perturbation_study(&cfg)?;
    println!(
        "{:>6} {:>10} {:>8} {:>8} {:>8}",
        "sigma", "density", "median", "p10", "p90"
    );
    for (r, sp) in s.rows.iter().zip(&s.spreads) {
        println!(
            "{:>6.2} {:>10.1e} {:>8.2} {:>8.2} {:>8.2}",
            r.sigma, r.density_per_m2, r.ratio_median_of_means, sp.p10, sp.p90
        );
    }
    Ok(())
}
