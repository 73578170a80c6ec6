//! Decoupling ratio statistics against trap density.

use chargequbit::harness::{run_density_sweep, RunConfig};

fn main() -> chargequbit::Result<()> {
    let s = run_density_sweep(&RunConfig::preset("fig4")?)?;
    println!(
        "{:>10} {:>8} {:>8} {:>8} {:>8} {:>12} {:>12}",
        "density", "mean", "median", "p10", "p90", "k2 (1e9/s)", "k4 (1e9/s)"
    );
    for r in &s.rows {
        println!(
            "{:>10.1e} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>12.2} {:>12.2}",
            r.density_per_m2,
            r.ratio_mean,
            r.ratio_median,
            r.ratio_p10,
            r.ratio_p90,
            r.keff2_mean,
            r.keff4_mean
        );
    }
    Ok(())
}
