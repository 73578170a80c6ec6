//! Decay time against effective coupling over many trap distributions:
//! tau_p scales as 1/k_eff and the two encodings' time ratio equals their
//! inverse coupling ratio.

use chargequbit::harness::{run_decaytime_study, RunConfig};

fn main() -> chargequbit::Result<()> {
    let cfg = RunConfig::preset("fig3")?;
    let s = run_decaytime_study(&cfg)?;
    println!(
        "{:>4} {:>11} {:>11} {:>10} {:>10}",
        "dist", "k2", "k4", "tau2/tau4", "k4/k2"
    );
    for r in s.rows.iter().take(10) {
        println!(
            "{:>4} {:>11.3e} {:>11.3e} {:>10.4} {:>10.4}",
            r.distribution,
            r.keff2_radps,
            r.keff4_radps,
            r.tau_ratio.unwrap_or(f64::NAN),
            r.keff_ratio.unwrap_or(f64::NAN)
        );
    }
    println!(
        "log-log slope of tau_{} vs k_eff: {:.4}",
        s.p,
        s.slope.unwrap_or(f64::NAN)
    );
    println!(
        "median deviation from the diagonal: {:.3}%",
        100.0 * s.diagonal_median_deviation.unwrap_or(f64::NAN)
    );
    println!("never reached p: {}", s.not_reached);
    Ok(())
}
