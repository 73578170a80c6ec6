//! Coherence decay of both encodings for one trap distribution: Monte
//! Carlo average over telegraph trajectories against the analytic product
//! formula and the parabolic short-time law.

use chargequbit::harness::{run_decay_comparison, RunConfig};

fn main() -> chargequbit::Result<()> {
    let cfg = RunConfig {
        seed: 7,
        time_points: 60,
        ..RunConfig::preset("fig2")?
    };
    let r = run_decay_comparison(&cfg)?;
    println!(
        "decoupling ratio k_eff(2QD)/k_eff(4QD): {:.2}",
        r.ratio.unwrap_or(f64::NAN)
    );
    for d in [&r.dipole, &r.quadrupole] {
        println!("\n{} k_eff = {:.3e} rad/s", d.kind.label(), d.k_eff);
        println!(
            "{:>10} {:>9} {:>9} {:>8}",
            "t (ps)", "MC", "analytic", "stderr"
        );
        for i in (0..d.mc.len()).step_by(6) {
            println!(
                "{:>10.2} {:>9.4} {:>9.4} {:>8.4}",
                d.mc.times[i] * 1e12,
                d.mc.values[i].re,
                d.analytic.values[i].re,
                d.mc.stderr[i]
            );
        }
        for t in &d.decay_times {
            println!(
                "tau_{}: analytic {:?}  formula {:.3e} s",
                t.p,
                t.analytic.tau(),
                t.formula.tau
            );
        }
    }
    Ok(())
}
