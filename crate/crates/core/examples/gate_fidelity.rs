//! Average gate error of the 2-dot and 4-dot pi/2 gates under the same
//! trap distribution, swept over coupling strength.

use chargequbit::harness::{run_gate_error_study, RunConfig};

fn main() -> chargequbit::Result<()> {
    let s = run_gate_error_study(&RunConfig::preset("fig6")?)?;
    println!(
        "gate time {:.2} ps, Omega_2 = {:.3e} rad/s, {} trajectories x 6 states",
        s.t_f_s * 1e12,
        s.omega2_radps,
        s.n_traj_per_state
    );
    println!(
        "{:>10} {:>10} {:>10} {:>8} {:>18}",
        "k_eff", "E_2QD", "E_4QD", "ratio", "90% CI"
    );
    for (r, p) in s.rows.iter().zip(&s.points) {
        let ci = p.ratio_ci90.map_or("undefined".to_string(), |[a, b]| {
            format!("[{a:.1}, {b:.1}]")
        });
        println!(
            "{:>10.2e} {:>10.3e} {:>10.3e} {:>8.1} {:>18}",
            r.keff_radps,
            r.err_2qd,
            r.err_4qd,
            r.ratio.unwrap_or(f64::NAN),
            ci
        );
    }
    Ok(())
}
