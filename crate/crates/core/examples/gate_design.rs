//! Design 4-dot gates from (n, m), check them by exact propagation, and
//! print the transient population of the non-logical states.

use chargequbit::electrostatics::PhysicalConstants;
use chargequbit::gates::{
    design_gate, leakage, max_transient_population, phase_angle, propagate_noiseless,
    rotation_error, PhaseGatePulse,
};

fn main() -> chargequbit::Result<()> {
    let delta = 3.84e12;
    println!(
        "{:>4} {:>4} {:>3} {:>8} {:>9} {:>7} {:>10} {:>10} {:>8} {:>8}",
        "n", "m", "j", "omega", "t_f (ps)", "gamma", "rot err", "leakage", "peak", "(n²-m²)/n²"
    );
    for (n, m) in [(2, 1), (4, 1), (4, 3), (6, 5), (20, 19), (62, 61)] {
        let d = design_gate(n, m)?;
        let model = d.model(delta)?;
        let u = propagate_noiseless(&model, d.t_f);
        let peak = max_transient_population(&model, d.t_f, 4000);
        println!(
            "{:>4} {:>4} {:>3} {:>8.4} {:>9.3} {:>7.4} {:>10.2e} {:>10.2e} {:>8.4} {:>8.4}",
            n,
            m,
            d.j,
            d.omega,
            d.duration_s(delta) * 1e12,
            d.gamma,
            rotation_error(&u, &d.target()),
            leakage(&u),
            peak,
            d.max_transient_population
        );
        let not = d.not_gate();
        let u2 = propagate_noiseless(&model, not.t_f);
        assert!(rotation_error(&u2, &not.target()) < 1e-9);
    }

    // Phase gate: 1 uV held for 1 ps on one diagonal pair.
    let pulse = PhaseGatePulse::constant(1e-6, 1e-12);
    println!(
        "phase from 1 uV x 1 ps: {:.4e} rad",
        phase_angle(&pulse, &PhysicalConstants::default(), false)?
    );
    Ok(())
}
