//! Per-trap couplings for both encodings, the effective coupling, and the
//! far-field power laws (r^-2 for the dipole, r^-3 for the quadrupole).

use chargequbit::electrostatics::{
    effective_coupling, ensemble_couplings, scaling_exponent, PhysicalConstants,
};
use chargequbit::geometry::{GeometrySet, TrapSampler, Vec3, NM};

fn main() -> chargequbit::Result<()> {
    let c = PhysicalConstants::default();
    println!("coupling constant: {:.4e} rad/s m", c.coupling_constant());

    let geoms = GeometrySet::ideal(20.0 * NM, 20.0 * NM)?;
    let ens = TrapSampler::fixed_count(100, 1e12, Vec3::ZERO, 0.0, 2e8)?.sample(3, &[])?;
    let k2 = ensemble_couplings(&ens, &geoms.dipole, &c)?;
    let k4 = ensemble_couplings(&ens, &geoms.quadrupole, &c)?;

    println!(
        "{:>5} {:>10} {:>10} {:>12} {:>12}",
        "trap", "x_nm", "y_nm", "k_2qd", "k_4qd"
    );
    for (a, b) in k2.iter().zip(&k4).take(8) {
        let p = ens.traps[a.trap_index].position.to_nm();
        println!(
            "{:>5} {:>10.1} {:>10.1} {:>12.3e} {:>12.3e}",
            a.trap_index, p[0], p[1], a.k, b.k
        );
    }
    let (e2, e4) = (effective_coupling(&k2).k_eff, effective_coupling(&k4).k_eff);
    println!(
        "k_eff 2QD = {e2:.3e} rad/s, 4QD = {e4:.3e} rad/s, ratio {:.1}",
        e2 / e4
    );

    let side = 20.0 * NM;
    let distances: Vec<f64> = (0..10)
        .map(|i| side * 10.0 * 10f64.powf(i as f64 / 9.0))
        .collect();
    // An off-axis direction so neither coupling vanishes by symmetry.
    let dir = Vec3::new(1.0, 0.3, 0.0);
    println!(
        "far-field slope 2QD: {:.3}",
        scaling_exponent(&geoms.dipole, dir, &distances, &c)?
    );
    println!(
        "far-field slope 4QD: {:.3}",
        scaling_exponent(&geoms.quadrupole, dir, &distances, &c)?
    );
    Ok(())
}
