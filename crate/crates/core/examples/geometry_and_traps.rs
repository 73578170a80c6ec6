//! Build the two qubit layouts, sample a trap distribution and write both
//! to JSON in the format the CLI reads with `--geometry-file` / `--traps-file`.

use chargequbit::geometry::{GeometrySet, TrapSampler, TrapsDoc, Vec3, NM};

fn main() -> chargequbit::Result<()> {
    let geoms = GeometrySet::ideal(20.0 * NM, 20.0 * NM)?;
    for g in [&geoms.dipole, &geoms.quadrupole] {
        let dots: Vec<[f64; 3]> = g.dots().iter().map(|d| d.to_nm()).collect();
        println!("{:<15} dots (nm): {:?}", g.kind().label(), dots);
        println!("{:<15} centroid (nm): {:?}", "", g.centroid().to_nm());
    }

    // 100 traps at 1e12 m^-2 in the z = 0 plane, over the qubit.
    let sampler =
        TrapSampler::fixed_count(100, 1e12, Vec3::ZERO, 0.0, 2e8)?.with_min_dot_distance(1.0 * NM);
    let ens = sampler.sample(7, geoms.quadrupole.dots())?;
    println!(
        "{} traps in a {:.2} um square",
        ens.len(),
        ens.region.width * 1e6
    );

    println!("{}", serde_json::to_string_pretty(&geoms)?);
    let doc = TrapsDoc::from(&ens);
    println!("first trap: {}", serde_json::to_string(&doc.traps[0])?);
    Ok(())
}
