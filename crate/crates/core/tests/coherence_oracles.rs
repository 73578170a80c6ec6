use chargequbit::coherence::{
    analytic_many, analytic_single, decay_time, decay_time_formula, fluctuators, linear_time_grid,
    mc_dephasing, short_time, DecayOutcome, Fluctuator,
};
use chargequbit::electrostatics::{effective_coupling, ensemble_couplings, PhysicalConstants};
use chargequbit::geometry::{make_ideal_geometry, QubitKind, TrapEnsemble, TrapSampler, Vec3, NM};

fn ensemble(n: usize, seed: u64) -> TrapEnsemble {
    TrapSampler::fixed_count(n, 1e12, Vec3::ZERO, 0.0, 2e8)
        .unwrap()
        .sample(seed, &[])
        .unwrap()
}

fn dipole_fluctuators(ens: &TrapEnsemble) -> (Vec<Fluctuator>, f64) {
    let g = make_ideal_geometry(QubitKind::Dipole2QD, 20.0 * NM, 20.0 * NM).unwrap();
    let c = ensemble_couplings(ens, &g, &PhysicalConstants::default()).unwrap();
    (fluctuators(ens, &c), effective_coupling(&c).k_eff)
}

#[test]
fn monte_carlo_matches_product_formula_on_many_ensembles() {
    for seed in 0..20 {
        let (fl, k_eff) = dipole_fluctuators(&ensemble(20, 500 + seed));
        let times = linear_time_grid(5.0 / k_eff, 40);
        let an = analytic_many(&fl, &times).unwrap();
        let mc = mc_dephasing(&fl, &times, 400, seed).unwrap();
        for i in 0..times.len() {
            let dev = (mc.values[i] - an.values[i]).norm();
            assert!(
                dev <= 3.0 * mc.stderr[i] + 1e-12,
                "ensemble {seed}, point {i}: {dev} vs {}",
                mc.stderr[i]
            );
            assert!(mc.values[i].norm() <= 1.0 + 3.0 * mc.stderr[i]);
            // Symmetric noise: the imaginary part vanishes on average.
            assert!(mc.values[i].im.abs() <= 4.0 * mc.stderr[i] + 1e-12);
        }
    }
}

#[test]
fn twice_switching_rate_case_matches_large_sample() {
    let (lambda, t) = (2e8, 5e-9);
    let fl = [Fluctuator {
        k: 2.0 * lambda,
        rate: lambda,
    }];
    let times = [0.0, t];
    let an = analytic_single(2.0 * lambda, lambda, &times).unwrap();
    let mc = mc_dephasing(&fl, &times, 100_000, 17).unwrap();
    assert!((mc.values[1] - an.values[1]).norm() < 3.0 * mc.stderr[1]);
}

#[test]
fn halving_trajectories_inflates_standard_error_by_root_two() {
    let (fl, k_eff) = dipole_fluctuators(&ensemble(100, 3));
    let times = [0.0, 1.0 / k_eff, 2.0 / k_eff];
    let full = mc_dephasing(&fl, &times, 4000, 1).unwrap();
    let half = mc_dephasing(&fl, &times, 2000, 2).unwrap();
    for i in 1..times.len() {
        let r = half.stderr[i] / full.stderr[i];
        assert!((r - 2f64.sqrt()).abs() < 0.15, "point {i}: ratio {r}");
    }
}

#[test]
fn formula_and_crossing_agree_in_parabolic_regime() {
    for seed in 0..10 {
        let (fl, k_eff) = dipole_fluctuators(&ensemble(100, 40 + seed));
        for p in [0.97, 0.98, 0.99, 0.995] {
            let f = decay_time_formula(k_eff, p).unwrap().tau;
            let times = linear_time_grid(3.0 * f, 2000);
            let tau = decay_time(&analytic_many(&fl, &times).unwrap(), p)
                .unwrap()
                .tau()
                .unwrap();
            assert!((tau / f - 1.0).abs() < 0.01, "p = {p}: {tau} vs {f}");
        }
    }
}

#[test]
fn short_time_decay_times_match_closed_form() {
    let times = linear_time_grid(3e-10, 3001);
    let tau = decay_time(&short_time(1e9, &times), 0.99)
        .unwrap()
        .tau()
        .unwrap();
    assert!((tau - 0.02f64.sqrt() / 1e9).abs() < 1e-14);
    // A trace that only dips slightly never reaches p = 0.01.
    let shallow = short_time(1e9, &linear_time_grid(1e-10, 50));
    assert!(matches!(
        decay_time(&shallow, 0.01).unwrap(),
        DecayOutcome::NotReached { .. }
    ));
}

#[test]
fn adding_a_trap_never_raises_early_coherence() {
    let (fl, k_eff) = dipole_fluctuators(&ensemble(30, 8));
    let times = linear_time_grid(0.05 / k_eff, 20);
    let mut prev = vec![1.0; times.len()];
    for n in 1..=fl.len() {
        let tr = analytic_many(&fl[..n], &times).unwrap();
        for (v, p) in tr.values.iter().zip(&prev) {
            assert!(v.re <= p + 1e-15);
        }
        prev = tr.real();
    }
}
