//! Sample telegraph records and check the switch statistics and the
//! exp(-2 lambda t) autocorrelation against a long simulation.

use chargequbit::rng::stream_rng;
use chargequbit::telegraph::{sample_record_with, InitialSign};

fn main() -> chargequbit::Result<()> {
    let rate = 2e8;
    let horizon = 50e-9;
    let n = 20_000;
    let lags = [0.0, 1e-9, 2.5e-9, 5e-9];
    let mut switches = 0usize;
    let mut corr = vec![0.0; lags.len()];
    for i in 0..n {
        let mut rng = stream_rng(11, &[i]);
        let r = sample_record_with(rate, InitialSign::Symmetric, horizon, &mut rng)?;
        switches += r.switch_times.len();
        let x0 = f64::from(r.sign_at(0.0));
        for (c, &lag) in corr.iter_mut().zip(&lags) {
            *c += x0 * f64::from(r.sign_at(lag));
        }
    }
    println!(
        "mean switches: {:.3} (expected {:.3})",
        switches as f64 / n as f64,
        rate * horizon
    );
    for (c, lag) in corr.iter().zip(lags) {
        println!(
            "lag {:>6.2} ns: <xi(0) xi(t)> = {:.4}  exp(-2 lambda t) = {:.4}",
            lag * 1e9,
            c / n as f64,
            (-2.0 * rate * lag).exp()
        );
    }
    Ok(())
}
