//! Random telegraph noise: a ±1 signal that flips at the events of a
//! Poisson process of rate λ. The autocorrelation is e^{−2λt}.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{ensure, Error, Result};
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialSign {
    /// ±1 with equal probability (the stationary process).
    Symmetric,
    Pinned(i8),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TelegraphProcess {
    /// Switching rate, Hz.
    pub rate: f64,
    pub initial: InitialSign,
    pub seed: u64,
}

impl TelegraphProcess {
    pub fn new(rate: f64, seed: u64) -> Result<Self> {
        ensure(rate > 0.0 && rate.is_finite(), || {
            format!("switching rate must be positive, got {rate}")
        })?;
        Ok(TelegraphProcess {
            rate,
            initial: InitialSign::Symmetric,
            seed,
        })
    }

    pub fn pinned(mut self, sign: i8) -> Self {
        self.initial = InitialSign::Pinned(if sign < 0 { -1 } else { 1 });
        self
    }
}

/// One realisation of ξ(t) on `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingRecord {
    pub switch_times: Vec<f64>,
    pub initial_sign: i8,
    pub horizon: f64,
}

impl SwitchingRecord {
    /// A record with no switches.
    pub fn constant(sign: i8, horizon: f64) -> Self {
        SwitchingRecord {
            switch_times: Vec::new(),
            initial_sign: sign,
            horizon,
        }
    }

    /// ξ(t); a switch at exactly `t` counts as having happened.
    pub fn sign_at(&self, t: f64) -> i8 {
        let flips = self.switch_times.partition_point(|&s| s <= t);
        if flips % 2 == 0 {
            self.initial_sign
        } else {
            -self.initial_sign
        }
    }

    /// ∫₀ᵗ ξ(t') dt' at each of the ascending `times`, written into `out`.
    /// One pass over the switches; `times` must be sorted and lie in the
    /// horizon.
    pub fn integrate_sorted(&self, times: &[f64], out: &mut [f64]) {
        debug_assert_eq!(times.len(), out.len());
        let mut acc = 0.0;
        let mut last = 0.0;
        let mut sign = f64::from(self.initial_sign);
        let mut next = 0;
        for (&t, o) in times.iter().zip(out.iter_mut()) {
            while next < self.switch_times.len() && self.switch_times[next] <= t {
                let s = self.switch_times[next];
                acc += sign * (s - last);
                last = s;
                sign = -sign;
                next += 1;
            }
            *o = acc + sign * (t - last);
        }
    }
}

/// Draw a record on `[0, horizon]` using the process's own seed.
pub fn sample_record(process: &TelegraphProcess, horizon: f64) -> Result<SwitchingRecord> {
    let mut rng = stream_rng(process.seed, &[0x7E1]);
    sample_record_with(process.rate, process.initial, horizon, &mut rng)
}

/// Draw a record from a caller-supplied generator. Inter-switch gaps are
/// i.i.d. exponential with mean 1/rate.
pub fn sample_record_with(
    rate: f64,
    initial: InitialSign,
    horizon: f64,
    rng: &mut impl Rng,
) -> Result<SwitchingRecord> {
    ensure(horizon > 0.0 && horizon.is_finite(), || {
        format!("horizon must be positive, got {horizon}")
    })?;
    ensure(rate > 0.0 && rate.is_finite(), || {
        format!("switching rate must be positive, got {rate}")
    })?;
    let initial_sign = match initial {
        InitialSign::Symmetric => {
            if rng.random::<bool>() {
                1
            } else {
                -1
            }
        }
        InitialSign::Pinned(s) => s,
    };
    let gaps = Exp::new(rate).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut switch_times = Vec::new();
    let mut t = gaps.sample(rng);
    while t <= horizon {
        switch_times.push(t);
        t += gaps.sample(rng);
    }
    Ok(SwitchingRecord {
        switch_times,
        initial_sign,
        horizon,
    })
}

/// Exact ∫₀ᵗ ξ(t') dt'.
pub fn integrate_xi(record: &SwitchingRecord, t: f64) -> Result<f64> {
    if !(0.0..=record.horizon).contains(&t) {
        return Err(Error::OutsideHorizon {
            t,
            horizon: record.horizon,
        });
    }
    let mut out = [0.0];
    record.integrate_sorted(&[t], &mut out);
    Ok(out[0])
}

/// Interval of constant signs in the common refinement of several records.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub signs: Vec<i8>,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Common refinement of the switching partitions of `records` over
/// `[0, horizon]`.
pub fn merged_segments(records: &[SwitchingRecord], horizon: f64) -> Result<Vec<Segment>> {
    ensure(horizon > 0.0, || {
        format!("horizon must be positive, got {horizon}")
    })?;
    if records.iter().any(|r| r.horizon != horizon) {
        return Err(Error::HorizonMismatch);
    }
    let mut events: Vec<(f64, usize)> = records
        .iter()
        .enumerate()
        .flat_map(|(j, r)| r.switch_times.iter().map(move |&t| (t, j)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut signs: Vec<i8> = records.iter().map(|r| r.initial_sign).collect();
    let mut segments = Vec::with_capacity(events.len() + 1);
    let mut start = 0.0;
    for (t, j) in events {
        segments.push(Segment {
            start,
            end: t,
            signs: signs.clone(),
        });
        signs[j] = -signs[j];
        start = t;
    }
    segments.push(Segment {
        start,
        end: horizon,
        signs,
    });
    Ok(segments)
}

/// Debug dump: one CSV row `trajectory,trap,switch_time_s` per switch.
/// `records[i][j]` is trap `j` in trajectory `i`.
pub fn write_records_csv<W: std::io::Write>(
    records: &[Vec<SwitchingRecord>],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trajectory", "trap", "switch_time_s"])?;
    for (i, traj) in records.iter().enumerate() {
        for (j, r) in traj.iter().enumerate() {
            for t in &r.switch_times {
                w.serialize((i, j, t))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
