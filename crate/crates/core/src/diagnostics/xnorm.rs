use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::TrajectoryRecord;

pub const MIN_SNAPSHOTS: usize = 16;

/// The last `LATE_WINDOW` of the time window must contribute less than
/// `SATURATION_SHARE` of the integral for the norm to count as saturated.
pub const LATE_WINDOW: f64 = 0.2;
pub const SATURATION_SHARE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XNorm {
    /// `(int ||u(t)||_{L^r}^{q1} dt)^{1/q1}` over the recorded window.
    pub value: f64,
    pub integral: f64,
    /// Share of the integral collected in the final `LATE_WINDOW` of the window.
    pub late_share: f64,
    pub saturated: bool,
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let k = times.partition_point(|&s| s < t);
    if k == 0 {
        return values[0];
    }
    if k >= times.len() {
        return *values.last().unwrap();
    }
    let (t0, t1) = (times[k - 1], times[k]);
    let w = (t - t0) / (t1 - t0);
    values[k - 1] * (1.0 - w) + values[k] * w
}

/// Reads the running integral stored in the record; `q1` is derived from the
/// record's `p`.
pub fn xnorm_accumulate(record: &TrajectoryRecord) -> Result<XNorm> {
    xnorm_accumulate_with(record, LATE_WINDOW, SATURATION_SHARE)
}

/// As [`xnorm_accumulate`] with explicit saturation thresholds.
pub fn xnorm_accumulate_with(record: &TrajectoryRecord, late_window: f64, share: f64) -> Result<XNorm> {
    if !(late_window > 0.0 && late_window < 1.0) || !(share > 0.0) {
        return Err(Error::param("saturation window must lie in (0, 1) and share must be positive"));
    }
    if record.len() < MIN_SNAPSHOTS {
        return Err(Error::param(format!(
            "X-norm needs at least {MIN_SNAPSHOTS} snapshots, got {}",
            record.len()
        )));
    }
    let p = record.p;
    let q1 = 4.0 * (p - 1.0) * (p + 1.0) / (3.0 * p + 5.0);
    let integral = *record.xnorm_accum.last().unwrap();
    let t0 = record.times[0];
    let t1 = *record.times.last().unwrap();
    let cut = t1 - late_window * (t1 - t0);
    let late = integral - interpolate(&record.times, &record.xnorm_accum, cut);
    let late_share = if integral > 0.0 { late / integral } else { 0.0 };
    Ok(XNorm {
        value: integral.powf(1.0 / q1),
        integral,
        late_share,
        saturated: late_share < share,
    })
}
