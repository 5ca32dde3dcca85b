//! Crossings of charges with the forward light cones of initial events.

use serde::Serialize;

use crate::error::Result;
use crate::kinematics::Worldline;
use crate::Vec3;

/// Apex `(t₀, q₀)` of a forward light cone. `owner` is the charge sitting at
/// the apex, which never counts as crossing its own cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontSource {
    pub time: f64,
    pub center: Vec3,
    pub owner: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontCrossing {
    pub charge: usize,
    pub source: usize,
    pub time: f64,
    pub location: Vec3,
    /// `|q_i(t₀) − q₀|`.
    pub initial_distance: f64,
    /// Smallest `|q_i(t) − q₀|` seen on `[t₀, t*]` by the scan.
    pub minimal_distance: f64,
}

impl FrontCrossing {
    /// Time from the apex to the crossing.
    pub fn delay(&self, source: &FrontSource) -> f64 {
        self.time - source.time
    }
}

const SCAN_STEPS: usize = 256;
const BISECTION_TOL: f64 = 1e-14;

/// Earliest root of `|q_i(t) − q₀| = t − t₀` for every charge and source up
/// to `horizon`.
pub fn detect_front_crossing(
    trajectories: &[&dyn Worldline],
    sources: &[FrontSource],
    horizon: f64,
) -> Result<Vec<FrontCrossing>> {
    let mut events = Vec::new();
    for (s, src) in sources.iter().enumerate() {
        if horizon <= src.time {
            continue;
        }
        for (i, traj) in trajectories.iter().enumerate() {
            if src.owner == Some(i) {
                continue;
            }
            if let Some(ev) = crossing(*traj, src, horizon)? {
                events.push(FrontCrossing { charge: i, source: s, ..ev });
            }
        }
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(events)
}

fn crossing(traj: &dyn Worldline, src: &FrontSource, horizon: f64) -> Result<Option<FrontCrossing>> {
    let dist = |t: f64| -> Result<f64> { Ok((traj.point(t)?.q - src.center).norm()) };
    let gap = |t: f64| -> Result<f64> { Ok(dist(t)? - (t - src.time)) };
    let initial_distance = dist(src.time)?;
    let mut minimal_distance = initial_distance;
    let step = (horizon - src.time) / SCAN_STEPS as f64;
    let mut lo = src.time;
    let mut bracket = None;
    if initial_distance <= 0.0 {
        bracket = Some((lo, lo));
    } else {
        for k in 1..=SCAN_STEPS {
            let hi = if k == SCAN_STEPS { horizon } else { src.time + step * k as f64 };
            let d = dist(hi)?;
            minimal_distance = minimal_distance.min(d);
            let g_hi = d - (hi - src.time);
            if g_hi <= 0.0 {
                bracket = Some((lo, hi));
                break;
            }
            lo = hi;
        }
    }
    let Some((mut a, mut b)) = bracket else { return Ok(None) };
    while b - a > BISECTION_TOL * b.abs().max(1.0) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if gap(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    // Interpolate inside the final bracket for the last digits.
    let (ga, gb) = (gap(a)?, gap(b)?);
    let time = if ga > 0.0 && gb < 0.0 { a + (b - a) * ga / (ga - gb) } else { b };
    let location = traj.point(time)?.q;
    minimal_distance = minimal_distance.min((location - src.center).norm());
    Ok(Some(FrontCrossing { charge: 0, source: 0, time, location, initial_distance, minimal_distance }))
}
