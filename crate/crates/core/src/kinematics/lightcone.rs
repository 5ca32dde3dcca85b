//! Retarded and advanced light-cone times `t± = t ± |x − q(t±)|`.

use serde::{Deserialize, Serialize};

use super::Worldline;
use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Retarded,
    Advanced,
}

impl Branch {
    /// `+1` for advanced, `-1` for retarded: the `±` in `t±`.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Retarded => -1.0,
            Branch::Advanced => 1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Branch::Retarded => Branch::Advanced,
            Branch::Advanced => Branch::Retarded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Smallest admissible distance between query point and charge.
    pub r_min: f64,
    /// Absolute residual target, scaled by `max(1, r)`.
    pub tolerance: f64,
    pub max_expansions: usize,
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { r_min: 1e-12, tolerance: 1e-13, max_expansions: 200, max_iterations: 200 }
    }
}

/// Charge data at the light-cone time of one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightConeData {
    pub branch: Branch,
    pub time: f64,
    pub q: Vec3,
    pub v: Vec3,
    pub a: Vec3,
    /// Unit vector from the charge to the query point.
    pub n: Vec3,
    pub r: f64,
}

impl LightConeData {
    /// `|t± − t ∓ r|` for the query time `t`.
    pub fn residual(&self, t: f64) -> f64 {
        (self.time - t - self.branch.sign() * self.r).abs()
    }
}

/// Solves for `t±` on the chosen branch. Works in the delay `τ = ±(t± − t) ≥ 0`
/// where `φ(τ) = τ − |x − q(t ± τ)|` is strictly increasing with slope
/// `1 ± n·v ∈ (0, 2)`: expand a bracket geometrically, then refine with Newton
/// safeguarded by bisection.
pub fn solve_lightcone_time<W: Worldline + ?Sized>(
    traj: &W,
    x: &Vec3,
    t: f64,
    branch: Branch,
) -> Result<LightConeData> {
    solve_with(traj, x, t, branch, &SolverSettings::default())
}

pub fn solve_with<W: Worldline + ?Sized>(
    traj: &W,
    x: &Vec3,
    t: f64,
    branch: Branch,
    settings: &SolverSettings,
) -> Result<LightConeData> {
    if !(t.is_finite() && x.iter().all(|c| c.is_finite())) {
        return Err(Error::Domain(format!("non-finite query point x={x:?} t={t}")));
    }
    let sigma = branch.sign();
    let eval = |tau: f64| -> Result<(f64, f64, LightConeData)> {
        let s = t + sigma * tau;
        let p = traj.point(s)?;
        let d = x - p.q;
        let r = d.norm();
        let n = if r > 0.0 { d / r } else { Vec3::zeros() };
        let slope = 1.0 + sigma * n.dot(&p.v);
        Ok((tau - r, slope, LightConeData { branch, time: s, q: p.q, v: p.v, a: p.a, n, r }))
    };

    let (_, _, data0) = eval(0.0)?;
    if data0.r < settings.r_min {
        return Err(Error::Singularity(format!("query point ({x:?}, t={t}) lies on the worldline")));
    }
    let mut lo = 0.0;
    let mut hi = data0.r;
    let mut expansions = 0;
    let mut best = loop {
        let (phi, slope, data) = eval(hi)?;
        if phi >= 0.0 {
            break (hi, phi, slope, data);
        }
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > settings.max_expansions {
            return Err(Error::Range(format!("no light-cone bracket found for x={x:?}, t={t}")));
        }
    };

    let mut tau = best.0;
    let (mut phi, mut slope) = (best.1, best.2);
    for _ in 0..settings.max_iterations {
        let scale = settings.tolerance * best.3.r.max(1.0).max(t.abs());
        if phi.abs() <= scale {
            break;
        }
        if phi > 0.0 {
            hi = tau;
        } else {
            lo = tau;
        }
        let newton = tau - phi / slope;
        tau = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(t.abs()).max(1.0) {
            let (p, s, d) = eval(tau)?;
            best = (tau, p, s, d);
            break;
        }
        let (p, s, d) = eval(tau)?;
        phi = p;
        slope = s;
        best = (tau, p, s, d);
    }
    let data = best.3;
    if data.r < settings.r_min {
        return Err(Error::Singularity(format!(
            "light-cone point of ({x:?}, t={t}) coincides with the charge"
        )));
    }
    Ok(data)
}
