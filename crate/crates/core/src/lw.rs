//! Liénard-Wiechert fields of a unit point charge, and the closed-form
//! special cases used as oracles.

use crate::error::{Error, Result};
use crate::field::EMFieldValue;
use crate::kinematics::{solve_lightcone_time, Branch, LightConeData, Worldline};
use crate::units::Units;
use crate::Vec3;

/// Selects `e²a²/(6πε₀c³)` instead of the formula with the extra `2/3`.
pub const TEXTBOOK_LARMOR: bool = false;

/// Advanced or retarded field of a unit charge on `traj` at `(x, t)`.
pub fn lw_field<W: Worldline + ?Sized>(traj: &W, x: &Vec3, t: f64, branch: Branch) -> Result<EMFieldValue> {
    let data = solve_lightcone_time(traj, x, t, branch)?;
    lw_from_cone(&data).checked()
}

/// Velocity (near) and acceleration (far) parts of the field.
pub fn lw_parts(d: &LightConeData) -> (EMFieldValue, EMFieldValue) {
    let s = d.branch.sign();
    let nv = d.n + d.v * s;
    let k = 1.0 + s * d.n.dot(&d.v);
    let k3 = k * k * k;
    let near = (1.0 - d.v.norm_squared()) / (d.r * d.r * k3);
    let near_e = nv * near;
    // n ∧ n dropped so a resting charge has exactly zero B.
    let near_b = d.v.cross(&d.n) * near;
    let far_e = d.n.cross(&nv.cross(&d.a)) / (d.r * k3);
    (EMFieldValue::new(near_e, near_b), EMFieldValue::new(far_e, -d.n.cross(&far_e) * s))
}

/// Field from precomputed light-cone data (which may be synthetic).
pub fn lw_from_cone(d: &LightConeData) -> EMFieldValue {
    let (near, far) = lw_parts(d);
    near + far
}

/// Coulomb field of a unit charge resting at `q0`.
pub fn coulomb(q0: &Vec3, x: &Vec3) -> Result<EMFieldValue> {
    let d = x - q0;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::Singularity("Coulomb field evaluated at the charge".into()));
    }
    Ok(EMFieldValue::new(d / (r * r * r), Vec3::zeros()))
}

/// Field of a unit charge in uniform motion with velocity `v`, currently at
/// `q_now`: `E = (1 − v²) R / (R² − |v × R|²)^{3/2}`, `B = v × E`.
pub fn boosted_coulomb(q_now: &Vec3, v: &Vec3, x: &Vec3) -> Result<EMFieldValue> {
    if !(v.norm_squared() < 1.0) {
        return Err(Error::Domain(format!("boost speed must be below one, got {}", v.norm())));
    }
    let sep = x - q_now;
    if sep.norm() == 0.0 {
        return Err(Error::Singularity("boosted Coulomb field evaluated at the charge".into()));
    }
    let denom = (sep.norm_squared() - v.cross(&sep).norm_squared()).powf(1.5);
    let e = sep * ((1.0 - v.norm_squared()) / denom);
    EMFieldValue::new(e, v.cross(&e)).checked()
}

/// Radiated power as printed: `(2/3) Z²e²|a|² / (6πε₀c³)`.
///
/// `charge` is the charge in the unit system of `units` (Coulomb in SI, and
/// in natural units the charge itself, where the result is `(4/9) q²a²`).
pub fn larmor_power(a: &Vec3, charge: f64, units: &Units) -> f64 {
    larmor_power_with(a, charge, units, TEXTBOOK_LARMOR)
}

pub fn larmor_power_with(a: &Vec3, charge: f64, units: &Units, textbook: bool) -> f64 {
    let base = charge * charge * a.norm_squared()
        / (6.0 * std::f64::consts::PI * units.epsilon0 * units.c.powi(3));
    if textbook {
        base
    } else {
        2.0 / 3.0 * base
    }
}
