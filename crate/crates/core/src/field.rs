//! Field values and a finite-difference Maxwell residual probe.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Electric and magnetic field at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EMFieldValue {
    pub e: Vec3,
    pub b: Vec3,
}

impl EMFieldValue {
    pub const ZERO: Self = Self {
        e: Vec3::new(0.0, 0.0, 0.0),
        b: Vec3::new(0.0, 0.0, 0.0),
    };

    pub fn new(e: Vec3, b: Vec3) -> Self {
        Self { e, b }
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().chain(self.b.iter()).all(|c| c.is_finite())
    }

    /// Rejects non-finite values instead of passing them on.
    pub fn checked(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::Domain(format!("non-finite field value {self:?}")))
        }
    }

    /// Euclidean norm of the six components.
    pub fn norm(&self) -> f64 {
        (self.e.norm_squared() + self.b.norm_squared()).sqrt()
    }

    pub fn components(&self) -> [f64; 6] {
        [self.e.x, self.e.y, self.e.z, self.b.x, self.b.y, self.b.z]
    }

    /// Poynting vector `E × B / 4π` in natural units.
    pub fn poynting(&self) -> Vec3 {
        self.e.cross(&self.b) / (4.0 * std::f64::consts::PI)
    }

    /// Lorentz force on a unit charge moving with velocity `v`.
    pub fn force_on(&self, v: &Vec3) -> Vec3 {
        self.e + v.cross(&self.b)
    }
}

impl Add for EMFieldValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.e + rhs.e, self.b + rhs.b)
    }
}

impl Sub for EMFieldValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.e - rhs.e, self.b - rhs.b)
    }
}

impl Neg for EMFieldValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.e, -self.b)
    }
}

impl Mul<f64> for EMFieldValue {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.e * s, self.b * s)
    }
}

impl AddAssign for EMFieldValue {
    fn add_assign(&mut self, rhs: Self) {
        self.e += rhs.e;
        self.b += rhs.b;
    }
}

impl SubAssign for EMFieldValue {
    fn sub_assign(&mut self, rhs: Self) {
        self.e -= rhs.e;
        self.b -= rhs.b;
    }
}

/// Central-difference residuals of the source-free Maxwell equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxwellResidual {
    /// `∂ₜE − ∇×B`
    pub ampere: Vec3,
    /// `∂ₜB + ∇×E`
    pub faraday: Vec3,
    pub div_e: f64,
    pub div_b: f64,
}

impl MaxwellResidual {
    /// Largest absolute residual component.
    pub fn max_abs(&self) -> f64 {
        self.ampere
            .amax()
            .max(self.faraday.amax())
            .max(self.div_e.abs())
            .max(self.div_b.abs())
    }
}

/// Estimates the Maxwell residuals of `f` at `(x, t)` with second-order
/// central differences of step `h` in every coordinate.
pub fn maxwell_residual<F>(f: F, x: &Vec3, t: f64, h: f64) -> Result<MaxwellResidual>
where
    F: Fn(&Vec3, f64) -> Result<EMFieldValue>,
{
    let mut grad = [EMFieldValue::ZERO; 3];
    for (k, g) in grad.iter_mut().enumerate() {
        let mut dx = Vec3::zeros();
        dx[k] = h;
        *g = (f(&(x + dx), t)? - f(&(x - dx), t)?) * (0.5 / h);
    }
    let dt = (f(x, t + h)? - f(x, t - h)?) * (0.5 / h);
    let curl = |pick: fn(&EMFieldValue) -> Vec3| {
        let d = |i: usize, j: usize| pick(&grad[i])[j];
        Vec3::new(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0))
    };
    let curl_e = curl(|f| f.e);
    let curl_b = curl(|f| f.b);
    Ok(MaxwellResidual {
        ampere: dt.e - curl_b,
        faraday: dt.b + curl_e,
        div_e: grad[0].e.x + grad[1].e.y + grad[2].e.z,
        div_b: grad[0].b.x + grad[1].b.y + grad[2].b.z,
    })
}

impl std::iter::Sum for EMFieldValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, f| acc + f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_has_zero_residual() {
        // E = ŷ cos(z − t), B = −x̂ cos(z − t) travels along +z.
        let wave = |x: &Vec3, t: f64| {
            let c = (x.z - t).cos();
            Ok(EMFieldValue::new(Vec3::y() * c, Vec3::x() * -c))
        };
        let r = maxwell_residual(wave, &Vec3::new(0.3, 0.1, 0.7), 0.4, 1e-3).unwrap();
        assert!(r.max_abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn wrong_sign_is_detected() {
        let bad = |x: &Vec3, t: f64| {
            let c = (x.z - t).cos();
            Ok(EMFieldValue::new(Vec3::y() * c, Vec3::x() * c))
        };
        let r = maxwell_residual(bad, &Vec3::new(0.3, 0.1, 0.2), 0.4, 1e-3).unwrap();
        assert!(r.max_abs() > 0.1);
    }

    #[test]
    fn arithmetic_and_checks() {
        let f = EMFieldValue::new(Vec3::x(), Vec3::y());
        assert_eq!((f + f - f * 2.0).norm(), 0.0);
        assert_eq!(f.poynting(), Vec3::z() / (4.0 * std::f64::consts::PI));
        assert!(EMFieldValue::new(Vec3::new(f64::NAN, 0.0, 0.0), Vec3::zeros()).checked().is_err());
    }
}
