//! Unit systems.
//!
//! All computations run in natural units where the speed of light is one and
//! the vacuum permittivity is `1/(4π)` (Gaussian-type electrostatics). SI values
//! only appear at input/output boundaries and are converted with a
//! [`UnitScale`], which fixes the SI length and mass that correspond to one
//! natural unit.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// CODATA 2018 speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// CODATA 2018 vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// CODATA 2018 elementary charge in C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// CODATA 2018 electron mass in kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    #[default]
    Natural,
    #[serde(alias = "SI")]
    Si,
}

/// A unit system: the speed of light, vacuum permittivity and the reference
/// charge and mass used to express physical inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub mode: UnitMode,
    pub c: f64,
    pub epsilon0: f64,
    pub e_charge: f64,
    pub m_electron: f64,
}

impl Units {
    /// `c = 1`, `ε₀ = 1/(4π)`, unit charge and mass.
    pub const fn natural() -> Self {
        Self {
            mode: UnitMode::Natural,
            c: 1.0,
            epsilon0: 1.0 / (4.0 * PI),
            e_charge: 1.0,
            m_electron: 1.0,
        }
    }

    pub const fn si() -> Self {
        Self {
            mode: UnitMode::Si,
            c: SPEED_OF_LIGHT,
            epsilon0: EPSILON_0,
            e_charge: ELEMENTARY_CHARGE,
            m_electron: ELECTRON_MASS,
        }
    }

    pub fn from_mode(mode: UnitMode) -> Self {
        match mode {
            UnitMode::Natural => Self::natural(),
            UnitMode::Si => Self::si(),
        }
    }

    /// Coulomb constant `1/(4π ε₀)`; exactly one in natural mode.
    pub fn coulomb_constant(&self) -> f64 {
        match self.mode {
            UnitMode::Natural => 1.0,
            UnitMode::Si => 1.0 / (4.0 * PI * self.epsilon0),
        }
    }
}

impl Default for Units {
    fn default() -> Self {
        Self::natural()
    }
}

/// Maps SI quantities onto natural units.
///
/// One natural length is `length` metres, one natural time is `length / c`
/// seconds and one natural mass is `mass` kilograms. The charge unit follows
/// from requiring Coulomb's law to read `q₁q₂/r²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScale {
    pub length: f64,
    pub mass: f64,
}

impl Default for UnitScale {
    fn default() -> Self {
        Self {
            length: 1.0,
            mass: ELECTRON_MASS,
        }
    }
}

impl UnitScale {
    pub fn new(length: f64, mass: f64) -> Self {
        Self { length, mass }
    }

    pub fn time(&self) -> f64 {
        self.length / SPEED_OF_LIGHT
    }

    pub fn charge(&self) -> f64 {
        (4.0 * PI * EPSILON_0 * self.mass * self.length).sqrt() * SPEED_OF_LIGHT
    }

    pub fn velocity(&self) -> f64 {
        SPEED_OF_LIGHT
    }

    pub fn acceleration(&self) -> f64 {
        self.length / (self.time() * self.time())
    }

    pub fn momentum(&self) -> f64 {
        self.mass * SPEED_OF_LIGHT
    }

    pub fn force(&self) -> f64 {
        self.mass * self.acceleration()
    }

    pub fn electric_field(&self) -> f64 {
        self.force() / self.charge()
    }

    pub fn magnetic_field(&self) -> f64 {
        self.force() / (self.charge() * SPEED_OF_LIGHT)
    }

    pub fn power(&self) -> f64 {
        self.force() * self.length / self.time()
    }
}

/// Physical dimension of a scalar, used by [`UnitScale::to_natural`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Mass,
    Charge,
    Velocity,
    Acceleration,
    Momentum,
    Force,
    ElectricField,
    MagneticField,
    Power,
}

impl UnitScale {
    fn factor(&self, dim: Dimension) -> f64 {
        match dim {
            Dimension::Length => self.length,
            Dimension::Time => self.time(),
            Dimension::Mass => self.mass,
            Dimension::Charge => self.charge(),
            Dimension::Velocity => self.velocity(),
            Dimension::Acceleration => self.acceleration(),
            Dimension::Momentum => self.momentum(),
            Dimension::Force => self.force(),
            Dimension::ElectricField => self.electric_field(),
            Dimension::MagneticField => self.magnetic_field(),
            Dimension::Power => self.power(),
        }
    }

    pub fn to_natural(&self, value_si: f64, dim: Dimension) -> f64 {
        value_si / self.factor(dim)
    }

    pub fn to_si(&self, value_natural: f64, dim: Dimension) -> f64 {
        value_natural * self.factor(dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_constants_are_exact() {
        let u = Units::natural();
        assert_eq!(u.c, 1.0);
        assert_eq!(u.epsilon0, 1.0 / (4.0 * PI));
        assert_eq!(u.coulomb_constant(), 1.0);
    }

    #[test]
    fn coulomb_law_is_unit_free() {
        // Two elementary charges 1 m apart.
        let s = UnitScale::default();
        let f_si = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * PI * EPSILON_0);
        let q = s.to_natural(ELEMENTARY_CHARGE, Dimension::Charge);
        let f_nat = q * q / 1.0;
        assert!((s.to_si(f_nat, Dimension::Force) / f_si - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_all_dimensions() {
        let s = UnitScale::new(0.37, 2.5e-27);
        for dim in [
            Dimension::Length,
            Dimension::Time,
            Dimension::Mass,
            Dimension::Charge,
            Dimension::Velocity,
            Dimension::Acceleration,
            Dimension::Momentum,
            Dimension::Force,
            Dimension::ElectricField,
            Dimension::MagneticField,
            Dimension::Power,
        ] {
            let v = 1.234e5;
            let back = s.to_si(s.to_natural(v, dim), dim);
            assert!((back / v - 1.0).abs() < 1e-12, "{dim:?}");
        }
    }
}
