//! Phase-space state of a charge and the momentum/velocity relation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// Position and momentum of one charge at one instant (natural units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeState {
    pub q: Vec3,
    pub p: Vec3,
}

impl ChargeState {
    pub fn new(q: Vec3, p: Vec3) -> Result<Self> {
        if q.iter().chain(p.iter()).all(|c| c.is_finite()) {
            Ok(Self { q, p })
        } else {
            Err(Error::Domain(format!("non-finite charge state q={q:?} p={p:?}")))
        }
    }

    pub fn velocity(&self, m: f64) -> Result<Vec3> {
        relativistic_velocity(&self.p, m)
    }
}

/// `v = p / sqrt(p² + m²)`.
pub fn relativistic_velocity(p: &Vec3, m: f64) -> Result<Vec3> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("mass must be positive and finite, got {m}")));
    }
    if !p.iter().all(|c| c.is_finite()) {
        return Err(Error::Domain(format!("non-finite momentum {p:?}")));
    }
    // Scale out the largest component so p² cannot overflow.
    let scale = p.amax().max(m);
    let ps = p / scale;
    let ms = m / scale;
    Ok(ps / (ps.norm_squared() + ms * ms).sqrt())
}

/// Inverse of [`relativistic_velocity`]: `p = m v / sqrt(1 - v²)`.
pub fn momentum_from_velocity(v: &Vec3, m: f64) -> Result<Vec3> {
    let v2 = v.norm_squared();
    if !(v2 < 1.0) {
        return Err(Error::Domain(format!("speed must be below one, got |v| = {}", v2.sqrt())));
    }
    Ok(v * (m / (1.0 - v2).sqrt()))
}

pub fn lorentz_gamma(v: &Vec3) -> f64 {
    1.0 / (1.0 - v.norm_squared()).sqrt()
}

/// `dp/dt` of a charge with velocity `v` and acceleration `a = dv/dt`.
pub fn momentum_rate(v: &Vec3, a: &Vec3, m: f64) -> Vec3 {
    let g = lorentz_gamma(v);
    (a + v * (g * g * v.dot(a))) * (m * g)
}

/// `a = dv/dt` given `dp/dt`; inverse of [`momentum_rate`].
pub fn acceleration_from_force(p: &Vec3, force: &Vec3, m: f64) -> Vec3 {
    let energy = (p.norm_squared() + m * m).sqrt();
    force / energy - p * (p.dot(force) / energy.powi(3))
}

/// Coupling coefficients `e_ij` switching the field of charge j on charge i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Config(format!("coupling row {i} has {} entries, expected {n}", row.len())));
            }
            entries.extend(row);
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::Config("coupling entries must be finite".into()));
        }
        Ok(Self { n, entries })
    }

    /// `e_ii = 0`, `e_ij = 1` otherwise.
    pub fn no_self_interaction(n: usize) -> Self {
        let entries = (0..n * n).map(|k| if k / n == k % n { 0.0 } else { 1.0 }).collect();
        Self { n, entries }
    }

    pub fn full(n: usize) -> Self {
        Self { n, entries: vec![1.0; n * n] }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![0.0; n * n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn has_self_interaction(&self) -> bool {
        (0..self.n).any(|i| self.get(i, i) != 0.0)
    }
}
