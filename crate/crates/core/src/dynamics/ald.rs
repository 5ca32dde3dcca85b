//! Runaway behaviour of the nonrelativistic Abraham-Lorentz-Dirac equation
//! for a free charge.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AldProbe {
    /// `τ = 2e²/(3m)`.
    pub time_constant: f64,
    /// Growth rate fitted to the integrated `|a(t)|`.
    pub fitted_rate: f64,
    pub expected_rate: f64,
    pub samples: Vec<(f64, f64)>,
}

impl AldProbe {
    pub fn relative_error(&self) -> f64 {
        (self.fitted_rate - self.expected_rate).abs() / self.expected_rate
    }
}

/// Integrates `m a = (2/3) e² ȧ` with no external force from `a(0) = a0`
/// over `[0, horizon]` and fits the exponential growth rate, which should
/// be `1/τ`.
pub fn ald_runaway_probe(mass: f64, charge: f64, a0: f64, horizon: f64) -> Result<AldProbe> {
    if !(mass > 0.0 && charge != 0.0 && horizon > 0.0 && a0.is_finite()) {
        return Err(Error::Domain("runaway probe needs m > 0, e ≠ 0, finite a0 and a positive horizon".into()));
    }
    let tau = 2.0 * charge * charge / (3.0 * mass);
    let rate = 1.0 / tau;
    let steps = 1000;
    let h = horizon / steps as f64;
    if a0 == 0.0 {
        let samples = (0..=steps).map(|k| (h * k as f64, 0.0)).collect();
        return Ok(AldProbe { time_constant: tau, fitted_rate: 0.0, expected_rate: rate, samples });
    }
    let mut a = a0;
    let mut samples = vec![(0.0, a.abs())];
    for k in 1..=steps {
        let k1 = rate * a;
        let k2 = rate * (a + 0.5 * h * k1);
        let k3 = rate * (a + 0.5 * h * k2);
        let k4 = rate * (a + h * k3);
        a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        samples.push((h * k as f64, a.abs()));
    }
    let n = samples.len() as f64;
    let (st, sl) = samples.iter().fold((0.0, 0.0), |(st, sl), (t, a)| (st + t, sl + a.ln()));
    let (mt, ml) = (st / n, sl / n);
    let (cov, var) = samples
        .iter()
        .fold((0.0, 0.0), |(c, v), (t, a)| (c + (t - mt) * (a.ln() - ml), v + (t - mt) * (t - mt)));
    Ok(AldProbe { time_constant: tau, fitted_rate: cov / var, expected_rate: rate, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_rate_matches_time_constant() {
        let p = ald_runaway_probe(1.0, 0.3, 1e-3, 0.5).unwrap();
        assert!((p.time_constant - 0.06).abs() < 1e-15);
        assert!(p.relative_error() < 1e-3, "{}", p.relative_error());
        assert!(p.samples.last().unwrap().1 > 1e-3 * 1e3);
    }

    #[test]
    fn no_initial_acceleration_no_runaway() {
        let p = ald_runaway_probe(1.0, 0.3, 0.0, 0.5).unwrap();
        assert_eq!(p.fitted_rate, 0.0);
        assert!(p.samples.iter().all(|s| s.1 == 0.0));
    }

    #[test]
    fn doubling_charge_squared_halves_rate() {
        let e = 0.3;
        let a = ald_runaway_probe(1.0, e, 1.0, 0.2).unwrap();
        let b = ald_runaway_probe(1.0, e * 2f64.sqrt(), 1.0, 0.2).unwrap();
        assert!((a.fitted_rate / b.fitted_rate - 2.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(ald_runaway_probe(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(ald_runaway_probe(0.0, 1.0, 1.0, 1.0).is_err());
    }
}
