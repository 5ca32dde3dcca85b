//! Waveform relaxation for dynamics with advanced coupling on a finite
//! window `[t₀, T]`.

use std::sync::Arc;

use rayon::prelude::*;

use super::march::Setup;
use super::{lorentz_force, trajectory_jerk, FieldSource, HistoryField, SelfForce, SystemConfig};
use crate::error::{Error, Result};
use crate::kinematics::{Extension, TrajectoryHistory, Uniform, Worldline};
use crate::state::{acceleration_from_force, relativistic_velocity};
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct RelaxOutcome {
    pub histories: Vec<TrajectoryHistory>,
    pub iterations: usize,
    /// Sup-norm change of the positions after each sweep.
    pub trace: Vec<f64>,
    pub initial_time: f64,
    pub final_time: f64,
}

impl RelaxOutcome {
    /// Largest position difference to another solution on the same grid.
    pub fn distance(&self, other: &RelaxOutcome) -> f64 {
        sup_distance(&self.histories, &other.histories)
    }
}

fn sup_distance(a: &[TrajectoryHistory], b: &[TrajectoryHistory]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.nodes().iter().zip(y.nodes()).map(|(n, m)| (n.q - m.q).amax()))
        .fold(0.0, f64::max)
}

struct Window<'a> {
    config: &'a SystemConfig,
    setup: Setup,
    futures: &'a [Extension],
    times: Vec<f64>,
}

impl Window<'_> {
    fn empty_history(&self, i: usize) -> Result<TrajectoryHistory> {
        TrajectoryHistory::new(
            self.setup.masses[i],
            Extension::Prescribed(Arc::new(self.config.charges[i].stripe.clone())),
            self.futures[i].clone(),
        )
    }

    /// Samples a guess worldline for charge `i` onto the grid; the first node
    /// is always the initial state.
    fn sample_guess(&self, i: usize, guess: &dyn Worldline) -> Result<TrajectoryHistory> {
        let mut h = self.empty_history(i)?;
        let first = *self.config.charges[i].stripe.last().expect("validated");
        h.push(first.t, first.q, first.p, first.a)?;
        let m = self.setup.masses[i];
        for &t in &self.times[1..] {
            let s = guess.point(t)?;
            h.push(t, s.q, crate::state::momentum_from_velocity(&s.v, m)?, s.a)?;
        }
        Ok(h)
    }

    /// Integrates charge `i` in the fields of the previous iterate.
    fn sweep_one(&self, i: usize, prev: &[TrajectoryHistory]) -> Result<TrajectoryHistory> {
        let config = self.config;
        let fields: Vec<HistoryField<'_>> = prev
            .iter()
            .zip(&config.charges)
            .map(|(h, c)| HistoryField { traj: h, lambda: config.lambda, free: &c.init.free, t0: self.setup.t0 })
            .collect();
        let refs: Vec<&dyn FieldSource> = fields.iter().map(|f| f as &dyn FieldSource).collect();
        let model = self.setup.model(config);
        let m = self.setup.masses[i];
        let step = config.integrator.step;
        let rhs = |t: f64, q: &Vec3, p: &Vec3| -> Result<(Vec3, Vec3)> {
            let v = relativistic_velocity(p, m)?;
            let jerk = match config.self_force {
                SelfForce::AldNonrelativistic => Some(trajectory_jerk(&prev[i], t, step)?),
                SelfForce::None => None,
            };
            Ok((v, lorentz_force(i, q, &v, t, &model, &refs, jerk.as_ref())?))
        };

        let mut h = self.empty_history(i)?;
        let first = *config.charges[i].stripe.last().expect("validated");
        let (mut q, mut p) = (first.q, first.p);
        let mut k1 = rhs(first.t, &q, &p)?;
        h.push(first.t, q, p, acceleration_from_force(&p, &k1.1, m))?;
        for w in self.times.windows(2) {
            let (t, dt) = (w[0], w[1] - w[0]);
            let k2 = rhs(t + 0.5 * dt, &(q + k1.0 * (0.5 * dt)), &(p + k1.1 * (0.5 * dt)))?;
            let k3 = rhs(t + 0.5 * dt, &(q + k2.0 * (0.5 * dt)), &(p + k2.1 * (0.5 * dt)))?;
            let k4 = rhs(w[1], &(q + k3.0 * dt), &(p + k3.1 * dt))?;
            q += (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (dt / 6.0);
            p += (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * (dt / 6.0);
            k1 = rhs(w[1], &q, &p)?;
            h.push(w[1], q, p, acceleration_from_force(&p, &k1.1, m))?;
        }
        Ok(h)
    }

    fn relax(&self, mut current: Vec<TrajectoryHistory>) -> Result<RelaxOutcome> {
        let settings = self.config.integrator;
        let mut trace = Vec::new();
        for iteration in 1..=settings.max_iterations {
            let next: Vec<TrajectoryHistory> = (0..current.len())
                .into_par_iter()
                .map(|i| self.sweep_one(i, &current))
                .collect::<Result<_>>()?;
            let change = sup_distance(&next, &current);
            trace.push(change);
            current = next;
            if change < settings.relaxation_tolerance {
                return Ok(RelaxOutcome {
                    histories: current,
                    iterations: iteration,
                    trace,
                    initial_time: self.setup.t0,
                    final_time: *self.times.last().expect("grid"),
                });
            }
            if !change.is_finite() {
                break;
            }
        }
        Err(Error::Iteration {
            iterations: trace.len(),
            last_change: trace.last().copied().unwrap_or(f64::NAN),
            trace,
        })
    }
}

fn window<'a>(config: &'a SystemConfig, futures: &'a [Extension], end: f64) -> Result<Window<'a>> {
    let setup = Setup::new(config)?;
    if futures.len() != config.charges.len() {
        return Err(Error::Config(format!(
            "{} future extensions for {} charges",
            futures.len(),
            config.charges.len()
        )));
    }
    let t0 = setup.t0;
    if !(end > t0) {
        return Err(Error::Config(format!("window end {end} must exceed the initial time {t0}")));
    }
    let steps = ((end - t0) / config.integrator.step).round().max(1.0) as usize;
    let h = (end - t0) / steps as f64;
    let times = (0..=steps).map(|k| if k == steps { end } else { t0 + h * k as f64 }).collect();
    Ok(Window { config, setup, futures, times })
}

/// Solves the dynamics on `[t₀, end]` given the past (the stripes in
/// `config`) and how each trajectory continues beyond `end`, usually a
/// prescribed future stripe or inertial motion. Starts from inertial
/// continuation and iterates Jacobi sweeps until the positions change by
/// less than the relaxation tolerance. A prescribed future should join the
/// solution continuously at `end`, or the advanced fields jump there and the
/// iteration stalls at the size of that jump.
pub fn integrate_relaxation(
    config: &SystemConfig,
    futures: &[Extension],
    end: f64,
) -> Result<RelaxOutcome> {
    let w = window(config, futures, end)?;
    let guesses = (0..config.charges.len())
        .map(|i| {
            let last = config.charges[i].stripe.last().expect("validated");
            let free = Uniform::from_momentum(last.q, last.p, w.setup.masses[i])?;
            let shifted = crate::kinematics::Shifted { inner: free, offset: -last.t };
            w.sample_guess(i, &shifted)
        })
        .collect::<Result<Vec<_>>>()?;
    w.relax(guesses)
}

/// Runs the relaxation from several initial guesses (one worldline per charge
/// each) and returns the distinct converged solutions. Non-converging
/// guesses are dropped; if none converges the last failure is returned.
pub fn relaxation_fixed_points(
    config: &SystemConfig,
    futures: &[Extension],
    end: f64,
    guesses: &[Vec<Arc<dyn Worldline>>],
) -> Result<Vec<RelaxOutcome>> {
    let w = window(config, futures, end)?;
    let distinct = 100.0 * config.integrator.relaxation_tolerance;
    let mut found: Vec<RelaxOutcome> = Vec::new();
    let mut last_err = None;
    for guess in guesses {
        if guess.len() != config.charges.len() {
            return Err(Error::Config("every guess needs one worldline per charge".into()));
        }
        let start =
            guess.iter().enumerate().map(|(i, g)| w.sample_guess(i, g.as_ref())).collect::<Result<Vec<_>>>()?;
        match w.relax(start) {
            Ok(sol) => {
                if found.iter().all(|f| f.distance(&sol) > distinct) {
                    found.push(sol);
                }
            }
            Err(e @ Error::Iteration { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    match (found.is_empty(), last_err) {
        (true, Some(e)) => Err(e),
        _ => Ok(found),
    }
}
