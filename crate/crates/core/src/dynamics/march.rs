//! Forward marching of purely retarded dynamics with front detection.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    detect_front_crossing, lorentz_force, trajectory_jerk, ChargeShape, FieldSource, ForceModel, FrontSource,
    InitialValueField, SelfForce, SystemConfig,
};
use crate::error::{Error, Result};
use crate::kinematics::{Extension, Shifted, TrajectoryHistory, Worldline};
use crate::mollifier::Mollifier;
use crate::propagation::InitialFieldSpec;
use crate::state::{acceleration_from_force, momentum_rate, relativistic_velocity};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunEvent {
    /// Charge `charge` reaches the singular front emitted by `source` at the
    /// initial time.
    FrontCrossing {
        charge: usize,
        source: usize,
        time: f64,
        location: Vec3,
        initial_distance: f64,
        minimal_distance: f64,
    },
    VelocityGuard { charge: usize, time: f64, speed: f64 },
    MinimumSeparation { charges: [usize; 2], time: f64, distance: f64 },
    Horizon { time: f64 },
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// One history per charge; nodes start at the initial time.
    pub histories: Vec<TrajectoryHistory>,
    pub events: Vec<RunEvent>,
    pub halted: bool,
    pub initial_time: f64,
    pub final_time: f64,
    pub steps: usize,
}

impl RunOutcome {
    pub fn front_crossing(&self) -> Option<&RunEvent> {
        self.events.iter().find(|e| matches!(e, RunEvent::FrontCrossing { .. }))
    }
}

/// Everything fixed during a run.
pub(crate) struct Setup {
    pub masses: Vec<f64>,
    pub charges: Vec<f64>,
    pub inits: Vec<InitialFieldSpec>,
    pub kernel: Option<Mollifier>,
    pub t0: f64,
}

impl Setup {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        config.validate()?;
        let t0 = config.initial_time()?;
        let inits = config
            .charges
            .iter()
            .map(|c| {
                let aux: Arc<dyn Worldline> = Arc::new(Shifted { inner: c.init.aux.clone(), offset: t0 });
                InitialFieldSpec::unchecked(c.init.lambda, aux, c.init.free.clone())
            })
            .collect();
        Ok(Self {
            masses: config.charges.iter().map(|c| c.mass()).collect(),
            charges: config.charges.iter().map(|c| c.charge).collect(),
            inits,
            kernel: config.kernel()?,
            t0,
        })
    }

    pub fn model<'a>(&'a self, config: &'a SystemConfig) -> ForceModel<'a> {
        ForceModel {
            charges: &self.charges,
            coupling: &config.coupling,
            kernel: self.kernel.as_ref(),
            self_force: config.self_force,
        }
    }

    fn sources<'a>(&'a self, histories: &'a [TrajectoryHistory]) -> Result<Vec<InitialValueField<'a>>> {
        histories.iter().zip(&self.inits).map(|(h, init)| InitialValueField::new(h, init, self.t0)).collect()
    }
}

type State = (Vec3, Vec3);

/// `(dq/dt, dp/dt)` of every charge.
fn derivatives(
    config: &SystemConfig,
    model: &ForceModel<'_>,
    masses: &[f64],
    histories: &[TrajectoryHistory],
    sources: &[&dyn FieldSource],
    t: f64,
    y: &[State],
) -> Result<Vec<State>> {
    let h = config.integrator.step;
    (0..y.len())
        .into_par_iter()
        .map(|i| {
            let (q, p) = &y[i];
            let v = relativistic_velocity(p, masses[i])?;
            let jerk = match config.self_force {
                SelfForce::AldNonrelativistic => Some(trajectory_jerk(&histories[i], t, h)?),
                SelfForce::None => None,
            };
            let f = lorentz_force(i, q, &v, t, model, sources, jerk.as_ref())?;
            Ok((v, f))
        })
        .collect()
}

fn axpy(y: &[State], k: &[State], h: f64) -> Vec<State> {
    y.iter().zip(k).map(|((q, p), (dq, dp))| (q + dq * h, p + dp * h)).collect()
}

/// Integrates the retarded (`λ = 1`) dynamics from the common end of the
/// initial trajectories up to `horizon` with classical RK4.
///
/// Point charges stop at the last step before any of them meets the
/// singular front of an incompatible initial field; smeared charges carry
/// on and the crossing is only recorded.
pub fn integrate_retarded(config: &SystemConfig, horizon: f64) -> Result<RunOutcome> {
    if config.lambda != 1.0 || config.charges.iter().any(|c| c.init.lambda != 1.0) {
        return Err(Error::Config(
            "forward marching needs purely retarded coupling (lambda = 1); use relaxation otherwise".into(),
        ));
    }
    let setup = Setup::new(config)?;
    let t0 = setup.t0;
    if !(horizon > t0) {
        return Err(Error::Config(format!("horizon {horizon} must exceed the initial time {t0}")));
    }
    let n = config.charges.len();
    let mut histories = Vec::with_capacity(n);
    for c in &config.charges {
        let last = *c.stripe.last().expect("validated non-empty");
        let mut h = TrajectoryHistory::new(
            c.mass(),
            Extension::Prescribed(Arc::new(c.stripe.clone())),
            Extension::Extrapolate,
        )?;
        h.push(last.t, last.q, last.p, last.a)?;
        histories.push(h);
    }

    let fronts: Vec<FrontSource> = {
        let sources = setup.sources(&histories)?;
        sources
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.shells_cancel())
            .map(|(j, s)| FrontSource { time: t0, center: s.initial_position(), owner: Some(j) })
            .collect()
    };
    let halt_on_front = matches!(config.shape, ChargeShape::Point);
    let mut front_seen = vec![vec![false; n]; fronts.len()];

    let model = setup.model(config);
    let steps = ((horizon - t0) / config.integrator.step).round().max(1.0) as usize;
    let h = (horizon - t0) / steps as f64;
    let mut y: Vec<State> = histories.iter().map(|hist| {
        let l = hist.last().expect("one node");
        (l.q, l.p)
    }).collect();
    // The first node carries the one-sided acceleration at t0+, from the
    // force, rather than the stripe's.
    let k0 = {
        let sources = setup.sources(&histories)?;
        let refs: Vec<&dyn FieldSource> = sources.iter().map(|s| s as &dyn FieldSource).collect();
        derivatives(config, &model, &setup.masses, &histories, &refs, t0, &y)?
    };
    for (i, hist) in histories.iter_mut().enumerate() {
        hist.truncate_after(f64::NEG_INFINITY);
        let (q, p) = y[i];
        hist.push(t0, q, p, acceleration_from_force(&p, &k0[i].1, setup.masses[i]))?;
    }
    let mut events = Vec::new();
    let mut halted = false;
    let mut k1: Option<Vec<State>> = Some(k0);
    let mut done = 0;

    'march: for step in 0..steps {
        let t = t0 + h * step as f64;
        let t_next = if step + 1 == steps { horizon } else { t0 + h * (step + 1) as f64 };
        let hs = t_next - t;
        let stage = |k1: Option<Vec<State>>| -> Result<(Vec<State>, Vec<State>)> {
            let sources = setup.sources(&histories)?;
            let refs: Vec<&dyn FieldSource> = sources.iter().map(|s| s as &dyn FieldSource).collect();
            let f = |t: f64, y: &[State]| derivatives(config, &model, &setup.masses, &histories, &refs, t, y);
            let k1 = match k1 {
                Some(k) => k,
                None => f(t, &y)?,
            };
            let k2 = f(t + 0.5 * hs, &axpy(&y, &k1, 0.5 * hs))?;
            let k3 = f(t + 0.5 * hs, &axpy(&y, &k2, 0.5 * hs))?;
            let k4 = f(t_next, &axpy(&y, &k3, hs))?;
            let y_next: Vec<State> = (0..n)
                .map(|i| {
                    let (q, p) = y[i];
                    let dq = (k1[i].0 + (k2[i].0 + k3[i].0) * 2.0 + k4[i].0) * (hs / 6.0);
                    let dp = (k1[i].1 + (k2[i].1 + k3[i].1) * 2.0 + k4[i].1) * (hs / 6.0);
                    (q + dq, p + dp)
                })
                .collect();
            let k_end = f(t_next, &y_next)?;
            Ok((y_next, k_end))
        };
        let (y_next, k_end) = match stage(k1.take()) {
            Ok(r) => r,
            Err(Error::SingularFront(_)) if halt_on_front => {
                // A stage landed on a front before the sign check saw it.
                let refs: Vec<&dyn Worldline> = histories.iter().map(|h| h as &dyn Worldline).collect();
                let crossings = detect_front_crossing(&refs, &fronts, t_next)?;
                if let Some(c) = crossings.first() {
                    events.push(front_event(c.charge, fronts[c.source].owner.unwrap_or(c.source), c));
                }
                halted = true;
                break 'march;
            }
            Err(e) => return Err(e),
        };

        let mut crossed = None;
        for (s, src) in fronts.iter().enumerate() {
            for (i, (q, _)) in y_next.iter().enumerate() {
                if src.owner == Some(i) || front_seen[s][i] {
                    continue;
                }
                if (q - src.center).norm() - (t_next - t0) <= 0.0 {
                    crossed.get_or_insert((s, i));
                    front_seen[s][i] = true;
                }
            }
        }

        for i in 0..n {
            let (q, p) = y_next[i];
            let a = acceleration_from_force(&p, &k_end[i].1, setup.masses[i]);
            if let Err(e) = histories[i].push(t_next, q, p, a) {
                match e {
                    Error::VelocityGuard { time, speed } => {
                        for hist in histories.iter_mut() {
                            hist.truncate_after(t);
                        }
                        events.push(RunEvent::VelocityGuard { charge: i, time, speed });
                        halted = true;
                        break 'march;
                    }
                    other => return Err(other),
                }
            }
        }
        done = step + 1;

        if let Some((s, _)) = crossed {
            let refs: Vec<&dyn Worldline> = histories.iter().map(|h| h as &dyn Worldline).collect();
            let src = [fronts[s]];
            for c in detect_front_crossing(&refs, &src, t_next)? {
                if events.iter().any(|e| matches!(e, RunEvent::FrontCrossing { charge, source, .. }
                    if *charge == c.charge && *source == fronts[s].owner.unwrap_or(s)))
                {
                    continue;
                }
                events.push(front_event(c.charge, fronts[s].owner.unwrap_or(s), &c));
            }
            if halt_on_front {
                for hist in histories.iter_mut() {
                    hist.truncate_after(t);
                }
                done = step;
                halted = true;
                break 'march;
            }
        }

        for i in 0..n {
            for j in i + 1..n {
                let d = (y_next[i].0 - y_next[j].0).norm();
                if d < config.integrator.min_separation {
                    events.push(RunEvent::MinimumSeparation { charges: [i, j], time: t_next, distance: d });
                    halted = true;
                    break 'march;
                }
            }
        }
        y = y_next;
        k1 = Some(k_end);
    }

    let final_time = histories[0].last_time().unwrap_or(t0);
    if !halted {
        events.push(RunEvent::Horizon { time: final_time });
    }
    for hist in histories.iter_mut() {
        hist.future = Extension::Inertial;
    }
    Ok(RunOutcome { histories, events, halted, initial_time: t0, final_time, steps: done })
}

fn front_event(charge: usize, source: usize, c: &super::FrontCrossing) -> RunEvent {
    RunEvent::FrontCrossing {
        charge,
        source,
        time: c.time,
        location: c.location,
        initial_distance: c.initial_distance,
        minimal_distance: c.minimal_distance,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Largest `|dp/dt − F|` at step midpoints, from the dense output.
    pub max_pointwise: f64,
    /// Largest `|p(t_{n+1}) − p(t_n) − ∫F| / h` with Simpson's rule.
    pub max_integrated: f64,
    pub intervals: usize,
}

/// Re-evaluates the equations of motion on the finished histories of a
/// retarded run, with forces recomputed from scratch.
pub fn dynamics_residual(config: &SystemConfig, outcome: &RunOutcome) -> Result<ResidualReport> {
    let setup = Setup::new(config)?;
    let model = setup.model(config);
    let histories = &outcome.histories;
    let sources = setup.sources(histories)?;
    let refs: Vec<&dyn FieldSource> = sources.iter().map(|s| s as &dyn FieldSource).collect();
    let h = config.integrator.step;
    let force = |i: usize, t: f64| -> Result<(Vec3, Vec3, Vec3)> {
        let s = histories[i].point(t)?;
        let jerk = match config.self_force {
            SelfForce::AldNonrelativistic => Some(trajectory_jerk(&histories[i], t, h)?),
            SelfForce::None => None,
        };
        let f = lorentz_force(i, &s.q, &s.v, t, &model, &refs, jerk.as_ref())?;
        Ok((f, s.v, s.a))
    };

    let per_charge: Vec<(f64, f64, usize)> = (0..histories.len())
        .into_par_iter()
        .map(|i| -> Result<(f64, f64, usize)> {
            let nodes = histories[i].nodes();
            let (mut pw, mut int) = (0.0f64, 0.0f64);
            let mut f_prev = force(i, nodes[0].t)?.0;
            for w in nodes.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                let tm = 0.5 * (a.t + b.t);
                let (fm, vm, am) = force(i, tm)?;
                let f_next = force(i, b.t)?.0;
                pw = pw.max((momentum_rate(&vm, &am, setup.masses[i]) - fm).norm());
                let span = b.t - a.t;
                let simpson = (f_prev + fm * 4.0 + f_next) * (span / 6.0);
                int = int.max((b.p - a.p - simpson).norm() / span);
                f_prev = f_next;
            }
            Ok((pw, int, nodes.len().saturating_sub(1)))
        })
        .collect::<Result<_>>()?;
    Ok(ResidualReport {
        max_pointwise: per_charge.iter().map(|r| r.0).fold(0.0, f64::max),
        max_integrated: per_charge.iter().map(|r| r.1).fold(0.0, f64::max),
        intervals: per_charge.iter().map(|r| r.2).max().unwrap_or(0),
    })
}
