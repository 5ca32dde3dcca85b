//! Canned experiments: the light-front dataset of a charge with a Coulomb
//! initial field, the order-of-magnitude estimate for two charged clouds,
//! and two-body runs.

use std::sync::Arc;

use serde::Serialize;

use crate::compatibility::{adapt_self_consistent, AdaptReport};
use crate::config::{
    AuxName, AuxSpec, ChargeDoc, ConfigDoc, CouplingDoc, FutureDoc, InitialFieldDoc, RelaxationDoc, ResolutionDoc,
    ShapeDoc,
};
use crate::dynamics::{
    dynamics_residual, integrate_relaxation, integrate_retarded, ChargeShape, IntegratorSettings, RelaxOutcome,
    ResidualReport, RunEvent, RunOutcome, SelfForce, SystemConfig,
};
use crate::error::{Error, Result};
use crate::kinematics::{TrajectoryHistory, Uniform, Worldline};
use crate::lw::larmor_power;
use crate::output::GridRow;
use crate::propagation::{evaluate_grid, EvalOptions, FrontPolicy, InitialData, InitialFieldSpec, SingularShell};
use crate::quadrature::fibonacci_sphere;
use crate::state::{momentum_rate, relativistic_velocity};
use crate::units::{Dimension, UnitMode, UnitScale, Units, ELECTRON_MASS, ELEMENTARY_CHARGE};
use crate::Vec3;

/// A unit charge starting at the origin with a Coulomb initial field (charge
/// at rest) while actually following `actual`.
#[derive(Debug, Clone)]
pub struct CoulombFront {
    pub actual: Arc<dyn Worldline>,
    pub time: f64,
    pub grid: Vec<Vec3>,
    /// Points placed exactly on the cone.
    pub sphere_samples: usize,
}

impl CoulombFront {
    /// Uniform motion with momentum `p0` (unit mass), observed at `t = 1`
    /// on a 40 × 40 grid of the plane `z = 0` over `[−2, 2]²`.
    pub fn uniform(p0: Vec3) -> Result<Self> {
        let actual = Uniform::from_momentum(Vec3::zeros(), p0, 1.0)?;
        let n = 40;
        let coord = |k: usize| -2.0 + 4.0 * k as f64 / (n - 1) as f64;
        let grid = (0..n).flat_map(|i| (0..n).map(move |j| Vec3::new(coord(i), coord(j), 0.0))).collect();
        Ok(Self { actual: Arc::new(actual), time: 1.0, grid, sphere_samples: 12 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellPoint {
    pub point: Vec3,
    pub net_e: Vec3,
    pub net_b: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellReport {
    pub time: f64,
    pub center: Vec3,
    pub radius: f64,
    pub momentum_gap: Vec3,
    pub shells: Vec<SingularShell>,
    pub samples: Vec<ShellPoint>,
    pub max_net_norm: f64,
}

pub fn shell_report(actual: &dyn Worldline, init: &InitialFieldSpec, t: f64, samples: usize) -> Result<ShellReport> {
    let data = InitialData::new(actual, init)?;
    let shells = data.shells(t)?;
    let points = fibonacci_sphere(samples)
        .into_iter()
        .map(|n| {
            let x = data.q0 + n * t.abs();
            let net = shells[0].coefficient(&x)? + shells[1].coefficient(&x)?;
            Ok(ShellPoint { point: x, net_e: net.e, net_b: net.b })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_net_norm = points.iter().map(|p| p.net_e.norm().max(p.net_b.norm())).fold(0.0, f64::max);
    Ok(ShellReport {
        time: t,
        center: data.q0,
        radius: t.abs(),
        momentum_gap: data.momentum_gap(),
        shells: shells.to_vec(),
        samples: points,
        max_net_norm,
    })
}

#[derive(Debug, Clone)]
pub struct CoulombFrontData {
    pub rows: Vec<GridRow>,
    pub shells: ShellReport,
}

/// Field rows on the grid and on the cone, each labelled inside, outside or
/// band, plus the net shell coefficients on the cone.
pub fn coulomb_front(setup: &CoulombFront) -> Result<CoulombFrontData> {
    let init = InitialFieldSpec::coulomb(setup.actual.point(0.0)?.q);
    let data = InitialData::new(&*setup.actual, &init)?;
    let t = setup.time;
    let mut points = setup.grid.clone();
    points.extend(fibonacci_sphere(setup.sphere_samples).into_iter().map(|n| data.q0 + n * t.abs()));
    let options = EvalOptions { on_front: FrontPolicy::Report, ..EvalOptions::default() };
    let samples = evaluate_grid(&*setup.actual, &init, &points, t, options)?;
    let rows = points
        .iter()
        .zip(samples)
        .map(|(x, s)| Ok(GridRow::from_sample(x, t, &s?)))
        .collect::<Result<Vec<_>>>()?;
    let shells = shell_report(&*setup.actual, &init, t, setup.sphere_samples)?;
    Ok(CoulombFrontData { rows, shells })
}

/// Inputs of the two-cloud estimate, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CloudInputs {
    /// Electrons per cloud.
    pub electrons: f64,
    /// Initial acceleration of the first cloud (m/s²).
    pub source_acceleration: f64,
    /// Distance of the second cloud from the first at the crossing (m).
    pub distance: f64,
    /// Diameter of a cloud (m).
    pub diameter: f64,
    /// Speed of the second cloud (m/s).
    pub speed: f64,
}

impl Default for CloudInputs {
    fn default() -> Self {
        Self { electrons: 1e13, source_acceleration: 1e17, distance: 1e2, diameter: 1e-2, speed: 1e4 }
    }
}

/// Results in SI units whichever unit system was used to compute them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CloudEstimate {
    pub computed_in: UnitMode,
    /// Field of the first cloud at the second, V/m.
    pub e1x: f64,
    /// Acceleration of a single electron in that field, m/s².
    pub a2: f64,
    /// Radiated power of the second cloud, W.
    pub p2: f64,
    /// Time for the second cloud to traverse the smeared front, s.
    pub rise_time: f64,
}

/// Radiation field of the accelerated cloud `Z e (−|a|) / (4πε₀ c² r)`, the
/// resulting electron acceleration, the radiated power and the time the
/// second cloud needs to pass the smeared front.
pub fn paper_example(mode: UnitMode) -> Result<CloudEstimate> {
    paper_example_with(&CloudInputs::default(), mode, &UnitScale::default())
}

pub fn paper_example_with(inputs: &CloudInputs, mode: UnitMode, scale: &UnitScale) -> Result<CloudEstimate> {
    let si = Units::si();
    let (units, conv) = match mode {
        UnitMode::Si => (si, None),
        UnitMode::Natural => (Units::natural(), Some(scale)),
    };
    let to = |v: f64, d: Dimension| conv.map_or(v, |s| s.to_natural(v, d));
    let back = |v: f64, d: Dimension| conv.map_or(v, |s| s.to_si(v, d));
    let e = to(ELEMENTARY_CHARGE, Dimension::Charge);
    let m = to(ELECTRON_MASS, Dimension::Mass);
    let cloud = inputs.electrons * e;
    let a1 = to(inputs.source_acceleration, Dimension::Acceleration);
    let r = to(inputs.distance, Dimension::Length);
    if !(r > 0.0 && inputs.speed > 0.0) {
        return Err(Error::Domain("distance and speed must be positive".into()));
    }
    let e1x = units.coulomb_constant() * cloud * (-a1.abs()) / (units.c * units.c * r);
    let a2 = e / m * e1x;
    let p2 = larmor_power(&Vec3::new(a2, 0.0, 0.0), cloud, &units);
    let rise = to(inputs.diameter, Dimension::Length) / to(inputs.speed, Dimension::Velocity);
    Ok(CloudEstimate {
        computed_in: mode,
        e1x: back(e1x, Dimension::ElectricField),
        a2: back(a2, Dimension::Acceleration),
        p2: back(p2, Dimension::Power),
        rise_time: back(rise, Dimension::Time),
    })
}

/// Two-body presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoBodyPreset {
    /// Two repelling charges on a line; the first one moves but carries the
    /// Coulomb field of a charge at rest, so the second one runs into its
    /// singular front.
    RetardedLine,
    /// The same, with the first initial field adapted to the motion.
    RetardedLineAdapted,
    /// Smeared charges; the first one starts with its boosted Coulomb field
    /// and is accelerated by the second, which then feels a smoothed step.
    RetardedLineSmeared,
    /// Half-retarded, half-advanced interaction on a finite window.
    FstWindow,
}

impl TwoBodyPreset {
    pub const ALL: [TwoBodyPreset; 4] =
        [Self::RetardedLine, Self::RetardedLineAdapted, Self::RetardedLineSmeared, Self::FstWindow];

    pub fn name(self) -> &'static str {
        match self {
            Self::RetardedLine => "retarded-line",
            Self::RetardedLineAdapted => "retarded-line-adapted",
            Self::RetardedLineSmeared => "retarded-line-smeared",
            Self::FstWindow => "fst-window",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn document(self) -> ConfigDoc {
        let charge = |e: f64, q0: [f64; 3], v0: [f64; 3], aux: AuxName| ChargeDoc {
            m: 1.0,
            e,
            q0: Some(Vec3::from(q0)),
            p0: None,
            v0: Some(Vec3::from(v0)),
            initial_field: InitialFieldDoc {
                lambda: None,
                aux: AuxSpec::Named(aux),
                free: Default::default(),
                adapt: None,
            },
            past: None,
            trajectory: None,
        };
        let mut doc = ConfigDoc {
            units: UnitMode::Natural,
            scale: UnitScale::default(),
            charges: vec![
                charge(0.3, [0.0, 0.0, 0.0], [-0.3, 0.0, 0.0], AuxName::Frozen),
                charge(0.3, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0], AuxName::History),
            ],
            coupling: CouplingDoc::default(),
            lambda: 1.0,
            shape: ShapeDoc::Point,
            self_force: SelfForce::None,
            integrator: IntegratorSettings { step: 1e-2, ..Default::default() },
            horizon: Some(3.0),
            relaxation: None,
            field: None,
            check: None,
            free_propagation: None,
            base_dir: Default::default(),
        };
        match self {
            Self::RetardedLine => {}
            Self::RetardedLineAdapted => doc.charges[0].initial_field.adapt = Some(Default::default()),
            Self::RetardedLineSmeared => {
                doc.charges = vec![
                    charge(0.5, [0.0, 0.0, 0.0], [0.0, 0.5, 0.0], AuxName::Boosted),
                    charge(0.5, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0], AuxName::History),
                ];
                doc.shape = ShapeDoc::Smeared { radius: 0.05, resolution: ResolutionDoc::Default };
                doc.integrator.step = 5e-3;
                doc.horizon = Some(1.6);
            }
            Self::FstWindow => {
                doc.charges = vec![
                    charge(0.3, [-0.5, 0.0, 0.0], [0.0, 0.0, 0.0], AuxName::History),
                    charge(0.3, [0.5, 0.0, 0.0], [0.0, 0.0, 0.0], AuxName::History),
                ];
                doc.lambda = 0.5;
                doc.integrator.step = 2e-2;
                doc.horizon = Some(1.5);
                doc.relaxation = Some(RelaxationDoc { future: FutureDoc::Inertial });
            }
        }
        doc
    }
}

/// Builds the system of a document and replaces initial fields marked for
/// adaptation by self-consistently adapted ones.
pub fn prepare_system(doc: &ConfigDoc) -> Result<(SystemConfig, Vec<(usize, AdaptReport)>)> {
    let doc = doc.to_natural()?;
    let mut config = doc.system()?;
    let mut reports = Vec::new();
    for (i, c) in doc.charges.iter().enumerate() {
        let Some(options) = &c.initial_field.adapt else { continue };
        let t0 = config.initial_time()?;
        let q = config.charges[i].stripe.last().expect("validated").q;
        let nearest = config
            .charges
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, o)| (o.stripe.last().expect("validated").q - q).norm())
            .fold(f64::INFINITY, f64::min);
        let span = (0.5 * nearest).min(1.0);
        let base = config.clone();
        let adapted = adapt_self_consistent(&config.charges[i].init, options, |spec| {
            let mut trial = base.clone();
            trial.charges[i].init = spec.clone();
            let out = integrate_retarded(&trial, t0 + span)?;
            let own: Arc<dyn Worldline> = Arc::new(out.histories[i].clone());
            Ok(own)
        })?;
        config.charges[i].init = adapted.spec;
        reports.push((i, adapted.report));
    }
    Ok((config, reports))
}

#[derive(Debug, Clone)]
pub enum Dynamics {
    Marched(RunOutcome),
    Relaxed(RelaxOutcome),
}

impl Dynamics {
    pub fn histories(&self) -> &[TrajectoryHistory] {
        match self {
            Dynamics::Marched(o) => &o.histories,
            Dynamics::Relaxed(o) => &o.histories,
        }
    }

    pub fn events(&self) -> &[RunEvent] {
        match self {
            Dynamics::Marched(o) => &o.events,
            Dynamics::Relaxed(_) => &[],
        }
    }

    pub fn halted(&self) -> bool {
        matches!(self, Dynamics::Marched(o) if o.halted)
    }
}

/// Width of the smoothed step in the force on `charge` as it passes the
/// initial light cone of `source`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepWidth {
    pub charge: usize,
    pub source: usize,
    pub crossing_time: f64,
    /// Time between 10% and 90% of the step.
    pub width: f64,
    pub diameter: f64,
    pub step: Vec3,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForceRow {
    pub charge: usize,
    pub t: f64,
    #[serde(rename = "Fx")]
    pub fx: f64,
    #[serde(rename = "Fy")]
    pub fy: f64,
    #[serde(rename = "Fz")]
    pub fz: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub system: SystemConfig,
    pub adaptations: Vec<(usize, AdaptReport)>,
    pub dynamics: Dynamics,
    pub residual: Option<ResidualReport>,
    pub forces: Vec<ForceRow>,
    pub steps: Vec<StepWidth>,
}

/// Runs a configuration document: relaxation when it has a `relaxation`
/// section, forward marching otherwise.
pub fn run_document(doc: &ConfigDoc) -> Result<SimulationRun> {
    let doc = doc.to_natural()?;
    let horizon = doc.horizon()?;
    let (system, adaptations) = prepare_system(&doc)?;
    let dynamics = if doc.relaxation.is_some() {
        Dynamics::Relaxed(integrate_relaxation(&system, &doc.futures()?, horizon)?)
    } else {
        Dynamics::Marched(integrate_retarded(&system, horizon)?)
    };
    let residual = match (&dynamics, &system.shape) {
        (Dynamics::Marched(out), ChargeShape::Point) if out.steps > 0 => Some(dynamics_residual(&system, out)?),
        _ => None,
    };
    let forces = force_trace(dynamics.histories())?;
    let steps = match &system.shape {
        ChargeShape::Smeared(rho) => step_widths(&system, dynamics.histories(), rho.diameter())?,
        ChargeShape::Point => Vec::new(),
    };
    Ok(SimulationRun { system, adaptations, dynamics, residual, forces, steps })
}

pub fn scenario_two_body(preset: TwoBodyPreset) -> Result<SimulationRun> {
    run_document(&preset.document())
}

fn node_force(h: &TrajectoryHistory, k: usize) -> Result<Vec3> {
    let n = &h.nodes()[k];
    let m = h.mass();
    Ok(momentum_rate(&relativistic_velocity(&n.p, m)?, &n.a, m))
}

/// Force on every charge at every node, `dp/dt` from the stored state.
pub fn force_trace(histories: &[TrajectoryHistory]) -> Result<Vec<ForceRow>> {
    let mut rows = Vec::new();
    for (i, h) in histories.iter().enumerate() {
        for (k, n) in h.nodes().iter().enumerate() {
            let f = node_force(h, k)?;
            rows.push(ForceRow { charge: i, t: n.t, fx: f.x, fy: f.y, fz: f.z });
        }
    }
    Ok(rows)
}

fn step_widths(system: &SystemConfig, histories: &[TrajectoryHistory], diameter: f64) -> Result<Vec<StepWidth>> {
    let mut out = Vec::new();
    for (i, h) in histories.iter().enumerate() {
        for (j, src) in system.charges.iter().enumerate() {
            if i == j || system.coupling.get(i, j) == 0.0 {
                continue;
            }
            let apex = src.stripe.last().expect("validated");
            if let Some(w) = front_step(h, apex.t, &apex.q, diameter)? {
                out.push(StepWidth { charge: i, source: j, diameter, ..w });
            }
        }
    }
    Ok(out)
}

/// Fits linear trends to the force before and after the crossing of the
/// cone from `(t0, center)` and measures where the normalised transition
/// passes 10% and 90%. The smeared transition lasts at most `2·diameter`.
fn front_step(h: &TrajectoryHistory, t0: f64, center: &Vec3, diameter: f64) -> Result<Option<StepWidth>> {
    let nodes = h.nodes();
    let gap = |k: usize| (nodes[k].q - center).norm() - (nodes[k].t - t0);
    let Some(k) = (1..nodes.len()).find(|&k| gap(k - 1) > 0.0 && gap(k) <= 0.0) else {
        return Ok(None);
    };
    let (g0, g1) = (gap(k - 1), gap(k));
    let tc = nodes[k - 1].t + (nodes[k].t - nodes[k - 1].t) * g0 / (g0 - g1);
    let forces = (0..nodes.len()).map(|k| node_force(h, k)).collect::<Result<Vec<_>>>()?;
    let times: Vec<f64> = nodes.iter().map(|n| n.t).collect();
    let reach = diameter;
    let (lo, hi) = (tc - 4.0 * reach, tc + 4.0 * reach);
    if times[0] > lo || *times.last().expect("nodes") < hi {
        return Ok(None);
    }
    let fit = |a: f64, b: f64| -> Option<(Vec3, Vec3)> {
        let idx: Vec<usize> = (0..times.len()).filter(|&k| times[k] >= a && times[k] <= b).collect();
        if idx.len() < 3 {
            return None;
        }
        let n = idx.len() as f64;
        let mt = idx.iter().map(|&k| times[k]).sum::<f64>() / n;
        let mf = idx.iter().map(|&k| forces[k]).sum::<Vec3>() / n;
        let var = idx.iter().map(|&k| (times[k] - mt).powi(2)).sum::<f64>();
        let slope = idx.iter().map(|&k| (forces[k] - mf) * (times[k] - mt)).sum::<Vec3>() / var;
        Some((mf - slope * mt, slope))
    };
    let (Some(pre), Some(post)) = (fit(lo, tc - 1.2 * reach), fit(tc + 1.2 * reach, hi)) else {
        return Ok(None);
    };
    let trend = |c: &(Vec3, Vec3), t: f64| c.0 + c.1 * t;
    let step = trend(&post, tc) - trend(&pre, tc);
    if !(step.norm() > 0.0) {
        return Ok(None);
    }
    let dir = step / step.norm();
    let level = |k: usize| {
        let t = times[k];
        (forces[k] - trend(&pre, t)).dot(&dir) / (trend(&post, t) - trend(&pre, t)).dot(&dir)
    };
    let cross = |target: f64| -> Option<f64> {
        (1..times.len()).filter(|&k| times[k] > tc - 1.2 * reach && times[k - 1] < tc + 1.2 * reach).find_map(|k| {
            let (a, b) = (level(k - 1), level(k));
            (a < target && b >= target).then(|| times[k - 1] + (times[k] - times[k - 1]) * (target - a) / (b - a))
        })
    };
    let (Some(t10), Some(t90)) = (cross(0.1), cross(0.9)) else {
        return Ok(None);
    };
    Ok(Some(StepWidth { charge: 0, source: 0, crossing_time: tc, width: t90 - t10, diameter, step }))
}
