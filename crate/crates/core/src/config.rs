//! JSON configuration documents shared by the command-line tool and the
//! canned scenarios.
//!
//! A document describes the charges (mass, charge, initial state, past and
//! initial field), their coupling and the integrator, plus optional sections
//! for field evaluation, compatibility checks and free-field propagation.
//! Numbers are in natural units unless `"units": "si"`, in which case they
//! are converted on load with the document's `scale`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::compatibility::{AdaptOptions, C2Options};
use crate::dynamics::{Charge, ChargeShape, IntegratorSettings, SelfForce, SystemConfig};
use crate::error::{Error, Result};
use crate::kinematics::{
    Circular, Extension, Oscillating, Polynomial, Static, TrajectoryHistory, Uniform, WithMass, Worldline,
};
use crate::mollifier::{BallResolution, Mollifier};
use crate::propagation::{FreeFieldSpec, InitialFieldSpec};
use crate::state::{momentum_from_velocity, CouplingMatrix};
use crate::units::{Dimension, UnitMode, UnitScale};
use crate::Vec3;

/// A prescribed worldline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    Static { position: Vec3 },
    Uniform { position: Vec3, velocity: Vec3 },
    Oscillating { center: Vec3, amplitude: Vec3, omega: f64, #[serde(default)] phase: f64 },
    Circular { center: Vec3, radius: f64, omega: f64 },
    /// `q(t) = Σ_k c_k (t − t0)^k`.
    Polynomial { #[serde(default)] t0: f64, coefficients: Vec<Vec3> },
    /// Samples in the trajectory CSV format (`t,qx,qy,qz,px,py,pz`),
    /// extended inertially on both sides.
    Csv { path: PathBuf },
}

impl TrajectorySpec {
    pub fn build(&self, mass: f64, base: &Path) -> Result<Arc<dyn Worldline>> {
        Ok(match self {
            Self::Static { position } => Arc::new(Static { q: *position, mass }),
            Self::Uniform { position, velocity } => {
                let mut u = Uniform::new(*position, *velocity)?;
                u.mass = mass;
                Arc::new(u)
            }
            Self::Oscillating { center, amplitude, omega, phase } => {
                Arc::new(WithMass { inner: Oscillating::new(*center, *amplitude, *omega, *phase)?, mass })
            }
            Self::Circular { center, radius, omega } => {
                Arc::new(WithMass { inner: Circular::new(*center, *radius, *omega)?, mass })
            }
            Self::Polynomial { t0, coefficients } => {
                let mut p = Polynomial::new(*t0, coefficients.clone());
                p.mass = mass;
                Arc::new(p)
            }
            Self::Csv { .. } => Arc::new(self.history(mass, base)?),
        })
    }

    fn history(&self, mass: f64, base: &Path) -> Result<TrajectoryHistory> {
        match self {
            Self::Csv { path } => {
                let file = std::fs::File::open(base.join(path))
                    .map_err(|e| Error::Config(format!("trajectory csv {}: {e}", path.display())))?;
                TrajectoryHistory::read_csv(file, mass, Extension::Inertial, Extension::Inertial)
            }
            _ => Err(Error::Config("not a sampled trajectory".into())),
        }
    }

    fn to_natural(&self, s: &UnitScale) -> Result<Self> {
        let l = |v: &Vec3| v / s.length;
        let inv_t = |w: f64| w * s.time();
        Ok(match self {
            Self::Static { position } => Self::Static { position: l(position) },
            Self::Uniform { position, velocity } => {
                Self::Uniform { position: l(position), velocity: velocity / s.velocity() }
            }
            Self::Oscillating { center, amplitude, omega, phase } => {
                Self::Oscillating { center: l(center), amplitude: l(amplitude), omega: inv_t(*omega), phase: *phase }
            }
            Self::Circular { center, radius, omega } => {
                Self::Circular { center: l(center), radius: radius / s.length, omega: inv_t(*omega) }
            }
            Self::Polynomial { t0, coefficients } => Self::Polynomial {
                t0: s.to_natural(*t0, Dimension::Time),
                coefficients: coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * s.time().powi(k as i32) / s.length)
                    .collect(),
            },
            Self::Csv { .. } => {
                return Err(Error::Config("csv trajectories must be given in natural units".into()));
            }
        })
    }
}

/// Where the auxiliary trajectory of an initial field comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AuxSpec {
    Named(AuxName),
    Trajectory(TrajectorySpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxName {
    /// The charge's own past: the compatible choice.
    History,
    /// A charge resting at the initial position.
    Frozen,
    /// Uniform motion with the initial momentum (the boosted Coulomb field).
    Boosted,
}

impl Default for AuxSpec {
    fn default() -> Self {
        Self::Named(AuxName::History)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFieldDoc {
    /// Defaults to the document's `lambda`.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub aux: AuxSpec,
    #[serde(default)]
    pub free: FreeFieldSpec,
    /// Replace the initial field by an adapted one before running.
    #[serde(default)]
    pub adapt: Option<AdaptOptions>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeDoc {
    pub m: f64,
    pub e: f64,
    /// Initial position; taken from `past` when omitted.
    #[serde(default)]
    pub q0: Option<Vec3>,
    /// Initial momentum; `v0` may be given instead.
    #[serde(default)]
    pub p0: Option<Vec3>,
    #[serde(default)]
    pub v0: Option<Vec3>,
    pub initial_field: InitialFieldDoc,
    /// Trajectory before the initial time; inertial when omitted.
    #[serde(default)]
    pub past: Option<TrajectorySpec>,
    /// Prescribed motion after the initial time, used by field evaluation
    /// and compatibility checks; inertial when omitted.
    #[serde(default)]
    pub trajectory: Option<TrajectorySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingPreset {
    NoSelfInteraction,
    Full,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingDoc {
    Preset(CouplingPreset),
    Matrix(Vec<Vec<f64>>),
}

impl Default for CouplingDoc {
    fn default() -> Self {
        Self::Preset(CouplingPreset::NoSelfInteraction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionDoc {
    #[default]
    Default,
    Coarse,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeDoc {
    #[default]
    Point,
    Smeared {
        radius: f64,
        #[serde(default)]
        resolution: ResolutionDoc,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FutureDoc {
    #[default]
    Inertial,
    Frozen,
    Prescribed(Vec<TrajectorySpec>),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationDoc {
    #[serde(default)]
    pub future: FutureDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridDoc {
    Box { min: Vec3, max: Vec3, n: [usize; 3] },
    Points(Vec<Vec3>),
}

impl GridDoc {
    pub fn points(&self) -> Result<Vec<Vec3>> {
        match self {
            Self::Points(p) => Ok(p.clone()),
            Self::Box { min, max, n } => {
                if n.iter().any(|&k| k == 0) {
                    return Err(Error::Config("grid.box.n entries must be at least 1".into()));
                }
                let coord = |i: usize, k: usize| {
                    if n[i] == 1 {
                        min[i]
                    } else {
                        min[i] + (max[i] - min[i]) * k as f64 / (n[i] - 1) as f64
                    }
                };
                let mut pts = Vec::with_capacity(n[0] * n[1] * n[2]);
                for i in 0..n[0] {
                    for j in 0..n[1] {
                        for k in 0..n[2] {
                            pts.push(Vec3::new(coord(0, i), coord(1, j), coord(2, k)));
                        }
                    }
                }
                Ok(pts)
            }
        }
    }

    fn to_natural(&self, s: &UnitScale) -> Self {
        match self {
            Self::Box { min, max, n } => Self::Box { min: min / s.length, max: max / s.length, n: *n },
            Self::Points(p) => Self::Points(p.iter().map(|x| x / s.length).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnFront {
    #[default]
    Error,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    /// Index of the charge whose field is evaluated.
    #[serde(default)]
    pub charge: usize,
    pub time: f64,
    pub grid: GridDoc,
    #[serde(default)]
    pub on_front: OnFront,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    /// Required smoothness `k` of the field across the light cone.
    #[serde(default)]
    pub order: usize,
    #[serde(default)]
    pub c2: C2Options,
}

impl Default for CheckDoc {
    fn default() -> Self {
        Self { order: 0, c2: C2Options::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulateDoc {
    pub origin: Vec3,
    pub spacing: f64,
    pub dims: [usize; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeDoc {
    pub spec: FreeFieldSpec,
    pub time: f64,
    pub grid: GridDoc,
    /// Sample the free field on a grid first and propagate the samples.
    #[serde(default)]
    pub tabulate: Option<TabulateDoc>,
    #[serde(default)]
    pub sphere_order: Option<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default)]
    pub units: UnitMode,
    /// SI length and mass of one natural unit.
    #[serde(default)]
    pub scale: UnitScale,
    #[serde(default)]
    pub charges: Vec<ChargeDoc>,
    #[serde(default)]
    pub coupling: CouplingDoc,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub shape: ShapeDoc,
    #[serde(default)]
    pub self_force: SelfForce,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub relaxation: Option<RelaxationDoc>,
    #[serde(default)]
    pub field: Option<FieldDoc>,
    #[serde(default)]
    pub check: Option<CheckDoc>,
    #[serde(default)]
    pub free_propagation: Option<FreeDoc>,
    /// Directory that relative paths are resolved against; set on load.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ConfigDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut doc = Self::from_json(text)?;
        doc.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((doc, bytes))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The same document with every quantity in natural units.
    pub fn to_natural(&self) -> Result<Self> {
        if self.units == UnitMode::Natural {
            return Ok(self.clone());
        }
        let s = &self.scale;
        let mut d = self.clone();
        d.units = UnitMode::Natural;
        for c in &mut d.charges {
            c.m = s.to_natural(c.m, Dimension::Mass);
            c.e = s.to_natural(c.e, Dimension::Charge);
            c.q0 = c.q0.map(|q| q / s.length);
            c.p0 = c.p0.map(|p| p / s.momentum());
            c.v0 = c.v0.map(|v| v / s.velocity());
            c.past = c.past.as_ref().map(|p| p.to_natural(s)).transpose()?;
            c.trajectory = c.trajectory.as_ref().map(|p| p.to_natural(s)).transpose()?;
            if let AuxSpec::Trajectory(t) = &c.initial_field.aux {
                c.initial_field.aux = AuxSpec::Trajectory(t.to_natural(s)?);
            }
            c.initial_field.free = free_to_natural(&c.initial_field.free, s)?;
            if let Some(a) = &mut c.initial_field.adapt {
                a.window = s.to_natural(a.window, Dimension::Time);
            }
        }
        if let ShapeDoc::Smeared { radius, .. } = &mut d.shape {
            *radius /= s.length;
        }
        d.integrator.step = s.to_natural(d.integrator.step, Dimension::Time);
        d.integrator.min_separation /= s.length;
        d.integrator.relaxation_tolerance /= s.length;
        d.horizon = d.horizon.map(|h| s.to_natural(h, Dimension::Time));
        if let Some(RelaxationDoc { future: FutureDoc::Prescribed(list) }) = &mut d.relaxation {
            *list = list.iter().map(|t| t.to_natural(s)).collect::<Result<_>>()?;
        }
        if let Some(f) = &mut d.field {
            f.time = s.to_natural(f.time, Dimension::Time);
            f.grid = f.grid.to_natural(s);
        }
        if let Some(f) = &mut d.free_propagation {
            f.spec = free_to_natural(&f.spec, s)?;
            f.time = s.to_natural(f.time, Dimension::Time);
            f.grid = f.grid.to_natural(s);
            if let Some(t) = &mut f.tabulate {
                t.origin /= s.length;
                t.spacing /= s.length;
            }
        }
        Ok(d)
    }

    fn charge(&self, i: usize) -> Result<&ChargeDoc> {
        self.charges.get(i).ok_or_else(|| Error::Config(format!("charges[{i}] does not exist")))
    }

    /// Trajectory up to the initial time `t = 0` (or the end of a csv past).
    pub fn stripe(&self, i: usize) -> Result<TrajectoryHistory> {
        let c = self.charge(i)?;
        if !(c.m > 0.0 && c.m.is_finite()) {
            return Err(Error::Config(format!("charges[{i}].m must be positive, got {}", c.m)));
        }
        if let Some(spec @ TrajectorySpec::Csv { .. }) = &c.past {
            return spec.history(c.m, &self.base_dir);
        }
        let past = c.past.as_ref().map(|p| p.build(c.m, &self.base_dir)).transpose()?;
        let at0 = past.as_ref().map(|p| p.point(0.0)).transpose()?;
        let q0 = match (c.q0, at0) {
            (Some(q), _) => q,
            (None, Some(p)) => p.q,
            (None, None) => return Err(Error::Config(format!("charges[{i}]: missing key `q0`"))),
        };
        let p0 = match (c.p0, c.v0, at0) {
            (Some(_), Some(_), _) => {
                return Err(Error::Config(format!("charges[{i}]: give either `p0` or `v0`, not both")))
            }
            (Some(p), None, _) => p,
            (None, Some(v), _) => momentum_from_velocity(&v, c.m)
                .map_err(|e| Error::Config(format!("charges[{i}].v0: {e}")))?,
            (None, None, Some(p)) => momentum_from_velocity(&p.v, c.m)?,
            (None, None, None) => Vec3::zeros(),
        };
        let a0 = at0.map(|p| p.a).unwrap_or_else(Vec3::zeros);
        let past_ext = match past {
            Some(p) => Extension::Prescribed(p),
            None => Extension::Inertial,
        };
        let mut h = TrajectoryHistory::new(c.m, past_ext, Extension::Inertial)?;
        h.push(0.0, q0, p0, a0).map_err(|e| Error::Config(format!("charges[{i}]: {e}")))?;
        Ok(h)
    }

    /// Prescribed actual motion of charge `i`: its `trajectory`, or inertial
    /// continuation of the initial state, joined to its past.
    pub fn actual(&self, i: usize) -> Result<Arc<dyn Worldline>> {
        let c = self.charge(i)?;
        let stripe = self.stripe(i)?;
        match &c.trajectory {
            Some(spec) => Ok(Arc::new(crate::kinematics::Spliced {
                before: Arc::new(stripe),
                after: spec.build(c.m, &self.base_dir)?,
                switch: 0.0,
            })),
            None => Ok(Arc::new(stripe)),
        }
    }

    pub fn initial_field(&self, i: usize, stripe: &TrajectoryHistory) -> Result<InitialFieldSpec> {
        let c = self.charge(i)?;
        let f = &c.initial_field;
        let lambda = f.lambda.unwrap_or(self.lambda);
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Config(format!("charges[{i}].initial_field.lambda must lie in [0, 1], got {lambda}")));
        }
        f.free.validate().map_err(|e| Error::Config(format!("charges[{i}].initial_field.free: {e}")))?;
        let last = stripe.last().expect("stripe has a node");
        let aux: Arc<dyn Worldline> = match &f.aux {
            AuxSpec::Named(AuxName::History) => Arc::new(stripe.clone()),
            AuxSpec::Named(AuxName::Frozen) => Arc::new(Static { q: last.q, mass: c.m }),
            AuxSpec::Named(AuxName::Boosted) => {
                let u = Uniform::from_momentum(last.q, last.p, c.m)?;
                Arc::new(crate::kinematics::Shifted { inner: u, offset: -last.t })
            }
            AuxSpec::Trajectory(spec) => spec.build(c.m, &self.base_dir)?,
        };
        Ok(InitialFieldSpec::unchecked(lambda, aux, f.free.clone()))
    }

    pub fn coupling(&self) -> Result<CouplingMatrix> {
        let n = self.charges.len();
        match &self.coupling {
            CouplingDoc::Preset(CouplingPreset::NoSelfInteraction) => Ok(CouplingMatrix::no_self_interaction(n)),
            CouplingDoc::Preset(CouplingPreset::Full) => Ok(CouplingMatrix::full(n)),
            CouplingDoc::Preset(CouplingPreset::Zero) => Ok(CouplingMatrix::zero(n)),
            CouplingDoc::Matrix(rows) => {
                CouplingMatrix::from_rows(rows.clone()).map_err(|e| Error::Config(format!("coupling: {e}")))
            }
        }
    }

    pub fn shape(&self) -> Result<ChargeShape> {
        match self.shape {
            ShapeDoc::Point => Ok(ChargeShape::Point),
            ShapeDoc::Smeared { radius, resolution } => {
                let rho = Mollifier::bump(radius, 1.0).map_err(|e| Error::Config(format!("shape.smeared: {e}")))?;
                Ok(ChargeShape::Smeared(match resolution {
                    ResolutionDoc::Default => rho,
                    ResolutionDoc::Coarse => rho.with_resolution(BallResolution::coarse()),
                }))
            }
        }
    }

    /// The dynamical system described by the document (natural units).
    pub fn system(&self) -> Result<SystemConfig> {
        if self.units != UnitMode::Natural {
            return self.to_natural()?.system();
        }
        if self.charges.is_empty() {
            return Err(Error::Config("charges: at least one charge is required".into()));
        }
        let mut charges = Vec::with_capacity(self.charges.len());
        for (i, c) in self.charges.iter().enumerate() {
            let stripe = self.stripe(i)?;
            let init = self.initial_field(i, &stripe)?;
            charges.push(Charge { charge: c.e, stripe, init });
        }
        let config = SystemConfig {
            charges,
            coupling: self.coupling()?,
            lambda: self.lambda,
            shape: self.shape()?,
            self_force: self.self_force,
            integrator: self.integrator,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn horizon(&self) -> Result<f64> {
        self.horizon.ok_or_else(|| Error::Config("missing key `horizon`".into()))
    }

    /// Future extensions for relaxation runs.
    pub fn futures(&self) -> Result<Vec<Extension>> {
        let n = self.charges.len();
        match self.relaxation.as_ref().map(|r| &r.future).unwrap_or(&FutureDoc::Inertial) {
            FutureDoc::Inertial => Ok(vec![Extension::Inertial; n]),
            FutureDoc::Frozen => Ok(vec![Extension::Frozen; n]),
            FutureDoc::Prescribed(list) => {
                if list.len() != n {
                    return Err(Error::Config(format!(
                        "relaxation.future.prescribed: {} trajectories for {n} charges",
                        list.len()
                    )));
                }
                list.iter()
                    .zip(&self.charges)
                    .map(|(t, c)| Ok(Extension::Prescribed(t.build(c.m, &self.base_dir)?)))
                    .collect()
            }
        }
    }
}

fn free_to_natural(spec: &FreeFieldSpec, s: &UnitScale) -> Result<FreeFieldSpec> {
    let e = |a: f64| s.to_natural(a, Dimension::ElectricField);
    Ok(match spec {
        FreeFieldSpec::Zero => FreeFieldSpec::Zero,
        FreeFieldSpec::PlaneWave { k, polarization, amplitude, phase } => FreeFieldSpec::PlaneWave {
            k: k * s.length,
            polarization: *polarization,
            amplitude: e(*amplitude),
            phase: *phase,
        },
        FreeFieldSpec::GaussianPulse { center, width, direction, amplitude, polarization } => {
            FreeFieldSpec::GaussianPulse {
                center: center / s.length,
                width: width / s.length,
                direction: *direction,
                amplitude: e(*amplitude),
                polarization: *polarization,
            }
        }
        FreeFieldSpec::Tabulated(_) => {
            return Err(Error::Config("tabulated free fields must be given in natural units".into()));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{
        "charges": [
            {"m": 1.0, "e": 0.3, "q0": [0, 0, 0], "p0": [0.1, 0, 0], "initial_field": {"aux": "frozen"}},
            {"m": 2.0, "e": -0.3, "q0": [1, 0, 0], "v0": [0, 0.5, 0],
             "initial_field": {"aux": {"kind": "uniform", "position": [1, 0, 0], "velocity": [0, 0.5, 0]}}}
        ],
        "horizon": 2.0,
        "integrator": {"step": 0.01}
    }"#;

    #[test]
    fn parses_and_builds_a_system() {
        let doc = ConfigDoc::from_json(TWO).unwrap();
        let sys = doc.system().unwrap();
        assert_eq!(sys.charges.len(), 2);
        assert_eq!(sys.integrator.step, 0.01);
        assert_eq!(sys.integrator.order, 4);
        assert_eq!(sys.coupling.get(0, 1), 1.0);
        assert_eq!(sys.coupling.get(0, 0), 0.0);
        let p1 = sys.charges[1].stripe.last().unwrap().p;
        assert!((crate::relativistic_velocity(&p1, 2.0).unwrap() - Vec3::new(0.0, 0.5, 0.0)).norm() < 1e-15);
        assert_eq!(sys.charges[0].init.aux.point(-3.0).unwrap().q, Vec3::zeros());
        let json = doc.to_json().unwrap();
        assert_eq!(ConfigDoc::from_json(&json).unwrap().to_json().unwrap(), json);
    }

    #[test]
    fn errors_name_the_offending_key() {
        let missing = r#"{"charges": [{"m": 1, "e": 1, "q0": [0,0,0]}]}"#;
        let err = ConfigDoc::from_json(missing).unwrap_err().to_string();
        assert!(err.contains("initial_field"), "{err}");
        let unknown = r#"{"charges": [], "horizn": 1}"#;
        let err = ConfigDoc::from_json(unknown).unwrap_err().to_string();
        assert!(err.contains("horizn"), "{err}");
        let doc = ConfigDoc::from_json(r#"{"charges": [{"m": 1, "e": 1, "initial_field": {}}]}"#).unwrap();
        assert!(doc.system().unwrap_err().to_string().contains("q0"));
    }

    #[test]
    fn box_grid_enumerates_all_points() {
        let g = GridDoc::Box { min: Vec3::new(-1.0, 0.0, 0.0), max: Vec3::new(1.0, 2.0, 0.0), n: [3, 2, 1] };
        let p = g.points().unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(p[5], Vec3::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn si_documents_convert_to_natural_units() {
        let s = UnitScale::default();
        let doc = ConfigDoc {
            units: UnitMode::Si,
            horizon: Some(2.0 * s.time()),
            ..ConfigDoc::from_json(TWO).unwrap()
        };
        let mut si = doc.clone();
        for c in &mut si.charges {
            c.m *= s.mass;
            c.e *= s.charge();
            c.q0 = c.q0.map(|q| q * s.length);
            c.p0 = c.p0.map(|p| p * s.momentum());
            c.v0 = c.v0.map(|v| v * s.velocity());
            if let AuxSpec::Trajectory(TrajectorySpec::Uniform { position, velocity }) = &mut c.initial_field.aux {
                *position *= s.length;
                *velocity *= s.velocity();
            }
        }
        si.integrator.step = 0.01 * s.time();
        let nat = si.to_natural().unwrap();
        assert!((nat.horizon.unwrap() - 2.0).abs() < 1e-12);
        assert!((nat.integrator.step - 0.01).abs() < 1e-14);
        for (a, b) in nat.charges.iter().zip(&doc.charges) {
            assert!((a.m / b.m - 1.0).abs() < 1e-12 && (a.e / b.e - 1.0).abs() < 1e-12);
        }
        assert!((nat.charges[1].v0.unwrap() - Vec3::new(0.0, 0.5, 0.0)).norm() < 1e-15);
    }
}
