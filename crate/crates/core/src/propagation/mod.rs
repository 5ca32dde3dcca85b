//! General solutions of the Maxwell equations with a point source, written
//! through the light cone of the initial charge position.
//!
//! For an initial field `λ f⁻[q̃] + (1 − λ) f⁺[q̃] + f⁰` built from an
//! auxiliary trajectory `q̃` with `q̃(0) = q(0)`, the field at `(x, t)` is
//!
//! ```text
//! 1_{|x−q₀| ≤ |t|} (f^{−σ}[q] − f^{−σ}[q̃])          cone interior
//!   + λ f⁻[q̃] + (1 − λ) f⁺[q̃]                       propagated initial field
//!   + r^{−σ}[q₀, p₀] − r^{−σ}[q̃₀, p̃₀]               shells on |x − q₀| = |t|
//!   + f⁰_t                                           free field
//! ```
//!
//! with `σ = sign(t)` (`σ(0) = +1`, so `t ≥ 0` uses retarded fields). Shells
//! are delta distributions on the sphere and are carried symbolically.

mod free;
mod smeared;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use free::{
    kirchhoff_propagate, propagate_free_field, propagate_free_field_with, AnalyticCauchy, CauchyGrid, CauchyPoint,
    CauchySource, FreeFieldOptions, FreeFieldSpec, DEFAULT_SPHERE_ORDER,
};
pub use smeared::{smeared_field, smeared_field_with, SmearOptions};
pub(crate) use smeared::smear_evaluator;

use crate::error::{Error, FrontEvent, Result};
use crate::field::EMFieldValue;
use crate::kinematics::{Branch, Static, Worldline};
use crate::lw::lw_field;
use crate::state::{momentum_from_velocity, relativistic_velocity};
use crate::Vec3;

/// Gaps up to this size count as matching initial data.
pub const C1_TOLERANCE: f64 = 1e-12;
/// Default half-width of the band around the cone where shells are attached.
pub const SHELL_BAND: f64 = 1e-9;

/// The initial field, encoded by an auxiliary trajectory and a free field.
#[derive(Debug, Clone)]
pub struct InitialFieldSpec {
    pub lambda: f64,
    pub aux: Arc<dyn Worldline>,
    pub free: FreeFieldSpec,
}

impl InitialFieldSpec {
    /// Checks `λ ∈ [0, 1]` and that the auxiliary trajectory starts at `q0`.
    pub fn new(lambda: f64, aux: Arc<dyn Worldline>, free: FreeFieldSpec, q0: &Vec3) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Config(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        free.validate()?;
        let start = aux.point(0.0)?.q;
        if (start - q0).norm() > C1_TOLERANCE * q0.norm().max(1.0) {
            return Err(Error::Config(format!(
                "auxiliary trajectory starts at {start:?}, not at the charge position {q0:?}"
            )));
        }
        Ok(Self { lambda, aux, free })
    }

    /// Without the start-point check; used to study constraint violations.
    pub fn unchecked(lambda: f64, aux: Arc<dyn Worldline>, free: FreeFieldSpec) -> Self {
        Self { lambda, aux, free }
    }

    /// The Coulomb field of a charge resting at `q0`.
    pub fn coulomb(q0: Vec3) -> Self {
        Self { lambda: 1.0, aux: Arc::new(Static::new(q0)), free: FreeFieldSpec::Zero }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShellSign {
    Plus,
    Minus,
}

impl ShellSign {
    pub fn value(self) -> f64 {
        match self {
            ShellSign::Plus => 1.0,
            ShellSign::Minus => -1.0,
        }
    }

    /// `−σ(t)`: minus for `t ≥ 0`, plus for `t < 0`.
    pub fn for_time(t: f64) -> Self {
        if t >= 0.0 {
            ShellSign::Minus
        } else {
            ShellSign::Plus
        }
    }
}

/// Delta-supported term on the sphere `|x − q₀| = |t|`, generated by initial
/// data `(q₀, p₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularShell {
    pub center: Vec3,
    pub momentum: Vec3,
    pub velocity: Vec3,
    pub sign: ShellSign,
    pub strength: f64,
}

impl SingularShell {
    pub fn new(center: Vec3, momentum: Vec3, mass: f64, sign: ShellSign, strength: f64) -> Result<Self> {
        let velocity = relativistic_velocity(&momentum, mass)?;
        Ok(Self { center, momentum, velocity, sign, strength })
    }

    /// Coefficient of the delta at `x` (including `strength`):
    /// `((n ± v), −n × v) / ((1 ± n·v) |x − q₀|)`.
    pub fn coefficient(&self, x: &Vec3) -> Result<EMFieldValue> {
        let d = x - self.center;
        let r = d.norm();
        if r == 0.0 {
            return Err(Error::Singularity("shell coefficient evaluated at its center".into()));
        }
        let n = d / r;
        let s = self.sign.value();
        let k = self.strength / ((1.0 + s * n.dot(&self.velocity)) * r);
        Ok(EMFieldValue::new((n + self.velocity * s) * k, -n.cross(&self.velocity) * k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    InsideCone,
    OutsideCone,
    OnConeBand,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::InsideCone => "inside",
            Region::OutsideCone => "outside",
            Region::OnConeBand => "band",
        }
    }
}

/// A shell near the query point with its coefficient there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellContribution {
    pub shell: SingularShell,
    pub coefficient: EMFieldValue,
}

/// Regular field value plus shells passing through the query point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSample {
    pub regular: EMFieldValue,
    pub shells: Vec<ShellContribution>,
    pub region: Region,
}

impl FieldSample {
    /// Sum of the attached shell coefficients.
    pub fn net_shell(&self) -> EMFieldValue {
        self.shells.iter().map(|s| s.coefficient).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrontPolicy {
    /// Uncancelled shells at the query point are a singular-front error.
    #[default]
    Error,
    /// Return the sample with shells attached.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Form {
    #[default]
    Compact,
    /// Term-by-term form with separate interior and exterior pieces.
    Expanded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub band: f64,
    pub on_front: FrontPolicy,
    pub form: Form,
    /// Evaluate both forms and fail if they disagree.
    pub cross_check: bool,
    pub free: FreeFieldOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            band: SHELL_BAND,
            on_front: FrontPolicy::Error,
            form: Form::Compact,
            cross_check: false,
            free: FreeFieldOptions::default(),
        }
    }
}

/// Initial data of actual and auxiliary trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub q0: Vec3,
    pub p0: Vec3,
    pub aux_q0: Vec3,
    pub aux_p0: Vec3,
    pub mass: f64,
}

impl InitialData {
    pub fn new<W: Worldline + ?Sized>(actual: &W, init: &InitialFieldSpec) -> Result<Self> {
        let mass = actual.mass();
        let aux_point = init.aux.point(0.0)?;
        let aux_p0 = if init.aux.mass() == mass {
            init.aux.momentum(0.0)?
        } else {
            momentum_from_velocity(&aux_point.v, mass)?
        };
        Ok(Self { q0: actual.point(0.0)?.q, p0: actual.momentum(0.0)?, aux_q0: aux_point.q, aux_p0, mass })
    }

    pub fn position_gap(&self) -> Vec3 {
        self.q0 - self.aux_q0
    }

    pub fn momentum_gap(&self) -> Vec3 {
        self.p0 - self.aux_p0
    }

    /// Whether the two shells cancel (matching position and momentum).
    pub fn shells_cancel(&self) -> bool {
        self.position_gap().amax() <= C1_TOLERANCE && self.momentum_gap().amax() <= C1_TOLERANCE
    }

    /// The pair `r^{−σ}[q₀, p₀]` (strength +1) and `r^{−σ}[q̃₀, p̃₀]` (−1).
    pub fn shells(&self, t: f64) -> Result<[SingularShell; 2]> {
        let sign = ShellSign::for_time(t);
        Ok([
            SingularShell::new(self.q0, self.p0, self.mass, sign, 1.0)?,
            SingularShell::new(self.aux_q0, self.aux_p0, self.mass, sign, -1.0)?,
        ])
    }
}

/// Field evaluator for one actual trajectory and one initial field.
pub struct FieldEvaluator<'a, W: Worldline + ?Sized> {
    pub actual: &'a W,
    pub init: &'a InitialFieldSpec,
    pub data: InitialData,
    pub options: EvalOptions,
}

impl<'a, W: Worldline + ?Sized> FieldEvaluator<'a, W> {
    pub fn new(actual: &'a W, init: &'a InitialFieldSpec, options: EvalOptions) -> Result<Self> {
        Ok(Self { actual, init, data: InitialData::new(actual, init)?, options })
    }

    pub fn region(&self, x: &Vec3, t: f64) -> Region {
        let gap = (x - self.data.q0).norm() - t.abs();
        if gap.abs() <= self.options.band {
            Region::OnConeBand
        } else if gap < 0.0 {
            Region::InsideCone
        } else {
            Region::OutsideCone
        }
    }

    /// `λ f⁻[q̃] + (1 − λ) f⁺[q̃]`; the branch already computed for the
    /// interior term is reused.
    fn propagated_initial(&self, x: &Vec3, t: f64, cached: Option<(Branch, EMFieldValue)>) -> Result<EMFieldValue> {
        let lambda = self.init.lambda;
        let aux = |branch: Branch| -> Result<EMFieldValue> {
            match cached {
                Some((b, f)) if b == branch => Ok(f),
                _ => lw_field(&*self.init.aux, x, t, branch),
            }
        };
        let mut f = EMFieldValue::ZERO;
        if lambda != 0.0 {
            f += aux(Branch::Retarded)? * lambda;
        }
        if lambda != 1.0 {
            f += aux(Branch::Advanced)? * (1.0 - lambda);
        }
        Ok(f)
    }

    fn compact(&self, x: &Vec3, t: f64, inside: bool) -> Result<EMFieldValue> {
        let branch = if t >= 0.0 { Branch::Retarded } else { Branch::Advanced };
        let mut cached = None;
        let mut f = EMFieldValue::ZERO;
        if inside {
            let own = lw_field(self.actual, x, t, branch)?;
            let only_own = match branch {
                Branch::Retarded => self.init.lambda == 1.0,
                Branch::Advanced => self.init.lambda == 0.0,
            };
            if only_own {
                return Ok(own);
            }
            let aux = lw_field(&*self.init.aux, x, t, branch)?;
            cached = Some((branch, aux));
            f += own - aux;
        }
        Ok(f + self.propagated_initial(x, t, cached)?)
    }

    fn expanded(&self, x: &Vec3, t: f64, inside: bool) -> Result<EMFieldValue> {
        let lambda = self.init.lambda;
        let aux = &*self.init.aux;
        if inside {
            let branch = if t >= 0.0 { Branch::Retarded } else { Branch::Advanced };
            let own = lw_field(self.actual, x, t, branch)?;
            let aux_sigma = lw_field(aux, x, t, branch)?;
            let aux_ret = if branch == Branch::Retarded { aux_sigma } else { lw_field(aux, x, t, Branch::Retarded)? };
            let aux_adv = if branch == Branch::Advanced { aux_sigma } else { lw_field(aux, x, t, Branch::Advanced)? };
            Ok(own + (aux_ret - aux_sigma) * lambda + (aux_adv - aux_sigma) * (1.0 - lambda))
        } else {
            self.propagated_initial(x, t, None)
        }
    }

    /// Regular part and region at `(x, t)`, plus shells when in the band.
    pub fn sample(&self, x: &Vec3, t: f64) -> Result<FieldSample> {
        let region = self.region(x, t);
        let inside = region != Region::OutsideCone;
        let mut shells = Vec::new();
        if region == Region::OnConeBand {
            for shell in self.data.shells(t)? {
                shells.push(ShellContribution { shell, coefficient: shell.coefficient(x)? });
            }
            if self.options.on_front == FrontPolicy::Error && !self.data.shells_cancel() {
                let net: EMFieldValue = shells.iter().map(|s| s.coefficient).sum();
                return Err(Error::SingularFront(Box::new(FrontEvent::new(self.data.q0, t, *x, net.e, net.b))));
            }
        }
        let mut regular = match self.options.form {
            Form::Compact => self.compact(x, t, inside)?,
            Form::Expanded => self.expanded(x, t, inside)?,
        };
        if self.options.cross_check {
            let other = match self.options.form {
                Form::Compact => self.expanded(x, t, inside)?,
                Form::Expanded => self.compact(x, t, inside)?,
            };
            let scale = regular.norm().max(other.norm()).max(f64::MIN_POSITIVE);
            if (regular - other).norm() > 1e-10 * scale {
                return Err(Error::Domain(format!(
                    "compact and expanded forms disagree at ({x:?}, {t}): {regular:?} vs {other:?}"
                )));
            }
        }
        regular += propagate_free_field_with(&self.init.free, x, t, &self.options.free)?;
        Ok(FieldSample { regular: regular.checked()?, shells, region })
    }
}

/// Field of a unit charge on `actual` with initial field `init` at `(x, t)`.
pub fn evaluate_field<W: Worldline + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    x: &Vec3,
    t: f64,
) -> Result<FieldSample> {
    FieldEvaluator::new(actual, init, EvalOptions::default())?.sample(x, t)
}

pub fn evaluate_field_with<W: Worldline + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    x: &Vec3,
    t: f64,
    options: EvalOptions,
) -> Result<FieldSample> {
    FieldEvaluator::new(actual, init, options)?.sample(x, t)
}

/// Initial Coulomb field of a charge at rest at the actual initial position.
pub fn evaluate_coulomb_case<W: Worldline + ?Sized>(actual: &W, x: &Vec3, t: f64) -> Result<FieldSample> {
    let init = InitialFieldSpec::coulomb(actual.point(0.0)?.q);
    evaluate_field(actual, &init, x, t)
}

/// Evaluates many points in parallel; results keep the input order.
pub fn evaluate_grid<W: Worldline + Sync + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    points: &[Vec3],
    t: f64,
    options: EvalOptions,
) -> Result<Vec<Result<FieldSample>>> {
    let eval = FieldEvaluator::new(actual, init, options)?;
    Ok(points.par_iter().map(|x| eval.sample(x, t)).collect())
}

/// Vacuum expectation of the field operator for a static source of coupling
/// `g` switched on at time zero: `−g / (4π|x − q|)` inside `|x − q| ≤ |t|`.
pub fn qft_toy_expectation(g: f64, q: &Vec3, x: &Vec3, t: f64) -> Result<f64> {
    let r = (x - q).norm();
    if r == 0.0 {
        return Err(Error::Singularity("expectation value evaluated at the source".into()));
    }
    Ok(if r <= t.abs() { -g / (4.0 * std::f64::consts::PI * r) } else { 0.0 })
}
