//! Delay-equation dynamics of charges interacting through their light-cone
//! fields.
//!
//! Each charge obeys `dq/dt = v(p)`, `dp/dt = Σ_j e_ij e_i e_j L_ij` with the
//! Lorentz force `L_ij` of the field of charge `j` on charge `i`. For purely
//! retarded coupling the system is marched forward; with advanced parts it is
//! solved on a window by waveform relaxation.

mod ald;
mod fronts;
mod march;
mod relax;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use ald::{ald_runaway_probe, AldProbe};
pub use fronts::{detect_front_crossing, FrontCrossing, FrontSource};
pub use march::{dynamics_residual, integrate_retarded, ResidualReport, RunEvent, RunOutcome};
pub use relax::{integrate_relaxation, relaxation_fixed_points, RelaxOutcome};

use crate::error::{Error, Result};
use crate::field::EMFieldValue;
use crate::kinematics::{Branch, Shifted, TrajectoryHistory, Worldline};
use crate::lw::lw_field;
use crate::mollifier::{mollifier_quadrature, Mollifier};
use crate::propagation::{
    propagate_free_field, smear_evaluator, EvalOptions, FieldEvaluator, FreeFieldSpec, FrontPolicy, InitialData,
    InitialFieldSpec, SmearOptions,
};
use crate::state::CouplingMatrix;
use crate::Vec3;

/// Rigid charge density of every charge.
#[derive(Debug, Clone)]
pub enum ChargeShape {
    Point,
    Smeared(Mollifier),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfForce {
    #[default]
    None,
    /// `(2/3) e² ȧ`, with the jerk taken from the stored trajectory.
    AldNonrelativistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorSettings {
    pub step: f64,
    /// Runge-Kutta order; only 4 is implemented.
    pub order: usize,
    pub relaxation_tolerance: f64,
    pub max_iterations: usize,
    /// Integration halts when two charges come closer than this.
    pub min_separation: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { step: 1e-3, order: 4, relaxation_tolerance: 1e-8, max_iterations: 200, min_separation: 1e-6 }
    }
}

/// One charge: its charge, its trajectory up to the initial time (the last
/// node is the initial state) and its initial field.
#[derive(Debug, Clone)]
pub struct Charge {
    pub charge: f64,
    pub stripe: TrajectoryHistory,
    pub init: InitialFieldSpec,
}

impl Charge {
    /// Charge with an initial field matching its own past, so no fronts.
    pub fn compatible(charge: f64, stripe: TrajectoryHistory, lambda: f64, free: FreeFieldSpec) -> Self {
        let aux: Arc<dyn Worldline> = Arc::new(stripe.clone());
        Self { charge, stripe, init: InitialFieldSpec::unchecked(lambda, aux, free) }
    }

    pub fn mass(&self) -> f64 {
        self.stripe.mass()
    }
}

#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub charges: Vec<Charge>,
    pub coupling: CouplingMatrix,
    pub lambda: f64,
    pub shape: ChargeShape,
    pub self_force: SelfForce,
    pub integrator: IntegratorSettings,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.charges.len();
        if n == 0 {
            return Err(Error::Config("charges: at least one charge is required".into()));
        }
        if self.coupling.len() != n {
            return Err(Error::Config(format!("coupling: {}x{} matrix for {n} charges", self.coupling.len(), self.coupling.len())));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if matches!(self.shape, ChargeShape::Point)
            && self.coupling.has_self_interaction()
            && self.self_force == SelfForce::None
        {
            return Err(Error::Config(
                "coupling: point charges need e_ii = 0 or a self_force model (the self-field is singular)".into(),
            ));
        }
        let s = &self.integrator;
        if !(s.step > 0.0 && s.step.is_finite()) {
            return Err(Error::Config(format!("integrator.step must be positive, got {}", s.step)));
        }
        if s.order != 4 {
            return Err(Error::Config(format!("integrator.order: only 4 is supported, got {}", s.order)));
        }
        for (i, c) in self.charges.iter().enumerate() {
            if c.stripe.is_empty() {
                return Err(Error::Config(format!("charges[{i}]: empty initial trajectory")));
            }
            if !c.charge.is_finite() {
                return Err(Error::Config(format!("charges[{i}].e must be finite")));
            }
        }
        Ok(())
    }

    /// Common initial time: the end of every stripe.
    pub fn initial_time(&self) -> Result<f64> {
        let t0 = self.charges[0].stripe.last_time().unwrap_or(0.0);
        for (i, c) in self.charges.iter().enumerate() {
            if c.stripe.last_time() != Some(t0) {
                return Err(Error::Config(format!("charges[{i}]: initial trajectory must end at t = {t0}")));
            }
        }
        Ok(t0)
    }

    fn kernel(&self) -> Result<Option<Mollifier>> {
        match &self.shape {
            ChargeShape::Point => Ok(None),
            ChargeShape::Smeared(rho) => Ok(Some(rho.autoconvolution()?)),
        }
    }
}

/// Field of a unit charge, as seen by the force computation.
pub trait FieldSource: Send + Sync {
    fn field(&self, x: &Vec3, t: f64) -> Result<EMFieldValue>;

    /// `(κ * f)(x)` for a smearing kernel `κ` (the autoconvolution `ρ * ρ`).
    fn smeared(&self, kernel: &Mollifier, x: &Vec3, t: f64) -> Result<EMFieldValue>;
}

/// Initial-value form: actual trajectory plus initial field, with the
/// initial time `t0` moved to zero.
pub struct InitialValueField<'a> {
    actual: Shifted<&'a TrajectoryHistory>,
    init: &'a InitialFieldSpec,
    data: InitialData,
    t0: f64,
}

impl<'a> InitialValueField<'a> {
    /// `shifted_init` must already be expressed relative to `t0`.
    pub fn new(history: &'a TrajectoryHistory, shifted_init: &'a InitialFieldSpec, t0: f64) -> Result<Self> {
        let actual = Shifted { inner: history, offset: t0 };
        let data = InitialData::new(&actual, shifted_init)?;
        Ok(Self { actual, init: shifted_init, data, t0 })
    }

    fn evaluator(&self, on_front: FrontPolicy) -> FieldEvaluator<'_, Shifted<&'a TrajectoryHistory>> {
        FieldEvaluator {
            actual: &self.actual,
            init: self.init,
            data: self.data,
            options: EvalOptions { on_front, ..EvalOptions::default() },
        }
    }

    pub fn shells_cancel(&self) -> bool {
        self.data.shells_cancel()
    }

    pub fn initial_position(&self) -> Vec3 {
        self.data.q0
    }
}

impl FieldSource for InitialValueField<'_> {
    fn field(&self, x: &Vec3, t: f64) -> Result<EMFieldValue> {
        Ok(self.evaluator(FrontPolicy::Error).sample(x, t - self.t0)?.regular)
    }

    fn smeared(&self, kernel: &Mollifier, x: &Vec3, t: f64) -> Result<EMFieldValue> {
        smear_evaluator(&self.evaluator(FrontPolicy::Report), kernel, x, t - self.t0, &SmearOptions::default())
    }
}

/// History form `λ f⁻[q] + (1 − λ) f⁺[q] + f⁰`, used once the whole
/// trajectory is known (relaxation, residual checks).
pub struct HistoryField<'a> {
    pub traj: &'a dyn Worldline,
    pub lambda: f64,
    pub free: &'a FreeFieldSpec,
    /// Time at which the free field's Cauchy data are given.
    pub t0: f64,
}

impl FieldSource for HistoryField<'_> {
    fn field(&self, x: &Vec3, t: f64) -> Result<EMFieldValue> {
        let mut f = EMFieldValue::ZERO;
        if self.lambda != 0.0 {
            f += lw_field(self.traj, x, t, Branch::Retarded)? * self.lambda;
        }
        if self.lambda != 1.0 {
            f += lw_field(self.traj, x, t, Branch::Advanced)? * (1.0 - self.lambda);
        }
        Ok(f + propagate_free_field(self.free, x, t - self.t0)?)
    }

    fn smeared(&self, kernel: &Mollifier, x: &Vec3, t: f64) -> Result<EMFieldValue> {
        mollifier_quadrature(kernel, |y| self.field(y, t), x)
    }
}

/// What the force on a charge depends on besides the fields.
pub struct ForceModel<'a> {
    pub charges: &'a [f64],
    pub coupling: &'a CouplingMatrix,
    /// `ρ * ρ` for smeared charges, `None` for point charges.
    pub kernel: Option<&'a Mollifier>,
    pub self_force: SelfForce,
}

/// `Σ_j e_ij e_i e_j L_ij` on charge `i` at position `q` with velocity `v`,
/// plus the ALD term when enabled and a jerk is supplied.
pub fn lorentz_force(
    i: usize,
    q: &Vec3,
    v: &Vec3,
    t: f64,
    model: &ForceModel<'_>,
    fields: &[&dyn FieldSource],
    jerk: Option<&Vec3>,
) -> Result<Vec3> {
    let mut force = Vec3::zeros();
    for (j, source) in fields.iter().enumerate() {
        let e = model.coupling.get(i, j) * model.charges[i] * model.charges[j];
        if e == 0.0 {
            continue;
        }
        let f = match model.kernel {
            Some(kernel) => source.smeared(kernel, q, t)?,
            None if i == j => continue,
            None => source.field(q, t)?,
        };
        force += f.force_on(v) * e;
    }
    if model.self_force == SelfForce::AldNonrelativistic {
        if let Some(j) = jerk {
            force += j * (2.0 / 3.0 * model.charges[i] * model.charges[i]);
        }
    }
    Ok(force)
}

/// Backward-difference jerk from a trajectory's dense output.
pub(crate) fn trajectory_jerk(traj: &dyn Worldline, t: f64, h: f64) -> Result<Vec3> {
    Ok((traj.point(t)?.a - traj.point(t - h)?.a) / h)
}
