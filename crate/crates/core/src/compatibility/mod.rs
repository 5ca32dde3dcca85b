//! Compatibility of an initial field with the trajectory of its charge.
//!
//! An initial field built from an auxiliary trajectory `q̃` produces
//! singular shells on the light cone of the initial charge position unless
//! `(q̃₀, p̃₀) = (q₀, p₀)` (first condition). Beyond that, the field is `C^k`
//! across the cone iff the one-sided time derivatives of order `1..=k+2` of
//! `q̃` (from the past) and `q` (into the future) agree at `t = 0` (second
//! condition).

mod adapt;

use std::sync::Arc;

use serde::{Serialize, Serializer};

pub use adapt::{
    adapt_initial_field, adapt_self_consistent, AdaptOptions, AdaptReport, AdaptedField, BlendKind, BlendedAux,
};

use crate::dynamics::{detect_front_crossing, FrontCrossing, FrontSource};
use crate::error::{Error, Result};
use crate::field::EMFieldValue;
use crate::kinematics::{Kicked, Worldline};
use crate::propagation::{
    EvalOptions, FieldEvaluator, FrontPolicy, InitialData, InitialFieldSpec, Region,
};
use crate::quadrature::fibonacci_sphere;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C1Report {
    pub pass: bool,
    pub momentum_gap: Vec3,
    pub position_gap: Vec3,
}

/// First condition: matching initial position and momentum.
pub fn check_c1<W: Worldline + ?Sized>(actual: &W, init: &InitialFieldSpec) -> Result<C1Report> {
    let data = InitialData::new(actual, init)?;
    Ok(C1Report {
        pass: data.shells_cancel(),
        momentum_gap: data.momentum_gap(),
        position_gap: data.position_gap(),
    })
}

/// Regularity of the field across the initial light cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothnessClass {
    /// Uncancelled shells: delta fronts on the cone.
    Singular,
    /// Shells cancel but the field itself jumps.
    Discontinuous,
    /// `C^k` and not `C^{k+1}`.
    Ck(usize),
    /// No mismatch up to the tested derivative order.
    Smooth { tested_order: usize },
}

impl SmoothnessClass {
    /// Whether the field is at least `C^k`.
    pub fn is_at_least(self, k: usize) -> bool {
        match self {
            SmoothnessClass::Singular | SmoothnessClass::Discontinuous => false,
            SmoothnessClass::Ck(j) => j >= k,
            SmoothnessClass::Smooth { tested_order } => tested_order >= k,
        }
    }
}

impl Serialize for SmoothnessClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SmoothnessClass::Singular => s.serialize_str("singular"),
            SmoothnessClass::Discontinuous => s.serialize_str("discontinuous"),
            SmoothnessClass::Ck(k) => s.serialize_u64(*k as u64),
            SmoothnessClass::Smooth { .. } => s.serialize_str("smooth"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeGap {
    pub order: usize,
    pub actual: Vec3,
    pub aux: Vec3,
    pub gap: f64,
    pub tolerance: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C2Report {
    pub smoothness_class: SmoothnessClass,
    pub tested_order: usize,
    pub c1: C1Report,
    pub derivative_gaps: Vec<DerivativeGap>,
}

/// Finite-difference settings for derivatives without a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct C2Options {
    /// Stencil step for the third derivative; grows by half per further order.
    pub base_step: f64,
    /// Stencil points beyond the minimum, i.e. the accuracy order.
    pub extra_points: usize,
    /// Smallest step accepted when the smooth piece is short.
    pub min_step: f64,
    pub max_order: usize,
    pub rel_tolerance: f64,
}

impl Default for C2Options {
    fn default() -> Self {
        Self { base_step: 1e-2, extra_points: 6, min_step: 1e-7, max_order: 6, rel_tolerance: 1e-6 }
    }
}

/// Second condition at order `k`: derivatives `1..=k+2` at `t = 0`.
pub fn check_c2<W: Worldline + ?Sized>(actual: &W, init: &InitialFieldSpec, k: usize) -> Result<C2Report> {
    check_c2_with(actual, init, k, &C2Options::default())
}

pub fn check_c2_with<W: Worldline + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    k: usize,
    options: &C2Options,
) -> Result<C2Report> {
    let c1 = check_c1(actual, init)?;
    let mut gaps = Vec::with_capacity(k + 2);
    let mut first_mismatch = None;
    for order in 1..=k + 2 {
        let d_actual = one_sided_derivative(actual, order, true, options)?;
        let d_aux = one_sided_derivative(&*init.aux, order, false, options)?;
        let gap = (d_actual - d_aux).norm();
        let tolerance = options.rel_tolerance * (1.0 + d_actual.norm().max(d_aux.norm()));
        let matched = gap <= tolerance;
        if !matched && first_mismatch.is_none() {
            first_mismatch = Some(order);
        }
        gaps.push(DerivativeGap { order, actual: d_actual, aux: d_aux, gap, tolerance, matched });
    }
    let smoothness_class = if !c1.pass {
        SmoothnessClass::Singular
    } else {
        match first_mismatch {
            None => SmoothnessClass::Smooth { tested_order: k },
            Some(l) if l <= 2 => SmoothnessClass::Discontinuous,
            Some(l) => SmoothnessClass::Ck(l - 3),
        }
    };
    Ok(C2Report { smoothness_class, tested_order: k, c1, derivative_gaps: gaps })
}

/// `order`-th derivative of the position at `t = 0`, from the future side
/// when `forward`, else from the past. Closed forms are used when the
/// trajectory provides them, otherwise one-sided differences of the
/// acceleration inside the smooth piece touching `t = 0`.
pub fn one_sided_derivative<W: Worldline + ?Sized>(
    traj: &W,
    order: usize,
    forward: bool,
    options: &C2Options,
) -> Result<Vec3> {
    if let Some(d) = traj.exact_derivative(order, 0.0, forward)? {
        return Ok(d);
    }
    let p = traj.one_sided(0.0, forward)?;
    match order {
        0 => return Ok(p.q),
        1 => return Ok(p.v),
        2 => return Ok(p.a),
        _ => {}
    }
    if order > options.max_order {
        return Err(Error::Resolution(format!(
            "derivative of order {order} requested, finite differences support up to {}",
            options.max_order
        )));
    }
    let m = order - 2;
    let points = m + options.extra_points;
    let span = traj.smooth_span(0.0, forward);
    let h = (options.base_step * 1.5f64.powi(m as i32 - 1)).min(span / (points - 1) as f64);
    if !(h >= options.min_step) {
        return Err(Error::Resolution(format!(
            "smooth piece of length {span:e} next to t = 0 is too short for a {points}-point stencil"
        )));
    }
    let dir = if forward { 1.0 } else { -1.0 };
    let nodes: Vec<f64> = (0..points).map(|j| dir * h * j as f64).collect();
    let weights = fd_weights(0.0, &nodes, m);
    let mut acc = p.a * weights[0];
    for (t, w) in nodes.iter().zip(&weights).skip(1) {
        acc += traj.one_sided(*t, !forward)?.a * *w;
    }
    Ok(acc)
}

/// Finite-difference weights for the `m`-th derivative at `z` on arbitrary
/// nodes (Fornberg's recursion).
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpOptions {
    /// Largest straddle offset as a fraction of the cone radius.
    pub offset_fraction: f64,
    pub eval: EvalOptions,
}

impl Default for JumpOptions {
    fn default() -> Self {
        Self { offset_fraction: 2e-3, eval: EvalOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeJump {
    pub deriv_order: usize,
    pub direction: Vec3,
    pub time: f64,
    pub offset: f64,
    /// Extrapolated `outside − inside` limit.
    pub jump: EMFieldValue,
    pub magnitude: f64,
    /// Difference between the two highest extrapolation levels.
    pub error_estimate: f64,
    /// Raw straddle differences at offsets `δ, δ/2, δ/4, δ/8`.
    pub raw: [f64; 4],
}

/// Jump of the field (order 0) or of its radial derivative (order 1) across
/// the sphere `|x − q₀| = t` along `direction`.
pub fn measure_cone_jump<W: Worldline + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    direction: &Vec3,
    t: f64,
    deriv_order: usize,
) -> Result<ConeJump> {
    measure_cone_jump_with(actual, init, direction, t, deriv_order, &JumpOptions::default())
}

pub fn measure_cone_jump_with<W: Worldline + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    direction: &Vec3,
    t: f64,
    deriv_order: usize,
    options: &JumpOptions,
) -> Result<ConeJump> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("cone jumps are measured at t > 0, got {t}")));
    }
    if deriv_order > 1 {
        return Err(Error::Domain(format!("derivative order {deriv_order} not supported (0 or 1)")));
    }
    if !(options.offset_fraction > 0.0 && options.offset_fraction <= 0.1) {
        return Err(Error::Domain("offset fraction must lie in (0, 0.1]".into()));
    }
    let norm = direction.norm();
    if !(norm > 0.0) {
        return Err(Error::Domain("direction must be nonzero".into()));
    }
    let n = direction / norm;
    let eval_opts = EvalOptions { on_front: FrontPolicy::Error, ..options.eval };
    let eval = FieldEvaluator::new(actual, init, eval_opts)?;
    let q0 = eval.data.q0;
    // Raises the structured front error when the shells do not cancel.
    eval.sample(&(q0 + n * t), t)?;

    let offset = options.offset_fraction * t;
    if offset / 8.0 <= eval.options.band {
        return Err(Error::Domain("straddle offsets fall inside the shell band".into()));
    }
    let f = |r: f64| -> Result<EMFieldValue> { Ok(eval.sample(&(q0 + n * r), t)?.regular) };
    let straddle = |d: f64| -> Result<EMFieldValue> {
        Ok(match deriv_order {
            0 => f(t + d)? - f(t - d)?,
            _ => (f(t + 2.0 * d)? - f(t + d)?) * (1.0 / d) - (f(t - d)? - f(t - 2.0 * d)?) * (1.0 / d),
        })
    };
    let j: Vec<EMFieldValue> = (0..4).map(|k| straddle(offset / f64::from(1 << k))).collect::<Result<_>>()?;
    // Richardson table in powers of the offset; the finest entry removes
    // the δ, δ², δ³ terms, the one below it only δ and δ².
    let mut table = j.clone();
    let mut diagonal = vec![table[0]];
    for level in 1..4 {
        let factor = f64::from(1 << level);
        for i in (level..4).rev() {
            table[i] = (table[i] * factor - table[i - 1]) * (1.0 / (factor - 1.0));
        }
        diagonal.push(table[level]);
    }
    let fine = diagonal[3];
    let coarse = diagonal[2];
    Ok(ConeJump {
        deriv_order,
        direction: n,
        time: t,
        offset,
        jump: fine,
        magnitude: fine.norm(),
        error_estimate: (fine - coarse).norm(),
        raw: [j[0].norm(), j[1].norm(), j[2].norm(), j[3].norm()],
    })
}

/// Setup for the momentum-perturbation experiment: a compatible charge, an
/// optional second charge whose meeting with the front is predicted, and
/// probe points outside the cone.
#[derive(Debug, Clone)]
pub struct PerturbationSetup {
    pub actual: Arc<dyn Worldline>,
    pub init: InitialFieldSpec,
    pub witness: Option<Arc<dyn Worldline>>,
    pub time: f64,
    pub outside_points: Vec<Vec3>,
    pub sphere_samples: usize,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub delta_p: Vec3,
    pub time: f64,
    pub outside_points: usize,
    /// Largest `|f_perturbed − f_baseline|` outside the cone.
    pub outside_max_difference: f64,
    /// Net shell coefficient norms at the sampled sphere points.
    pub net_shell_norms: Vec<f64>,
    pub net_shell_max: f64,
    pub breakdown: Option<FrontCrossing>,
}

/// Changes the initial momentum of a compatible charge by `delta_p` while
/// keeping its initial field.
pub fn perturbation_experiment_a1(setup: &PerturbationSetup, delta_p: &Vec3) -> Result<PerturbationReport> {
    let base = check_c1(&*setup.actual, &setup.init)?;
    if !base.pass {
        return Err(Error::Domain("the unperturbed charge must match its initial field".into()));
    }
    let perturbed = Kicked::with_momentum_change(setup.actual.clone(), delta_p)?;
    let opts = EvalOptions { on_front: FrontPolicy::Report, ..EvalOptions::default() };
    let before = FieldEvaluator::new(&*setup.actual, &setup.init, opts)?;
    let after = FieldEvaluator::new(&perturbed, &setup.init, opts)?;
    let t = setup.time;

    let mut outside_max_difference: f64 = 0.0;
    for x in &setup.outside_points {
        if before.region(x, t) != Region::OutsideCone {
            return Err(Error::Domain(format!("probe {x:?} is not outside the cone at t = {t}")));
        }
        let diff = after.sample(x, t)?.regular - before.sample(x, t)?.regular;
        outside_max_difference = outside_max_difference.max(diff.norm());
    }

    let shells = after.data.shells(t)?;
    let net_shell_norms: Vec<f64> = fibonacci_sphere(setup.sphere_samples)
        .iter()
        .map(|n| {
            let x = after.data.q0 + n * t.abs();
            Ok((shells[0].coefficient(&x)? + shells[1].coefficient(&x)?).norm())
        })
        .collect::<Result<_>>()?;
    let net_shell_max = net_shell_norms.iter().copied().fold(0.0, f64::max);

    let breakdown = match &setup.witness {
        Some(w) if net_shell_max > 0.0 => {
            let src = FrontSource { time: 0.0, center: after.data.q0, owner: None };
            detect_front_crossing(&[&**w], &[src], setup.horizon)?.into_iter().next()
        }
        _ => None,
    };
    Ok(PerturbationReport {
        delta_p: *delta_p,
        time: t,
        outside_points: setup.outside_points.len(),
        outside_max_difference,
        net_shell_norms,
        net_shell_max,
        breakdown,
    })
}
