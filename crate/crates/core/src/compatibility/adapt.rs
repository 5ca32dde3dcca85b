//! Repairing an incompatible initial field by bending its auxiliary
//! trajectory, on a short window before `t = 0`, onto the Taylor expansion of
//! the actual trajectory.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{check_c1, check_c2_with, one_sided_derivative, C1Report, C2Options, C2Report, SmoothnessClass};
use crate::error::{Error, Result};
use crate::kinematics::{check_speed, Polynomial, Spliced, Worldline, WorldlinePoint};
use crate::propagation::InitialFieldSpec;
use crate::Vec3;

/// Transition `β: [0, 1] → [0, 1]` with `β(0) = 0`, `β(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlendKind {
    /// `e^{−1/x} / (e^{−1/x} + e^{−1/(1−x)})`; flat to all orders at both ends.
    ExpTransition,
    /// Polynomial smoothstep of degree `2 order + 1`; flat to `order`.
    Smoothstep { order: usize },
}

impl BlendKind {
    /// `(β, β', β'')` at `x`.
    pub fn eval(self, x: f64) -> [f64; 3] {
        if x <= 0.0 {
            return [0.0, 0.0, 0.0];
        }
        if x >= 1.0 {
            return [1.0, 0.0, 0.0];
        }
        match self {
            BlendKind::ExpTransition => {
                let f = |y: f64| [(-1.0 / y).exp(), (-1.0 / y).exp() / (y * y), (-1.0 / y).exp() * (1.0 - 2.0 * y) / y.powi(4)];
                let g = f(x);
                let r = f(1.0 - x);
                let h = [r[0], -r[1], r[2]];
                let d = g[0] + h[0];
                let dd = g[1] + h[1];
                let num = g[1] * h[0] - g[0] * h[1];
                let num_d = g[2] * h[0] - g[0] * h[2];
                [g[0] / d, num / (d * d), num_d / (d * d) - 2.0 * num * dd / (d * d * d)]
            }
            BlendKind::Smoothstep { order } => {
                let c = smoothstep_coefficients(order);
                let mut out = [0.0; 3];
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot = (k..c.len()).rev().fold(0.0, |acc, j| {
                        let falling: f64 = ((j - k + 1)..=j).map(|i| i as f64).product();
                        acc * x + c[j] * falling
                    });
                }
                out
            }
        }
    }

    /// Number of derivatives vanishing at the end points.
    pub fn flat_order(self) -> usize {
        match self {
            BlendKind::ExpTransition => usize::MAX,
            BlendKind::Smoothstep { order } => order,
        }
    }
}

/// Monomial coefficients of `x^{N+1} Σ_n C(N+n, n) C(2N+1, N−n) (−x)^n`.
fn smoothstep_coefficients(order: usize) -> Vec<f64> {
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    let mut c = vec![0.0; 2 * order + 2];
    for n in 0..=order {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        c[order + 1 + n] = sign * binom(order + n, n) * binom(2 * order + 1, order - n);
    }
    c
}

/// Auxiliary trajectory bent onto `taylor` over `[−window, 0]`:
/// `q̃'(t) = q̃(t) + β((t + w)/w) (P(t) − q̃(t))`, and `P` itself for `t ≥ 0`.
#[derive(Debug, Clone)]
pub struct BlendedAux {
    pub aux: Arc<dyn Worldline>,
    pub taylor: Polynomial,
    pub window: f64,
    pub blend: BlendKind,
}

impl Worldline for BlendedAux {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        let w = self.window;
        if t <= -w {
            return self.aux.point(t);
        }
        let p = WorldlinePoint {
            q: self.taylor.derivative(0, t),
            v: self.taylor.derivative(1, t),
            a: self.taylor.derivative(2, t),
        };
        if t >= 0.0 {
            check_speed(t, &p.v)?;
            return Ok(p);
        }
        let o = self.aux.point(t)?;
        let [b, b1, b2] = self.blend.eval((t + w) / w);
        let (b1, b2) = (b1 / w, b2 / (w * w));
        let (dq, dv, da) = (p.q - o.q, p.v - o.v, p.a - o.a);
        let v = o.v + dv * b + dq * b1;
        check_speed(t, &v)?;
        Ok(WorldlinePoint { q: o.q + dq * b, v, a: o.a + da * b + dv * (2.0 * b1) + dq * b2 })
    }
    fn mass(&self) -> f64 {
        self.aux.mass()
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        let w = self.window;
        if t < -w || (t == -w && !forward) {
            return self.aux.smooth_span(t, forward).min(if forward { -w - t } else { f64::INFINITY });
        }
        if forward {
            if t < 0.0 {
                -t
            } else {
                f64::INFINITY
            }
        } else if t > 0.0 {
            t
        } else {
            t + w
        }
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        let w = self.window;
        if t > 0.0 || (t == 0.0 && (forward || order <= self.blend.flat_order())) {
            return Ok(Some(self.taylor.derivative(order, t)));
        }
        if t < -w || (t == -w && !forward) {
            return self.aux.exact_derivative(order, t, forward);
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptOptions {
    /// Length of the blend interval `[−window, 0]`.
    pub window: f64,
    /// Highest derivative order matched at `t = 0`; the field becomes
    /// `C^{match_order − 2}` across the cone.
    pub match_order: usize,
    pub blend: BlendKind,
    /// Convergence threshold on the change of the initial acceleration.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub c2: C2Options,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        Self {
            window: 0.1,
            match_order: 4,
            blend: BlendKind::ExpTransition,
            tolerance: 1e-10,
            max_iterations: 50,
            c2: C2Options::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptReport {
    /// The input was already compatible and is returned unchanged.
    pub identity: bool,
    pub window: f64,
    pub match_order: usize,
    pub blend: BlendKind,
    /// Field changes are confined to `|x − q₀| ≤ |t| + locality_margin`.
    pub locality_margin: f64,
    pub before: C2Report,
    pub after: C2Report,
    pub c1: C1Report,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AdaptedField {
    pub spec: InitialFieldSpec,
    pub report: AdaptReport,
}

/// Replaces the auxiliary trajectory on `[−window, 0]` by a blend onto the
/// actual trajectory's Taylor expansion at `0⁺`, and by the actual trajectory
/// itself for `t ≥ 0`.
pub fn adapt_initial_field(
    actual: &Arc<dyn Worldline>,
    init: &InitialFieldSpec,
    options: &AdaptOptions,
) -> Result<AdaptedField> {
    if options.match_order < 2 {
        return Err(Error::Config("match_order must be at least 2".into()));
    }
    if !(options.window > 0.0 && options.window.is_finite()) {
        return Err(Error::Config(format!("window must be positive, got {}", options.window)));
    }
    let k = options.match_order - 2;
    let before = check_c2_with(&**actual, init, k, &options.c2)?;
    if matches!(before.smoothness_class, SmoothnessClass::Smooth { .. }) {
        return Ok(AdaptedField {
            spec: init.clone(),
            report: AdaptReport {
                identity: true,
                window: options.window,
                match_order: options.match_order,
                blend: options.blend,
                locality_margin: 0.0,
                c1: before.c1,
                after: before.clone(),
                before,
                iterations: 0,
                trace: Vec::new(),
            },
        });
    }

    let derivs = (0..=options.match_order)
        .map(|l| one_sided_derivative(&**actual, l, true, &options.c2))
        .collect::<Result<Vec<_>>>()?;
    let mut taylor = Polynomial::from_derivatives(0.0, &derivs);
    taylor.mass = actual.mass();
    let blended = BlendedAux { aux: init.aux.clone(), taylor, window: options.window, blend: options.blend };
    let mut v_max: f64 = 0.0;
    for j in 0..=64 {
        let t = -options.window * j as f64 / 64.0;
        let v = blended.point(t).map_err(|e| {
            Error::Domain(format!("blended auxiliary trajectory is not time-like ({e}); shorten the window"))
        })?;
        v_max = v_max.max(v.v.norm());
    }
    let aux: Arc<dyn Worldline> =
        Arc::new(Spliced { before: Arc::new(blended), after: actual.clone(), switch: 0.0 });
    let spec = InitialFieldSpec::new(init.lambda, aux, init.free.clone(), &actual.point(0.0)?.q)?;
    let after = check_c2_with(&**actual, &spec, k, &options.c2)?;
    let c1 = check_c1(&**actual, &spec)?;
    Ok(AdaptedField {
        spec,
        report: AdaptReport {
            identity: false,
            window: options.window,
            match_order: options.match_order,
            blend: options.blend,
            locality_margin: (1.0 + v_max) * options.window,
            before,
            after,
            c1,
            iterations: 1,
            trace: Vec::new(),
        },
    })
}

/// Fixed-point version for charges whose own initial field acts back on
/// them: `solve` returns the local solution on `[0, τ)` for a given initial
/// field, and the adaptation is repeated until the initial acceleration
/// settles.
pub fn adapt_self_consistent<F>(init: &InitialFieldSpec, options: &AdaptOptions, mut solve: F) -> Result<AdaptedField>
where
    F: FnMut(&InitialFieldSpec) -> Result<Arc<dyn Worldline>>,
{
    let mut spec = init.clone();
    let mut previous: Option<Vec3> = None;
    let mut trace = Vec::new();
    for iteration in 1..=options.max_iterations {
        let actual = solve(&spec)?;
        let a0 = actual.one_sided(0.0, true)?.a;
        let adapted = adapt_initial_field(&actual, init, options)?;
        if let Some(prev) = previous {
            let change = (a0 - prev).norm();
            trace.push(change);
            if change <= options.tolerance * (1.0 + a0.norm()) {
                let mut report = adapted.report;
                report.iterations = iteration;
                report.trace = trace;
                return Ok(AdaptedField { spec: adapted.spec, report });
            }
        }
        previous = Some(a0);
        spec = adapted.spec;
    }
    Err(Error::Iteration {
        iterations: options.max_iterations,
        last_change: trace.last().copied().unwrap_or(f64::NAN),
        trace,
    })
}
