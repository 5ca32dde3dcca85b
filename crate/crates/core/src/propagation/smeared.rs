//! Fields convolved with a charge density. Shell deltas become surface
//! integrals over the part of the shell sphere inside the density support.

use std::f64::consts::PI;
use std::ops::{AddAssign, Mul};

use super::{EvalOptions, FieldEvaluator, FrontPolicy, InitialFieldSpec};
use crate::error::{Error, Result};
use crate::field::EMFieldValue;
use crate::kinematics::Worldline;
use crate::mollifier::{mollifier_quadrature, Mollifier};
use crate::quadrature::{composite_gauss_legendre, perpendicular_basis};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearOptions {
    pub cap_panels: usize,
    pub cap_order: usize,
    pub azimuth: usize,
    pub eval: EvalOptions,
}

impl Default for SmearOptions {
    fn default() -> Self {
        Self {
            cap_panels: 4,
            cap_order: 8,
            azimuth: 32,
            eval: EvalOptions { on_front: FrontPolicy::Report, ..EvalOptions::default() },
        }
    }
}

/// `(ρ * f)(x, t)` for the field `f` of a unit charge on `actual`.
pub fn smeared_field<W: Worldline + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    rho: &Mollifier,
    x: &Vec3,
    t: f64,
) -> Result<EMFieldValue> {
    smeared_field_with(actual, init, rho, x, t, &SmearOptions::default())
}

pub fn smeared_field_with<W: Worldline + ?Sized>(
    actual: &W,
    init: &InitialFieldSpec,
    rho: &Mollifier,
    x: &Vec3,
    t: f64,
    options: &SmearOptions,
) -> Result<EMFieldValue> {
    let charge = actual.point(t)?.q;
    if (x - charge).norm() <= rho.radius() {
        return Err(Error::Singularity(format!(
            "charge at {charge:?} lies inside the smearing support around {x:?}"
        )));
    }
    let eval_opts = EvalOptions { on_front: FrontPolicy::Report, ..options.eval };
    let eval = FieldEvaluator::new(actual, init, eval_opts)?;
    smear_evaluator(&eval, rho, x, t, options)
}

/// Smeared field from a prepared evaluator, without the check that the
/// charge stays outside the support (self-fields are integrable).
pub(crate) fn smear_evaluator<W: Worldline + ?Sized>(
    eval: &FieldEvaluator<'_, W>,
    rho: &Mollifier,
    x: &Vec3,
    t: f64,
    options: &SmearOptions,
) -> Result<EMFieldValue> {
    let mut f = mollifier_quadrature(rho, |y| eval.sample(y, t).map(|s| s.regular), x)?;
    if !eval.data.shells_cancel() {
        for shell in eval.data.shells(t)? {
            f += sphere_cap_integral(rho, x, &shell.center, t.abs(), options, |z| shell.coefficient(z))?;
        }
    }
    f.checked()
}

/// `∫ ρ(|x − z|) g(z) dS(z)` over the sphere `|z − c| = τ`.
pub(crate) fn sphere_cap_integral<T, G>(
    rho: &Mollifier,
    x: &Vec3,
    center: &Vec3,
    tau: f64,
    options: &SmearOptions,
    mut g: G,
) -> Result<T>
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    G: FnMut(&Vec3) -> Result<T>,
{
    let mut acc = T::default();
    let radius = rho.radius();
    let axis_vec = x - center;
    let d = axis_vec.norm();
    if tau == 0.0 || (d - tau).abs() >= radius {
        return Ok(acc);
    }
    let (axis, lo) = if d == 0.0 {
        (Vec3::z(), -1.0)
    } else {
        (axis_vec / d, ((d * d + tau * tau - radius * radius) / (2.0 * d * tau)).clamp(-1.0, 1.0))
    };
    let (e1, e2) = perpendicular_basis(&axis);
    let (cs, cw) = composite_gauss_legendre(lo, 1.0, options.cap_panels, options.cap_order);
    let dphi = 2.0 * PI / options.azimuth as f64;
    for (c, w) in cs.iter().zip(&cw) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for k in 0..options.azimuth {
            let phi = (k as f64 + 0.5) * dphi;
            let n = axis * *c + (e1 * phi.cos() + e2 * phi.sin()) * s;
            let z = center + n * tau;
            let weight = rho.density((x - z).norm()) * w * dphi * tau * tau;
            if weight != 0.0 {
                acc += g(&z)? * weight;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{Static, Uniform};
    use crate::mollifier::mollifier_quadrature;
    use crate::propagation::evaluate_field;

    #[test]
    fn cap_integral_matches_radial_formula() {
        // ∫_{|z−c|=τ} ρ(|x−z|) dS = (2πτ/d) ∫_{|d−τ|}^{d+τ} ρ(s) s ds.
        let rho = Mollifier::bump(0.4, 1.0).unwrap();
        let center = Vec3::zeros();
        let opts = SmearOptions::default();
        for (d, tau) in [(1.0, 1.1), (1.0, 0.8), (0.5, 0.45), (0.2, 0.1)] {
            let x = Vec3::new(0.0, d, 0.0);
            let cap: f64 = sphere_cap_integral(&rho, &x, &center, tau, &opts, |_| Ok(1.0)).unwrap();
            let (s, w) = composite_gauss_legendre((d - tau).abs(), (d + tau).min((d - tau).abs() + 0.8), 64, 16);
            let oracle: f64 = 2.0 * PI * tau / d * s.iter().zip(&w).map(|(s, w)| w * rho.density(*s) * s).sum::<f64>();
            assert!((cap - oracle).abs() < 1e-7 * oracle.abs().max(1e-3), "d={d} τ={tau}: {cap} vs {oracle}");
        }
    }

    #[test]
    fn cancelled_shells_give_plain_convolution() {
        let s = Static::new(Vec3::zeros());
        let init = InitialFieldSpec::coulomb(Vec3::zeros());
        let rho = Mollifier::bump(0.2, 1.0).unwrap();
        let x = Vec3::new(1.0, 0.2, 0.0);
        let smeared = smeared_field(&s, &init, &rho, &x, 1.0).unwrap();
        let plain = mollifier_quadrature(&rho, |y| evaluate_field(&s, &init, y, 1.0).map(|f| f.regular), &x).unwrap();
        assert_eq!(smeared, plain);
    }

    #[test]
    fn point_limit_away_from_shells() {
        let u = Uniform::new(Vec3::zeros(), Vec3::new(0.3, 0.0, 0.0)).unwrap();
        let init = InitialFieldSpec::coulomb(Vec3::zeros());
        let x = Vec3::new(0.5, 1.0, 0.0);
        let point = evaluate_field(&u, &init, &x, 3.0).unwrap().regular;
        let mut last = f64::INFINITY;
        for r in [0.2, 0.05, 0.0125] {
            let rho = Mollifier::bump(r, 1.0).unwrap();
            let err = (smeared_field(&u, &init, &rho, &x, 3.0).unwrap() - point).norm();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-4 * point.norm());
    }

    #[test]
    fn charge_inside_support_is_rejected() {
        let s = Static::new(Vec3::zeros());
        let rho = Mollifier::bump(0.5, 1.0).unwrap();
        let err = smeared_field(&s, &InitialFieldSpec::coulomb(Vec3::zeros()), &rho, &Vec3::new(0.3, 0.0, 0.0), 1.0);
        assert!(matches!(err, Err(Error::Singularity(_))));
    }

    #[test]
    fn smeared_front_is_finite_and_localised() {
        let u = Uniform::new(Vec3::zeros(), Vec3::new(0.3, 0.0, 0.0)).unwrap();
        let init = InitialFieldSpec::coulomb(Vec3::zeros());
        let rho = Mollifier::bump(0.1, 1.0).unwrap();
        let t = 2.0;
        let on = smeared_field(&u, &init, &rho, &Vec3::new(0.0, 2.0, 0.0), t).unwrap();
        assert!(on.is_finite());
        // Well outside the cone the smeared field is the smeared Coulomb field.
        let far = Vec3::new(0.0, 2.5, 0.0);
        let out = smeared_field(&u, &init, &rho, &far, t).unwrap();
        let c = crate::lw::coulomb(&Vec3::zeros(), &far).unwrap();
        assert!((out - c).norm() < 1e-8 * c.norm());
    }
}
