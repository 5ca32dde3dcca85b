//! Charge worldlines: analytic trajectories, sampled histories with dense
//! output, and the retarded/advanced light-cone time solver.

mod history;
mod lightcone;

use std::fmt::Debug;
use std::sync::Arc;

pub use history::{Extension, HistoryNode, TrajectoryHistory};
pub use lightcone::{solve_lightcone_time, Branch, LightConeData, SolverSettings};

use crate::error::{Error, Result};
use crate::state::{lorentz_gamma, momentum_from_velocity, relativistic_velocity};
use crate::Vec3;

/// Time-like guard: every worldline must keep `|v| < 1 - SPEED_GUARD`.
pub const SPEED_GUARD: f64 = 1e-9;

/// Position, velocity and acceleration of a charge at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldlinePoint {
    pub q: Vec3,
    pub v: Vec3,
    pub a: Vec3,
}

impl WorldlinePoint {
    pub fn at_rest(q: Vec3) -> Self {
        Self { q, v: Vec3::zeros(), a: Vec3::zeros() }
    }
}

pub(crate) fn check_speed(t: f64, v: &Vec3) -> Result<()> {
    let speed = v.norm();
    if speed < 1.0 - SPEED_GUARD {
        Ok(())
    } else {
        Err(Error::VelocityGuard { time: t, speed })
    }
}

/// A time-like charge trajectory `t ↦ (q, v, a)`.
pub trait Worldline: Debug + Send + Sync {
    fn point(&self, t: f64) -> Result<WorldlinePoint>;

    fn mass(&self) -> f64 {
        1.0
    }

    fn momentum(&self, t: f64) -> Result<Vec3> {
        momentum_from_velocity(&self.point(t)?.v, self.mass())
    }

    /// Length of the interval next to `t` (forward when `forward`, else
    /// backward) on which the trajectory is a single smooth piece.
    fn smooth_span(&self, _t: f64, _forward: bool) -> f64 {
        f64::INFINITY
    }

    /// One-sided limit of `point` at `t`; differs from `point` only at a
    /// junction between pieces.
    fn one_sided(&self, t: f64, _forward: bool) -> Result<WorldlinePoint> {
        self.point(t)
    }

    /// The `order`-th time derivative of the position at `t` (one-sided at
    /// a junction) when it is known in closed form.
    fn exact_derivative(&self, _order: usize, _t: f64, _forward: bool) -> Result<Option<Vec3>> {
        Ok(None)
    }
}

impl<W: Worldline + ?Sized> Worldline for Arc<W> {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        (**self).point(t)
    }
    fn mass(&self) -> f64 {
        (**self).mass()
    }
    fn momentum(&self, t: f64) -> Result<Vec3> {
        (**self).momentum(t)
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        (**self).smooth_span(t, forward)
    }
    fn one_sided(&self, t: f64, forward: bool) -> Result<WorldlinePoint> {
        (**self).one_sided(t, forward)
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        (**self).exact_derivative(order, t, forward)
    }
}

impl<W: Worldline + ?Sized> Worldline for &W {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        (**self).point(t)
    }
    fn mass(&self) -> f64 {
        (**self).mass()
    }
    fn momentum(&self, t: f64) -> Result<Vec3> {
        (**self).momentum(t)
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        (**self).smooth_span(t, forward)
    }
    fn one_sided(&self, t: f64, forward: bool) -> Result<WorldlinePoint> {
        (**self).one_sided(t, forward)
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        (**self).exact_derivative(order, t, forward)
    }
}

/// `query` for any worldline: `(q, v, a)` at time `t`.
pub fn query<W: Worldline + ?Sized>(traj: &W, t: f64) -> Result<(Vec3, Vec3, Vec3)> {
    let p = traj.point(t)?;
    Ok((p.q, p.v, p.a))
}

/// Charge at rest at `q` for all times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Static {
    pub q: Vec3,
    pub mass: f64,
}

impl Static {
    pub fn new(q: Vec3) -> Self {
        Self { q, mass: 1.0 }
    }
}

impl Worldline for Static {
    fn point(&self, _t: f64) -> Result<WorldlinePoint> {
        Ok(WorldlinePoint::at_rest(self.q))
    }
    fn mass(&self) -> f64 {
        self.mass
    }
    fn exact_derivative(&self, order: usize, _t: f64, _forward: bool) -> Result<Option<Vec3>> {
        Ok(Some(if order == 0 { self.q } else { Vec3::zeros() }))
    }
}

/// Uniform motion `q(t) = q0 + v t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub q0: Vec3,
    pub v: Vec3,
    pub mass: f64,
}

impl Uniform {
    pub fn new(q0: Vec3, v: Vec3) -> Result<Self> {
        check_speed(0.0, &v)?;
        Ok(Self { q0, v, mass: 1.0 })
    }

    pub fn from_momentum(q0: Vec3, p: Vec3, mass: f64) -> Result<Self> {
        let v = relativistic_velocity(&p, mass)?;
        Ok(Self { q0, v, mass })
    }
}

impl Worldline for Uniform {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        Ok(WorldlinePoint { q: self.q0 + self.v * t, v: self.v, a: Vec3::zeros() })
    }
    fn mass(&self) -> f64 {
        self.mass
    }
    fn exact_derivative(&self, order: usize, t: f64, _forward: bool) -> Result<Option<Vec3>> {
        Ok(Some(match order {
            0 => self.q0 + self.v * t,
            1 => self.v,
            _ => Vec3::zeros(),
        }))
    }
}

/// Harmonic oscillation `q(t) = center + amplitude · sin(ω t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillating {
    pub center: Vec3,
    pub amplitude: Vec3,
    pub omega: f64,
    pub phase: f64,
}

impl Oscillating {
    pub fn new(center: Vec3, amplitude: Vec3, omega: f64, phase: f64) -> Result<Self> {
        if amplitude.norm() * omega.abs() >= 1.0 - SPEED_GUARD {
            return Err(Error::Domain("oscillation would reach the speed of light".into()));
        }
        Ok(Self { center, amplitude, omega, phase })
    }
}

impl Worldline for Oscillating {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        let (s, c) = (self.omega * t + self.phase).sin_cos();
        Ok(WorldlinePoint {
            q: self.center + self.amplitude * s,
            v: self.amplitude * (self.omega * c),
            a: self.amplitude * (-self.omega * self.omega * s),
        })
    }
    fn exact_derivative(&self, order: usize, t: f64, _forward: bool) -> Result<Option<Vec3>> {
        let arg = self.omega * t + self.phase + order as f64 * std::f64::consts::FRAC_PI_2;
        let d = self.amplitude * (self.omega.powi(order as i32) * arg.sin());
        Ok(Some(if order == 0 { d + self.center } else { d }))
    }
}

/// Circular motion in the plane spanned by `e1`, `e2` (orthonormal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circular {
    pub center: Vec3,
    pub radius: f64,
    pub omega: f64,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl Circular {
    /// Orbit in the xy-plane.
    pub fn new(center: Vec3, radius: f64, omega: f64) -> Result<Self> {
        if radius * omega.abs() >= 1.0 - SPEED_GUARD {
            return Err(Error::Domain("orbit speed must be below one".into()));
        }
        Ok(Self { center, radius, omega, e1: Vec3::x(), e2: Vec3::y() })
    }

    pub fn speed(&self) -> f64 {
        self.radius * self.omega.abs()
    }

    pub fn acceleration(&self) -> f64 {
        self.radius * self.omega * self.omega
    }
}

impl Worldline for Circular {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        let (s, c) = (self.omega * t).sin_cos();
        let r = self.radius;
        let w = self.omega;
        Ok(WorldlinePoint {
            q: self.center + (self.e1 * c + self.e2 * s) * r,
            v: (self.e2 * c - self.e1 * s) * (r * w),
            a: (self.e1 * c + self.e2 * s) * (-r * w * w),
        })
    }
    fn exact_derivative(&self, order: usize, t: f64, _forward: bool) -> Result<Option<Vec3>> {
        let (s, c) = (self.omega * t + order as f64 * std::f64::consts::FRAC_PI_2).sin_cos();
        let d = (self.e1 * c + self.e2 * s) * (self.radius * self.omega.powi(order as i32));
        Ok(Some(if order == 0 { d + self.center } else { d }))
    }
}

/// Polynomial trajectory `q(t) = Σ c_k (t - t0)^k`. Queries where the
/// polynomial is not time-like fail with a velocity-guard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub t0: f64,
    pub coeffs: Vec<Vec3>,
    pub mass: f64,
}

impl Polynomial {
    pub fn new(t0: f64, coeffs: Vec<Vec3>) -> Self {
        Self { t0, coeffs, mass: 1.0 }
    }

    /// Taylor polynomial from derivatives `[q, q', q'', ...]` at `t0`.
    pub fn from_derivatives(t0: f64, derivs: &[Vec3]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 1 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Self::new(t0, coeffs)
    }

    /// `l`-th derivative at `t`.
    pub fn derivative(&self, l: usize, t: f64) -> Vec3 {
        let dt = t - self.t0;
        let mut acc = Vec3::zeros();
        for k in (l..self.coeffs.len()).rev() {
            let falling: f64 = ((k - l + 1)..=k).map(|j| j as f64).product();
            acc = acc * dt + self.coeffs[k] * falling;
        }
        acc
    }
}

impl Worldline for Polynomial {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        let v = self.derivative(1, t);
        check_speed(t, &v)?;
        Ok(WorldlinePoint { q: self.derivative(0, t), v, a: self.derivative(2, t) })
    }
    fn mass(&self) -> f64 {
        self.mass
    }
    fn exact_derivative(&self, order: usize, t: f64, _forward: bool) -> Result<Option<Vec3>> {
        Ok(Some(self.derivative(order, t)))
    }
}

/// Time reversal `t ↦ -t` of another worldline.
#[derive(Debug, Clone)]
pub struct Reversed<W>(pub W);

impl<W: Worldline> Worldline for Reversed<W> {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        let p = self.0.point(-t)?;
        Ok(WorldlinePoint { q: p.q, v: -p.v, a: p.a })
    }
    fn mass(&self) -> f64 {
        self.0.mass()
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        self.0.smooth_span(-t, !forward)
    }
    fn one_sided(&self, t: f64, forward: bool) -> Result<WorldlinePoint> {
        let p = self.0.one_sided(-t, !forward)?;
        Ok(WorldlinePoint { q: p.q, v: -p.v, a: p.a })
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        Ok(self.0.exact_derivative(order, -t, !forward)?.map(|d| d * sign))
    }
}

/// `before` for `t < switch`, `after` for `t ≥ switch`.
#[derive(Debug, Clone)]
pub struct Spliced {
    pub before: Arc<dyn Worldline>,
    pub after: Arc<dyn Worldline>,
    pub switch: f64,
}

impl Worldline for Spliced {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        if t < self.switch {
            self.before.point(t)
        } else {
            self.after.point(t)
        }
    }
    fn mass(&self) -> f64 {
        self.after.mass()
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        let (inner, gap) = if t < self.switch || (t == self.switch && !forward) {
            (self.before.smooth_span(t, forward), if forward { self.switch - t } else { f64::INFINITY })
        } else {
            (self.after.smooth_span(t, forward), if forward { f64::INFINITY } else { t - self.switch })
        };
        inner.min(if gap > 0.0 { gap } else { f64::INFINITY })
    }
    fn one_sided(&self, t: f64, forward: bool) -> Result<WorldlinePoint> {
        if t < self.switch || (t == self.switch && !forward) {
            self.before.one_sided(t, forward)
        } else {
            self.after.one_sided(t, forward)
        }
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        if t < self.switch || (t == self.switch && !forward) {
            self.before.exact_derivative(order, t, forward)
        } else {
            self.after.exact_derivative(order, t, forward)
        }
    }
}

/// `base` with an extra constant velocity `dv` picked up at `t = 0`:
/// `q(t) = q_base(t) + dv t`.
#[derive(Debug, Clone)]
pub struct Kicked<W> {
    pub base: W,
    pub dv: Vec3,
}

impl<W: Worldline> Kicked<W> {
    /// Kick that changes the initial momentum by `dp`.
    pub fn with_momentum_change(base: W, dp: &Vec3) -> Result<Self> {
        let m = base.mass();
        let p0 = base.momentum(0.0)?;
        let dv = relativistic_velocity(&(p0 + dp), m)? - relativistic_velocity(&p0, m)?;
        Ok(Self { base, dv })
    }
}

impl<W: Worldline> Worldline for Kicked<W> {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        let p = self.base.point(t)?;
        let v = p.v + self.dv;
        check_speed(t, &v)?;
        Ok(WorldlinePoint { q: p.q + self.dv * t, v, a: p.a })
    }
    fn mass(&self) -> f64 {
        self.base.mass()
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        self.base.smooth_span(t, forward)
    }
    fn one_sided(&self, t: f64, forward: bool) -> Result<WorldlinePoint> {
        let p = self.base.one_sided(t, forward)?;
        Ok(WorldlinePoint { q: p.q + self.dv * t, v: p.v + self.dv, a: p.a })
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        Ok(self.base.exact_derivative(order, t, forward)?.map(|d| match order {
            0 => d + self.dv * t,
            1 => d + self.dv,
            _ => d,
        }))
    }
}

/// `inner` delayed by `offset`: `q(t) = q_inner(t + offset)`.
#[derive(Debug, Clone)]
pub struct Shifted<W> {
    pub inner: W,
    pub offset: f64,
}

impl<W: Worldline> Worldline for Shifted<W> {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        self.inner.point(t + self.offset)
    }
    fn mass(&self) -> f64 {
        self.inner.mass()
    }
    fn momentum(&self, t: f64) -> Result<Vec3> {
        self.inner.momentum(t + self.offset)
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        self.inner.smooth_span(t + self.offset, forward)
    }
    fn one_sided(&self, t: f64, forward: bool) -> Result<WorldlinePoint> {
        self.inner.one_sided(t + self.offset, forward)
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        self.inner.exact_derivative(order, t + self.offset, forward)
    }
}

/// `inner` with its mass replaced.
#[derive(Debug, Clone)]
pub struct WithMass<W> {
    pub inner: W,
    pub mass: f64,
}

impl<W: Worldline> Worldline for WithMass<W> {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        self.inner.point(t)
    }
    fn mass(&self) -> f64 {
        self.mass
    }
    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        self.inner.smooth_span(t, forward)
    }
    fn one_sided(&self, t: f64, forward: bool) -> Result<WorldlinePoint> {
        self.inner.one_sided(t, forward)
    }
    fn exact_derivative(&self, order: usize, t: f64, forward: bool) -> Result<Option<Vec3>> {
        self.inner.exact_derivative(order, t, forward)
    }
}

/// Kinetic energy `m (γ - 1)`.
pub fn kinetic_energy(v: &Vec3, mass: f64) -> f64 {
    mass * (lorentz_gamma(v) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_derivatives_agree_with_point_and_differences() {
        let osc = Oscillating::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.2, 0.1, 0.0), 1.3, 0.4).unwrap();
        let circ = Circular::new(Vec3::zeros(), 0.5, 0.7).unwrap();
        let kicked = Kicked { base: circ, dv: Vec3::new(0.0, 0.0, 0.1) };
        let lines: Vec<Box<dyn Worldline>> =
            vec![Box::new(osc), Box::new(circ), Box::new(Reversed(circ)), Box::new(kicked)];
        let (t, h) = (0.37, 1e-3);
        for w in &lines {
            let p = w.point(t).unwrap();
            let d = |l| w.exact_derivative(l, t, true).unwrap().unwrap();
            assert!((d(0) - p.q).norm() < 1e-14);
            assert!((d(1) - p.v).norm() < 1e-14);
            assert!((d(2) - p.a).norm() < 1e-14);
            let jerk = (w.point(t + h).unwrap().a - w.point(t - h).unwrap().a) / (2.0 * h);
            assert!((d(3) - jerk).norm() < 1e-6);
        }
    }

    #[test]
    fn static_query() {
        let s = Static::new(Vec3::new(1.0, 2.0, 3.0));
        let (q, v, a) = query(&s, 17.0).unwrap();
        assert_eq!(q, Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(v, Vec3::zeros());
        assert_eq!(a, Vec3::zeros());
    }

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial::from_derivatives(
            0.0,
            &[Vec3::x(), Vec3::y() * 0.1, Vec3::z() * 0.4, Vec3::x() * 0.6],
        );
        assert!((p.derivative(2, 0.0) - Vec3::z() * 0.4).norm() < 1e-15);
        assert!((p.derivative(3, 0.5) - Vec3::x() * 0.6).norm() < 1e-15);
        assert_eq!(p.derivative(4, 0.5), Vec3::zeros());
        let q = p.point(0.5).unwrap().q;
        let expect = Vec3::x() + Vec3::y() * 0.05 + Vec3::z() * 0.05 + Vec3::x() * (0.6 * 0.125 / 6.0);
        assert!((q - expect).norm() < 1e-15);
    }

    #[test]
    fn superluminal_polynomial_is_rejected() {
        let p = Polynomial::new(0.0, vec![Vec3::zeros(), Vec3::zeros(), Vec3::x()]);
        assert!(p.point(0.1).is_ok());
        assert!(matches!(p.point(2.0), Err(Error::VelocityGuard { .. })));
    }

    #[test]
    fn circular_kinematics() {
        let c = Circular::new(Vec3::zeros(), 2.0, 0.25).unwrap();
        let p = c.point(1.3).unwrap();
        assert!((p.q.norm() - 2.0).abs() < 1e-14);
        assert!((p.v.norm() - 0.5).abs() < 1e-14);
        assert!((p.a.norm() - 0.125).abs() < 1e-14);
        assert!(p.q.dot(&p.v).abs() < 1e-14);
    }
}
