//! Source-free fields: analytic waves and Kirchhoff propagation of tabulated
//! Cauchy data by spherical means.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::EMFieldValue;
use crate::quadrature::{perpendicular_basis, SphereRule};
use crate::Vec3;

/// A solution of the homogeneous Maxwell equations, given by its data.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FreeFieldSpec {
    #[default]
    Zero,
    /// `E = A ê cos(k·x − |k| t + φ)`, `B = k̂ × E`.
    PlaneWave { k: Vec3, polarization: Vec3, amplitude: f64, phase: f64 },
    /// Plane-fronted pulse `E = A ê exp(−(d̂·(x − c) − t)² / 2w²)`, `B = d̂ × E`.
    GaussianPulse {
        center: Vec3,
        width: f64,
        direction: Vec3,
        amplitude: f64,
        #[serde(default)]
        polarization: Option<Vec3>,
    },
    /// Initial field and its time derivative on a uniform grid.
    Tabulated(Arc<CauchyGrid>),
}

impl FreeFieldSpec {
    pub fn plane_wave(k: Vec3, polarization: Vec3, amplitude: f64, phase: f64) -> Result<Self> {
        let spec = Self::PlaneWave { k, polarization: polarization.normalize(), amplitude, phase };
        spec.validate()?;
        Ok(spec)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::PlaneWave { k, polarization, amplitude, phase } => {
                let kn = k.norm();
                if !(kn > 0.0 && kn.is_finite()) || !amplitude.is_finite() || !phase.is_finite() {
                    return Err(Error::Config("plane wave needs a finite nonzero k".into()));
                }
                if (polarization.norm() - 1.0).abs() > 1e-12 || polarization.dot(k).abs() > 1e-12 * kn {
                    return Err(Error::Config("plane-wave polarization must be a unit vector orthogonal to k".into()));
                }
                Ok(())
            }
            Self::GaussianPulse { width, direction, polarization, .. } => {
                if !(*width > 0.0) || !(direction.norm() > 0.0) {
                    return Err(Error::Config("gaussian pulse needs positive width and a direction".into()));
                }
                if let Some(e) = polarization {
                    if e.dot(&direction.normalize()).abs() > 1e-12 * e.norm() {
                        return Err(Error::Config("pulse polarization must be orthogonal to its direction".into()));
                    }
                }
                Ok(())
            }
            Self::Tabulated(grid) => grid.validate(),
        }
    }

    /// Analytic value and time derivative; `None` for tabulated data.
    fn analytic(&self, x: &Vec3, t: f64) -> Option<CauchyPoint> {
        match self {
            Self::Zero => Some(CauchyPoint::default()),
            Self::PlaneWave { k, polarization, amplitude, phase } => {
                let omega = k.norm();
                let khat = k / omega;
                let arg = k.dot(x) - omega * t + phase;
                let (s, c) = arg.sin_cos();
                let e = polarization * (amplitude * c);
                let b = khat.cross(&e);
                let de = polarization * (-amplitude * s);
                let db = khat.cross(&de);
                // d/dx_j of cos(arg) = -sin(arg) k_j; d/dt = sin(arg) ω.
                Some(CauchyPoint::from_profile(e, b, de, db, k, -omega))
            }
            Self::GaussianPulse { center, width, direction, amplitude, polarization } => {
                let d = direction.normalize();
                let pol = polarization.map(|p| p.normalize()).unwrap_or_else(|| perpendicular_basis(&d).0);
                let s = d.dot(&(x - center)) - t;
                let g = (-s * s / (2.0 * width * width)).exp();
                let dg = -s / (width * width) * g;
                let e = pol * (amplitude * g);
                let b = d.cross(&e);
                let de = pol * (amplitude * dg);
                let db = d.cross(&de);
                Some(CauchyPoint::from_profile(e, b, de, db, &d, -1.0))
            }
            Self::Tabulated(_) => None,
        }
    }

    /// Samples this field and its time derivative at `t = 0` on a grid.
    pub fn tabulate(&self, origin: Vec3, spacing: f64, dims: [usize; 3]) -> Result<CauchyGrid> {
        CauchyGrid::sample(origin, spacing, dims, |y| {
            let p = self
                .analytic(y, 0.0)
                .ok_or_else(|| Error::Config("cannot re-tabulate tabulated data".into()))?;
            Ok((p.field(), p.dt_field()))
        })
    }
}

/// Field, spatial gradient and time derivative of the six components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CauchyPoint {
    pub value: [f64; 6],
    pub grad: [[f64; 3]; 6],
    pub dt: [f64; 6],
}

impl CauchyPoint {
    /// For fields of the form `f(x, t) = F(ξ)`, `ξ = k·x + ω t`: `de`, `db`
    /// are `dF/dξ`.
    fn from_profile(e: Vec3, b: Vec3, de: Vec3, db: Vec3, k: &Vec3, omega: f64) -> Self {
        let mut p = CauchyPoint::default();
        for i in 0..3 {
            p.value[i] = e[i];
            p.value[i + 3] = b[i];
            p.dt[i] = de[i] * omega;
            p.dt[i + 3] = db[i] * omega;
            for j in 0..3 {
                p.grad[i][j] = de[i] * k[j];
                p.grad[i + 3][j] = db[i] * k[j];
            }
        }
        p
    }

    pub fn field(&self) -> EMFieldValue {
        let v = &self.value;
        EMFieldValue::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]))
    }

    pub fn dt_field(&self) -> EMFieldValue {
        let v = &self.dt;
        EMFieldValue::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]))
    }
}

/// Anything that can supply Cauchy data at `t = 0`.
pub trait CauchySource {
    fn cauchy(&self, y: &Vec3) -> Result<CauchyPoint>;
}

/// Analytic specs viewed as Cauchy data, to force the quadrature path.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticCauchy<'a>(pub &'a FreeFieldSpec);

impl CauchySource for AnalyticCauchy<'_> {
    fn cauchy(&self, y: &Vec3) -> Result<CauchyPoint> {
        match self.0 {
            FreeFieldSpec::Tabulated(grid) => grid.cauchy(y),
            spec => Ok(spec.analytic(y, 0.0).expect("analytic spec")),
        }
    }
}

/// Uniform grid of Cauchy data, interpolated with 4-point Lagrange stencils
/// along each axis. Node order is x fastest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CauchyGrid {
    pub origin: Vec3,
    pub spacing: f64,
    pub dims: [usize; 3],
    /// Per node: `Ex Ey Ez Bx By Bz` then their time derivatives.
    pub values: Vec<[f64; 12]>,
}

impl CauchyGrid {
    pub fn sample<F>(origin: Vec3, spacing: f64, dims: [usize; 3], mut f: F) -> Result<Self>
    where
        F: FnMut(&Vec3) -> Result<(EMFieldValue, EMFieldValue)>,
    {
        let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let y = origin + Vec3::new(i as f64, j as f64, k as f64) * spacing;
                    let (f0, f1) = f(&y)?;
                    let mut node = [0.0; 12];
                    node[..6].copy_from_slice(&f0.components());
                    node[6..].copy_from_slice(&f1.components());
                    values.push(node);
                }
            }
        }
        let g = Self { origin, spacing, dims, values };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0) || self.dims.iter().any(|&d| d < 4) {
            return Err(Error::Config("Cauchy grid needs positive spacing and at least 4 nodes per axis".into()));
        }
        if self.values.len() != self.dims.iter().product::<usize>() {
            return Err(Error::Config("Cauchy grid value count does not match its dimensions".into()));
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("Cauchy grid values must be finite".into()));
        }
        Ok(())
    }

    fn node(&self, i: usize, j: usize, k: usize) -> &[f64; 12] {
        &self.values[i + self.dims[0] * (j + self.dims[1] * k)]
    }
}

/// Lagrange weights and their derivatives for nodes -1, 0, 1, 2 at `u ∈ [0, 1]`.
fn lagrange4(u: f64) -> ([f64; 4], [f64; 4]) {
    let (a, b, c, d) = (u + 1.0, u, u - 1.0, u - 2.0);
    let w = [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0];
    let dw = [
        -(c * d + b * d + b * c) / 6.0,
        (c * d + a * d + a * c) / 2.0,
        -(b * d + a * d + a * b) / 2.0,
        (b * c + a * c + a * b) / 6.0,
    ];
    (w, dw)
}

impl CauchySource for CauchyGrid {
    fn cauchy(&self, y: &Vec3) -> Result<CauchyPoint> {
        let mut base = [0usize; 3];
        let mut w = [[0.0; 4]; 3];
        let mut dw = [[0.0; 4]; 3];
        for ax in 0..3 {
            let s = (y[ax] - self.origin[ax]) / self.spacing;
            let i = s.floor();
            if !(i >= 1.0 && i + 2.0 < self.dims[ax] as f64) {
                return Err(Error::Range(format!("point {y:?} leaves the tabulated Cauchy data")));
            }
            base[ax] = i as usize - 1;
            (w[ax], dw[ax]) = lagrange4(s - i);
        }
        let mut p = CauchyPoint::default();
        for c in 0..4 {
            for b in 0..4 {
                for a in 0..4 {
                    let node = self.node(base[0] + a, base[1] + b, base[2] + c);
                    let wv = w[0][a] * w[1][b] * w[2][c];
                    let wg = [dw[0][a] * w[1][b] * w[2][c], w[0][a] * dw[1][b] * w[2][c], w[0][a] * w[1][b] * dw[2][c]];
                    for comp in 0..6 {
                        p.value[comp] += wv * node[comp];
                        p.dt[comp] += wv * node[comp + 6];
                        for ax in 0..3 {
                            p.grad[comp][ax] += wg[ax] * node[comp];
                        }
                    }
                }
            }
        }
        for g in p.grad.iter_mut().flatten() {
            *g /= self.spacing;
        }
        Ok(p)
    }
}

/// Kirchhoff's formula per Cartesian component:
/// `u(x, t) = M(u₀) + |t| M(n·∇u₀) + t M(u₁)` with `M` the mean over the
/// sphere of radius `|t|` about `x`.
pub fn kirchhoff_propagate<S: CauchySource + ?Sized>(
    source: &S,
    x: &Vec3,
    t: f64,
    rule: &SphereRule,
) -> Result<EMFieldValue> {
    let radius = t.abs();
    let mut acc = [0.0; 6];
    for (n, w) in rule.nodes.iter().zip(&rule.weights) {
        let p = source.cauchy(&(x + n * radius))?;
        for c in 0..6 {
            let radial = p.grad[c][0] * n.x + p.grad[c][1] * n.y + p.grad[c][2] * n.z;
            acc[c] += w * (p.value[c] + radius * radial + t * p.dt[c]);
        }
    }
    let s = 1.0 / (4.0 * std::f64::consts::PI);
    Ok(EMFieldValue::new(Vec3::new(acc[0], acc[1], acc[2]) * s, Vec3::new(acc[3], acc[4], acc[5]) * s))
}

/// Default sphere rule for Kirchhoff propagation.
pub const DEFAULT_SPHERE_ORDER: usize = 16;

fn default_rule() -> &'static SphereRule {
    static RULE: OnceLock<SphereRule> = OnceLock::new();
    RULE.get_or_init(|| SphereRule::new(DEFAULT_SPHERE_ORDER))
}

/// How [`propagate_free_field_with`] evaluates a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeFieldOptions {
    /// Use Kirchhoff quadrature even for analytic specs.
    pub force_quadrature: bool,
    pub sphere_order: usize,
}

impl Default for FreeFieldOptions {
    fn default() -> Self {
        Self { force_quadrature: false, sphere_order: DEFAULT_SPHERE_ORDER }
    }
}

pub fn propagate_free_field(spec: &FreeFieldSpec, x: &Vec3, t: f64) -> Result<EMFieldValue> {
    propagate_free_field_with(spec, x, t, &FreeFieldOptions::default())
}

pub fn propagate_free_field_with(
    spec: &FreeFieldSpec,
    x: &Vec3,
    t: f64,
    options: &FreeFieldOptions,
) -> Result<EMFieldValue> {
    if spec.is_zero() {
        return Ok(EMFieldValue::ZERO);
    }
    let quadrature = options.force_quadrature || matches!(spec, FreeFieldSpec::Tabulated(_));
    if !quadrature {
        return Ok(spec.analytic(x, t).expect("analytic spec").field());
    }
    let owned;
    let rule = if options.sphere_order == DEFAULT_SPHERE_ORDER {
        default_rule()
    } else {
        owned = SphereRule::new(options.sphere_order);
        &owned
    };
    kirchhoff_propagate(&AnalyticCauchy(spec), x, t, rule)?.checked()
}
