//! Rigid, compactly supported charge densities and convolution against them.

use std::f64::consts::PI;
use std::ops::{AddAssign, Mul};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss_legendre, SphereRule};
use crate::Vec3;

/// Radial shape of a density, as a function of `s = r / R` on `[0, 1)`.
#[derive(Debug, Clone)]
pub enum RadialProfile {
    /// `exp(-1 / (1 - s²))`, the standard C^∞ bump.
    Bump,
    /// Samples on a uniform grid over `[0, 1]`, interpolated with cubic
    /// Hermite splines; the last sample must be zero.
    Tabulated { values: Vec<f64>, slopes: Vec<f64> },
}

impl RadialProfile {
    fn eval(&self, s: f64) -> f64 {
        if !(0.0..1.0).contains(&s) {
            return 0.0;
        }
        match self {
            RadialProfile::Bump => (-1.0 / (1.0 - s * s)).exp(),
            RadialProfile::Tabulated { values, slopes } => {
                let n = values.len() - 1;
                let h = 1.0 / n as f64;
                let k = ((s / h) as usize).min(n - 1);
                let u = s / h - k as f64;
                let (h00, h10, h01, h11) = (
                    (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
                    u * (1.0 - u) * (1.0 - u),
                    u * u * (3.0 - 2.0 * u),
                    u * u * (u - 1.0),
                );
                h00 * values[k] + h10 * h * slopes[k] + h01 * values[k + 1] + h11 * h * slopes[k + 1]
            }
        }
    }
}

/// Quadrature resolution used when convolving with a mollifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallResolution {
    pub radial_panels: usize,
    pub radial_order: usize,
    pub polar: usize,
}

impl Default for BallResolution {
    fn default() -> Self {
        Self { radial_panels: 4, radial_order: 8, polar: 6 }
    }
}

impl BallResolution {
    /// Cheaper rule for use inside time-stepping loops.
    pub fn coarse() -> Self {
        Self { radial_panels: 2, radial_order: 4, polar: 4 }
    }
}

/// A smooth, spherically symmetric charge density `ρ` supported on a ball of
/// radius `R`, normalised so that `∫ρ = total_charge`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    profile: RadialProfile,
    radius: f64,
    total_charge: f64,
    amplitude: f64,
    resolution: BallResolution,
    ball: Arc<BallNodes>,
}

#[derive(Debug)]
struct BallNodes {
    offsets: Vec<Vec3>,
    weights: Vec<f64>,
}

impl Mollifier {
    pub fn bump(radius: f64, total_charge: f64) -> Result<Self> {
        Self::from_profile(RadialProfile::Bump, radius, total_charge, BallResolution::default())
    }

    pub fn from_profile(
        profile: RadialProfile,
        radius: f64,
        total_charge: f64,
        resolution: BallResolution,
    ) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("mollifier radius must be positive, got {radius}")));
        }
        if !total_charge.is_finite() {
            return Err(Error::Domain("total charge must be finite".into()));
        }
        let mut m = Self {
            profile,
            radius,
            total_charge,
            amplitude: 0.0,
            resolution,
            ball: Arc::new(BallNodes { offsets: Vec::new(), weights: Vec::new() }),
        };
        m.normalise();
        Ok(m)
    }

    pub fn with_resolution(&self, resolution: BallResolution) -> Self {
        let mut m = self.clone();
        m.resolution = resolution;
        m.normalise();
        m
    }

    /// Fixes the amplitude against the ball rule itself, so the discrete
    /// total charge is exact at every resolution.
    fn normalise(&mut self) {
        let res = self.resolution;
        let (r, wr) = composite_gauss_legendre(0.0, self.radius, res.radial_panels, res.radial_order);
        let moment: f64 = r.iter().zip(&wr).map(|(r, w)| w * r * r * self.profile.eval(r / self.radius)).sum();
        self.amplitude = self.total_charge / (4.0 * PI * moment);
        self.ball = Arc::new(self.build_ball());
    }

    fn build_ball(&self) -> BallNodes {
        let res = self.resolution;
        let (r, wr) = composite_gauss_legendre(0.0, self.radius, res.radial_panels, res.radial_order);
        let sphere = SphereRule::new(res.polar);
        let mut offsets = Vec::with_capacity(r.len() * sphere.len());
        let mut weights = Vec::with_capacity(r.len() * sphere.len());
        for (ri, wi) in r.iter().zip(&wr) {
            let radial = wi * ri * ri * self.density(*ri);
            for (n, wn) in sphere.nodes.iter().zip(&sphere.weights) {
                offsets.push(n * *ri);
                weights.push(radial * wn);
            }
        }
        BallNodes { offsets, weights }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn total_charge(&self) -> f64 {
        self.total_charge
    }

    pub fn resolution(&self) -> BallResolution {
        self.resolution
    }

    /// `ρ` at distance `r` from the center; zero for `r ≥ R`.
    pub fn density(&self, r: f64) -> f64 {
        self.amplitude * self.profile.eval(r / self.radius)
    }

    /// Total charge as seen by the fixed-order ball rule.
    pub fn quadrature_total(&self) -> f64 {
        self.ball.weights.iter().sum()
    }

    /// Offsets and weights `ρ(y) dV` of the ball rule.
    pub fn nodes(&self) -> impl Iterator<Item = (&Vec3, f64)> {
        self.ball.offsets.iter().zip(self.ball.weights.iter().copied())
    }

    /// The density `ρ * ρ`, supported on radius `2R`.
    ///
    /// This is the kernel for the force on a smeared charge in the field of a
    /// smeared charge, where the field is already `ρ * f`.
    pub fn autoconvolution(&self) -> Result<Mollifier> {
        const CELLS: usize = 800;
        let r_max = self.radius;
        // C(u) = ∫₀ᵘ w ρ(w) dw on a fine grid.
        let du = r_max / CELLS as f64;
        let (gx, gw) = crate::quadrature::gauss_legendre(8);
        let mut cumulative = vec![0.0; CELLS + 1];
        for k in 0..CELLS {
            let lo = k as f64 * du;
            let cell: f64 = gx
                .iter()
                .zip(&gw)
                .map(|(x, w)| {
                    let u = lo + 0.5 * du * (x + 1.0);
                    0.5 * du * w * u * self.density(u)
                })
                .sum();
            cumulative[k + 1] = cumulative[k] + cell;
        }
        let cum = |u: f64| -> f64 {
            let u = u.clamp(0.0, r_max);
            let k = ((u / du) as usize).min(CELLS - 1);
            let lo = k as f64 * du;
            // Integrate the partial cell exactly enough with a short GL rule.
            let part: f64 = gx
                .iter()
                .zip(&gw)
                .map(|(x, w)| {
                    let v = lo + 0.5 * (u - lo) * (x + 1.0);
                    0.5 * (u - lo) * w * v * self.density(v)
                })
                .sum();
            cumulative[k] + part
        };

        const SAMPLES: usize = 400;
        let (rx, rw) = composite_gauss_legendre(0.0, r_max, 8, 8);
        let mut values = vec![0.0; SAMPLES + 1];
        for (k, value) in values.iter_mut().enumerate() {
            let s = 2.0 * r_max * k as f64 / SAMPLES as f64;
            *value = if k == 0 {
                4.0 * PI * rx.iter().zip(&rw).map(|(r, w)| w * r * r * self.density(*r).powi(2)).sum::<f64>()
            } else if k == SAMPLES {
                0.0
            } else {
                2.0 * PI / s
                    * rx
                        .iter()
                        .zip(&rw)
                        .map(|(r, w)| w * r * self.density(*r) * (cum(s + r) - cum((s - r).abs())))
                        .sum::<f64>()
            };
        }
        let h = 1.0 / SAMPLES as f64;
        let mut slopes = vec![0.0; SAMPLES + 1];
        for k in 1..SAMPLES {
            slopes[k] = (values[k + 1] - values[k - 1]) / (2.0 * h);
        }
        Mollifier::from_profile(
            RadialProfile::Tabulated { values, slopes },
            2.0 * r_max,
            self.total_charge * self.total_charge,
            self.resolution,
        )
    }
}

/// Convolution `(ρ * g)(x) = ∫ ρ(y) g(x - y) d³y` by the mollifier's
/// fixed-order ball rule. Any error from `g` (a singular shell or the charge
/// itself inside the ball) is returned unchanged.
pub fn mollifier_quadrature<T, F>(rho: &Mollifier, mut g: F, x: &Vec3) -> Result<T>
where
    T: Default + AddAssign + Mul<f64, Output = T>,
    F: FnMut(&Vec3) -> Result<T>,
{
    let mut acc = T::default();
    for (y, w) in rho.nodes() {
        if w == 0.0 {
            continue;
        }
        acc += g(&(x - y))? * w;
    }
    Ok(acc)
}
