//! Fixed-order quadrature rules: Gauss-Legendre on intervals and product
//! rules on the unit sphere and on balls.

use std::f64::consts::PI;

use crate::Vec3;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]` and split into `panels` equal pieces.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Product rule on the unit sphere: Gauss-Legendre in `cos θ` times the
/// equispaced trapezoid rule in `φ`. With `n` polar nodes and `2n` azimuthal
/// nodes it integrates spherical harmonics up to degree `2n - 1` exactly.
/// Weights sum to `4π`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n_polar: usize) -> Self {
        Self::with_azimuth(n_polar, 2 * n_polar)
    }

    pub fn with_azimuth(n_polar: usize, n_azimuth: usize) -> Self {
        let (ct, wt) = gauss_legendre(n_polar);
        let dphi = 2.0 * PI / n_azimuth as f64;
        let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).sqrt();
            for k in 0..n_azimuth {
                // Half-step offset keeps nodes off the coordinate planes.
                let phi = (k as f64 + 0.5) * dphi;
                nodes.push(Vec3::new(s * phi.cos(), s * phi.sin(), *c));
                weights.push(w * dphi);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Mean of `f` over the unit sphere.
    pub fn mean<F: FnMut(&Vec3) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(n, w)| w * f(n)).sum::<f64>() / (4.0 * PI)
    }
}

/// Orthonormal pair spanning the plane perpendicular to `axis` (unit).
pub fn perpendicular_basis(axis: &Vec3) -> (Vec3, Vec3) {
    let seed = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = (seed - axis * axis.dot(&seed)).normalize();
    let w = axis.cross(&u);
    (u, w)
}

/// `n` nearly uniform unit vectors on a golden-angle spiral.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit_and_balanced() {
        let pts = fibonacci_sphere(200);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-14));
        let mean: Vec3 = pts.iter().sum::<Vec3>() / 200.0;
        assert!(mean.norm() < 1e-2);
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        // Exact up to degree 9.
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((i - 2.0 / 9.0).abs() < 1e-14);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_nodes_are_sorted_and_inside() {
        let (x, w) = gauss_legendre(64);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(x.iter().all(|v| v.abs() < 1.0));
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn composite_rule_integrates_exp() {
        let (x, w) = composite_gauss_legendre(0.0, 2.0, 4, 8);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((i - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn sphere_rule_moments() {
        let r = SphereRule::new(6);
        assert!((r.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
        // <z²> = 1/3, <x² y²> = 1/15 on the unit sphere.
        assert!((r.mean(|n| n.z * n.z) - 1.0 / 3.0).abs() < 1e-14);
        assert!((r.mean(|n| n.x * n.x * n.y * n.y) - 1.0 / 15.0).abs() < 1e-14);
        assert!(r.mean(|n| n.x * n.y * n.z).abs() < 1e-15);
    }
}
