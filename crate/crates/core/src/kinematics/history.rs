//! Sampled trajectories with quintic Hermite dense output.

use std::io::{Read, Write};
use std::sync::Arc;

use super::{check_speed, Worldline, WorldlinePoint};
use crate::error::{Error, Result};
use crate::state::{acceleration_from_force, momentum_from_velocity, relativistic_velocity};
use crate::Vec3;

/// One stored sample: time, position, momentum and acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryNode {
    pub t: f64,
    pub q: Vec3,
    pub p: Vec3,
    pub a: Vec3,
}

/// How a history continues beyond its first or last sample.
#[derive(Debug, Clone, Default)]
pub enum Extension {
    /// Queries outside the samples fail with a range error.
    #[default]
    None,
    /// Straight line with the boundary velocity.
    Inertial,
    /// At rest at the boundary position.
    Frozen,
    /// Constant-acceleration Taylor extrapolation; used as the provisional
    /// future while a history is being integrated.
    Extrapolate,
    /// Another worldline takes over.
    Prescribed(Arc<dyn Worldline>),
}

/// Worldline given by samples and extensions on either side.
#[derive(Debug, Clone)]
pub struct TrajectoryHistory {
    mass: f64,
    nodes: Vec<HistoryNode>,
    velocities: Vec<Vec3>,
    pub past: Extension,
    pub future: Extension,
}

impl TrajectoryHistory {
    pub fn new(mass: f64, past: Extension, future: Extension) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { mass, nodes: Vec::new(), velocities: Vec::new(), past, future })
    }

    /// Single state at `t0` extended inertially both ways.
    pub fn inertial(mass: f64, t0: f64, q: Vec3, p: Vec3) -> Result<Self> {
        let mut h = Self::new(mass, Extension::Inertial, Extension::Inertial)?;
        h.push(t0, q, p, Vec3::zeros())?;
        Ok(h)
    }

    /// Samples another worldline on `[t0, t1]` with step close to `dt`.
    pub fn sample<W: Worldline + ?Sized>(
        traj: &W,
        t0: f64,
        t1: f64,
        dt: f64,
        past: Extension,
        future: Extension,
    ) -> Result<Self> {
        if !(t1 >= t0 && dt > 0.0) {
            return Err(Error::Domain("sampling needs t1 ≥ t0 and dt > 0".into()));
        }
        let mut h = Self::new(traj.mass(), past, future)?;
        let steps = (((t1 - t0) / dt).ceil() as usize).max(1);
        for k in 0..=steps {
            let t = if k == steps { t1 } else { t0 + (t1 - t0) * k as f64 / steps as f64 };
            let s = traj.point(t)?;
            h.push(t, s.q, momentum_from_velocity(&s.v, h.mass)?, s.a)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, t: f64, q: Vec3, p: Vec3, a: Vec3) -> Result<()> {
        if let Some(last) = self.nodes.last() {
            if !(t > last.t) {
                return Err(Error::Domain(format!("history times must increase: {t} after {}", last.t)));
            }
        }
        if !(t.is_finite() && q.iter().chain(p.iter()).chain(a.iter()).all(|c| c.is_finite())) {
            return Err(Error::Domain(format!("non-finite history sample at t={t}")));
        }
        let v = relativistic_velocity(&p, self.mass)?;
        check_speed(t, &v)?;
        self.nodes.push(HistoryNode { t, q, p, a });
        self.velocities.push(v);
        Ok(())
    }

    /// Drops every sample after `t`.
    pub fn truncate_after(&mut self, t: f64) {
        let keep = self.nodes.partition_point(|n| n.t <= t);
        self.nodes.truncate(keep);
        self.velocities.truncate(keep);
    }

    pub fn nodes(&self) -> &[HistoryNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first_time(&self) -> Option<f64> {
        self.nodes.first().map(|n| n.t)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.nodes.last().map(|n| n.t)
    }

    pub fn last(&self) -> Option<&HistoryNode> {
        self.nodes.last()
    }

    fn node_point(&self, k: usize) -> WorldlinePoint {
        WorldlinePoint { q: self.nodes[k].q, v: self.velocities[k], a: self.nodes[k].a }
    }

    fn extend(&self, ext: &Extension, k: usize, t: f64) -> Result<WorldlinePoint> {
        let n = self.node_point(k);
        let dt = t - self.nodes[k].t;
        match ext {
            Extension::None => Err(Error::Range(format!(
                "t={t} outside sampled history [{}, {}]",
                self.nodes[0].t,
                self.nodes[self.nodes.len() - 1].t
            ))),
            Extension::Inertial => Ok(WorldlinePoint { q: n.q + n.v * dt, v: n.v, a: Vec3::zeros() }),
            Extension::Frozen => Ok(WorldlinePoint::at_rest(n.q)),
            Extension::Extrapolate => {
                let v = n.v + n.a * dt;
                check_speed(t, &v)?;
                Ok(WorldlinePoint { q: n.q + n.v * dt + n.a * (0.5 * dt * dt), v, a: n.a })
            }
            Extension::Prescribed(w) => w.point(t),
        }
    }

    /// Dense output on segment `k` (between nodes `k` and `k+1`).
    fn hermite(&self, k: usize, t: f64) -> WorldlinePoint {
        let (n0, n1) = (&self.nodes[k], &self.nodes[k + 1]);
        let (v0, v1) = (self.velocities[k], self.velocities[k + 1]);
        let h = n1.t - n0.t;
        let u = (t - n0.t) / h;
        let (u2, u3) = (u * u, u * u * u);
        let (u4, u5) = (u3 * u, u3 * u2);
        let basis = [
            1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5,
            u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5,
            0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5),
            10.0 * u3 - 15.0 * u4 + 6.0 * u5,
            -4.0 * u3 + 7.0 * u4 - 3.0 * u5,
            0.5 * (u3 - 2.0 * u4 + u5),
        ];
        let d1 = [
            -30.0 * u2 + 60.0 * u3 - 30.0 * u4,
            1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4,
            0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4),
            30.0 * u2 - 60.0 * u3 + 30.0 * u4,
            -12.0 * u2 + 28.0 * u3 - 15.0 * u4,
            0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4),
        ];
        let d2 = [
            -60.0 * u + 180.0 * u2 - 120.0 * u3,
            -36.0 * u + 96.0 * u2 - 60.0 * u3,
            0.5 * (2.0 - 18.0 * u + 36.0 * u2 - 20.0 * u3),
            60.0 * u - 180.0 * u2 + 120.0 * u3,
            -24.0 * u + 84.0 * u2 - 60.0 * u3,
            0.5 * (6.0 * u - 24.0 * u2 + 20.0 * u3),
        ];
        let data = [n0.q, v0 * h, n0.a * (h * h), n1.q, v1 * h, n1.a * (h * h)];
        let combine = |w: &[f64; 6]| data.iter().zip(w).fold(Vec3::zeros(), |acc, (d, c)| acc + d * *c);
        WorldlinePoint { q: combine(&basis), v: combine(&d1) / h, a: combine(&d2) / (h * h) }
    }

    /// Writes `t,qx,qy,qz,px,py,pz` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "qx", "qy", "qz", "px", "py", "pz"])?;
        for n in &self.nodes {
            w.write_record(
                [n.t, n.q.x, n.q.y, n.q.z, n.p.x, n.p.y, n.p.z].iter().map(|v| format!("{v:.17e}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `t,qx,qy,qz,px,py,pz` rows; accelerations come from finite
    /// differences of the momenta.
    pub fn read_csv<R: Read>(input: R, mass: f64, past: Extension, future: Extension) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows: Vec<(f64, Vec3, Vec3)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 7 {
                return Err(Error::Config(format!("trajectory row has {} columns, expected 7", rec.len())));
            }
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number {s:?}: {e}"))))
                .collect::<Result<_>>()?;
            rows.push((vals[0], Vec3::new(vals[1], vals[2], vals[3]), Vec3::new(vals[4], vals[5], vals[6])));
        }
        let mut h = Self::new(mass, past, future)?;
        let n = rows.len();
        for k in 0..n {
            let force = if n < 2 {
                Vec3::zeros()
            } else {
                let (i, j) = if k == 0 { (0, 1) } else if k == n - 1 { (n - 2, n - 1) } else { (k - 1, k + 1) };
                (rows[j].2 - rows[i].2) / (rows[j].0 - rows[i].0)
            };
            let (t, q, p) = rows[k];
            h.push(t, q, p, acceleration_from_force(&p, &force, mass))?;
        }
        Ok(h)
    }
}

impl Worldline for TrajectoryHistory {
    fn point(&self, t: f64) -> Result<WorldlinePoint> {
        if self.nodes.is_empty() {
            return Err(Error::Range("empty trajectory history".into()));
        }
        if !t.is_finite() {
            return Err(Error::Domain(format!("non-finite query time {t}")));
        }
        let last = self.nodes.len() - 1;
        if t < self.nodes[0].t {
            return self.extend(&self.past, 0, t);
        }
        if t > self.nodes[last].t {
            return self.extend(&self.future, last, t);
        }
        let k = self.nodes.partition_point(|n| n.t <= t);
        if k == 0 {
            return Ok(self.node_point(0));
        }
        if k > last {
            return Ok(self.node_point(last));
        }
        if self.nodes[k - 1].t == t {
            return Ok(self.node_point(k - 1));
        }
        Ok(self.hermite(k - 1, t))
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    /// Stored momentum at nodes, so node data round-trips exactly.
    fn momentum(&self, t: f64) -> Result<Vec3> {
        let k = self.nodes.partition_point(|n| n.t < t);
        match self.nodes.get(k) {
            Some(n) if n.t == t => Ok(n.p),
            _ => momentum_from_velocity(&self.point(t)?.v, self.mass),
        }
    }

    fn smooth_span(&self, t: f64, forward: bool) -> f64 {
        let Some(first) = self.first_time() else { return f64::INFINITY };
        let last = self.last_time().unwrap_or(first);
        let ext_span = |ext: &Extension| match ext {
            Extension::Prescribed(w) => w.smooth_span(t, forward),
            _ => f64::INFINITY,
        };
        if forward {
            if t >= last {
                return ext_span(&self.future);
            }
            let k = self.nodes.partition_point(|n| n.t <= t);
            self.nodes[k].t - t
        } else {
            if t <= first {
                return ext_span(&self.past);
            }
            let k = self.nodes.partition_point(|n| n.t < t);
            t - self.nodes[k - 1].t
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{Circular, Polynomial};

    #[test]
    fn reproduces_quintic_polynomials() {
        let poly = Polynomial::new(
            0.0,
            vec![
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.1, -0.2, 0.05),
                Vec3::new(0.02, 0.03, 0.0),
                Vec3::new(-0.01, 0.0, 0.02),
                Vec3::new(0.002, 0.001, 0.0),
                Vec3::new(0.0, 0.0, -0.0005),
            ],
        );
        let h = TrajectoryHistory::sample(&poly, 0.0, 2.0, 0.5, Extension::None, Extension::None).unwrap();
        for &t in &[0.1, 0.37, 1.2, 1.99] {
            let a = h.point(t).unwrap();
            let b = poly.point(t).unwrap();
            assert!((a.q - b.q).norm() < 1e-13, "q at {t}");
            assert!((a.v - b.v).norm() < 1e-12, "v at {t}");
            assert!((a.a - b.a).norm() < 1e-11, "a at {t}");
        }
    }

    #[test]
    fn dense_output_converges_at_sixth_order() {
        let c = Circular::new(Vec3::zeros(), 1.0, 0.5).unwrap();
        let err = |dt: f64| {
            let h = TrajectoryHistory::sample(&c, 0.0, 4.0, dt, Extension::None, Extension::None).unwrap();
            (0..40).map(|k| 0.05 + 0.1 * k as f64).map(|t| (h.point(t).unwrap().q - c.point(t).unwrap().q).norm()).fold(0.0, f64::max)
        };
        let ratio = err(0.4) / err(0.2);
        assert!(ratio > 40.0, "ratio {ratio}");
    }

    #[test]
    fn extensions() {
        let mut h = TrajectoryHistory::new(1.0, Extension::Inertial, Extension::Frozen).unwrap();
        h.push(0.0, Vec3::zeros(), Vec3::new(0.75, 0.0, 0.0), Vec3::x()).unwrap();
        h.push(1.0, Vec3::new(0.6, 0.0, 0.0), Vec3::new(0.75, 0.0, 0.0), Vec3::zeros()).unwrap();
        let before = h.point(-2.0).unwrap();
        assert!((before.q - Vec3::new(-1.2, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(before.a, Vec3::zeros());
        let after = h.point(5.0).unwrap();
        assert_eq!(after.v, Vec3::zeros());
        assert!((after.q.x - 0.6).abs() < 1e-15);
        let bare = TrajectoryHistory::new(1.0, Extension::None, Extension::None).unwrap();
        assert!(matches!(bare.point(0.0), Err(Error::Range(_))));
    }

    #[test]
    fn rejects_non_monotone_times() {
        let mut h = TrajectoryHistory::new(1.0, Extension::None, Extension::None).unwrap();
        h.push(1.0, Vec3::zeros(), Vec3::zeros(), Vec3::zeros()).unwrap();
        assert!(h.push(1.0, Vec3::zeros(), Vec3::zeros(), Vec3::zeros()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = Circular::new(Vec3::zeros(), 1.0, 0.3).unwrap();
        let h = TrajectoryHistory::sample(&c, 0.0, 2.0, 0.01, Extension::None, Extension::None).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let back = TrajectoryHistory::read_csv(buf.as_slice(), 1.0, Extension::None, Extension::None).unwrap();
        assert_eq!(back.len(), h.len());
        for (a, b) in back.nodes().iter().zip(h.nodes()) {
            assert_eq!(a.q, b.q);
            assert_eq!(a.p, b.p);
            assert!((a.a - b.a).norm() < 1e-3);
        }
    }

    #[test]
    fn smooth_span_reports_node_distance() {
        let c = Circular::new(Vec3::zeros(), 1.0, 0.3).unwrap();
        let h = TrajectoryHistory::sample(&c, 0.0, 1.0, 0.25, Extension::Inertial, Extension::None).unwrap();
        assert!((h.smooth_span(0.1, true) - 0.15).abs() < 1e-15);
        assert!((h.smooth_span(0.25, true) - 0.25).abs() < 1e-15);
        assert!((h.smooth_span(0.25, false) - 0.25).abs() < 1e-15);
        assert!(h.smooth_span(0.0, false).is_infinite());
    }
}
