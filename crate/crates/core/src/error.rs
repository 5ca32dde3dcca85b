use serde::Serialize;

use crate::Vec3;

/// Data describing a singular light front met during evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontEvent {
    /// Center of the shell sphere (initial charge position).
    pub center: [f64; 3],
    /// Sphere radius at the time of evaluation, `|t|`.
    pub radius: f64,
    /// Evaluation time.
    pub time: f64,
    /// Query point.
    pub point: [f64; 3],
    /// Net E-coefficient of the uncancelled shell pair at the query point.
    pub net_e: [f64; 3],
    /// Net B-coefficient of the uncancelled shell pair at the query point.
    pub net_b: [f64; 3],
}

impl FrontEvent {
    pub(crate) fn new(center: Vec3, time: f64, point: Vec3, net_e: Vec3, net_b: Vec3) -> Self {
        Self {
            center: center.into(),
            radius: time.abs(),
            time,
            point: point.into(),
            net_e: net_e.into(),
            net_b: net_b.into(),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("singular light front at t = {}, |x - q0| = {}", .0.time, .0.radius)]
    SingularFront(Box<FrontEvent>),

    #[error("velocity guard violated at t = {time}: |v| = {speed}")]
    VelocityGuard { time: f64, speed: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    Iteration {
        iterations: usize,
        last_change: f64,
        trace: Vec<f64>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
