//! Point-charge electrodynamics with singular light fronts.
//!
//! Fields of prescribed worldlines (Liénard-Wiechert), the light-cone
//! decomposition of general Maxwell solutions with exact singular shells,
//! compatibility checks between initial fields and trajectories, and delay
//! integrators for the coupled charge dynamics. Internally everything uses
//! natural units `c = 1`, `ε₀ = 1/4π`.

pub mod cli;
pub mod compatibility;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod kinematics;
pub mod lw;
pub mod mollifier;
pub mod output;
pub mod propagation;
pub mod quadrature;
pub mod scenarios;
pub mod state;
pub mod units;

pub type Vec3 = nalgebra::Vector3<f64>;

pub use error::{Error, FrontEvent, Result};
pub use field::EMFieldValue;
pub use state::{relativistic_velocity, ChargeState, CouplingMatrix};
