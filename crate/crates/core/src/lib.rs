//! Evaluation toolkit for protection-zone spectrum sharing between a LEO
//! satellite network (NTN) and a terrestrial base-station network (TN).
//!
//! Two independent engines answer the same questions:
//!
//! * [`analytic`] evaluates the stochastic-geometry coverage and area data
//!   rate (ADR) expressions by numerical quadrature;
//! * [`simulator`] samples network realizations and estimates the same
//!   quantities by Monte Carlo.
//!
//! [`optimizer`] sweeps the protection radius and the shared-bandwidth
//! fraction to find the constrained maximum of the weighted-sum ADR.
//!
//! All quantities inside the crate are SI (m, Hz, W, linear gains). The
//! configuration file in [`model::file`] is the only place where km, MHz,
//! dBm and dBi appear.

pub mod analytic;
pub mod error;
pub mod exec;
pub mod model;
pub mod optimizer;
pub mod quadrature;
pub mod simulator;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{Scenario, ScenarioConfig};
