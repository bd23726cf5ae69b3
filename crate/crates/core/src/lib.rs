//! Simulation of QAOA and quantum annealing on the Sherrington–Kirkpatrick model,
//! plus the infinite-size G-matrix and finite-n moment oracles.

pub mod annealing;
pub mod error;
pub mod experiments;
pub mod gmatrix;
pub mod qgms;
pub mod schedules;
pub mod sk;
pub mod statevector;
pub mod stats;

pub use error::{Error, Result};
