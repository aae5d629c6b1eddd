//! Variational quantum eigensolver toolkit: fermion-to-qubit mapping with
//! parity tapering, state-vector simulation with a depolarizing/readout
//! noise surrogate, SPSA optimisation, and readout-error mitigation
//! (confusion-matrix inversion, T-REx) plus zero-noise extrapolation.

pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod estimator;
pub mod fermion;
pub mod mitigation;
pub mod pauli;
pub mod seed;
pub mod sim;
pub mod spsa;
pub mod vqe;

pub use error::{Error, ErrorCategory, Result};
