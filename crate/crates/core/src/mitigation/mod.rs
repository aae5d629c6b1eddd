//! Readout mitigation (confusion-matrix inversion, T-REx) and zero-noise
//! extrapolation.

mod rem;
mod trex;
mod zne;

pub use rem::{rem_apply, rem_calibrate, ConfusionMatrix, MAX_CONDITION, REM_QUBIT_LIMIT};
pub use trex::{
    trex_calibrate, trex_estimate, twirl_masks, TrexCalibration, DEFAULT_CALIBRATION_CIRCUITS,
    DEFAULT_CALIBRATION_SHOTS, LAMBDA_FLOOR,
};
pub use zne::{write_zne_table, zne_fit, zne_fit_with_fallback, FitKind, ZneSeries};
