//! Total positivity toolkit.
//!
//! Computes TN/TP orders of matrices and sampled kernels, applies mixed power
//! transforms entrywise, decides which transforms preserve a given order, and
//! ships a harness of determinant identities and counterexample searches.

pub mod completion;
pub mod error;
pub mod generators;
pub mod kernels;
pub mod linalg;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{
    det_exact, det_float, enumerate_minors, tn_order, tp_order, Matrix, MinorMode, MinorSelector,
    OrderReport, OrderedPoints, Scalar, Sign, Tolerance,
};

/// Caps the worker pool at `TOTPOS_THREADS` threads when the variable is set.
/// Must run before any parallel work.
pub fn init_threads_from_env() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var("TOTPOS_THREADS") else {
        return Ok(None);
    };
    let n = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("TOTPOS_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(Some(n))
}
