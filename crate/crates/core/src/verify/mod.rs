//! Determinant identities, constructions and counterexample searches that
//! exercise the decision tables.

mod catalog;
mod certify;
mod empirical;
mod refute;
mod search;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use catalog::{catalog, run_catalog, CatalogEntry, Check, EntryReport, EntryStatus, VerificationReport};
pub use certify::{certify, first_certified_negative, Certificate, REQUIRED_MARGIN};
pub use empirical::{empirical_preservation, EmpiricalReport, EmpiricalViolation, MAX_GRID};
pub use refute::{refute, Refutation, RefutationOutcome};
pub use search::{sample_points, search_counterexample, Family, SearchBudget, SearchOutcome, SearchWitness};

/// Independent stream for one trial of a seeded run.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
