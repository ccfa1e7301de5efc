//! Mixed power transforms, their entrywise action, the decision tables for
//! which transforms preserve TN/TP orders, and sampled functional checks.

mod classify;
mod functional;
mod order_spec;
mod transform;

pub use classify::{classify, ClassificationVerdict, Clause, ClausePart, Defect, Outcome};
pub use functional::{
    assess_two_point, check_jointly_monotone, check_mult_mid_convex, random_ordered_pairs, random_pairs,
    FunctionalVerdict, FunctionalWitness, TwoPointEvidence,
};
pub use order_spec::{Bound, Mode, OrderSpec};
pub use transform::{apply, MixedPowerTransform, Term};
