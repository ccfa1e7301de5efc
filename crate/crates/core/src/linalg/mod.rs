//! Scalars, matrices, determinants and minor enumeration.

mod det;
pub mod io;
mod matrix;
mod minors;
mod order;
mod scalar;

pub(crate) use det::lu_det;
pub use det::{abs_permanent, det, det_exact, det_float, minor, minor_sign};
pub use matrix::{Entries, Matrix, MinorSelector, OrderedPoints};
pub use minors::{enumerate_minors, enumerate_minors_of_shape, IncreasingTuples, MinorMode};
pub use order::{fekete_tp, tn_order, tp_order, tp_order_brute, OrderReport, Witness};
pub use scalar::{
    f64_to_rational, parse_rational, pow_rational, rat, rat_int, rational_to_f64, Scalar, Sign, Tolerance,
};
