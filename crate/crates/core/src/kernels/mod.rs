//! The kernel zoo: closed-form kernels, PF functions, Toeplitz lifts,
//! reparametrizations, padding, inflation and Gaussian smoothing.

mod ops;
mod pf;
mod piecewise;
mod spec;

pub use ops::{centered_placement, inflate, pad, toeplitz_sample, whitney_smooth_kernel};
pub use pf::{gaussian_smooth_pf, gaussian_smooth_pf_with_step, pf_eval, PfFunction, PfSpec, SmoothedPf};
pub use piecewise::{piecewise_linear, PiecewiseLinearMap};
pub use spec::{sample_kernel, KernelSpec, PaddedInner, Table};
