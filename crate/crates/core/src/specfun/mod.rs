//! Scalar special functions.

mod gamma;
mod legendre;
mod mittag_leffler;

pub use gamma::{gamma_pos, rgamma, sinpi};
pub(crate) use legendre::legendre_derivs_unchecked;
pub use legendre::{legendre, legendre_derivs};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_with_branch, ml_kernel, MlBranch, Z_MAX};
