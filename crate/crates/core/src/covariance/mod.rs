//! Second-order structure of the solution: E* and the equal-time covariance tensor.

mod estar;
mod tensor;

pub use estar::{estar, estar_detailed, EstarEstimate, EstarMethod};
pub use tensor::{covariance_matrix, covariance_matrix_from, variance_trace, variance_trace_from};
