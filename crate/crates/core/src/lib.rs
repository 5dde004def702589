//! Spectral simulation of the fractional stochastic diffusion equation for random
//! tangent vector fields on the unit sphere.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod specfun;

pub use error::{Error, Result};
pub mod covariance;
pub mod model;
pub mod quadrature;
pub mod sphere;
pub mod stochastic;
pub mod studies;
pub mod validate;
