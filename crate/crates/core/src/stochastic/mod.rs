//! Fractional Brownian motion, Riemann–Stieltjes integrals of deterministic kernels and their
//! exact variances.

pub mod fbm;
pub mod integral;
pub mod kernel;
pub mod rng;

pub use fbm::{
    fbm_covariance, graded_mesh, sample_complex_fbm, sample_real_fbm, uniform_mesh, FbmGenerator,
    FbmMethod, FbmPath,
};
pub use integral::{
    integral_variance, integral_variance_detailed, rs_integral, rs_weights, rs_weights_with,
    PathValue, RsRule, RsWeights, VarianceEstimate,
};
pub use kernel::{Kernel, MlKernel};
pub use rng::{complex_normal, standard_normal, RngStream, Stage, StreamKey};
