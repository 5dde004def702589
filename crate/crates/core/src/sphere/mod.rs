//! Scalar and vector spherical harmonics, tensor kernels, quadrature grids and transforms.

mod grid;
mod harmonics;
mod kernels;
mod point;
mod transform;
mod vsh;

pub use grid::{make_grid, SphereGrid};
pub use harmonics::{eigenvalue, scalar_sh};
pub use kernels::{cross_matrix, tangent_projector, tensor_kernels};
pub use point::SpherePoint;
pub use transform::{
    analyze, evaluate, synthesize, Family, SpectralCoefficients, TangentFieldSample,
};
pub use vsh::{vsh, CVec3, POLE_EPS};
