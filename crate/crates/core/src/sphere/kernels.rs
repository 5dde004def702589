use super::harmonics::eigenvalue;
use super::point::SpherePoint;
use crate::error::{Error, Result};
use crate::specfun::legendre_derivs_unchecked;
use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

/// Matrix of v ↦ x × v.
pub fn cross_matrix(x: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -x.z, x.y, x.z, 0.0, -x.x, -x.y, x.x, 0.0)
}

/// Orthogonal projector I - x xᵀ onto the tangent plane at x.
pub fn tangent_projector(x: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::identity() - x * x.transpose()
}

/// Divergence-free and curl-free Legendre tensor kernels of degree ℓ.
///
/// Both are real: dlg = c [P″(s) (Q_x y)(Q_y x)ᵀ + P′(s) Q_x Q_yᵀ] and
/// clg = c [P″(s) (P_x y)(P_y x)ᵀ + P′(s) P_x P_y], with s = x·y and
/// c = (2ℓ+1)/(4πλ_ℓ). Each equals Σ_m h_ℓm(x) h_ℓm(y)^H for the respective family.
pub fn tensor_kernels(
    ell: usize,
    x: &SpherePoint,
    y: &SpherePoint,
) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    if ell == 0 {
        return Err(Error::Index { ell: 0, m: 0 });
    }
    let (xv, yv) = (x.vector(), y.vector());
    let s = xv.dot(&yv).clamp(-1.0, 1.0);
    let (_, d1, d2) = legendre_derivs_unchecked(ell, s);
    let c = (2.0 * ell as f64 + 1.0) / (4.0 * PI * eigenvalue(ell));
    let (qx, qy) = (cross_matrix(&xv), cross_matrix(&yv));
    let (px, py) = (tangent_projector(&xv), tangent_projector(&yv));
    let dlg = ((qx * yv) * (qy * xv).transpose() * d2 + qx * qy.transpose() * d1) * c;
    let clg = ((px * yv) * (py * xv).transpose() * d2 + px * py * d1) * c;
    Ok((dlg, clg))
}
