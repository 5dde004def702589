use super::harmonics::{check_index, eigenvalue, AlfTable};
use super::point::SpherePoint;
use crate::error::{Error, Result};
use nalgebra::Vector3;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Complex 3-vector; tangent vectors on the sphere are stored in ambient coordinates.
pub type CVec3 = Vector3<Complex64>;

/// Within this distance of a pole (in sin θ) the spherical frame is not used.
pub const POLE_EPS: f64 = 1e-8;

/// Components along (e_θ, e_φ), without the factor e^{imφ}, of the degree-ℓ order-m
/// divergence-free and curl-free harmonics.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalVsh {
    pub y_theta: Complex64,
    pub y_phi: Complex64,
    pub z_theta: Complex64,
    pub z_phi: Complex64,
}

#[inline]
pub(crate) fn local_vsh(table: &AlfTable, ell: usize, m: i64, sin_t: f64) -> LocalVsh {
    let (p, dp) = table.get(ell, m);
    let s = 1.0 / eigenvalue(ell).sqrt();
    let azimuthal = Complex64::new(0.0, m as f64 * p / sin_t * s);
    let polar = Complex64::new(dp * s, 0.0);
    LocalVsh {
        y_theta: -azimuthal,
        y_phi: polar,
        z_theta: polar,
        z_phi: azimuthal,
    }
}

#[inline]
pub(crate) fn to_ambient(
    e_theta: &Vector3<f64>,
    e_phi: &Vector3<f64>,
    c_theta: Complex64,
    c_phi: Complex64,
) -> CVec3 {
    CVec3::new(
        c_theta * e_theta.x + c_phi * e_phi.x,
        c_theta * e_theta.y + c_phi * e_phi.y,
        c_theta * e_theta.z + c_phi * e_phi.z,
    )
}

/// Cartesian coefficient vector a_m with Y_1m(x) = a_m · x.
fn degree_one_coefficients(m: i64) -> CVec3 {
    let c0 = (3.0 / (4.0 * PI)).sqrt();
    let c1 = (3.0 / (8.0 * PI)).sqrt();
    let (one, i, zero) = (
        Complex64::new(1.0, 0.0),
        Complex64::i(),
        Complex64::new(0.0, 0.0),
    );
    match m {
        0 => CVec3::new(zero, zero, one * c0),
        1 => CVec3::new(-one * c1, -i * c1, zero),
        _ => CVec3::new(one * c1, -i * c1, zero),
    }
}

/// Degree-one harmonics in Cartesian form, valid everywhere including the poles.
fn vsh_degree_one(m: i64, point: &SpherePoint) -> (CVec3, CVec3) {
    let a = degree_one_coefficients(m);
    let x = point.vector().map(|c| Complex64::new(c, 0.0));
    let grad = a - x * x.dot(&a);
    let curl = x.cross(&a);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (curl.map(|c| c * s), grad.map(|c| c * s))
}

/// Divergence-free y_ℓm = curl* Y_ℓm / √λ_ℓ and curl-free z_ℓm = ∇* Y_ℓm / √λ_ℓ.
pub fn vsh(ell: usize, m: i64, point: &SpherePoint) -> Result<(CVec3, CVec3)> {
    if ell == 0 {
        return Err(Error::Index { ell: 0, m });
    }
    check_index(ell, m)?;
    let sin_t = point.theta.sin();
    if sin_t < POLE_EPS {
        if ell == 1 {
            return Ok(vsh_degree_one(m, point));
        }
        return Err(Error::Pole { ell });
    }
    let table = AlfTable::for_point(ell, point);
    let local = local_vsh(&table, ell, m, sin_t);
    let (et, ep) = point.frame();
    let phase = Complex64::from_polar(1.0, m as f64 * point.phi);
    Ok((
        to_ambient(&et, &ep, local.y_theta * phase, local.y_phi * phase),
        to_ambient(&et, &ep, local.z_theta * phase, local.z_phi * phase),
    ))
}
