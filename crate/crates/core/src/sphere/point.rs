use crate::error::{Error, Result};
use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// A point on the unit sphere in colatitude/longitude and Cartesian form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
    pub cartesian: [f64; 3],
}

impl SpherePoint {
    /// Colatitude θ ∈ [0, π]; longitude is reduced to [0, 2π).
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::Domain(format!(
                "invalid spherical angles ({theta}, {phi})"
            )));
        }
        let phi = phi.rem_euclid(TAU);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(SpherePoint {
            theta,
            phi,
            cartesian: [st * cp, st * sp, ct],
        })
    }

    /// Any nonzero vector, normalized onto the sphere.
    pub fn from_cartesian(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain(
                "cannot project a zero or non-finite vector".into(),
            ));
        }
        let c = [v[0] / n, v[1] / n, v[2] / n];
        let theta = (c[0] * c[0] + c[1] * c[1]).sqrt().atan2(c[2]);
        let phi = c[1].atan2(c[0]).rem_euclid(TAU);
        Ok(SpherePoint {
            theta,
            phi,
            cartesian: c,
        })
    }

    /// Uniformly distributed random point.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..TAU);
        Self::from_angles(z.acos(), phi).expect("angles in range")
    }

    pub fn north_pole() -> Self {
        Self::from_angles(0.0, 0.0).unwrap()
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::from(self.cartesian)
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.vector().dot(&other.vector())
    }

    /// Unit tangent vectors (e_θ, e_φ); degenerate at the poles.
    pub fn frame(&self) -> (Vector3<f64>, Vector3<f64>) {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        (
            Vector3::new(ct * cp, ct * sp, -st),
            Vector3::new(-sp, cp, 0.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norm_and_roundtrip() {
        for i in 0..50 {
            let th = PI * i as f64 / 49.0;
            let ph = 0.37 * i as f64 - 3.0;
            let p = SpherePoint::from_angles(th, ph).unwrap();
            assert!((p.vector().norm() - 1.0).abs() < 1e-14);
            let q = SpherePoint::from_cartesian(p.cartesian).unwrap();
            assert!((q.vector() - p.vector()).norm() < 1e-14);
            assert!((0.0..TAU).contains(&p.phi));
        }
    }

    #[test]
    fn frame_is_orthonormal_and_tangent() {
        let p = SpherePoint::from_angles(1.1, 2.3).unwrap();
        let (et, ep) = p.frame();
        let x = p.vector();
        assert!(et.dot(&ep).abs() < 1e-15 && et.dot(&x).abs() < 1e-15 && ep.dot(&x).abs() < 1e-15);
        assert!((et.cross(&ep) - x).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SpherePoint::from_angles(-0.1, 0.0).is_err());
        assert!(SpherePoint::from_cartesian([0.0; 3]).is_err());
    }
}
