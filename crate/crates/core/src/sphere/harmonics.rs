use super::point::SpherePoint;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Laplace–Beltrami eigenvalue magnitude λ_ℓ = ℓ(ℓ+1).
pub fn eigenvalue(ell: usize) -> f64 {
    let l = ell as f64;
    l * (l + 1.0)
}

/// Fully normalized associated Legendre functions P̄_ℓ^m(cos θ) with the Condon–Shortley
/// phase, and their θ-derivatives, for 0 ≤ m ≤ ℓ ≤ lmax.
#[derive(Debug, Clone)]
pub(crate) struct AlfTable {
    lmax: usize,
    p: Vec<f64>,
    dp: Vec<f64>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl AlfTable {
    pub fn new(lmax: usize, cos_t: f64, sin_t: f64) -> Self {
        let n = tri(lmax, lmax) + 1;
        let mut p = vec![0.0; n];
        // sectoral values by the m-recurrence, then upward in ℓ at fixed m
        let mut pmm = 0.5 / PI.sqrt();
        for m in 0..=lmax {
            if m > 0 {
                let mf = m as f64;
                pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
            }
            p[tri(m, m)] = pmm;
            if m < lmax {
                p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * cos_t * pmm;
            }
            for l in (m + 2)..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                p[tri(l, m)] = a * (cos_t * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
            }
        }
        let mut dp = vec![0.0; n];
        for l in 0..=lmax {
            let lf = l as f64;
            for m in 0..=l {
                let mf = m as f64;
                let up = if m < l {
                    ((lf - mf) * (lf + mf + 1.0)).sqrt() * p[tri(l, m + 1)]
                } else {
                    0.0
                };
                dp[tri(l, m)] = if m == 0 {
                    up
                } else {
                    0.5 * (up - ((lf + mf) * (lf - mf + 1.0)).sqrt() * p[tri(l, m - 1)])
                };
            }
        }
        AlfTable { lmax, p, dp }
    }

    pub fn for_point(lmax: usize, point: &SpherePoint) -> Self {
        Self::new(lmax, point.cartesian[2], point.theta.sin())
    }

    /// (P̄_ℓ^m, dP̄_ℓ^m/dθ) for signed m, using P̄_ℓ^{-m} = (-1)^m P̄_ℓ^m.
    #[inline]
    pub fn get(&self, l: usize, m: i64) -> (f64, f64) {
        debug_assert!(l <= self.lmax);
        let k = tri(l, m.unsigned_abs() as usize);
        let s = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
        (s * self.p[k], s * self.dp[k])
    }
}

pub(crate) fn check_index(ell: usize, m: i64) -> Result<()> {
    if m.unsigned_abs() as usize > ell {
        return Err(Error::Index { ell: ell as i64, m });
    }
    Ok(())
}

/// Orthonormal complex spherical harmonic Y_ℓm (Condon–Shortley phase).
pub fn scalar_sh(ell: usize, m: i64, point: &SpherePoint) -> Result<Complex64> {
    check_index(ell, m)?;
    let table = AlfTable::for_point(ell, point);
    let (p, _) = table.get(ell, m);
    Ok(Complex64::from_polar(p, m as f64 * point.phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let p = SpherePoint::from_angles(0.8, 1.3).unwrap();
        let (st, ct) = p.theta.sin_cos();
        let y00 = scalar_sh(0, 0, &p).unwrap();
        assert!((y00.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15 && y00.im == 0.0);
        let y10 = scalar_sh(1, 0, &SpherePoint::north_pole()).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        let y11 = scalar_sh(1, 1, &p).unwrap();
        let e = -(3.0 / (8.0 * PI)).sqrt() * st * Complex64::from_polar(1.0, p.phi);
        assert!((y11 - e).norm() < 1e-15);
        let y21 = scalar_sh(2, 1, &p).unwrap();
        let e = -(15.0 / (8.0 * PI)).sqrt() * st * ct * Complex64::from_polar(1.0, p.phi);
        assert!((y21 - e).norm() < 1e-15);
        let y22 = scalar_sh(2, 2, &p).unwrap();
        let e =
            0.25 * (15.0 / (2.0 * PI)).sqrt() * st * st * Complex64::from_polar(1.0, 2.0 * p.phi);
        assert!((y22 - e).norm() < 1e-15);
    }

    #[test]
    fn conjugation_symmetry() {
        let p = SpherePoint::from_angles(2.1, 4.0).unwrap();
        for l in 0..8usize {
            for m in -(l as i64)..=(l as i64) {
                let a = scalar_sh(l, m, &p).unwrap().conj();
                let b = scalar_sh(l, -m, &p).unwrap() * if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn theta_derivative_matches_finite_differences() {
        let h = 1e-6;
        for &theta in &[0.3f64, 1.2, 2.7] {
            let t = AlfTable::new(12, theta.cos(), theta.sin());
            let tp = AlfTable::new(12, (theta + h).cos(), (theta + h).sin());
            let tm = AlfTable::new(12, (theta - h).cos(), (theta - h).sin());
            for l in 0..=12usize {
                for m in -(l as i64)..=(l as i64) {
                    let fd = (tp.get(l, m).0 - tm.get(l, m).0) / (2.0 * h);
                    assert!((t.get(l, m).1 - fd).abs() < 1e-7, "l={l} m={m}");
                }
            }
        }
    }

    #[test]
    fn high_degree_is_finite() {
        let t = AlfTable::new(600, 0.01f64.cos(), 0.01f64.sin());
        assert!(t.p.iter().chain(&t.dp).all(|v| v.is_finite()));
    }

    #[test]
    fn index_error() {
        assert!(matches!(
            scalar_sh(2, 3, &SpherePoint::north_pole()),
            Err(Error::Index { ell: 2, m: 3 })
        ));
    }
}
