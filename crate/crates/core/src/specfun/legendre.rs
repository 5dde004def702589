//! Legendre polynomials and their first two derivatives.

use crate::error::{Error, Result};

fn check(t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "Legendre argument {t} outside [-1, 1]"
        )));
    }
    Ok(())
}

/// P_ℓ(t) by the three-term recurrence.
pub fn legendre(ell: usize, t: f64) -> Result<f64> {
    check(t)?;
    Ok(legendre_derivs_unchecked(ell, t).0)
}

/// (P_ℓ(t), P′_ℓ(t), P″_ℓ(t)).
pub fn legendre_derivs(ell: usize, t: f64) -> Result<(f64, f64, f64)> {
    check(t)?;
    Ok(legendre_derivs_unchecked(ell, t))
}

/// Derivative recurrences P′_{ℓ+1} = P′_{ℓ-1} + (2ℓ+1)P_ℓ and P″_{ℓ+1} = P″_{ℓ-1} + (2ℓ+1)P′_ℓ,
/// valid on the closed interval including the endpoints.
pub(crate) fn legendre_derivs_unchecked(ell: usize, t: f64) -> (f64, f64, f64) {
    let (mut p0, mut d0, mut s0) = (1.0, 0.0, 0.0);
    if ell == 0 {
        return (p0, d0, s0);
    }
    let (mut p1, mut d1, mut s1) = (t, 1.0, 0.0);
    for l in 1..ell {
        let lf = l as f64;
        let p2 = ((2.0 * lf + 1.0) * t * p1 - lf * p0) / (lf + 1.0);
        let d2 = d0 + (2.0 * lf + 1.0) * p1;
        let s2 = s0 + (2.0 * lf + 1.0) * d1;
        (p0, d0, s0) = (p1, d1, s1);
        (p1, d1, s1) = (p2, d2, s2);
    }
    (p1, d1, s1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit(ell: usize, t: f64) -> (f64, f64, f64) {
        match ell {
            0 => (1.0, 0.0, 0.0),
            1 => (t, 1.0, 0.0),
            2 => ((3.0 * t * t - 1.0) / 2.0, 3.0 * t, 3.0),
            3 => (
                (5.0 * t.powi(3) - 3.0 * t) / 2.0,
                (15.0 * t * t - 3.0) / 2.0,
                15.0 * t,
            ),
            4 => (
                (35.0 * t.powi(4) - 30.0 * t * t + 3.0) / 8.0,
                (140.0 * t.powi(3) - 60.0 * t) / 8.0,
                (420.0 * t * t - 60.0) / 8.0,
            ),
            5 => (
                (63.0 * t.powi(5) - 70.0 * t.powi(3) + 15.0 * t) / 8.0,
                (315.0 * t.powi(4) - 210.0 * t * t + 15.0) / 8.0,
                (1260.0 * t.powi(3) - 420.0 * t) / 8.0,
            ),
            _ => unreachable!(),
        }
    }

    #[test]
    fn matches_explicit_forms() {
        for ell in 0..=5 {
            for i in 0..=40 {
                let t = -1.0 + i as f64 / 20.0;
                let (p, d, s) = legendre_derivs(ell, t).unwrap();
                let (pe, de, se) = explicit(ell, t);
                assert!((p - pe).abs() < 1e-13);
                assert!((d - de).abs() < 1e-13);
                assert!((s - se).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn examples() {
        assert_eq!(legendre(1, 0.3).unwrap(), 0.3);
        assert!((legendre(2, 0.5).unwrap() + 0.125).abs() < 1e-16);
        assert!((legendre_derivs(2, 0.5).unwrap().1 - 1.5).abs() < 1e-16);
        assert_eq!(legendre_derivs(1, 0.77).unwrap().2, 0.0);
    }

    #[test]
    fn unit_value_at_one_is_exact() {
        for ell in 0..200 {
            assert_eq!(legendre(ell, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn endpoint_derivatives() {
        // P′_ℓ(1) = λ/2, P″_ℓ(1) = (ℓ-1)ℓ(ℓ+1)(ℓ+2)/8
        for ell in 1..40usize {
            let l = ell as f64;
            let (_, d, s) = legendre_derivs(ell, 1.0).unwrap();
            assert!((d - l * (l + 1.0) / 2.0).abs() < 1e-12 * d);
            let s_exact = (l - 1.0) * l * (l + 1.0) * (l + 2.0) / 8.0;
            assert!((s - s_exact).abs() <= 1e-12 * s_exact.max(1.0));
        }
    }

    #[test]
    fn domain_error() {
        assert!(legendre(3, 1.0 + 1e-12).is_err());
    }
}
