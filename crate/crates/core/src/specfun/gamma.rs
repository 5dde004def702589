//! Gamma-function helpers.

use libm::{lgamma as ln_gamma, tgamma as gamma};
use std::f64::consts::PI;

/// sin(πx), exact zeros at the integers.
pub fn sinpi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// Reciprocal gamma function 1/Γ(x), entire; zero at the nonpositive integers.
pub fn rgamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
        let s = sinpi(x);
        let one_minus = 1.0 - x;
        if one_minus > 170.0 {
            let mag = (ln_gamma(one_minus) - PI.ln()).exp();
            return s * mag;
        }
        return s * gamma(one_minus) / PI;
    }
    if x > 160.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

/// Γ(x) for x > 0.
pub fn gamma_pos(x: f64) -> f64 {
    gamma(x)
}
