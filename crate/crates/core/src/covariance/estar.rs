use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::specfun::{gamma_pos, mittag_leffler, rgamma};

const SERIES_MAX_X: f64 = 1.0;
const SERIES_MAX_TERMS: usize = 400;
const SELF_CONV_TOL: f64 = 1e-10;

/// How an E* value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstarMethod {
    Closed,
    Series,
    Quadrature { order: usize },
}

/// E* value with its self-convergence evidence (`rel_change` is 0 for closed forms and
/// the truncation estimate for series).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstarEstimate {
    pub value: f64,
    pub rel_change: f64,
    pub method: EstarMethod,
}

/// E*_{β,H}(t, z) = Γ(2H+1) ∫_0^t u^{2β+2H-3} E_{β,β}(-u^β z) E_{β,β+2H-1}(-u^β z) du,
/// the variance of one spectral mode of the noise-driven solution per unit noise variance.
pub fn estar(t: f64, z: f64, beta: f64, hurst: f64) -> Result<f64> {
    estar_detailed(t, z, beta, hurst).map(|e| e.value)
}

pub fn estar_detailed(t: f64, z: f64, beta: f64, hurst: f64) -> Result<EstarEstimate> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("0 < beta <= 1"));
    }
    if !(0.5..1.0).contains(&hurst) {
        return Err(Error::invalid("0.5 <= hurst < 1"));
    }
    if !(t >= 0.0) || !t.is_finite() || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "E* needs finite t >= 0 and z >= 0, got t = {t}, z = {z}"
        )));
    }
    if beta + hurst <= 1.0 {
        return Err(Error::Divergent(format!(
            "E* integrand u^{} is not integrable at 0 (beta + hurst = {} <= 1)",
            2.0 * beta + 2.0 * hurst - 3.0,
            beta + hurst
        )));
    }
    let closed = |value| EstarEstimate {
        value,
        rel_change: 0.0,
        method: EstarMethod::Closed,
    };
    if t == 0.0 {
        return Ok(closed(0.0));
    }
    if beta == 1.0 && hurst == 0.5 {
        let v = if z == 0.0 {
            t
        } else {
            -(-2.0 * t * z).exp_m1() / (2.0 * z)
        };
        return Ok(closed(v));
    }
    let x = z * t.powf(beta);
    if x <= SERIES_MAX_X {
        if let Some(e) = series(t, x, beta, hurst) {
            return Ok(e);
        }
    }
    quadrature(t, z, beta, hurst)
}

/// Cauchy product of the two Mittag-Leffler series integrated term by term in powers of
/// x = z t^β.
fn series(t: f64, x: f64, beta: f64, hurst: f64) -> Option<EstarEstimate> {
    let c = 2.0 * beta + 2.0 * hurst - 2.0;
    let b2 = beta + 2.0 * hurst - 1.0;
    let ra: Vec<f64> = (0..SERIES_MAX_TERMS)
        .map(|j| rgamma(beta * j as f64 + beta))
        .collect();
    let rb: Vec<f64> = (0..SERIES_MAX_TERMS)
        .map(|j| rgamma(beta * j as f64 + b2))
        .collect();
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut power = 1.0;
    let mut small = 0;
    for n in 0..SERIES_MAX_TERMS {
        let conv: f64 = (0..=n).map(|j| ra[j] * rb[n - j]).sum();
        let term = power * conv / (c + beta * n as f64);
        sum += term;
        abs_sum += term.abs();
        if term.abs() <= 1e-17 * sum.abs() {
            small += 1;
            if small >= 3 {
                let rel = 4.0 * f64::EPSILON * abs_sum / sum.abs();
                if rel > 1e-12 {
                    return None;
                }
                return Some(EstarEstimate {
                    value: gamma_pos(2.0 * hurst + 1.0) * t.powf(c) * sum,
                    rel_change: rel,
                    method: EstarMethod::Series,
                });
            }
        } else {
            small = 0;
        }
        power *= -x;
    }
    None
}

/// Substituting u = t w^{1/c} with c = 2β+2H-2 turns the integral into
/// (t^c / c) ∫_0^1 F(u(w)) dw with a bounded integrand F, integrated on panels graded towards
/// the transition scale w ~ (z^{-1/β}/t)^c.
fn quadrature(t: f64, z: f64, beta: f64, hurst: f64) -> Result<EstarEstimate> {
    let c = 2.0 * beta + 2.0 * hurst - 2.0;
    let b2 = beta + 2.0 * hurst - 1.0;
    let w_tr = if z > 0.0 {
        (z.powf(-1.0 / beta) / t).powf(c).min(1.0)
    } else {
        1.0
    };
    let levels = ((-w_tr.log2()).max(0.0) + 50.0).ceil() as usize;
    let integrand = |w: f64| -> Result<f64> {
        let ub = t.powf(beta) * w.powf(beta / c);
        let arg = -z * ub;
        Ok(mittag_leffler(beta, beta, arg)? * mittag_leffler(beta, b2, arg)?)
    };
    let edges: Vec<f64> = std::iter::once(0.0)
        .chain((0..=levels).rev().map(|k| 0.5f64.powi(k as i32)))
        .collect();
    let scale = gamma_pos(2.0 * hurst + 1.0) * t.powf(c) / c;
    let mut previous = f64::NAN;
    let mut order = 8;
    while order <= 64 {
        let rule = GaussRule::legendre(order);
        let mut acc = 0.0;
        for e in edges.windows(2) {
            for (w, wt) in rule.mapped(e[0], e[1]) {
                acc += wt * integrand(w)?;
            }
        }
        let value = scale * acc;
        let rel_change = (value - previous).abs() / value.abs().max(f64::MIN_POSITIVE);
        if rel_change < SELF_CONV_TOL {
            return Ok(EstarEstimate {
                value: value.max(0.0),
                rel_change,
                method: EstarMethod::Quadrature { order },
            });
        }
        previous = value;
        order *= 2;
    }
    Err(Error::Quadrature(format!(
        "E* at t = {t}, z = {z}, beta = {beta}, hurst = {hurst} did not self-converge"
    )))
}
