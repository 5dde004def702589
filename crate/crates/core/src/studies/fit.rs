use crate::error::{Error, Result};
use serde::Serialize;

/// Least-squares line through (log x, log y).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    /// log x.
    pub xs: Vec<f64>,
    /// log y.
    pub ys: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Sum of squared residuals.
    pub residual: f64,
    /// Standard error of the slope, sqrt(residual / (n - 2) / Sxx).
    pub slope_se: f64,
}

impl RateFit {
    /// Gradient of the residual with respect to (intercept, slope); zero at the optimum.
    pub fn residual_gradient(&self) -> (f64, f64) {
        let (mut gi, mut gs) = (0.0, 0.0);
        for (x, y) in self.xs.iter().zip(&self.ys) {
            let r = y - self.intercept - self.slope * x;
            gi -= 2.0 * r;
            gs -= 2.0 * r * x;
        }
        (gi, gs)
    }
}

/// Ordinary least squares on (log x, log y).
pub fn rate_fit(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "{} abscissae but {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::Range(format!(
            "rate fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain(
            "rate fit needs finite positive abscissae and values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let scale: f64 = lx.iter().map(|x| x * x).sum();
    if sxx <= 1e-20 * scale.max(1.0) {
        return Err(Error::Domain("degenerate abscissae in rate fit".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_se = (residual / (n - 2.0) / sxx).sqrt();
    Ok(RateFit {
        xs: lx,
        ys: ly,
        slope,
        intercept,
        residual,
        slope_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{standard_normal, RngStream};

    #[test]
    fn exact_power_laws() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let f = rate_fit(&xs, &xs).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14);
        assert!(f.residual < 1e-28);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powi(-2)).collect();
        let f = rate_fit(&xs, &ys).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-10);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn noisy_slope_within_analytic_standard_error() {
        // log y = 0.5 - log x + N(0, s²): the OLS slope has standard deviation s / sqrt(Sxx)
        let s = 0.05;
        let xs: Vec<f64> = (1..=40).map(|k| k as f64).collect();
        let mut rng = RngStream::new(11, 0).rng();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| (0.5 - x.ln() + s * standard_normal(&mut rng)).exp())
            .collect();
        let f = rate_fit(&xs, &ys).unwrap();
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let m = lx.iter().sum::<f64>() / lx.len() as f64;
        let sxx: f64 = lx.iter().map(|x| (x - m).powi(2)).sum();
        let analytic_se = s / sxx.sqrt();
        assert!((f.slope + 1.0).abs() < 3.0 * analytic_se);
        assert!((f.slope_se / analytic_se - 1.0).abs() < 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            rate_fit(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::Range(_))
        ));
        assert!(rate_fit(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(rate_fit(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]).is_err());
        assert!(rate_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
