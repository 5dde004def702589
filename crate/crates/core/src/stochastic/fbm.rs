use super::rng::{standard_normal, RngStream};
use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// A sampled fractional Brownian motion path; `sigma2` is Var B(1) per real component
/// (for complex paths, the total E|B(1)|²).
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath<T> {
    pub hurst: f64,
    pub sigma2: f64,
    pub times: Vec<f64>,
    pub values: Vec<T>,
}

/// fBm covariance (σ²/2)(t^{2H} + s^{2H} - |t-s|^{2H}).
pub fn fbm_covariance(hurst: f64, sigma2: f64, t: f64, s: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * sigma2 * (t.abs().powf(h2) + s.abs().powf(h2) - (t - s).abs().powf(h2))
}

/// Mesh s_k = t (k/n)^{1/β}, k = 0..=n, fine near 0 where s^{β-1} is singular.
pub fn graded_mesh(t: f64, n: usize, beta: f64) -> Vec<f64> {
    let mut mesh: Vec<f64> = (0..=n)
        .map(|k| t * (k as f64 / n as f64).powf(1.0 / beta))
        .collect();
    mesh[n] = t;
    mesh
}

/// Uniform mesh 0, t/n, ..., t.
pub fn uniform_mesh(t: f64, n: usize) -> Vec<f64> {
    let mut mesh: Vec<f64> = (0..=n).map(|k| t * k as f64 / n as f64).collect();
    mesh[n] = t;
    mesh
}

/// How a generator produces exact Gaussian paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbmMethod {
    /// H = 1/2: independent increments.
    Independent,
    /// Uniform mesh: circulant embedding of fractional Gaussian noise.
    Circulant,
    /// Any mesh: Cholesky factor of the increment covariance.
    Cholesky,
}

enum Engine {
    Independent {
        scales: Vec<f64>,
    },
    Circulant {
        sqrt_eigs: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
        scale: f64,
    },
    Cholesky {
        lower: DMatrix<f64>,
    },
}

/// Precomputed exact sampler of unit-variance fBm on a fixed mesh.
pub struct FbmGenerator {
    hurst: f64,
    times: Vec<f64>,
    engine: Engine,
}

impl std::fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmGenerator")
            .field("hurst", &self.hurst)
            .field("points", &self.times.len())
            .field("method", &self.method())
            .finish()
    }
}

fn validate(hurst: f64, times: &[f64]) -> Result<()> {
    if !(0.5..1.0).contains(&hurst) {
        return Err(Error::invalid("0.5 <= hurst < 1"));
    }
    if times.len() < 2 || times[0] != 0.0 {
        return Err(Error::Domain(
            "fBm mesh must start at 0 and have at least two points".into(),
        ));
    }
    if times
        .windows(2)
        .any(|w| !(w[1] > w[0]) || !w[1].is_finite())
    {
        return Err(Error::Domain("fBm mesh must be strictly increasing".into()));
    }
    Ok(())
}

fn is_uniform(times: &[f64]) -> bool {
    let d0 = times[1] - times[0];
    times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - d0).abs() <= 1e-12 * d0.max(times[times.len() - 1]))
}

impl FbmGenerator {
    pub fn new(hurst: f64, times: &[f64]) -> Result<Self> {
        validate(hurst, times)?;
        let n = times.len() - 1;
        let engine = if hurst == 0.5 {
            Engine::Independent {
                scales: times.windows(2).map(|w| (w[1] - w[0]).sqrt()).collect(),
            }
        } else if is_uniform(times) {
            circulant(hurst, n, times[n] / n as f64)?
        } else {
            cholesky(hurst, times)?
        };
        Ok(FbmGenerator {
            hurst,
            times: times.to_vec(),
            engine,
        })
    }

    pub fn method(&self) -> FbmMethod {
        match self.engine {
            Engine::Independent { .. } => FbmMethod::Independent,
            Engine::Circulant { .. } => FbmMethod::Circulant,
            Engine::Cholesky { .. } => FbmMethod::Cholesky,
        }
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Two independent unit-variance increment sequences.
    fn increments_pair<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        want_second: bool,
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.times.len() - 1;
        match &self.engine {
            Engine::Independent { scales } => {
                let a = scales.iter().map(|s| s * standard_normal(rng)).collect();
                let b = if want_second {
                    scales.iter().map(|s| s * standard_normal(rng)).collect()
                } else {
                    Vec::new()
                };
                (a, b)
            }
            Engine::Circulant {
                sqrt_eigs,
                fft,
                scale,
            } => {
                let mut buf: Vec<Complex64> = sqrt_eigs
                    .iter()
                    .map(|s| Complex64::new(s * standard_normal(rng), s * standard_normal(rng)))
                    .collect();
                fft.process(&mut buf);
                let a = buf[..n].iter().map(|c| c.re * scale).collect();
                let b = buf[..n].iter().map(|c| c.im * scale).collect();
                (a, b)
            }
            Engine::Cholesky { lower } => {
                let draw = |rng: &mut R| -> Vec<f64> {
                    let xi: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
                    (0..n)
                        .map(|i| {
                            let row = lower.row(i);
                            (0..=i).map(|j| row[j] * xi[j]).sum()
                        })
                        .collect()
                };
                let a = draw(rng);
                let b = if want_second { draw(rng) } else { Vec::new() };
                (a, b)
            }
        }
    }

    /// Real fBm path with Var B(1) = sigma2.
    pub fn sample_real<R: Rng + ?Sized>(&self, sigma2: f64, rng: &mut R) -> FbmPath<f64> {
        let (inc, _) = self.increments_pair(rng, false);
        let s = sigma2.sqrt();
        let mut values = Vec::with_capacity(inc.len() + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for d in inc {
            acc += s * d;
            values.push(acc);
        }
        FbmPath {
            hurst: self.hurst,
            sigma2,
            times: self.times.clone(),
            values,
        }
    }

    /// Complex fBm B¹ + iB² with independent components of variance sigma2_total/2 at t = 1.
    pub fn sample_complex<R: Rng + ?Sized>(
        &self,
        sigma2_total: f64,
        rng: &mut R,
    ) -> FbmPath<Complex64> {
        let (re, im) = self.increments_pair(rng, true);
        let s = (0.5 * sigma2_total).sqrt();
        let mut values = Vec::with_capacity(re.len() + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        values.push(acc);
        for (a, b) in re.into_iter().zip(im) {
            acc += Complex64::new(s * a, s * b);
            values.push(acc);
        }
        FbmPath {
            hurst: self.hurst,
            sigma2: sigma2_total,
            times: self.times.clone(),
            values,
        }
    }
}

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
fn fgn_autocov(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

fn circulant(hurst: f64, n: usize, dt: f64) -> Result<Engine> {
    let m = 2 * n;
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex64::new(fgn_autocov(hurst, lag), 0.0)
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    fft.process(&mut row);
    let max = row.iter().map(|c| c.re).fold(0.0, f64::max);
    let mut sqrt_eigs = Vec::with_capacity(m);
    for c in &row {
        if c.re < -1e-10 * max {
            return Err(Error::NotPositiveDefinite(format!(
                "circulant embedding has negative eigenvalue {} (H = {hurst}, n = {n})",
                c.re
            )));
        }
        sqrt_eigs.push((c.re.max(0.0) / m as f64).sqrt());
    }
    Ok(Engine::Circulant {
        sqrt_eigs,
        fft,
        scale: dt.powf(hurst),
    })
}

fn cholesky(hurst: f64, times: &[f64]) -> Result<Engine> {
    let n = times.len() - 1;
    let h2 = 2.0 * hurst;
    let p = |x: f64| x.abs().powf(h2);
    let cov = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return p(times[i + 1] - times[i]);
        }
        let (a0, a1, b0, b1) = (times[i], times[i + 1], times[j], times[j + 1]);
        0.5 * (p(a1 - b0) + p(a0 - b1) - p(a1 - b1) - p(a0 - b0))
    });
    let chol = Cholesky::new(cov).ok_or_else(|| {
        Error::NotPositiveDefinite(format!(
            "increment covariance not positive definite (H = {hurst}, n = {n})"
        ))
    })?;
    Ok(Engine::Cholesky { lower: chol.l() })
}

/// Real fBm sample on `times` with Var B(1) = sigma2.
pub fn sample_real_fbm(
    hurst: f64,
    sigma2: f64,
    times: &[f64],
    stream: RngStream,
) -> Result<FbmPath<f64>> {
    check_variance(sigma2)?;
    Ok(FbmGenerator::new(hurst, times)?.sample_real(sigma2, &mut stream.rng()))
}

/// Complex fBm sample on `times` with E|B(1)|² = sigma2_total.
pub fn sample_complex_fbm(
    hurst: f64,
    sigma2_total: f64,
    times: &[f64],
    stream: RngStream,
) -> Result<FbmPath<Complex64>> {
    check_variance(sigma2_total)?;
    Ok(FbmGenerator::new(hurst, times)?.sample_complex(sigma2_total, &mut stream.rng()))
}

fn check_variance(sigma2: f64) -> Result<()> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::invalid("sigma2 > 0"));
    }
    Ok(())
}
