use super::params::ModelParams;
use super::spectra::PowerSpectra;
use crate::covariance::estar;
use crate::error::{Error, Result};
use crate::specfun::mittag_leffler;
use rayon::prelude::*;

/// E_{β,1}(-t^β ψ): the Cauchy-problem multiplier of a degree with symbol ψ.
pub fn relaxation(params: &ModelParams, t: f64, psi: f64) -> Result<f64> {
    if t == 0.0 || psi == 0.0 {
        return Ok(1.0);
    }
    let arg = -t.powf(params.beta) * psi;
    if params.beta == 1.0 {
        return Ok(arg.exp());
    }
    mittag_leffler(params.beta, 1.0, arg)
}

/// Per-degree variances E|X_ℓm|² of one solution at a fixed time, split by family and source.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVariances {
    /// Noise time t.
    pub t: f64,
    /// Time at which the initial field is propagated (t₀ for the combined solution).
    pub t_initial: f64,
    pub psi: Vec<f64>,
    /// E*(t, ψ_ℓ), zero when t = 0.
    pub estar: Vec<f64>,
    /// E_{β,1}(-t_initial^β ψ_ℓ).
    pub relaxation: Vec<f64>,
    pub div_noise: Vec<f64>,
    pub curl_noise: Vec<f64>,
    pub div_initial: Vec<f64>,
    pub curl_initial: Vec<f64>,
}

impl ModeVariances {
    /// Noise term at time t plus the initial field relaxed over `t_initial`.
    pub fn new(
        params: &ModelParams,
        spectra: &PowerSpectra,
        t: f64,
        t_initial: f64,
    ) -> Result<Self> {
        params.validate()?;
        if !(t >= 0.0) || !(t_initial >= 0.0) || !t.is_finite() || !t_initial.is_finite() {
            return Err(Error::Domain(format!(
                "times must be finite and >= 0, got {t}, {t_initial}"
            )));
        }
        let has_noise = spectra.a1.iter().chain(&spectra.a2).any(|&a| a > 0.0);
        if t > 0.0 && has_noise && !params.has_finite_mode_variance() {
            return Err(Error::Admissibility(format!(
                "beta + hurst = {} <= 1: mode variances of the noise-driven solution diverge",
                params.beta + params.hurst
            )));
        }
        let l_max = spectra.l_max();
        let psi: Vec<f64> = (1..=l_max).map(|l| params.psi_degree(l)).collect();
        let estar: Vec<f64> = if t > 0.0 && has_noise {
            psi.par_iter()
                .map(|&z| estar(t, z, params.beta, params.hurst))
                .collect::<Result<_>>()?
        } else {
            vec![0.0; l_max]
        };
        let relaxation: Vec<f64> = psi
            .iter()
            .map(|&z| relaxation(params, t_initial, z))
            .collect::<Result<_>>()?;
        let mut v = ModeVariances {
            t,
            t_initial,
            div_noise: Vec::with_capacity(l_max),
            curl_noise: Vec::with_capacity(l_max),
            div_initial: Vec::with_capacity(l_max),
            curl_initial: Vec::with_capacity(l_max),
            psi,
            estar,
            relaxation,
        };
        for l in 1..=l_max {
            let e = v.estar[l - 1];
            let r2 = v.relaxation[l - 1].powi(2);
            v.div_noise.push(spectra.a1(l) * e);
            v.curl_noise.push(spectra.a2(l) * e);
            v.div_initial.push(spectra.sig_hat2(l) * r2);
            v.curl_initial.push(spectra.sig_tilde2(l) * r2);
        }
        Ok(v)
    }

    /// The noise-driven solution at time t.
    pub fn noise_driven(params: &ModelParams, spectra: &PowerSpectra, t: f64) -> Result<Self> {
        Self::new(params, &spectra.clone().without_initial(), t, 0.0)
    }

    /// The Cauchy solution at time t.
    pub fn cauchy(params: &ModelParams, spectra: &PowerSpectra, t: f64) -> Result<Self> {
        Self::new(params, &spectra.clone().without_noise(), 0.0, t)
    }

    /// The combined solution: initial field relaxed over t₀, noise integrated up to t.
    pub fn combined(params: &ModelParams, spectra: &PowerSpectra, t: f64) -> Result<Self> {
        Self::new(params, spectra, t, params.t0)
    }

    pub fn l_max(&self) -> usize {
        self.psi.len()
    }

    pub fn div(&self, ell: usize) -> f64 {
        self.div_noise[ell - 1] + self.div_initial[ell - 1]
    }

    pub fn curl(&self, ell: usize) -> f64 {
        self.curl_noise[ell - 1] + self.curl_initial[ell - 1]
    }

    /// (2ℓ+1)(div + curl): the degree-ℓ share of E‖X‖².
    pub fn degree_energy(&self, ell: usize) -> f64 {
        (2 * ell + 1) as f64 * (self.div(ell) + self.curl(ell))
    }

    /// Σ_{ℓ > l_prime} (2ℓ+1)(div + curl) = E‖X - X_{l_prime}‖².
    pub fn tail_energy(&self, l_prime: usize) -> f64 {
        // smallest terms first
        ((l_prime + 1)..=self.l_max())
            .rev()
            .map(|l| self.degree_energy(l))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::spectra::PowerLaw;

    #[test]
    fn brownian_exponential_case() {
        let p = ModelParams::new(2.0, 0.0, 1.0, 0.5, 0.0).unwrap();
        let s = PowerSpectra::power_law(3, PowerLaw::new(2.0, 3.0).unwrap()).unwrap();
        let v = ModeVariances::noise_driven(&p, &s, 1.0).unwrap();
        for l in 1..=3 {
            let z = (l * (l + 1)) as f64;
            let want = s.a1(l) * (1.0 - (-2.0 * z).exp()) / (2.0 * z);
            assert!((v.div(l) - want).abs() < 1e-14);
            assert_eq!(v.div(l), v.curl(l));
        }
    }

    #[test]
    fn tail_energy_is_monotone_and_ends_at_zero() {
        let p = ModelParams::new(1.0, 0.0, 0.8, 0.7, 0.5).unwrap();
        let s = PowerSpectra::power_law(10, PowerLaw::new(1.0, 4.0).unwrap())
            .unwrap()
            .with_initial_law(PowerLaw::new(0.5, 3.0).unwrap());
        let v = ModeVariances::combined(&p, &s, 1.0).unwrap();
        assert_eq!(v.tail_energy(10), 0.0);
        for l in 1..10 {
            assert!(v.tail_energy(l) > v.tail_energy(l + 1));
        }
    }

    #[test]
    fn cauchy_at_zero_is_initial_variance() {
        let p = ModelParams::new(1.0, 0.0, 0.6, 0.5, 0.0).unwrap();
        let s = PowerSpectra::power_law(4, PowerLaw::new(1.0, 4.0).unwrap())
            .unwrap()
            .with_initial_law(PowerLaw::new(0.5, 3.0).unwrap());
        let v = ModeVariances::cauchy(&p, &s, 0.0).unwrap();
        for l in 1..=4 {
            assert_eq!(v.div(l), s.sig_hat2(l));
        }
    }

    #[test]
    fn divergent_noise_is_an_admissibility_error() {
        let p = ModelParams::new(1.0, 0.0, 0.4, 0.5, 0.0).unwrap();
        let s = PowerSpectra::power_law(4, PowerLaw::new(1.0, 4.0).unwrap()).unwrap();
        assert!(matches!(
            ModeVariances::noise_driven(&p, &s, 1.0),
            Err(Error::Admissibility(_))
        ));
        assert!(ModeVariances::noise_driven(&p, &s, 0.0).is_ok());
    }
}
