use super::fit::{rate_fit, RateFit};
use crate::covariance::variance_trace_from;
use crate::error::{Error, Result};
use crate::model::{
    check_admissibility, sample_combined_from, ModeVariances, ModelParams, PowerSpectra,
};
use crate::sphere::{evaluate, SpherePoint};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// ‖X(t) − X_{L′}(t)‖ in L₂(Ω × 𝕊²) for the combined solution, from the exact tail sum.
pub fn truncation_tail_norm(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    l_prime: usize,
) -> Result<f64> {
    if l_prime > spectra.l_max() {
        return Err(Error::Range(format!(
            "truncation degree {l_prime} exceeds spectrum length {}",
            spectra.l_max()
        )));
    }
    check_admissibility(params, spectra)?;
    Ok(ModeVariances::combined(params, spectra, t)?
        .tail_energy(l_prime)
        .sqrt())
}

/// Fitted decay of the exact tail norm against the truncation degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationStudy {
    pub t: f64,
    pub nu: f64,
    /// Spectrum length; the finite-sum stand-in for the infinite tail.
    pub l_max: usize,
    pub degrees: Vec<usize>,
    pub tail_norms: Vec<f64>,
    pub fit: RateFit,
    /// ν of the bound hypothesis (A¹ + A²)ψ^τ ≤ Cℓ^{-ν}, i.e. ν − τ(α+γ).
    pub bound_nu: f64,
    /// −(bound_nu − 2)/2.
    pub bound_slope: f64,
    /// Slope implied by E* ~ ψ^{-2(β+H-1)/β} at large ψ; equals `bound_slope` when α+γ = 0.
    pub effective_slope: f64,
}

impl TruncationStudy {
    pub fn slope_error(&self) -> f64 {
        self.fit.slope - self.bound_slope
    }

    pub fn within(&self, tol: f64) -> bool {
        self.slope_error().abs() <= tol
    }
}

/// Exact tail norms at each degree of `degrees` and their log-log slope.
pub fn truncation_rate_study(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    degrees: &[usize],
) -> Result<TruncationStudy> {
    let law = spectra
        .noise_law
        .ok_or_else(|| Error::invalid("truncation study needs a power-law noise spectrum"))?;
    if degrees.len() < 3 {
        return Err(Error::Range(format!(
            "truncation study needs at least 3 degrees, got {}",
            degrees.len()
        )));
    }
    if let Some(&l) = degrees.iter().find(|&&l| l == 0 || l >= spectra.l_max()) {
        return Err(Error::Range(format!(
            "truncation degree {l} outside 1..{}",
            spectra.l_max()
        )));
    }
    check_admissibility(params, spectra)?;
    let v = ModeVariances::combined(params, spectra, t)?;
    let tail_norms: Vec<f64> = degrees.iter().map(|&l| v.tail_energy(l).sqrt()).collect();
    let xs: Vec<f64> = degrees.iter().map(|&l| l as f64).collect();
    let fit = rate_fit(&xs, &tail_norms)?;
    let growth = params.alpha + params.gamma;
    let bound_nu = law.nu - params.tau() * growth;
    let bound_slope = -(bound_nu - 2.0) / 2.0;
    let effective_slope = if params.has_finite_mode_variance() {
        -(law.nu - 2.0) / 2.0 - growth * (params.beta + params.hurst - 1.0) / params.beta
    } else {
        bound_slope
    };
    Ok(TruncationStudy {
        t,
        nu: law.nu,
        l_max: spectra.l_max(),
        degrees: degrees.to_vec(),
        tail_norms,
        fit,
        bound_nu,
        bound_slope,
        effective_slope,
    })
}

/// Monte Carlo check of P(|X(t,x) − X_{L′}(t,x)| ≥ ε) ≤ E|X − X_{L′}|²(x) / ε².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevReport {
    pub t: f64,
    pub l_prime: usize,
    pub eps: f64,
    pub replicates: usize,
    pub point: [f64; 2],
    /// Exact E|X(t,x) − X_{L′}(t,x)|², the same at every x.
    pub tail_variance: f64,
    /// tail_variance / ε².
    pub bound: f64,
    /// Monte Carlo estimate of tail_variance.
    pub empirical_variance: f64,
    pub exceedances: usize,
    pub frequency: f64,
    /// Binomial standard error of `frequency`.
    pub standard_error: f64,
    pub pass: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn chebyshev_tail_check(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    l_prime: usize,
    eps: f64,
    replicates: usize,
    point: &SpherePoint,
    seed: u64,
) -> Result<ChebyshevReport> {
    if l_prime >= spectra.l_max() {
        return Err(Error::Range(format!(
            "truncation degree {l_prime} must be below spectrum length {}",
            spectra.l_max()
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    if replicates == 0 {
        return Err(Error::Range("need at least one replicate".into()));
    }
    check_admissibility(params, spectra)?;
    let v = ModeVariances::combined(params, spectra, t)?;
    let tail_variance = v.tail_energy(l_prime) / (4.0 * PI);
    debug_assert!(tail_variance <= variance_trace_from(&v) * (1.0 + 1e-12));
    let sq: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut c = sample_combined_from(&v, spectra, seed, rep)?;
            c.scale_by_degree(|l| if l <= l_prime { 0.0 } else { 1.0 });
            Ok(evaluate(&c, point)?.norm_squared())
        })
        .collect::<Result<_>>()?;
    let eps2 = eps * eps;
    let exceedances = sq.iter().filter(|&&s| s >= eps2).count();
    let n = replicates as f64;
    let frequency = exceedances as f64 / n;
    let standard_error = (frequency * (1.0 - frequency) / n).sqrt();
    let bound = tail_variance / eps2;
    Ok(ChebyshevReport {
        t,
        l_prime,
        eps,
        replicates,
        point: [point.theta, point.phi],
        tail_variance,
        bound,
        empirical_variance: sq.iter().sum::<f64>() / n,
        exceedances,
        frequency,
        standard_error,
        pass: frequency <= bound + 3.0 * standard_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_solution_exact_time, PowerLaw};

    fn bounded_psi() -> ModelParams {
        ModelParams::new(1.0, -1.0, 0.8, 0.7, 0.0).unwrap()
    }

    #[test]
    fn tail_norm_is_monotone_and_vanishes_at_l() {
        let s = PowerSpectra::power_law(20, PowerLaw::new(1.0, 4.0).unwrap()).unwrap();
        let p = bounded_psi();
        assert_eq!(truncation_tail_norm(&p, &s, 1.0, 20).unwrap(), 0.0);
        let norms: Vec<f64> = (0..=20)
            .map(|l| truncation_tail_norm(&p, &s, 1.0, l).unwrap())
            .collect();
        assert!(norms.windows(2).all(|w| w[0] >= w[1]));
        assert!(truncation_tail_norm(&p, &s, 1.0, 21).is_err());
    }

    #[test]
    fn tail_norm_matches_monte_carlo() {
        let p = ModelParams::new(1.5, 0.0, 0.9, 0.6, 0.0).unwrap();
        let s = PowerSpectra::power_law(12, PowerLaw::new(1.0, 3.0).unwrap()).unwrap();
        let l_prime = 4;
        let exact = truncation_tail_norm(&p, &s, 1.0, l_prime).unwrap().powi(2);
        // same law and streams as sample_solution_exact_time, with the variances hoisted
        let v = ModeVariances::noise_driven(&p, &s, 1.0).unwrap();
        let draw = |r| sample_combined_from(&v, &s, 5, r).unwrap();
        assert_eq!(
            draw(0),
            sample_solution_exact_time(&p, &s, 1.0, 5, 0).unwrap()
        );
        let reps = 2000u64;
        let sq: Vec<f64> = (0..reps)
            .map(|r| {
                let c = draw(r);
                c.norm_sq() - c.truncate(l_prime).unwrap().norm_sq()
            })
            .collect();
        let n = reps as f64;
        let mean = sq.iter().sum::<f64>() / n;
        let var = sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!(
            (mean - exact).abs() < 4.0 * se,
            "{mean} vs {exact} (se {se})"
        );
    }

    #[test]
    fn rate_study_recovers_bound_slope_for_bounded_psi() {
        let p = bounded_psi();
        let s = PowerSpectra::power_law(4096, PowerLaw::new(1.0, 4.0).unwrap()).unwrap();
        let r = truncation_rate_study(&p, &s, 1.0, &[8, 16, 32, 64]).unwrap();
        assert_eq!(r.bound_slope, -1.0);
        assert_eq!(r.effective_slope, -1.0);
        assert!(r.within(0.15), "slope {}", r.fit.slope);
    }

    #[test]
    fn doubling_amplitude_shifts_intercept_only() {
        let p = bounded_psi();
        let s1 = PowerSpectra::power_law(512, PowerLaw::new(1.0, 3.0).unwrap()).unwrap();
        let s2 = PowerSpectra::power_law(512, PowerLaw::new(2.0, 3.0).unwrap()).unwrap();
        let l = [8, 16, 32];
        let r1 = truncation_rate_study(&p, &s1, 1.0, &l).unwrap();
        let r2 = truncation_rate_study(&p, &s2, 1.0, &l).unwrap();
        assert!((r1.fit.slope - r2.fit.slope).abs() < 1e-6);
        assert!((r2.fit.intercept - r1.fit.intercept - 0.5 * 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn rate_study_preconditions() {
        let p = bounded_psi();
        let s = PowerSpectra::power_law(64, PowerLaw::new(1.0, 4.0).unwrap()).unwrap();
        assert!(matches!(
            truncation_rate_study(&p, &s, 1.0, &[8, 16]),
            Err(Error::Range(_))
        ));
        let arrays =
            PowerSpectra::from_arrays(vec![1.0; 8], vec![1.0; 8], vec![0.0; 8], vec![0.0; 8])
                .unwrap();
        assert!(truncation_rate_study(&p, &arrays, 1.0, &[1, 2, 4]).is_err());
    }

    #[test]
    fn chebyshev_limits() {
        let p = ModelParams::new(1.0, 0.0, 1.0, 0.5, 0.0).unwrap();
        let s = PowerSpectra::power_law(12, PowerLaw::new(1.0, 3.0).unwrap()).unwrap();
        let x = SpherePoint::from_angles(1.0, 2.0).unwrap();
        let huge = chebyshev_tail_check(&p, &s, 1.0, 4, 1e6, 500, &x, 1).unwrap();
        assert_eq!(huge.exceedances, 0);
        assert!(huge.pass);
        let sd = huge.tail_variance.sqrt();
        let one_sd = chebyshev_tail_check(&p, &s, 1.0, 4, sd, 2000, &x, 1).unwrap();
        assert!((one_sd.bound - 1.0).abs() < 1e-12);
        assert!(one_sd.frequency < 1.0 && one_sd.pass);
        // the Monte Carlo variance at x tracks the exact tail variance
        assert!((one_sd.empirical_variance / one_sd.tail_variance - 1.0).abs() < 0.15);
    }
}
