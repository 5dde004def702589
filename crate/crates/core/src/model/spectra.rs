use super::params::ModelParams;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A_ℓ = c ℓ^{-ν}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub c: f64,
    pub nu: f64,
}

impl PowerLaw {
    pub fn new(c: f64, nu: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::invalid("power-law amplitude c >= 0"));
        }
        if !nu.is_finite() {
            return Err(Error::invalid("power-law exponent nu finite"));
        }
        Ok(PowerLaw { c, nu })
    }

    pub fn at(&self, ell: usize) -> f64 {
        self.c * (ell as f64).powf(-self.nu)
    }
}

/// Per-degree variances for ℓ = 1..=L: noise (A¹, A²) and initial field (σ̂², σ̃²).
/// Vectors are indexed by ℓ - 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectra {
    l_max: usize,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub sig_hat2: Vec<f64>,
    pub sig_tilde2: Vec<f64>,
    /// Set when A¹ = A² follow a power law.
    pub noise_law: Option<PowerLaw>,
    /// Set when σ̂² = σ̃² follow a power law.
    pub initial_law: Option<PowerLaw>,
}

impl PowerSpectra {
    pub fn from_arrays(
        a1: Vec<f64>,
        a2: Vec<f64>,
        sig_hat2: Vec<f64>,
        sig_tilde2: Vec<f64>,
    ) -> Result<Self> {
        let l_max = a1.len();
        if l_max == 0 {
            return Err(Error::Range("spectra need at least degree 1".into()));
        }
        for (name, v) in [
            ("a2", &a2),
            ("sig_hat2", &sig_hat2),
            ("sig_tilde2", &sig_tilde2),
        ] {
            if v.len() != l_max {
                return Err(Error::invalid(format!(
                    "{name} has {} entries, expected {l_max}",
                    v.len()
                )));
            }
        }
        for v in a1.iter().chain(&a2).chain(&sig_hat2).chain(&sig_tilde2) {
            if !(*v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid("spectral variances finite and >= 0"));
            }
        }
        Ok(PowerSpectra {
            l_max,
            a1,
            a2,
            sig_hat2,
            sig_tilde2,
            noise_law: None,
            initial_law: None,
        })
    }

    /// A¹_ℓ = A²_ℓ = c ℓ^{-ν}, zero initial field.
    pub fn power_law(l_max: usize, law: PowerLaw) -> Result<Self> {
        let a: Vec<f64> = (1..=l_max).map(|l| law.at(l)).collect();
        let mut s = Self::from_arrays(a.clone(), a, vec![0.0; l_max], vec![0.0; l_max])?;
        s.noise_law = Some(law);
        Ok(s)
    }

    /// Replaces the initial-field spectra by σ̂²_ℓ = σ̃²_ℓ = c ℓ^{-ν}.
    pub fn with_initial_law(mut self, law: PowerLaw) -> Self {
        let v: Vec<f64> = (1..=self.l_max).map(|l| law.at(l)).collect();
        self.sig_hat2 = v.clone();
        self.sig_tilde2 = v;
        self.initial_law = Some(law);
        self
    }

    /// Drops the initial field.
    pub fn without_initial(mut self) -> Self {
        self.sig_hat2.iter_mut().for_each(|v| *v = 0.0);
        self.sig_tilde2.iter_mut().for_each(|v| *v = 0.0);
        self.initial_law = None;
        self
    }

    /// Drops the noise.
    pub fn without_noise(mut self) -> Self {
        self.a1.iter_mut().for_each(|v| *v = 0.0);
        self.a2.iter_mut().for_each(|v| *v = 0.0);
        self.noise_law = None;
        self
    }

    /// Multiplies the noise spectra by `factor`.
    pub fn scale_noise(mut self, factor: f64) -> Self {
        self.a1
            .iter_mut()
            .chain(self.a2.iter_mut())
            .for_each(|v| *v *= factor);
        self.noise_law = self.noise_law.map(|l| PowerLaw {
            c: l.c * factor,
            nu: l.nu,
        });
        self
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn a1(&self, ell: usize) -> f64 {
        self.a1[ell - 1]
    }

    pub fn a2(&self, ell: usize) -> f64 {
        self.a2[ell - 1]
    }

    pub fn sig_hat2(&self, ell: usize) -> f64 {
        self.sig_hat2[ell - 1]
    }

    pub fn sig_tilde2(&self, ell: usize) -> f64 {
        self.sig_tilde2[ell - 1]
    }
}

/// Decision on summability of Σ(2ℓ+1) w_ℓ for an infinite spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Summability {
    /// Decided from the power-law exponent.
    Summable,
    NotSummable,
    /// Explicit arrays: only the finite partial sum is known.
    FiniteLOnly,
}

/// Outcome of the admissibility checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub tau: f64,
    /// ψ(λ_ℓ)^τ grows like ℓ^{τ(α+γ)}.
    pub psi_tau_growth: f64,
    /// Exponent ν of A_ℓ = cℓ^{-ν} above which the noise condition holds: 2 + τ(α+γ).
    pub required_nu: f64,
    pub noise_nu: Option<f64>,
    pub noise: Summability,
    /// Σ_{ℓ≤L} (2ℓ+1) ψ(λ_ℓ)^τ (A¹_ℓ + A²_ℓ).
    pub noise_partial_sum: f64,
    pub initial_nu: Option<f64>,
    pub initial: Summability,
    /// Σ_{ℓ≤L} (2ℓ+1)(σ̂²_ℓ + σ̃²_ℓ).
    pub initial_partial_sum: f64,
    /// β + H > 1, so per-mode variances (and E*) are finite.
    pub finite_mode_variance: bool,
    pub notes: Vec<String>,
}

impl AdmissibilityReport {
    pub fn ok(&self) -> bool {
        self.noise != Summability::NotSummable
            && self.initial != Summability::NotSummable
            && self.finite_mode_variance
    }

    /// Error unless the solution can be sampled and its variances evaluated.
    pub fn require(&self) -> Result<()> {
        if self.ok() {
            Ok(())
        } else {
            Err(Error::Admissibility(self.notes.join("; ")))
        }
    }
}

pub fn check_admissibility(
    params: &ModelParams,
    spectra: &PowerSpectra,
) -> Result<AdmissibilityReport> {
    params.validate()?;
    let tau = params.tau();
    let growth = tau * (params.alpha + params.gamma);
    let required_nu = 2.0 + growth;
    let mut notes = Vec::new();

    let noise_partial_sum: f64 = (1..=spectra.l_max())
        .map(|l| {
            let w = if tau == 0.0 {
                1.0
            } else {
                params.psi_degree(l).powf(tau)
            };
            (2 * l + 1) as f64 * w * (spectra.a1(l) + spectra.a2(l))
        })
        .sum();
    let noise = match spectra.noise_law {
        Some(law) if law.c == 0.0 => Summability::Summable,
        Some(law) if law.nu > required_nu => Summability::Summable,
        Some(law) => {
            notes.push(format!(
                "noise spectrum exponent nu = {} must exceed 2 + tau(alpha + gamma) = {required_nu}",
                law.nu
            ));
            Summability::NotSummable
        }
        None => Summability::FiniteLOnly,
    };

    let initial_partial_sum: f64 = (1..=spectra.l_max())
        .map(|l| (2 * l + 1) as f64 * (spectra.sig_hat2(l) + spectra.sig_tilde2(l)))
        .sum();
    let initial = match spectra.initial_law {
        Some(law) if law.c == 0.0 || law.nu > 2.0 => Summability::Summable,
        Some(law) => {
            notes.push(format!(
                "initial spectrum exponent nu = {} must exceed 2",
                law.nu
            ));
            Summability::NotSummable
        }
        None if initial_partial_sum == 0.0 => Summability::Summable,
        None => Summability::FiniteLOnly,
    };

    let finite_mode_variance = params.has_finite_mode_variance();
    if !finite_mode_variance {
        notes.push(format!(
            "beta + hurst = {} <= 1: the mode variances of the noise-driven solution diverge",
            params.beta + params.hurst
        ));
    }
    Ok(AdmissibilityReport {
        tau,
        psi_tau_growth: growth,
        required_nu,
        noise_nu: spectra.noise_law.map(|l| l.nu),
        noise,
        noise_partial_sum,
        initial_nu: spectra.initial_law.map(|l| l.nu),
        initial,
        initial_partial_sum,
        finite_mode_variance,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_spectra() {
        let s = PowerSpectra::power_law(4, PowerLaw::new(2.0, 3.0).unwrap()).unwrap();
        assert_eq!(s.l_max(), 4);
        assert_eq!(s.a1(2), 0.25);
        assert_eq!(s.a2(2), 0.25);
        assert_eq!(s.sig_hat2(3), 0.0);
        let s = s.with_initial_law(PowerLaw::new(1.0, 4.0).unwrap());
        assert_eq!(s.sig_tilde2(2), 1.0 / 16.0);
    }

    #[test]
    fn array_validation() {
        assert!(PowerSpectra::from_arrays(vec![], vec![], vec![], vec![]).is_err());
        assert!(
            PowerSpectra::from_arrays(vec![1.0], vec![1.0, 2.0], vec![0.0], vec![0.0]).is_err()
        );
        assert!(PowerSpectra::from_arrays(vec![-1.0], vec![1.0], vec![0.0], vec![0.0]).is_err());
        assert!(
            PowerSpectra::from_arrays(vec![1.0], vec![1.0], vec![0.0], vec![f64::NAN]).is_err()
        );
    }

    #[test]
    fn admissibility_uses_tau_growth() {
        let law = |nu| PowerSpectra::power_law(8, PowerLaw::new(1.0, nu).unwrap()).unwrap();
        // β + H > 1: τ = 0, threshold 2
        let p = ModelParams::new(1.0, 0.5, 0.8, 0.7, 0.0).unwrap();
        assert!(check_admissibility(&p, &law(2.5)).unwrap().ok());
        assert!(!check_admissibility(&p, &law(2.0)).unwrap().ok());
        // β = 0.4, H = 0.5: τ = 0.5, α + γ = 1.5, threshold 2.75; mode variances diverge anyway
        let p = ModelParams::new(1.0, 0.5, 0.4, 0.5, 0.0).unwrap();
        let r = check_admissibility(&p, &law(3.0)).unwrap();
        assert_eq!(r.required_nu, 2.75);
        assert_eq!(r.noise, Summability::Summable);
        assert!(!r.finite_mode_variance);
        assert!(matches!(r.require(), Err(Error::Admissibility(_))));
        assert_eq!(
            check_admissibility(&p, &law(2.7)).unwrap().noise,
            Summability::NotSummable
        );
    }

    #[test]
    fn explicit_arrays_are_finite_l_only() {
        let s =
            PowerSpectra::from_arrays(vec![1.0, 0.5], vec![1.0, 0.5], vec![0.0; 2], vec![0.1, 0.0])
                .unwrap();
        let p = ModelParams::new(2.0, 0.0, 1.0, 0.5, 0.0).unwrap();
        let r = check_admissibility(&p, &s).unwrap();
        assert_eq!(r.noise, Summability::FiniteLOnly);
        assert_eq!(r.initial, Summability::FiniteLOnly);
        assert!((r.noise_partial_sum - (3.0 * 2.0 + 5.0 * 1.0)).abs() < 1e-14);
        assert!((r.initial_partial_sum - 0.3).abs() < 1e-14);
        assert!(r.ok());
    }
}
