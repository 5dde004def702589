use crate::error::{Error, Result};
use crate::sphere::eigenvalue;
use serde::{Deserialize, Serialize};

/// Exponents of the equation: ψ(λ) = λ^{α/2}(1+λ)^{γ/2}, time order β, Hurst index H,
/// and the length t₀ of the first stage of the combined solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub hurst: f64,
    #[serde(default)]
    pub t0: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, gamma: f64, beta: f64, hurst: f64, t0: f64) -> Result<Self> {
        let p = ModelParams {
            alpha,
            gamma,
            beta,
            hurst,
            t0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.gamma, self.beta, self.hurst, self.t0];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("all parameters finite"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::invalid("0 < alpha <= 2"));
        }
        let s = self.alpha + self.gamma;
        if !(0.0..=2.0).contains(&s) {
            return Err(Error::invalid("0 <= alpha + gamma <= 2"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::invalid("0 < beta <= 1"));
        }
        if !(0.5..1.0).contains(&self.hurst) {
            return Err(Error::invalid("0.5 <= hurst < 1"));
        }
        if self.t0 < 0.0 {
            return Err(Error::invalid("t0 >= 0"));
        }
        Ok(())
    }

    /// ψ(λ) = λ^{α/2} (1+λ)^{γ/2}.
    pub fn psi(&self, lambda: f64) -> f64 {
        psi(lambda, self)
    }

    /// ψ(λ_ℓ) with λ_ℓ = ℓ(ℓ+1).
    pub fn psi_degree(&self, ell: usize) -> f64 {
        psi(eigenvalue(ell), self)
    }

    /// τ = max{(2/β)(1-β-H), 0}.
    pub fn tau(&self) -> f64 {
        tau_exponent(self)
    }

    /// β + H > 1: the per-mode variances of the noise-driven solution are finite.
    pub fn has_finite_mode_variance(&self) -> bool {
        self.beta + self.hurst > 1.0
    }
}

pub fn psi(lambda: f64, params: &ModelParams) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    lambda.powf(0.5 * params.alpha) * (1.0 + lambda).powf(0.5 * params.gamma)
}

pub fn tau_exponent(params: &ModelParams) -> f64 {
    (2.0 / params.beta * (1.0 - params.beta - params.hurst)).max(0.0)
}
