use super::fit::{rate_fit, RateFit};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PowerSpectra};
use crate::stochastic::{integral_variance, MlKernel};
use rayon::prelude::*;
use serde::Serialize;

/// Gaps with |t − τ| ≤ this fraction of t + τ count as small in a gap sweep.
pub const SMALL_GAP_FRACTION: f64 = 0.05;

fn check_hypothesis(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.beta <= 1.0 - params.hurst {
        return Err(Error::Admissibility(format!(
            "increment bound needs 1 - H < beta, got beta = {}, H = {}",
            params.beta, params.hurst
        )));
    }
    Ok(())
}

/// Σ_ℓ (2ℓ+1)(A¹_ℓ + A²_ℓ) V_ℓ with V_ℓ = E|∫_τ^t s^{β-1}E_{β,β}(-s^β ψ_ℓ) dB^H(s)|².
pub fn increment_norm_sq(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    tau: f64,
) -> Result<f64> {
    check_hypothesis(params)?;
    if !(t >= 0.0 && tau >= 0.0) || !t.is_finite() || !tau.is_finite() {
        return Err(Error::Domain(format!(
            "times must be finite and >= 0, got t = {t}, tau = {tau}"
        )));
    }
    let (lo, hi) = if tau <= t { (tau, t) } else { (t, tau) };
    if lo == hi {
        return Ok(0.0);
    }
    let terms = (1..=spectra.l_max())
        .into_par_iter()
        .map(|l| {
            let a = spectra.a1(l) + spectra.a2(l);
            if a == 0.0 {
                return Ok(0.0);
            }
            let g = MlKernel::new(params.beta, params.psi_degree(l));
            Ok((2 * l + 1) as f64 * a * integral_variance(&g, lo, hi, params.hurst)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().rev().sum())
}

/// ‖X(t) − X(τ)‖ in L₂(Ω × 𝕊²) for the noise-driven solution.
pub fn increment_norm(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    tau: f64,
) -> Result<f64> {
    Ok(increment_norm_sq(params, spectra, t, tau)?.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementRow {
    pub t: f64,
    pub tau: f64,
    pub gap: f64,
    pub sum: f64,
    pub norm_sq: f64,
    /// norm_sq (t+τ)^{2(1-β)} / |t-τ|^{2H}.
    pub prop_ratio: f64,
    /// norm_sq (t+τ)^4 / |t-τ|^{2H}.
    pub cor_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementStudy {
    pub beta: f64,
    pub hurst: f64,
    pub rows: Vec<IncrementRow>,
}

impl IncrementStudy {
    /// max / min of the (t+τ)^{2(1-β)} ratio over the rows.
    pub fn prop_spread(&self) -> f64 {
        spread(self.rows.iter().map(|r| r.prop_ratio))
    }

    pub fn cor_spread(&self) -> f64 {
        spread(self.rows.iter().map(|r| r.cor_ratio))
    }
}

fn spread(v: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = v.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    hi / lo
}

/// Increment norms and both bound normalizations at each (t, τ) pair.
pub fn increment_bound_study(
    params: &ModelParams,
    spectra: &PowerSpectra,
    pairs: &[(f64, f64)],
) -> Result<IncrementStudy> {
    check_hypothesis(params)?;
    let h2 = 2.0 * params.hurst;
    let rows = pairs
        .iter()
        .map(|&(t, tau)| {
            if t == tau {
                return Err(Error::Domain(format!("pair ({t}, {tau}) has no gap")));
            }
            let norm_sq = increment_norm_sq(params, spectra, t, tau)?;
            let gap = (t - tau).abs();
            let sum = t + tau;
            let scaled = norm_sq / gap.powf(h2);
            Ok(IncrementRow {
                t,
                tau,
                gap,
                sum,
                norm_sq,
                prop_ratio: scaled * sum.powf(2.0 * (1.0 - params.beta)),
                cor_ratio: scaled * sum.powi(4),
            })
        })
        .collect::<Result<_>>()?;
    Ok(IncrementStudy {
        beta: params.beta,
        hurst: params.hurst,
        rows,
    })
}

/// Gap sweep at fixed t + τ: small-gap exponent and boundedness of the ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSweep {
    pub sum: f64,
    pub study: IncrementStudy,
    /// log norm² against log gap over the small gaps.
    pub fit: RateFit,
    /// 2H.
    pub target_slope: f64,
    /// max / min of the (t+τ)^{2(1-β)} ratio over all gaps.
    pub spread: f64,
    pub factor: f64,
}

impl GapSweep {
    pub fn slope_within(&self, tol: f64) -> bool {
        (self.fit.slope - self.target_slope).abs() <= tol
    }

    pub fn bounded(&self) -> bool {
        self.spread <= self.factor
    }
}

pub fn increment_gap_sweep(
    params: &ModelParams,
    spectra: &PowerSpectra,
    sum: f64,
    gaps: &[f64],
    factor: f64,
) -> Result<GapSweep> {
    if let Some(g) = gaps.iter().find(|&&g| !(g > 0.0 && g <= sum)) {
        return Err(Error::Domain(format!(
            "gap {g} must lie in (0, t + tau = {sum}]"
        )));
    }
    let pairs: Vec<(f64, f64)> = gaps
        .iter()
        .map(|g| (0.5 * (sum + g), 0.5 * (sum - g)))
        .collect();
    let study = increment_bound_study(params, spectra, &pairs)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = study
        .rows
        .iter()
        .filter(|r| r.gap <= SMALL_GAP_FRACTION * sum * (1.0 + 1e-9))
        .map(|r| (r.gap, r.norm_sq))
        .unzip();
    let fit = rate_fit(&xs, &ys)?;
    Ok(GapSweep {
        sum,
        spread: study.prop_spread(),
        target_slope: 2.0 * params.hurst,
        factor,
        fit,
        study,
    })
}

/// Fixed gap, growing t + τ: how both ratios scale at large times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeTimeScan {
    pub gap: f64,
    pub study: IncrementStudy,
    /// log prop_ratio against log(t + τ).
    pub prop_growth: RateFit,
    /// log cor_ratio against log(t + τ).
    pub cor_growth: RateFit,
    /// gap^{2H}/(t+τ)^4 < gap^{2H}/(t+τ)^{2(1-β)} at every row with t + τ > 1.
    pub cor_bound_smaller: bool,
}

pub fn increment_large_time_scan(
    params: &ModelParams,
    spectra: &PowerSpectra,
    gap: f64,
    sums: &[f64],
) -> Result<LargeTimeScan> {
    if let Some(s) = sums.iter().find(|&&s| !(s >= gap && gap > 0.0)) {
        return Err(Error::Domain(format!(
            "t + tau = {s} must be at least the gap {gap} > 0"
        )));
    }
    let pairs: Vec<(f64, f64)> = sums
        .iter()
        .map(|s| (0.5 * (s + gap), 0.5 * (s - gap)))
        .collect();
    let study = increment_bound_study(params, spectra, &pairs)?;
    let xs: Vec<f64> = study.rows.iter().map(|r| r.sum).collect();
    let prop: Vec<f64> = study.rows.iter().map(|r| r.prop_ratio).collect();
    let cor: Vec<f64> = study.rows.iter().map(|r| r.cor_ratio).collect();
    let cor_bound_smaller = study
        .rows
        .iter()
        .filter(|r| r.sum > 1.0)
        .all(|r| r.sum.powi(-4) < r.sum.powf(-2.0 * (1.0 - params.beta)));
    Ok(LargeTimeScan {
        gap,
        prop_growth: rate_fit(&xs, &prop)?,
        cor_growth: rate_fit(&xs, &cor)?,
        cor_bound_smaller,
        study,
    })
}
