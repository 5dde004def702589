use crate::error::Result;
use crate::model::{check_admissibility, ModeVariances, ModelParams, PowerSpectra};
use crate::sphere::{tensor_kernels, SpherePoint};
use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// E[X(t,x) X(t,y)^H] of the combined solution:
/// Σ_ℓ dlg_ℓ(x,y)·(σ̂²_ℓ R_ℓ² + A¹_ℓ E*_ℓ) + clg_ℓ(x,y)·(σ̃²_ℓ R_ℓ² + A²_ℓ E*_ℓ),
/// with R_ℓ = E_{β,1}(-t₀^β ψ_ℓ).
pub fn covariance_matrix(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    x: &SpherePoint,
    y: &SpherePoint,
) -> Result<Matrix3<Complex64>> {
    check_admissibility(params, spectra)?;
    let v = ModeVariances::combined(params, spectra, t)?;
    covariance_matrix_from(&v, x, y)
}

/// Covariance tensor for precomputed per-degree variances.
pub fn covariance_matrix_from(
    v: &ModeVariances,
    x: &SpherePoint,
    y: &SpherePoint,
) -> Result<Matrix3<Complex64>> {
    let terms = (1..=v.l_max())
        .into_par_iter()
        .map(|l| {
            let (dlg, clg) = tensor_kernels(l, x, y)?;
            Ok(dlg * v.div(l) + clg * v.curl(l))
        })
        .collect::<Result<Vec<Matrix3<f64>>>>()?;
    // ordered reduction, smallest degrees last
    let sum = terms.iter().rev().fold(Matrix3::zeros(), |acc, m| acc + m);
    Ok(sum.map(|r| Complex64::new(r, 0.0)))
}

/// trace E[X(t,x) X(t,x)^H], the same at every x.
pub fn variance_trace(params: &ModelParams, spectra: &PowerSpectra, t: f64) -> Result<f64> {
    check_admissibility(params, spectra)?;
    Ok(variance_trace_from(&ModeVariances::combined(
        params, spectra, t,
    )?))
}

pub fn variance_trace_from(v: &ModeVariances) -> f64 {
    (1..=v.l_max())
        .rev()
        .map(|l| v.degree_energy(l))
        .sum::<f64>()
        / (4.0 * PI)
}
