use super::params::ModelParams;
use super::spectra::{check_admissibility, PowerSpectra};
use super::variances::{relaxation, ModeVariances};
use crate::covariance::estar;
use crate::error::{Error, Result};
use crate::sphere::{synthesize, Family, SpectralCoefficients, SpherePoint, TangentFieldSample};
use crate::stochastic::{
    complex_normal, graded_mesh, rs_weights_with, FbmGenerator, MlKernel, RngStream, RsRule,
    RsWeights, Stage, StreamKey,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// Default size of the graded mesh used by the pathwise sampler.
pub const DEFAULT_MESH_POINTS: usize = 512;

fn family_tag(f: Family) -> u64 {
    match f {
        Family::DivFree => 0,
        Family::CurlFree => 1,
    }
}

fn stream(
    seed: u64,
    stage: Stage,
    ell: usize,
    m: i64,
    family: Family,
    replicate: u64,
) -> RngStream {
    RngStream::keyed(
        seed,
        StreamKey::new(stage, ell, m, family_tag(family), replicate),
    )
}

/// Fills every (family, ℓ, m) slot with a centred complex Gaussian of variance `var(family, ℓ)`,
/// one independent stream per slot.
fn gaussian_coefficients(
    l_max: usize,
    seed: u64,
    stage: Stage,
    replicate: u64,
    var: impl Fn(Family, usize) -> f64 + Sync,
) -> Result<SpectralCoefficients> {
    let mut out = SpectralCoefficients::zeros(l_max)?;
    let modes: Vec<(usize, i64)> = out.modes().collect();
    for family in Family::BOTH {
        let vals: Vec<Complex64> = modes
            .par_iter()
            .map(|&(ell, m)| {
                let v = var(family, ell);
                if v == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let mut rng = stream(seed, stage, ell, m, family, replicate).rng();
                complex_normal(&mut rng, v)
            })
            .collect();
        out.family_mut(family).copy_from_slice(&vals);
    }
    Ok(out)
}

/// Initial-field coefficients with variances σ̂²_ℓ, σ̃²_ℓ.
pub fn draw_initial(
    spectra: &PowerSpectra,
    seed: u64,
    replicate: u64,
) -> Result<SpectralCoefficients> {
    gaussian_coefficients(
        spectra.l_max(),
        seed,
        Stage::Initial,
        replicate,
        |f, l| match f {
            Family::DivFree => spectra.sig_hat2(l),
            Family::CurlFree => spectra.sig_tilde2(l),
        },
    )
}

/// Multiplies each degree-ℓ coefficient by E_{β,1}(-t^β ψ(λ_ℓ)).
pub fn apply_cauchy(
    params: &ModelParams,
    initial: &SpectralCoefficients,
    t: f64,
) -> Result<SpectralCoefficients> {
    params.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "time t = {t} must be finite and >= 0"
        )));
    }
    let mult: Vec<f64> = (1..=initial.l_max())
        .map(|l| relaxation(params, t, params.psi_degree(l)))
        .collect::<Result<_>>()?;
    let mut out = initial.clone();
    out.scale_by_degree(|l| mult[l - 1]);
    Ok(out)
}

/// Cauchy solution at time t from a freshly drawn initial field.
pub fn sample_cauchy(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    seed: u64,
    replicate: u64,
) -> Result<SpectralCoefficients> {
    check_admissibility(params, spectra)?;
    apply_cauchy(params, &draw_initial(spectra, seed, replicate)?, t)
}

/// Noise-driven solution at a single time, drawn from its exact Gaussian law:
/// E|X̂_ℓm|² = A¹_ℓ E*(t, ψ_ℓ), E|X̃_ℓm|² = A²_ℓ E*(t, ψ_ℓ).
pub fn sample_solution_exact_time(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    seed: u64,
    replicate: u64,
) -> Result<SpectralCoefficients> {
    let v = ModeVariances::noise_driven(params, spectra, t)?;
    noise_from_variances(&v, seed, replicate)
}

fn noise_from_variances(
    v: &ModeVariances,
    seed: u64,
    replicate: u64,
) -> Result<SpectralCoefficients> {
    gaussian_coefficients(v.l_max(), seed, Stage::Noise, replicate, |f, l| match f {
        Family::DivFree => v.div_noise[l - 1],
        Family::CurlFree => v.curl_noise[l - 1],
    })
}

/// Two-stage solution: the initial field relaxed over t₀ plus the noise integral up to t.
/// Initial-field and noise streams are disjoint, so the two parts are independent.
pub fn sample_combined(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    seed: u64,
    replicate: u64,
) -> Result<SpectralCoefficients> {
    check_admissibility(params, spectra)?;
    let v = ModeVariances::combined(params, spectra, t)?;
    sample_combined_from(&v, spectra, seed, replicate)
}

/// [`sample_combined`] with the per-degree variances already evaluated, for replicate loops.
pub fn sample_combined_from(
    v: &ModeVariances,
    spectra: &PowerSpectra,
    seed: u64,
    replicate: u64,
) -> Result<SpectralCoefficients> {
    if v.l_max() != spectra.l_max() {
        return Err(Error::invalid(format!(
            "variances cover {} degrees, spectra {}",
            v.l_max(),
            spectra.l_max()
        )));
    }
    let mut out = draw_initial(spectra, seed, replicate)?;
    out.scale_by_degree(|l| v.relaxation[l - 1]);
    let noise = noise_from_variances(v, seed, replicate)?;
    for family in Family::BOTH {
        for (c, n) in out.family_mut(family).iter_mut().zip(noise.family(family)) {
            *c += n;
        }
    }
    Ok(out)
}

/// Zeroes all degrees above `l_prime`.
pub fn truncate(coeffs: &SpectralCoefficients, l_prime: usize) -> Result<SpectralCoefficients> {
    coeffs.truncate(l_prime)
}

/// Pathwise sampler of the noise-driven solution: each coefficient is the Riemann–Stieltjes
/// sum of s^{β-1}E_{β,β}(-s^β ψ_ℓ) against its own complex fBm on a graded mesh.
pub struct PathwiseSampler {
    params: ModelParams,
    spectra: PowerSpectra,
    t: f64,
    mesh: Vec<f64>,
    generator: FbmGenerator,
    weights: Vec<RsWeights>,
}

impl std::fmt::Debug for PathwiseSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathwiseSampler")
            .field("params", &self.params)
            .field("t", &self.t)
            .field("mesh_points", &self.mesh.len())
            .finish()
    }
}

/// Exact variance of the discretized integral at mesh sizes N and 2N against E*.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshDiagnostic {
    pub ell: usize,
    pub estar: f64,
    pub discrete_n: f64,
    pub discrete_2n: f64,
}

impl MeshDiagnostic {
    pub fn rel_error_n(&self) -> f64 {
        (self.discrete_n - self.estar).abs() / self.estar
    }

    pub fn rel_error_2n(&self) -> f64 {
        (self.discrete_2n - self.estar).abs() / self.estar
    }
}

impl PathwiseSampler {
    pub fn new(
        params: &ModelParams,
        spectra: &PowerSpectra,
        t: f64,
        mesh_points: usize,
    ) -> Result<Self> {
        check_admissibility(params, spectra)?.require()?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "pathwise sampling needs t > 0, got {t}"
            )));
        }
        if mesh_points < 2 {
            return Err(Error::Domain("mesh needs at least two cells".into()));
        }
        let mesh = graded_mesh(t, mesh_points, params.beta);
        let generator = FbmGenerator::new(params.hurst, &mesh)?;
        let weights = (1..=spectra.l_max())
            .into_par_iter()
            .map(|l| {
                rs_weights_with(
                    &MlKernel::new(params.beta, params.psi_degree(l)),
                    &mesh,
                    RsRule::CellAverage,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PathwiseSampler {
            params: *params,
            spectra: spectra.clone(),
            t,
            mesh,
            generator,
            weights,
        })
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    /// Exact per-unit-noise variance of the discretized degree-ℓ integral.
    pub fn discrete_variance(&self, ell: usize) -> f64 {
        self.weights[ell - 1].variance(&self.mesh, self.params.hurst)
    }

    /// Mesh-doubling check of the degree-ℓ integral against E*.
    pub fn diagnostic(&self, ell: usize) -> Result<MeshDiagnostic> {
        let n = self.mesh.len() - 1;
        let fine = graded_mesh(self.t, 2 * n, self.params.beta);
        let g = MlKernel::new(self.params.beta, self.params.psi_degree(ell));
        Ok(MeshDiagnostic {
            ell,
            estar: estar(self.t, g.lambda, self.params.beta, self.params.hurst)?,
            discrete_n: self.discrete_variance(ell),
            discrete_2n: rs_weights_with(&g, &fine, RsRule::CellAverage)?
                .variance(&fine, self.params.hurst),
        })
    }

    /// One coefficient: ∫ g_ℓ dB with B complex fBm of total variance `a`.
    pub fn sample_mode(
        &self,
        family: Family,
        ell: usize,
        m: i64,
        seed: u64,
        replicate: u64,
    ) -> Complex64 {
        let a = match family {
            Family::DivFree => self.spectra.a1(ell),
            Family::CurlFree => self.spectra.a2(ell),
        };
        if a == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut rng = stream(seed, Stage::Path, ell, m, family, replicate).rng();
        let path = self.generator.sample_complex(a, &mut rng);
        self.weights[ell - 1].apply(&path.values)
    }

    pub fn sample_coefficients(&self, seed: u64, replicate: u64) -> Result<SpectralCoefficients> {
        let mut out = SpectralCoefficients::zeros(self.spectra.l_max())?;
        let modes: Vec<(usize, i64)> = out.modes().collect();
        for family in Family::BOTH {
            let vals: Vec<Complex64> = modes
                .par_iter()
                .map(|&(l, m)| self.sample_mode(family, l, m, seed, replicate))
                .collect();
            out.family_mut(family).copy_from_slice(&vals);
        }
        Ok(out)
    }
}

/// Noise-driven solution at time t, sampled pathwise and evaluated at `points`.
pub fn sample_solution_pathwise(
    params: &ModelParams,
    spectra: &PowerSpectra,
    t: f64,
    points: &[SpherePoint],
    seed: u64,
    replicate: u64,
) -> Result<TangentFieldSample> {
    let coeffs = if t == 0.0 {
        SpectralCoefficients::zeros(spectra.l_max())?
    } else {
        PathwiseSampler::new(params, spectra, t, DEFAULT_MESH_POINTS)?
            .sample_coefficients(seed, replicate)?
    };
    synthesize(&coeffs, points, t)
}
