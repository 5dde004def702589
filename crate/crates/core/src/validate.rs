//! A fast invariant suite over every module, run against one model configuration.

use crate::covariance::{covariance_matrix_from, estar, variance_trace_from};
use crate::error::Result;
use crate::model::{
    apply_cauchy, check_admissibility, draw_initial, sample_combined_from, ModeVariances,
    ModelParams, PowerLaw, PowerSpectra,
};
use crate::specfun::mittag_leffler;
use crate::sphere::{analyze, make_grid, synthesize, tensor_kernels, vsh, Family, SpherePoint};
use crate::stochastic::{
    integral_variance, uniform_mesh, FbmGenerator, MlKernel, RngStream, Stage, StreamKey,
};
use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub params: ModelParams,
    pub spectra: PowerSpectra,
    pub t: f64,
    /// make_grid parameter of the transform round trip; must exceed the spectrum degree.
    pub grid_degree: usize,
    pub seed: u64,
    /// Paths for the fBm variance check.
    pub fbm_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation, in the check's own units.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Check {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

fn study_stream(seed: u64, tag: u64) -> RngStream {
    RngStream::keyed(seed, StreamKey::new(Stage::Study, 0, 0, tag, 0))
}

/// Runs every check. Inadmissible models fail fast with an admissibility error.
pub fn invariant_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    check_admissibility(&cfg.params, &cfg.spectra)?.require()?;
    let v = ModeVariances::combined(&cfg.params, &cfg.spectra, cfg.t)?;
    let mut checks = sphere_checks(cfg, &v)?;
    checks.extend([
        mittag_leffler_exponential()?,
        mittag_leffler_sine()?,
        mittag_leffler_monotone()?,
        fbm_variance(cfg)?,
        variance_identity(cfg, &v)?,
        covariance_tensor(&v, cfg.seed)?,
        truncation_tail(&v),
        cauchy_contraction(cfg)?,
        determinism(cfg, &v)?,
    ]);
    Ok(checks)
}

/// Addition theorem, kernel traces and the synthesis/analysis round trip.
pub fn sphere_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    check_admissibility(&cfg.params, &cfg.spectra)?.require()?;
    let v = ModeVariances::combined(&cfg.params, &cfg.spectra, cfg.t)?;
    sphere_checks(cfg, &v)
}

fn sphere_checks(cfg: &SuiteConfig, v: &ModeVariances) -> Result<Vec<Check>> {
    Ok(vec![
        addition_theorem(cfg.spectra.l_max().min(10), cfg.seed)?,
        kernel_trace(cfg.seed)?,
        transform_roundtrip(cfg, v)?,
    ])
}

fn addition_theorem(l_max: usize, seed: u64) -> Result<Check> {
    let mut rng = study_stream(seed, 1).rng();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = SpherePoint::random(&mut rng);
        let y = SpherePoint::random(&mut rng);
        for ell in 1..=l_max {
            let (dlg, clg) = tensor_kernels(ell, &x, &y)?;
            let mut sy = Matrix3::<Complex64>::zeros();
            let mut sz = Matrix3::<Complex64>::zeros();
            for m in -(ell as i64)..=(ell as i64) {
                let (yx, zx) = vsh(ell, m, &x)?;
                let (yy, zy) = vsh(ell, m, &y)?;
                sy += yx * yy.adjoint();
                sz += zx * zy.adjoint();
            }
            for k in 0..9 {
                worst = worst
                    .max((sy[k] - dlg[k]).norm())
                    .max((sz[k] - clg[k]).norm());
            }
        }
    }
    Ok(Check::new("addition_theorem", worst, 1e-8))
}

fn kernel_trace(seed: u64) -> Result<Check> {
    let mut rng = study_stream(seed, 2).rng();
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let x = SpherePoint::random(&mut rng);
        for ell in 1..=20 {
            let (dlg, clg) = tensor_kernels(ell, &x, &x)?;
            let want = (2 * ell + 1) as f64 / (4.0 * PI);
            worst = worst
                .max((dlg.trace() - want).abs())
                .max((clg.trace() - want).abs());
        }
    }
    Ok(Check::new("kernel_trace", worst, 1e-8))
}

fn transform_roundtrip(cfg: &SuiteConfig, v: &ModeVariances) -> Result<Check> {
    let l = cfg.spectra.l_max();
    let c = sample_combined_from(v, &cfg.spectra, cfg.seed, 0)?;
    let grid = make_grid(cfg.grid_degree);
    let field = synthesize(&c, &grid.nodes, cfg.t)?;
    let back = analyze(&grid, &field, l)?;
    let scale = c.norm_sq().sqrt().max(f64::MIN_POSITIVE);
    let mut diff = back;
    for fam in Family::BOTH {
        for (d, a) in diff.family_mut(fam).iter_mut().zip(c.family(fam)) {
            *d -= a;
        }
    }
    let roundtrip = diff.norm_sq().sqrt() / scale;
    let parseval = (field.norm_sq_on(&grid)? - c.norm_sq()).abs() / (scale * scale);
    let tangency = field.max_normal_component() / scale;
    Ok(Check::new(
        "transform_roundtrip",
        roundtrip.max(parseval).max(tangency),
        1e-8,
    ))
}

fn mittag_leffler_exponential() -> Result<Check> {
    let mut worst = 0.0f64;
    for k in 0..=50 {
        let x = -20.0 + 0.5 * k as f64;
        let e = mittag_leffler(1.0, 1.0, x)?;
        worst = worst.max((e - x.exp()).abs() / x.exp());
    }
    Ok(Check::new("mittag_leffler_exponential", worst, 1e-10))
}

fn mittag_leffler_sine() -> Result<Check> {
    let mut worst = 0.0f64;
    for k in 1..=400 {
        let z = 0.25 * k as f64;
        let want = z.sqrt().sin() / z.sqrt();
        let e = mittag_leffler(2.0, 2.0, -z)?;
        // relative, floored near the zeros of sin
        worst = worst.max((e - want).abs() / want.abs().max(1e-3));
    }
    Ok(Check::new("mittag_leffler_sine", worst, 1e-8))
}

fn mittag_leffler_monotone() -> Result<Check> {
    let mut worst = 0.0f64;
    for beta in [0.5, 0.8, 1.0] {
        let mut prev = 1.0;
        for k in 0..=200 {
            let z = 0.25 * k as f64;
            let e = mittag_leffler(beta, 1.0, -z)?;
            if !(e > 0.0) {
                worst = f64::INFINITY;
            }
            worst = worst.max(e - prev).max(e - 1.0);
            prev = e;
        }
    }
    Ok(Check::new("mittag_leffler_monotone", worst, 0.0))
}

fn fbm_variance(cfg: &SuiteConfig) -> Result<Check> {
    let h = cfg.params.hurst;
    let times = uniform_mesh(1.0, 64);
    let gen = FbmGenerator::new(h, &times)?;
    let n = cfg.fbm_paths.max(2);
    let mut rng = study_stream(cfg.seed, 3).rng();
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let path = gen.sample_real(1.0, &mut rng);
        // E|B(1) - B(1/2)|² = 2^{-2H}
        let d = path.values[64] - path.values[32];
        s += d * d;
        s2 += d.powi(4);
    }
    let nf = n as f64;
    let mean = s / nf;
    let se = ((s2 / nf - mean * mean) / nf).sqrt();
    let want = 0.5f64.powf(2.0 * h);
    // deviation in standard errors
    Ok(Check::new("fbm_variance", (mean - want).abs() / se, 4.0))
}

fn variance_identity(cfg: &SuiteConfig, v: &ModeVariances) -> Result<Check> {
    let p = &cfg.params;
    if cfg.t == 0.0 {
        return Ok(Check::new("variance_identity", 0.0, 1e-7));
    }
    let l = v.l_max();
    let mut worst = 0.0f64;
    for ell in [1, l.div_ceil(2), l] {
        let z = v.psi[ell - 1];
        let e = estar(cfg.t, z, p.beta, p.hurst)?;
        let iv = integral_variance(&MlKernel::new(p.beta, z), 0.0, cfg.t, p.hurst)?;
        worst = worst.max((e - iv).abs() / e);
    }
    Ok(Check::new("variance_identity", worst, 1e-7))
}

fn covariance_tensor(v: &ModeVariances, seed: u64) -> Result<Check> {
    let mut rng = study_stream(seed, 4).rng();
    let x = SpherePoint::random(&mut rng);
    let y = SpherePoint::random(&mut rng);
    let tr = variance_trace_from(v);
    let scale = tr.max(f64::MIN_POSITIVE);
    let cxy = covariance_matrix_from(v, &x, &y)?;
    let cyx = covariance_matrix_from(v, &y, &x)?;
    let cxx = covariance_matrix_from(v, &x, &x)?;
    let hermitian = (cxy - cyx.adjoint()).norm() / scale;
    let min_eig = SymmetricEigen::new(cxx.map(|c| c.re)).eigenvalues.min();
    let trace = (cxx.trace().re - tr).abs() / scale;
    Ok(Check::new(
        "covariance_tensor",
        hermitian.max(trace).max(-min_eig / scale),
        1e-10,
    ))
}

fn truncation_tail(v: &ModeVariances) -> Check {
    let l = v.l_max();
    let tails: Vec<f64> = (0..=l).map(|k| v.tail_energy(k)).collect();
    let rises = tails.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
    Check::new("truncation_tail", rises.max(tails[l]), 0.0)
}

fn cauchy_contraction(cfg: &SuiteConfig) -> Result<Check> {
    let spectra = if cfg.spectra.sig_hat2.iter().all(|&s| s == 0.0)
        && cfg.spectra.sig_tilde2.iter().all(|&s| s == 0.0)
    {
        cfg.spectra
            .clone()
            .with_initial_law(PowerLaw::new(1.0, 3.0)?)
    } else {
        cfg.spectra.clone()
    };
    let init = draw_initial(&spectra, cfg.seed, 0)?;
    let mut worst = (apply_cauchy(&cfg.params, &init, 0.0)?.norm_sq() - init.norm_sq()).abs();
    if apply_cauchy(&cfg.params, &init, 0.0)? != init {
        worst = f64::INFINITY;
    }
    let mut prev = init.norm_sq();
    for t in [0.1, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let n = apply_cauchy(&cfg.params, &init, t)?.norm_sq();
        worst = worst.max(n - prev);
        prev = n;
    }
    Ok(Check::new("cauchy_contraction", worst, 0.0))
}

fn determinism(cfg: &SuiteConfig, v: &ModeVariances) -> Result<Check> {
    let a = sample_combined_from(v, &cfg.spectra, cfg.seed, 3)?;
    let b = sample_combined_from(v, &cfg.spectra, cfg.seed, 3)?;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| crate::Error::Config(e.to_string()))?
        .install(|| sample_combined_from(v, &cfg.spectra, cfg.seed, 3))?;
    let same = a == b && a == single;
    Ok(Check::new("determinism", if same { 0.0 } else { 1.0 }, 0.0))
}
