use crate::config::RunConfig;
use crate::output::{to_value, Artifacts, Cell, Table};
use serde_json::json;
use tangent_spde::covariance::{covariance_matrix, estar, variance_trace};
use tangent_spde::model::{
    apply_cauchy, check_admissibility, draw_initial, sample_cauchy, sample_combined,
    PathwiseSampler, PowerSpectra,
};
use tangent_spde::specfun::mittag_leffler;
use tangent_spde::sphere::{make_grid, synthesize, SpectralCoefficients, TangentFieldSample};
use tangent_spde::studies::{
    chebyshev_tail_check, increment_gap_sweep, increment_large_time_scan, truncation_rate_study,
    IncrementStudy,
};
use tangent_spde::validate::{invariant_suite, sphere_suite, Check, SuiteConfig};
use tangent_spde::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ml,
    VshCheck,
    Sample,
    Cauchy,
    Combined,
    Covariance,
    TruncationStudy,
    IncrementStudy,
    Chebyshev,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ml => "ml",
            Command::VshCheck => "vsh-check",
            Command::Sample => "sample",
            Command::Cauchy => "cauchy",
            Command::Combined => "combined",
            Command::Covariance => "covariance",
            Command::TruncationStudy => "truncation-study",
            Command::IncrementStudy => "increment-study",
            Command::Chebyshev => "chebyshev",
            Command::Validate => "validate",
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Artifacts> {
    match command {
        Command::Ml => ml(cfg),
        Command::VshCheck => checks(cfg, false),
        Command::Sample => sample(cfg),
        Command::Cauchy => cauchy(cfg),
        Command::Combined => combined(cfg),
        Command::Covariance => covariance(cfg),
        Command::TruncationStudy => truncation(cfg),
        Command::IncrementStudy => increment(cfg),
        Command::Chebyshev => chebyshev(cfg),
        Command::Validate => checks(cfg, true),
    }
}

/// Spectra for commands that need the solution law; an inadmissible model is an error.
fn admissible_spectra(cfg: &RunConfig) -> Result<PowerSpectra> {
    let spectra = cfg.spectra()?;
    check_admissibility(&cfg.model, &spectra)?.require()?;
    Ok(spectra)
}

fn ml(cfg: &RunConfig) -> Result<Artifacts> {
    let p = &cfg.model;
    p.validate()?;
    let b2 = p.beta + 2.0 * p.hurst - 1.0;
    let mut t = Table::new(
        "ml",
        &["z", "e_beta_1", "e_beta_beta", "e_beta_b2", "estar"],
    );
    for &z in &cfg.ml.z {
        let e = if p.has_finite_mode_variance() && cfg.times.t > 0.0 {
            Cell::Real(estar(cfg.times.t, z, p.beta, p.hurst)?)
        } else {
            Cell::Text("divergent".into())
        };
        t.push(vec![
            z.into(),
            mittag_leffler(p.beta, 1.0, -z)?.into(),
            mittag_leffler(p.beta, p.beta, -z)?.into(),
            mittag_leffler(p.beta, b2, -z)?.into(),
            e,
        ]);
    }
    let mut a = Artifacts::new();
    a.tables.push(t);
    Ok(a)
}

fn checks(cfg: &RunConfig, full: bool) -> Result<Artifacts> {
    let suite = SuiteConfig {
        params: cfg.model,
        spectra: cfg.spectra()?,
        t: cfg.times.t,
        grid_degree: cfg.grid_degree,
        seed: cfg.seed,
        fbm_paths: cfg.replicates.fbm_paths,
    };
    let results = if full {
        invariant_suite(&suite)?
    } else {
        sphere_suite(&suite)?
    };
    let mut t = Table::new(
        if full { "validate" } else { "vsh_check" },
        &["check", "passed", "worst", "tolerance"],
    );
    for c in &results {
        t.push(vec![
            c.name.into(),
            c.passed.into(),
            c.worst.into(),
            c.tolerance.into(),
        ]);
    }
    let mut a = Artifacts::new();
    a.passed = results.iter().all(|c: &Check| c.passed);
    a.summary = Some(json!({
        "passed": a.passed,
        "failed": results.iter().filter(|c| !c.passed).map(|c| c.name).collect::<Vec<_>>(),
        "checks": results.len(),
    }));
    a.tables.push(t);
    Ok(a)
}

const FIELD_COLUMNS: [&str; 9] = [
    "replicate",
    "theta",
    "phi",
    "x_re",
    "x_im",
    "y_re",
    "y_im",
    "z_re",
    "z_im",
];

fn push_field(t: &mut Table, replicate: usize, f: &TangentFieldSample) {
    for (p, v) in f.points.iter().zip(&f.values) {
        t.push(vec![
            replicate.into(),
            p.theta.into(),
            p.phi.into(),
            v[0].re.into(),
            v[0].im.into(),
            v[1].re.into(),
            v[1].im.into(),
            v[2].re.into(),
            v[2].im.into(),
        ]);
    }
}

fn field_command(
    cfg: &RunConfig,
    name: &str,
    draw: impl Fn(u64) -> Result<SpectralCoefficients>,
) -> Result<Artifacts> {
    let grid = make_grid(cfg.grid_degree);
    let mut t = Table::new(name, &FIELD_COLUMNS);
    let mut norms = Vec::new();
    for r in 0..cfg.replicates.samples {
        let c = draw(r as u64)?;
        norms.push(c.norm_sq());
        push_field(&mut t, r, &synthesize(&c, &grid.nodes, cfg.times.t)?);
    }
    let mut a = Artifacts::new();
    a.tables.push(t);
    a.summary = Some(json!({
        "t": cfg.times.t,
        "replicates": cfg.replicates.samples,
        "grid_points": grid.len(),
        "coefficient_norm_sq": norms,
    }));
    Ok(a)
}

fn sample(cfg: &RunConfig) -> Result<Artifacts> {
    let spectra = cfg.spectra()?.without_initial();
    let t = cfg.times.t;
    if t == 0.0 {
        return field_command(cfg, "sample", |_| {
            SpectralCoefficients::zeros(spectra.l_max())
        });
    }
    let sampler = PathwiseSampler::new(&cfg.model, &spectra, t, cfg.mesh_points)?;
    field_command(cfg, "sample", |r| sampler.sample_coefficients(cfg.seed, r))
}

fn cauchy(cfg: &RunConfig) -> Result<Artifacts> {
    let spectra = admissible_spectra(cfg)?;
    let mut a = field_command(cfg, "cauchy", |r| {
        sample_cauchy(&cfg.model, &spectra, cfg.times.t, cfg.seed, r)
    })?;
    // contraction of the replicate-0 initial field along the time grid
    let init = draw_initial(&spectra, cfg.seed, 0)?;
    let mut norms = Table::new("cauchy_norms", &["t", "norm_sq"]);
    for &t in &cfg.times.cauchy_grid {
        norms.push(vec![
            t.into(),
            apply_cauchy(&cfg.model, &init, t)?.norm_sq().into(),
        ]);
    }
    a.tables.push(norms);
    Ok(a)
}

fn combined(cfg: &RunConfig) -> Result<Artifacts> {
    let spectra = admissible_spectra(cfg)?;
    field_command(cfg, "combined", |r| {
        sample_combined(&cfg.model, &spectra, cfg.times.t, cfg.seed, r)
    })
}

fn covariance(cfg: &RunConfig) -> Result<Artifacts> {
    let spectra = admissible_spectra(cfg)?;
    let mut t = Table::new(
        "covariance",
        &[
            "pair", "theta_x", "phi_x", "theta_y", "phi_y", "i", "j", "re", "im",
        ],
    );
    for (k, pair) in cfg.covariance.pairs.iter().enumerate() {
        let x = cfg.point(pair[0])?;
        let y = cfg.point(pair[1])?;
        let c = covariance_matrix(&cfg.model, &spectra, cfg.times.t, &x, &y)?;
        for i in 0..3 {
            for j in 0..3 {
                t.push(vec![
                    k.into(),
                    x.theta.into(),
                    x.phi.into(),
                    y.theta.into(),
                    y.phi.into(),
                    i.into(),
                    j.into(),
                    c[(i, j)].re.into(),
                    c[(i, j)].im.into(),
                ]);
            }
        }
    }
    let mut a = Artifacts::new();
    a.summary = Some(json!({
        "t": cfg.times.t,
        "variance_trace": variance_trace(&cfg.model, &spectra, cfg.times.t)?,
        "admissibility": to_value(&check_admissibility(&cfg.model, &spectra)?)?,
    }));
    a.tables.push(t);
    Ok(a)
}

fn truncation(cfg: &RunConfig) -> Result<Artifacts> {
    let spectra = cfg.spectra.build(Some(cfg.truncation.tail_l_max))?;
    let s = truncation_rate_study(&cfg.model, &spectra, cfg.times.t, &cfg.truncation.degrees)?;
    let tol = cfg.truncation.tolerance;
    let mut t = Table::new("truncation_study", &["L", "tail_norm"]);
    for (l, n) in s.degrees.iter().zip(&s.tail_norms) {
        t.push(vec![(*l).into(), (*n).into()]);
    }
    let bound_respected = s.fit.slope <= s.bound_slope + tol;
    let matches_effective = (s.fit.slope - s.effective_slope).abs() <= tol;
    let mut a = Artifacts::new();
    a.passed = bound_respected && matches_effective;
    a.summary = Some(json!({
        "slope": s.fit.slope,
        "slope_se": s.fit.slope_se,
        "intercept": s.fit.intercept,
        "nu": s.nu,
        "bound_nu": s.bound_nu,
        "bound_slope": s.bound_slope,
        "effective_slope": s.effective_slope,
        "tolerance": tol,
        "bound_respected": bound_respected,
        "matches_effective": matches_effective,
        "passed": a.passed,
        "study": to_value(&s)?,
    }));
    a.tables.push(t);
    Ok(a)
}

fn increment_table(name: &str, s: &IncrementStudy) -> Table {
    let mut t = Table::new(
        name,
        &[
            "t",
            "tau",
            "gap",
            "sum",
            "norm_sq",
            "prop_ratio",
            "cor_ratio",
        ],
    );
    for r in &s.rows {
        t.push(vec![
            r.t.into(),
            r.tau.into(),
            r.gap.into(),
            r.sum.into(),
            r.norm_sq.into(),
            r.prop_ratio.into(),
            r.cor_ratio.into(),
        ]);
    }
    t
}

fn increment(cfg: &RunConfig) -> Result<Artifacts> {
    let spectra = cfg.spectra()?;
    let inc = &cfg.increment;
    let sweep = increment_gap_sweep(&cfg.model, &spectra, inc.sum, &inc.gaps, inc.factor)?;
    let scan = increment_large_time_scan(
        &cfg.model,
        &spectra,
        inc.large_time_gap,
        &inc.large_time_sums,
    )?;
    let slope_ok = sweep.slope_within(inc.slope_tolerance);
    let mut a = Artifacts::new();
    a.passed = slope_ok && sweep.bounded();
    a.summary = Some(json!({
        "slope": sweep.fit.slope,
        "target_slope": sweep.target_slope,
        "slope_tolerance": inc.slope_tolerance,
        "slope_within_tolerance": slope_ok,
        "prop_ratio_spread": sweep.spread,
        "factor": sweep.factor,
        "bounded": sweep.bounded(),
        "large_time_prop_ratio_slope": scan.prop_growth.slope,
        "large_time_cor_ratio_slope": scan.cor_growth.slope,
        "cor_bound_smaller_than_prop_bound": scan.cor_bound_smaller,
        "passed": a.passed,
    }));
    a.tables
        .push(increment_table("increment_gaps", &sweep.study));
    a.tables
        .push(increment_table("increment_large_time", &scan.study));
    Ok(a)
}

fn chebyshev(cfg: &RunConfig) -> Result<Artifacts> {
    let spectra = admissible_spectra(cfg)?;
    let c = &cfg.chebyshev;
    let r = chebyshev_tail_check(
        &cfg.model,
        &spectra,
        cfg.times.t,
        c.l_prime,
        c.eps,
        cfg.replicates.chebyshev,
        &cfg.point(c.point)?,
        cfg.seed,
    )?;
    let mut t = Table::new(
        "chebyshev",
        &[
            "l_prime",
            "eps",
            "replicates",
            "tail_variance",
            "bound",
            "empirical_variance",
            "exceedances",
            "frequency",
            "standard_error",
            "pass",
        ],
    );
    t.push(vec![
        r.l_prime.into(),
        r.eps.into(),
        r.replicates.into(),
        r.tail_variance.into(),
        r.bound.into(),
        r.empirical_variance.into(),
        r.exceedances.into(),
        r.frequency.into(),
        r.standard_error.into(),
        r.pass.into(),
    ]);
    let mut a = Artifacts::new();
    a.passed = r.pass;
    a.summary = Some(to_value(&r)?);
    a.tables.push(t);
    Ok(a)
}
