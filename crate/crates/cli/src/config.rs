use serde::{Deserialize, Serialize};
use tangent_spde::model::{ModelParams, PowerLaw, PowerSpectra};
use tangent_spde::sphere::SpherePoint;
use tangent_spde::{Error, Result};

/// The configuration shipped with the binary.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Noise and initial-field spectra: a power-law family or explicit per-degree arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpectraSpec {
    Power {
        l_max: usize,
        noise: PowerLaw,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<PowerLaw>,
    },
    Arrays {
        a1: Vec<f64>,
        a2: Vec<f64>,
        #[serde(default)]
        sig_hat2: Vec<f64>,
        #[serde(default)]
        sig_tilde2: Vec<f64>,
    },
}

impl SpectraSpec {
    pub fn l_max(&self) -> usize {
        match self {
            SpectraSpec::Power { l_max, .. } => *l_max,
            SpectraSpec::Arrays { a1, .. } => a1.len(),
        }
    }

    /// Spectra truncated at `l_max` (or the configured degree when `None`).
    pub fn build(&self, l_max: Option<usize>) -> Result<PowerSpectra> {
        match self {
            SpectraSpec::Power {
                l_max: own,
                noise,
                initial,
            } => {
                let law = PowerLaw::new(noise.c, noise.nu)?;
                let s = PowerSpectra::power_law(l_max.unwrap_or(*own), law)?;
                Ok(match initial {
                    Some(i) => s.with_initial_law(PowerLaw::new(i.c, i.nu)?),
                    None => s,
                })
            }
            SpectraSpec::Arrays {
                a1,
                a2,
                sig_hat2,
                sig_tilde2,
            } => {
                let n = l_max.unwrap_or(a1.len());
                if n > a1.len() {
                    return Err(Error::Config(format!(
                        "explicit spectra have {} degrees, {n} requested",
                        a1.len()
                    )));
                }
                let pad = |v: &Vec<f64>| {
                    if v.is_empty() {
                        vec![0.0; a1.len()]
                    } else {
                        v.clone()
                    }
                };
                let cut = |v: Vec<f64>| v.into_iter().take(n).collect::<Vec<_>>();
                PowerSpectra::from_arrays(
                    cut(a1.clone()),
                    cut(a2.clone()),
                    cut(pad(sig_hat2)),
                    cut(pad(sig_tilde2)),
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Times {
    /// Evaluation time of samples, covariances and studies.
    pub t: f64,
    /// Times at which the Cauchy solution norm is tabulated.
    pub cauchy_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Replicates {
    /// Independent fields drawn by `sample`, `cauchy` and `combined`.
    pub samples: usize,
    pub chebyshev: usize,
    /// fBm paths in the validation suite.
    pub fbm_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    /// Truncation degrees L′ of the rate study.
    pub degrees: Vec<usize>,
    /// Spectrum length standing in for the infinite tail.
    pub tail_l_max: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChebyshevConfig {
    pub l_prime: usize,
    pub eps: f64,
    /// (θ, φ) of the evaluation point.
    pub point: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncrementConfig {
    /// Fixed t + τ of the gap sweep.
    pub sum: f64,
    pub gaps: Vec<f64>,
    /// Allowed max/min variation of the ratio over the sweep.
    pub factor: f64,
    pub slope_tolerance: f64,
    pub large_time_gap: f64,
    pub large_time_sums: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceConfig {
    /// Point pairs ((θ₁, φ₁), (θ₂, φ₂)).
    pub pairs: Vec<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlConfig {
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub spectra: SpectraSpec,
    /// Parameter of the Gauss–Legendre product grid; resolves degrees up to this minus one.
    pub grid_degree: usize,
    /// Points of the graded time mesh of the pathwise sampler.
    pub mesh_points: usize,
    pub times: Times,
    pub replicates: Replicates,
    pub seed: u64,
    pub truncation: TruncationConfig,
    pub chebyshev: ChebyshevConfig,
    pub increment: IncrementConfig,
    pub covariance: CovarianceConfig,
    pub ml: MlConfig,
    pub output: OutputConfig,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub format: Option<Format>,
    pub t: Option<f64>,
    pub t0: Option<f64>,
    pub l: Option<usize>,
    pub nu: Option<f64>,
    pub eps: Option<f64>,
    pub replicates: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn default_config() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("shipped config parses")
    }

    /// Applies overrides; `replicate_target` picks which replicate count `--replicates` sets.
    pub fn apply(&mut self, o: &Overrides, replicate_target: ReplicateTarget) -> Result<()> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.out {
            self.output.dir = d.clone();
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
        if let Some(t) = o.t {
            self.times.t = t;
        }
        if let Some(t0) = o.t0 {
            self.model.t0 = t0;
        }
        if let Some(l) = o.l {
            match &mut self.spectra {
                SpectraSpec::Power { l_max, .. } => *l_max = l,
                SpectraSpec::Arrays { .. } => {
                    return Err(Error::Config(
                        "--L needs power-law spectra; explicit arrays fix the degree".into(),
                    ))
                }
            }
        }
        if let Some(nu) = o.nu {
            match &mut self.spectra {
                SpectraSpec::Power { noise, .. } => noise.nu = nu,
                SpectraSpec::Arrays { .. } => {
                    return Err(Error::Config("--nu needs power-law spectra".into()))
                }
            }
        }
        if let Some(e) = o.eps {
            self.chebyshev.eps = e;
        }
        if let Some(n) = o.replicates {
            match replicate_target {
                ReplicateTarget::Samples => self.replicates.samples = n,
                ReplicateTarget::Chebyshev => self.replicates.chebyshev = n,
                ReplicateTarget::FbmPaths => self.replicates.fbm_paths = n,
                ReplicateTarget::None => {}
            }
        }
        Ok(())
    }

    /// Checks every field against the model invariants before any computation.
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.spectra.build(None)?;
        let l = self.spectra.l_max();
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if !(self.times.t >= 0.0) || !self.times.t.is_finite() {
            return Err(Error::Config(format!(
                "times.t must be finite and >= 0, got {}",
                self.times.t
            )));
        }
        if self
            .times
            .cauchy_grid
            .iter()
            .any(|t| !(*t >= 0.0) || !t.is_finite())
        {
            return Err(Error::Config(
                "times.cauchy_grid entries must be >= 0".into(),
            ));
        }
        if self.grid_degree == 0 {
            return Err(Error::Config("grid_degree must be at least 1".into()));
        }
        if self.mesh_points < 2 {
            return Err(Error::Config("mesh_points must be at least 2".into()));
        }
        if self.replicates.samples == 0 || self.replicates.chebyshev == 0 {
            return Err(Error::Config("replicate counts must be positive".into()));
        }
        if self.truncation.degrees.len() < 3 {
            return Err(Error::Config(
                "truncation.degrees needs at least 3 entries".into(),
            ));
        }
        if let Some(&d) = self
            .truncation
            .degrees
            .iter()
            .find(|&&d| d == 0 || d >= self.truncation.tail_l_max)
        {
            return Err(Error::Config(format!(
                "truncation degree {d} must lie in 1..tail_l_max = {}",
                self.truncation.tail_l_max
            )));
        }
        positive("truncation.tolerance", self.truncation.tolerance)?;
        if self.chebyshev.l_prime >= l {
            return Err(Error::Config(format!(
                "chebyshev.l_prime = {} must be below the spectrum degree {l}",
                self.chebyshev.l_prime
            )));
        }
        positive("chebyshev.eps", self.chebyshev.eps)?;
        self.point(self.chebyshev.point)?;
        for pair in &self.covariance.pairs {
            self.point(pair[0])?;
            self.point(pair[1])?;
        }
        let inc = &self.increment;
        positive("increment.sum", inc.sum)?;
        positive("increment.factor", inc.factor)?;
        positive("increment.slope_tolerance", inc.slope_tolerance)?;
        positive("increment.large_time_gap", inc.large_time_gap)?;
        if inc.gaps.iter().any(|&g| !(g > 0.0 && g <= inc.sum)) {
            return Err(Error::Config(
                "increment.gaps must lie in (0, increment.sum]".into(),
            ));
        }
        if inc
            .large_time_sums
            .iter()
            .any(|&s| !(s >= inc.large_time_gap))
        {
            return Err(Error::Config(
                "increment.large_time_sums must be at least increment.large_time_gap".into(),
            ));
        }
        if self.ml.z.iter().any(|z| !(*z >= 0.0) || !z.is_finite()) {
            return Err(Error::Config("ml.z entries must be finite and >= 0".into()));
        }
        Ok(())
    }

    pub fn point(&self, p: [f64; 2]) -> Result<SpherePoint> {
        SpherePoint::from_angles(p[0], p[1])
            .map_err(|e| Error::Config(format!("bad point ({}, {}): {e}", p[0], p[1])))
    }

    pub fn spectra(&self) -> Result<PowerSpectra> {
        self.spectra.build(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplicateTarget {
    Samples,
    Chebyshev,
    FbmPaths,
    None,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_is_valid() {
        let c = RunConfig::default_config();
        c.validate().unwrap();
        assert_eq!(c.output.format, Format::Csv);
    }

    #[test]
    fn explicit_arrays_parse() {
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_CONFIG).unwrap();
        v["spectra"] = serde_json::json!({"a1": [1.0, 0.5], "a2": [1.0, 0.5]});
        v["chebyshev"]["l_prime"] = serde_json::json!(1);
        let c = RunConfig::parse(&v.to_string()).unwrap();
        c.validate().unwrap();
        let s = c.spectra().unwrap();
        assert_eq!(s.l_max(), 2);
        assert_eq!(s.sig_hat2(2), 0.0);
    }

    #[test]
    fn overrides_and_rejections() {
        let mut c = RunConfig::default_config();
        let o = Overrides {
            nu: Some(6.0),
            l: Some(12),
            replicates: Some(7),
            ..Default::default()
        };
        c.apply(&o, ReplicateTarget::Chebyshev).unwrap();
        assert_eq!(c.spectra().unwrap().noise_law.unwrap().nu, 6.0);
        assert_eq!(c.spectra.l_max(), 12);
        assert_eq!(c.replicates.chebyshev, 7);

        let mut bad = RunConfig::default_config();
        bad.model.beta = 1.5;
        assert!(bad.validate().is_err());
        assert!(RunConfig::parse("{\"model\": {}}").is_err());
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_CONFIG).unwrap();
        v["unknown"] = serde_json::json!(1);
        assert!(RunConfig::parse(&v.to_string()).is_err());
    }
}
