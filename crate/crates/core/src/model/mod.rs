//! The equation: parameters, the diffusion symbol ψ, admissibility, and samplers of the
//! noise-driven, Cauchy and combined solutions in the vector-harmonic basis.

mod params;
mod sampler;
mod spectra;
mod variances;

pub use params::{psi, tau_exponent, ModelParams};
pub use sampler::{
    apply_cauchy, draw_initial, sample_cauchy, sample_combined, sample_combined_from,
    sample_solution_exact_time, sample_solution_pathwise, truncate, MeshDiagnostic,
    PathwiseSampler, DEFAULT_MESH_POINTS,
};
pub use spectra::{check_admissibility, AdmissibilityReport, PowerLaw, PowerSpectra, Summability};
pub use variances::{relaxation, ModeVariances};
