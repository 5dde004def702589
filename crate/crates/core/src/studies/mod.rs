//! Rate harnesses: truncation-error decay, Chebyshev tail bounds and temporal increments,
//! all evaluated on exact spectral sums with Monte Carlo as a cross-check.

mod fit;
mod increment;
mod truncation;

pub use fit::{rate_fit, RateFit};
pub use increment::{
    increment_bound_study, increment_gap_sweep, increment_large_time_scan, increment_norm,
    increment_norm_sq, GapSweep, IncrementRow, IncrementStudy, LargeTimeScan, SMALL_GAP_FRACTION,
};
pub use truncation::{
    chebyshev_tail_check, truncation_rate_study, truncation_tail_norm, ChebyshevReport,
    TruncationStudy,
};
