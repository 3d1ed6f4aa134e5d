//! Monte Carlo estimators over sampled spectra and root sets, and their
//! statistical comparison with the oracles.

mod batch;
mod compare;
mod gaussianity;
mod hole;
mod pair;
mod radial;

pub use batch::{
    free_points, run_batch, sample_moment_vectors, sample_root_sets, sample_spectra, Batch,
    BatchReport, Execution, KacSpec, WORKERS_ENV,
};
pub use compare::{compare, ComparisonPoint, ComparisonReport, Criterion, Curve};
pub use gaussianity::{gaussianity_report, CoordinateStats, CovarianceStats, GaussianityReport};
pub use hole::{estimate_hole_probability, normal_quantile, wilson_interval, HoleEstimate};
pub use pair::{estimate_rho2_at, window_average, PairWindowEstimate};
pub use radial::{
    annulus_average, estimate_radial_density, radial_oracle_curve, uniform_edges, validate_edges,
    BinFilter, RadialHistogram,
};
