//! Finite statistics: sampling, estimators and statistical no-signaling tests.

mod counts;
mod estimate;
mod nosignal;

pub use counts::{
    sample_counts, sample_counts_with, shard_rounds, CountSidecar, CountTable, SamplingMode,
};
pub use estimate::{
    estimate, estimate_from_frequencies, significance, Estimate, EstimateReport, ASSUMPTIONS,
};
pub use nosignal::{
    nosignal_stat_check, nosignal_stat_check_with, ConstraintStat, Correction, NoSignalStatOptions,
    NoSignalStatReport,
};
