//! Monte Carlo studies: bias summaries, threshold sweeps, co-jump variant
//! comparisons and jump classification.
//!
//! Paths are simulated in parallel on the current rayon pool. Every summary
//! is computed from index-ordered per-path records, so results are identical
//! for any number of worker threads.

mod classification;
mod monte_carlo;
mod stats;
mod sweep;

pub use classification::{jump_classification_study, ClassificationRate, ClassificationStudy};
pub use monte_carlo::{
    cojump_variant_study, evaluate_path, normalized_bias_stats, relative_bias, run_monte_carlo,
    summary_variant_study, BiasKind, BiasSummary, LargestCojump, PathRecord, VariantBias,
    VariantStudy, SUMMARY_SCHEMA_VERSION,
};
pub use stats::{
    normal_qq, quantile, quantile_sorted, standard_normal_quantile, Aggregate, NormalStats,
    QqPoint, SUMMARY_PROBS,
};
pub use sweep::{sweep_thresholds, SweepGrid, SweepResult};

/// Desk-scale default number of Monte Carlo paths.
pub const DEFAULT_PATHS: usize = 500;
