//! Monte Carlo and exact experiments comparing finite-size behaviour with
//! the limit laws, plus the fixed verification suites.
//!
//! Monte Carlo work is split over [`RngStream`](crate::sampler::RngStream)s
//! by [`run_streams`](crate::sampler::run_streams); results depend on the
//! seed and the number of streams but not on the thread pool.

pub mod brute;
mod report;
mod runners;
mod spec;
pub mod stats;
mod suites;

pub use report::{fmt_f64, Criterion, ExperimentReport, ReportMeta, ReportRow, CSV_COLUMNS};
pub use runners::{
    pattern_label, run, run_eq1_equivalence, run_exact_vs_asym, run_gap_sweep, run_pattern_census,
    run_tail_checks, FULL_CENSUS_MAX_K,
};
pub use spec::{Compare, ExperimentKind, ExperimentSpec, Mode, Position};
pub use stats::{chi_square, chi_square_two_sample, tv_distance, wilson_ci, ChiSquare};
pub use suites::{bijection, figure1, identities_brute, GOLDEN_GAP_400_4000_20, identities_structural, run_suite, sampler_uniformity, Suite, SuiteOptions, SuiteResult};
