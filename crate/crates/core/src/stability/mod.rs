//! Desk-scale stability experiments: converging sequences of optimal paths, the
//! competitor that beats a suboptimal member, and the two energy lemmas behind it.

mod competitor;
mod lemmas;
mod quantize;
mod trial;

pub use competitor::{
    build_competitor, build_covers, competitor_for_instance, synthetic_suboptimal, vertex_homotopy_bound, CompetitorConfig,
    CompetitorReport, EnergyLedger, InputChecks, SignedCovers, SphereLink, SyntheticInstance,
};
pub use lemmas::{
    check_high_multiplicity_lsc, check_quasi_additivity, quasi_additivity, shared_multiplicity_ratio, HighMultiplicityReport,
    QuasiAdditivity,
};
pub use quantize::{quantization_scale, quantize, AtomSpec, TargetSpec};
pub use trial::{run_stability_trial, ExperimentConfig, TrialReport, TrialRow, Verdict, INCONCLUSIVE, MONOTONE_FROM, OPTIMAL_LIMIT};
