//! Seed-reproducible property suites.
//!
//! Each suite draws its inputs from `base_seed + trial_index`, runs the
//! trials independently (in parallel), and assembles a report ordered by
//! trial index. Reports carry every seed and the full configuration, so any
//! trial can be replayed on its own.

mod families;
mod report;
mod suites;

pub use families::{generate_trial, Family, IntRange, TrialInputs, TrialSpec};
pub use report::{SweepPoint, TrialRecord, TrialStatus, VerificationReport};
pub use suites::{
    check_axioms, check_commuting_agreement, check_continuity_sweep, check_continuity_sweeps,
    check_unitary_covariance, continuity_sweep_for, covariance_error, survey_open_properties,
    SuiteParams, SweepParams, DEFAULT_SWEEP_TS,
};
