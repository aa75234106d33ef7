//! Survey scoring, decision-tree classification, and post-processing
//! bias mitigation with group thresholds, plus a repeated-trial
//! evaluation harness.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`survey`] parses raw questionnaire CSVs, inverts reversed items,
//!    drops participants who skipped an entire instrument, and computes
//!    normalized aggregated scores in [0, 1].
//! 2. [`dataset`] assembles the 10-feature rows (sex, age, eight scores)
//!    and provides class balancing, stratified splits, and k-folds;
//!    [`synth`] generates a skewed synthetic cohort when no real data is
//!    available.
//! 3. [`tree`] fits a CART classifier whose leaf fractions serve as
//!    scores; [`model_select`] grid-searches its four hyper-parameters
//!    with cross-validation.
//! 4. [`fairness`] audits predictions (selection rates, demographic
//!    parity, false negative rates, equalized odds); [`mitigate`] fits
//!    per-group randomized threshold policies that equalize selection
//!    rates or error rates exactly on the fitting data.
//! 5. [`experiment`] repeats balance/split/fit/mitigate/audit over many
//!    trials and aggregates means, percent improvements ([`stats`]), and
//!    two-sample t-tests.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p fairtree --example score_survey          # raw CSV -> scores
//! cargo run -p fairtree --example synthesize_cohort     # synthetic dataset
//! cargo run -p fairtree --example train_decision_tree   # fit + inspect a tree
//! cargo run -p fairtree --example tune_hyperparameters  # grid search CV
//! cargo run -p fairtree --example audit_fairness        # the six metrics
//! cargo run -p fairtree --example mitigate_bias         # threshold policies
//! cargo run -p fairtree --example run_experiment        # the full protocol
//! ```
//!
//! The same functionality is scriptable through the `fairtree` binary;
//! see the README for the subcommands and file formats.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod fairness;
pub mod manifest;
pub mod mitigate;
pub mod model_select;
pub mod stats;
pub mod survey;
pub mod synth;
pub mod tree;

pub use dataset::{balance_classes, k_folds, stratified_split, Dataset, FeatureRow};
pub use error::{Error, Result};
pub use experiment::{run_experiment, run_trial, ExperimentConfig, ExperimentSummary, TrialRecord};
pub use fairness::{FairnessReport, GroupConfusion};
pub use mitigate::{
    apply_policy, fit_demographic_parity, fit_equalized_odds, ConstraintKind, ThresholdPolicy,
};
pub use model_select::{grid_search_cv, GridSpec};
pub use stats::{percent_improvement, t_tail, t_test_pooled, TTestResult};
pub use survey::{
    aggregate_score, apply_inversion, filter_complete, parse_responses, Cohort, InstrumentSpec,
    Sex, SurveyResponse,
};
pub use synth::{generate, CohortSpec};
pub use tree::{fit, impurity, predict_label, predict_score, Criterion, DecisionTree, TreeParams};
