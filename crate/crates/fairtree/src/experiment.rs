//! The repeated-trial evaluation protocol: balance, split, fit, audit,
//! mitigate, re-audit, N times; then aggregate means, percent
//! improvements, and significance tests.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{balance_classes, stratified_split, Dataset};
use crate::error::{Error, Result};
use crate::fairness::FairnessReport;
use crate::mitigate::{
    apply_policy, fit_demographic_parity, fit_equalized_odds, ConstraintKind, ThresholdPolicy,
};
use crate::model_select::{grid_search_cv, GridSpec};
use crate::stats::{percent_improvement, t_test_pooled, TTestResult};
use crate::survey::Sex;
use crate::tree::{accuracy, fit, predict_label, predict_score, TreeParams};

/// Which constraints an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintChoice {
    DemographicParity,
    EqualizedOdds,
    Both,
}

impl ConstraintChoice {
    pub fn kinds(self) -> Vec<ConstraintKind> {
        match self {
            ConstraintChoice::DemographicParity => vec![ConstraintKind::DemographicParity],
            ConstraintChoice::EqualizedOdds => vec![ConstraintKind::EqualizedOdds],
            ConstraintChoice::Both => vec![
                ConstraintKind::DemographicParity,
                ConstraintKind::EqualizedOdds,
            ],
        }
    }
}

/// Experiment parameters. `tree_params` of `None` means a grid search on
/// the first trial's balanced training data picks the parameters once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_trials: usize,
    pub positive_target: usize,
    pub test_fraction: f64,
    pub tree_params: Option<TreeParams>,
    pub grid: GridSpec,
    pub constraint: ConstraintChoice,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    /// 30 trials, 20-pilot balancing, a 70/30 split, both constraints,
    /// and a fixed regularized tree (gini, depth 3, leaf 5, split 2);
    /// set `tree_params: None` to grid-search instead.
    fn default() -> Self {
        ExperimentConfig {
            n_trials: 30,
            positive_target: 20,
            test_fraction: 0.3,
            tree_params: Some(TreeParams {
                criterion: crate::tree::Criterion::Gini,
                max_depth: 3,
                min_samples_leaf: 5,
                min_samples_split: 2,
            }),
            grid: GridSpec::standard(),
            constraint: ConstraintChoice::Both,
            master_seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials < 2 {
            return Err(Error::Config("n_trials must be at least 2".into()));
        }
        if self.positive_target < 1 {
            return Err(Error::Config("positive_target must be at least 1".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config("test_fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// One mitigated audit: the post-mitigation report and test accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigatedOutcome {
    pub report: FairnessReport,
    pub accuracy: f64,
    pub policy: ThresholdPolicy,
}

/// Before/after snapshots of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub before: FairnessReport,
    pub accuracy_before: f64,
    pub after: BTreeMap<ConstraintKind, MitigatedOutcome>,
}

/// Arithmetic means of per-trial metric values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMeans {
    pub selection_rate: BTreeMap<Sex, f64>,
    pub demographic_parity_ratio: f64,
    pub demographic_parity_difference: f64,
    pub fnr: BTreeMap<Sex, f64>,
    pub mean_fnr: f64,
    pub equalized_odds_ratio: f64,
    pub equalized_odds_difference: f64,
    pub accuracy: f64,
}

/// Percent improvements of the headline metrics, computed from the
/// summary means (`None` when the before-value is zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvements {
    pub demographic_parity_ratio: Option<f64>,
    pub demographic_parity_difference: Option<f64>,
    pub equalized_odds_ratio: Option<f64>,
    pub equalized_odds_difference: Option<f64>,
    pub mean_fnr: Option<f64>,
}

/// Aggregated experiment outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub n_trials: usize,
    pub master_seed: u64,
    pub tree_params: TreeParams,
    pub constraints: Vec<ConstraintKind>,
    pub before: MetricMeans,
    pub after: BTreeMap<ConstraintKind, MetricMeans>,
    pub improvements: BTreeMap<ConstraintKind, Improvements>,
    /// Two-sample t-tests comparing the per-trial before-values against
    /// the after-values of the constraint's headline difference metric.
    pub t_tests: BTreeMap<ConstraintKind, TTestResult>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-stage seed derivation.
pub fn derive_seed(master_seed: u64, stream: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(stream))
}

const STREAM_GRID: u64 = 0xA11C;
const STREAM_BALANCE: u64 = 1;
const STREAM_SPLIT: u64 = 2;
const STREAM_APPLY_DP: u64 = 3;
const STREAM_APPLY_EO: u64 = 4;

fn stage<T>(trial: usize, name: &'static str, result: Result<T>) -> Result<T> {
    result.map_err(|e| Error::Trial {
        trial,
        stage: name,
        source: Box::new(e),
    })
}

/// One trial: balance, split, fit, audit unmitigated test predictions at
/// threshold 0.5, fit each constraint's policy on the training scores,
/// and audit the mitigated test predictions.
pub fn run_trial(
    data: &Dataset,
    config: &ExperimentConfig,
    params: &TreeParams,
    trial: usize,
) -> Result<TrialRecord> {
    let trial_seed = derive_seed(config.master_seed, trial as u64);

    let balanced = stage(
        trial,
        "balance",
        balance_classes(
            data,
            config.positive_target,
            derive_seed(trial_seed, STREAM_BALANCE),
        ),
    )?;
    let (train, test) = stage(
        trial,
        "split",
        stratified_split(
            &balanced,
            config.test_fraction,
            derive_seed(trial_seed, STREAM_SPLIT),
        ),
    )?;
    let model = stage(trial, "fit", fit(&train, params))?;

    let test_truth: Vec<bool> = test.rows.iter().map(|r| r.is_positive()).collect();
    let test_groups: Vec<Sex> = test.rows.iter().map(|r| r.sex).collect();
    let test_scores: Vec<f64> = test.rows.iter().map(|r| predict_score(&model, r)).collect();

    let before_preds: Vec<bool> = test
        .rows
        .iter()
        .map(|r| predict_label(&model, r, 0.5).is_positive())
        .collect();
    let before = stage(
        trial,
        "audit",
        FairnessReport::from_predictions(&test_truth, &before_preds, &test_groups),
    )?;
    let accuracy_before = accuracy(&model, &test, 0.5);

    let train_truth: Vec<bool> = train.rows.iter().map(|r| r.is_positive()).collect();
    let train_groups: Vec<Sex> = train.rows.iter().map(|r| r.sex).collect();
    let train_scores: Vec<f64> = train.rows.iter().map(|r| predict_score(&model, r)).collect();

    let mut after = BTreeMap::new();
    for kind in config.constraint.kinds() {
        let (policy, apply_stream) = match kind {
            ConstraintKind::DemographicParity => (
                stage(
                    trial,
                    "mitigate",
                    fit_demographic_parity(&train_scores, &train_truth, &train_groups),
                )?,
                STREAM_APPLY_DP,
            ),
            ConstraintKind::EqualizedOdds => (
                stage(
                    trial,
                    "mitigate",
                    fit_equalized_odds(&train_scores, &train_truth, &train_groups),
                )?,
                STREAM_APPLY_EO,
            ),
        };
        let preds = stage(
            trial,
            "apply",
            apply_policy(
                &policy,
                &test_scores,
                &test_groups,
                derive_seed(trial_seed, apply_stream),
            ),
        )?;
        let report = stage(
            trial,
            "audit",
            FairnessReport::from_predictions(&test_truth, &preds, &test_groups),
        )?;
        let correct = preds
            .iter()
            .zip(&test_truth)
            .filter(|(p, t)| p == t)
            .count();
        after.insert(
            kind,
            MitigatedOutcome {
                report,
                accuracy: correct as f64 / test.len() as f64,
                policy,
            },
        );
    }

    Ok(TrialRecord {
        trial,
        before,
        accuracy_before,
        after,
    })
}

/// Run the full protocol and aggregate.
pub fn run_experiment(
    data: &Dataset,
    config: &ExperimentConfig,
) -> Result<(Vec<TrialRecord>, ExperimentSummary)> {
    config.validate()?;

    let params = resolve_params(data, config)?;
    let mut records = Vec::with_capacity(config.n_trials);
    for trial in 0..config.n_trials {
        records.push(run_trial(data, config, &params, trial)?);
    }
    let summary = summarize(&records, config, params)?;
    Ok((records, summary))
}

/// The tree parameters an experiment will use: the configured ones, or a
/// grid search on the first trial's balanced training data.
pub fn resolve_params(data: &Dataset, config: &ExperimentConfig) -> Result<TreeParams> {
    if let Some(params) = config.tree_params {
        return Ok(params);
    }
    let trial_seed = derive_seed(config.master_seed, 0);
    let balanced = balance_classes(
        data,
        config.positive_target,
        derive_seed(trial_seed, STREAM_BALANCE),
    )?;
    let (train, _) = stratified_split(
        &balanced,
        config.test_fraction,
        derive_seed(trial_seed, STREAM_SPLIT),
    )?;
    let (best, _) = grid_search_cv(
        &train,
        &config.grid,
        derive_seed(config.master_seed, STREAM_GRID),
    )?;
    Ok(best)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn metric_means(pairs: &[(&FairnessReport, f64)]) -> MetricMeans {
    let sexes = [Sex::Female, Sex::Male];
    let selection_rate: BTreeMap<Sex, f64> = sexes
        .iter()
        .map(|&s| (s, mean(pairs.iter().map(|(r, _)| r.selection_rate[&s]))))
        .collect();
    let fnr: BTreeMap<Sex, f64> = sexes
        .iter()
        .map(|&s| (s, mean(pairs.iter().map(|(r, _)| r.fnr[&s]))))
        .collect();
    let mean_fnr = fnr.values().sum::<f64>() / fnr.len() as f64;
    MetricMeans {
        selection_rate,
        demographic_parity_ratio: mean(pairs.iter().map(|(r, _)| r.demographic_parity_ratio)),
        demographic_parity_difference: mean(
            pairs.iter().map(|(r, _)| r.demographic_parity_difference),
        ),
        fnr,
        mean_fnr,
        equalized_odds_ratio: mean(pairs.iter().map(|(r, _)| r.equalized_odds_ratio)),
        equalized_odds_difference: mean(pairs.iter().map(|(r, _)| r.equalized_odds_difference)),
        accuracy: mean(pairs.iter().map(|(_, a)| *a)),
    }
}

fn summarize(
    records: &[TrialRecord],
    config: &ExperimentConfig,
    params: TreeParams,
) -> Result<ExperimentSummary> {
    let before_pairs: Vec<(&FairnessReport, f64)> = records
        .iter()
        .map(|r| (&r.before, r.accuracy_before))
        .collect();
    let before = metric_means(&before_pairs);

    let mut after = BTreeMap::new();
    let mut improvements = BTreeMap::new();
    let mut t_tests = BTreeMap::new();
    for kind in config.constraint.kinds() {
        let after_pairs: Vec<(&FairnessReport, f64)> = records
            .iter()
            .map(|r| {
                let outcome = &r.after[&kind];
                (&outcome.report, outcome.accuracy)
            })
            .collect();
        let means = metric_means(&after_pairs);

        let improve = |b: f64, a: f64| percent_improvement(b, a).ok();
        improvements.insert(
            kind,
            Improvements {
                demographic_parity_ratio: improve(
                    before.demographic_parity_ratio,
                    means.demographic_parity_ratio,
                ),
                demographic_parity_difference: improve(
                    before.demographic_parity_difference,
                    means.demographic_parity_difference,
                ),
                equalized_odds_ratio: improve(
                    before.equalized_odds_ratio,
                    means.equalized_odds_ratio,
                ),
                equalized_odds_difference: improve(
                    before.equalized_odds_difference,
                    means.equalized_odds_difference,
                ),
                mean_fnr: improve(before.mean_fnr, means.mean_fnr),
            },
        );

        let (before_values, after_values): (Vec<f64>, Vec<f64>) = match kind {
            ConstraintKind::DemographicParity => (
                records
                    .iter()
                    .map(|r| r.before.demographic_parity_difference)
                    .collect(),
                records
                    .iter()
                    .map(|r| r.after[&kind].report.demographic_parity_difference)
                    .collect(),
            ),
            ConstraintKind::EqualizedOdds => (
                records
                    .iter()
                    .map(|r| r.before.equalized_odds_difference)
                    .collect(),
                records
                    .iter()
                    .map(|r| r.after[&kind].report.equalized_odds_difference)
                    .collect(),
            ),
        };
        t_tests.insert(kind, t_test_pooled(&before_values, &after_values)?);

        after.insert(kind, means);
    }

    Ok(ExperimentSummary {
        n_trials: config.n_trials,
        master_seed: config.master_seed,
        tree_params: params,
        constraints: config.constraint.kinds(),
        before,
        after,
        improvements,
        t_tests,
    })
}

/// Trial records as CSV, one row per trial per metric:
/// `trial,phase,metric,value`.
pub fn write_trials_csv(records: &[TrialRecord], sink: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["trial", "phase", "metric", "value"])?;
    let mut emit = |trial: usize, phase: &str, report: &FairnessReport, acc: f64| -> Result<()> {
        let mut push = |metric: &str, value: f64| -> Result<()> {
            writer.write_record([
                trial.to_string(),
                phase.to_string(),
                metric.to_string(),
                format!("{value}"),
            ])?;
            Ok(())
        };
        for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
            push(&format!("selection_rate_{label}"), report.selection_rate[&sex])?;
        }
        push("demographic_parity_ratio", report.demographic_parity_ratio)?;
        push(
            "demographic_parity_difference",
            report.demographic_parity_difference,
        )?;
        for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
            push(&format!("fnr_{label}"), report.fnr[&sex])?;
            push(&format!("tpr_{label}"), report.tpr[&sex])?;
            push(&format!("fpr_{label}"), report.fpr[&sex])?;
        }
        push("equalized_odds_ratio", report.equalized_odds_ratio)?;
        push("equalized_odds_difference", report.equalized_odds_difference)?;
        push("accuracy", acc)?;
        Ok(())
    };
    for record in records {
        emit(record.trial, "before", &record.before, record.accuracy_before)?;
        for (kind, outcome) in &record.after {
            emit(
                record.trial,
                &format!("after_{kind}"),
                &outcome.report,
                outcome.accuracy,
            )?;
        }
    }
    Ok(())
}

/// Bar-chart data for the six figures: `metric,group,phase,value`.
///
/// The demographic-parity family (selection rate, parity ratio, parity
/// difference) takes its after-values from the demographic-parity policy;
/// the equalized-odds family (FNR, odds ratio, odds difference) from the
/// equalized-odds policy.
pub fn write_figure_data(summary: &ExperimentSummary, sink: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["metric", "group", "phase", "value"])?;
    let mut push = |metric: &str, group: &str, phase: &str, value: f64| -> Result<()> {
        writer.write_record([metric, group, phase, &format!("{value}")])?;
        Ok(())
    };

    if let Some(dp) = summary.after.get(&ConstraintKind::DemographicParity) {
        for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
            push("selection_rate", label, "before", summary.before.selection_rate[&sex])?;
            push("selection_rate", label, "after", dp.selection_rate[&sex])?;
        }
        push("demographic_parity_ratio", "", "before", summary.before.demographic_parity_ratio)?;
        push("demographic_parity_ratio", "", "after", dp.demographic_parity_ratio)?;
        push(
            "demographic_parity_difference",
            "",
            "before",
            summary.before.demographic_parity_difference,
        )?;
        push("demographic_parity_difference", "", "after", dp.demographic_parity_difference)?;
    }
    if let Some(eo) = summary.after.get(&ConstraintKind::EqualizedOdds) {
        for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
            push("fnr", label, "before", summary.before.fnr[&sex])?;
            push("fnr", label, "after", eo.fnr[&sex])?;
        }
        push("equalized_odds_ratio", "", "before", summary.before.equalized_odds_ratio)?;
        push("equalized_odds_ratio", "", "after", eo.equalized_odds_ratio)?;
        push(
            "equalized_odds_difference",
            "",
            "before",
            summary.before.equalized_odds_difference,
        )?;
        push("equalized_odds_difference", "", "after", eo.equalized_odds_difference)?;
    }
    Ok(())
}
