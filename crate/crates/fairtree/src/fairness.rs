//! Group-wise confusion statistics and the six audited fairness metrics:
//! per-group selection rate, demographic parity ratio/difference,
//! per-group false negative rate, and equalized odds ratio/difference.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::survey::Sex;

/// Confusion counts for one group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Confusion counts partitioned by group id. Two groups (female, male)
/// are the expected case, but any number >= 2 works.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfusion<G: Ord> {
    pub groups: BTreeMap<G, Confusion>,
}

/// TPR, FPR, and FNR of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub tpr: f64,
    pub fpr: f64,
    pub fnr: f64,
}

/// Tally predictions against truth, split by group.
pub fn group_confusion<G: Ord + Copy>(
    y_true: &[bool],
    y_pred: &[bool],
    groups: &[G],
) -> Result<GroupConfusion<G>> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.len() != groups.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: groups.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::LengthMismatch { left: 0, right: 0 });
    }
    let mut map: BTreeMap<G, Confusion> = BTreeMap::new();
    for ((&truth, &pred), &group) in y_true.iter().zip(y_pred).zip(groups) {
        let cell = map.entry(group).or_default();
        match (truth, pred) {
            (true, true) => cell.tp += 1,
            (true, false) => cell.fn_ += 1,
            (false, true) => cell.fp += 1,
            (false, false) => cell.tn += 1,
        }
    }
    Ok(GroupConfusion { groups: map })
}

/// Fraction predicted positive, per group.
pub fn selection_rates<G: Ord + Copy + Display>(
    conf: &GroupConfusion<G>,
) -> Result<BTreeMap<G, f64>> {
    let mut rates = BTreeMap::new();
    for (&group, cell) in &conf.groups {
        let total = cell.total();
        if total == 0 {
            return Err(Error::EmptyGroup {
                group: group.to_string(),
            });
        }
        rates.insert(group, (cell.tp + cell.fp) as f64 / total as f64);
    }
    Ok(rates)
}

/// Demographic parity (ratio, difference) over group selection rates:
/// ratio = min/max (1 when max is 0), difference = max - min.
pub fn demographic_parity<G: Ord + Copy + Display>(conf: &GroupConfusion<G>) -> Result<(f64, f64)> {
    if conf.groups.len() < 2 {
        return Err(Error::TooFewGroups {
            found: conf.groups.len(),
        });
    }
    let rates = selection_rates(conf)?;
    Ok(min_max_summary(rates.values().copied()))
}

/// TPR/FPR/FNR per group; errors when a group lacks the positives or
/// negatives a rate needs.
pub fn group_error_rates<G: Ord + Copy + Display>(
    conf: &GroupConfusion<G>,
) -> Result<BTreeMap<G, ErrorRates>> {
    let mut rates = BTreeMap::new();
    for (&group, cell) in &conf.groups {
        let actual_pos = cell.tp + cell.fn_;
        let actual_neg = cell.fp + cell.tn;
        if actual_pos == 0 {
            return Err(Error::UndefinedRate {
                group: group.to_string(),
                rate: "true positive rate",
            });
        }
        if actual_neg == 0 {
            return Err(Error::UndefinedRate {
                group: group.to_string(),
                rate: "false positive rate",
            });
        }
        let tpr = cell.tp as f64 / actual_pos as f64;
        rates.insert(
            group,
            ErrorRates {
                tpr,
                fpr: cell.fp as f64 / actual_neg as f64,
                fnr: cell.fn_ as f64 / actual_pos as f64,
            },
        );
    }
    Ok(rates)
}

/// Equalized odds (ratio, difference).
///
/// difference = the larger of the cross-group TPR and FPR gaps;
/// ratio = the smaller of the cross-group TPR and FPR min/max quotients,
/// a quotient counting as 1 when its denominator is 0.
pub fn equalized_odds<G: Ord + Copy + Display>(conf: &GroupConfusion<G>) -> Result<(f64, f64)> {
    if conf.groups.len() < 2 {
        return Err(Error::TooFewGroups {
            found: conf.groups.len(),
        });
    }
    let rates = group_error_rates(conf)?;
    let (tpr_ratio, tpr_diff) = min_max_summary(rates.values().map(|r| r.tpr));
    let (fpr_ratio, fpr_diff) = min_max_summary(rates.values().map(|r| r.fpr));
    Ok((tpr_ratio.min(fpr_ratio), tpr_diff.max(fpr_diff)))
}

/// (min/max with 0/0 counting as parity, max - min) of a rate collection.
fn min_max_summary(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    let ratio = if max == 0.0 { 1.0 } else { min / max };
    (ratio, max - min)
}

/// The six audited metrics in one bundle, serializable to JSON with
/// fractional values in [0, 1]; the CLI renders percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport<G: Ord = Sex> {
    pub selection_rate: BTreeMap<G, f64>,
    pub demographic_parity_ratio: f64,
    pub demographic_parity_difference: f64,
    pub fnr: BTreeMap<G, f64>,
    pub tpr: BTreeMap<G, f64>,
    pub fpr: BTreeMap<G, f64>,
    pub equalized_odds_ratio: f64,
    pub equalized_odds_difference: f64,
}

impl<G: Ord + Copy + Display> FairnessReport<G> {
    pub fn from_predictions(y_true: &[bool], y_pred: &[bool], groups: &[G]) -> Result<Self> {
        let conf = group_confusion(y_true, y_pred, groups)?;
        Self::from_confusion(&conf)
    }

    pub fn from_confusion(conf: &GroupConfusion<G>) -> Result<Self> {
        let selection_rate = selection_rates(conf)?;
        let (dp_ratio, dp_diff) = demographic_parity(conf)?;
        let rates = group_error_rates(conf)?;
        let (eo_ratio, eo_diff) = equalized_odds(conf)?;
        Ok(FairnessReport {
            selection_rate,
            demographic_parity_ratio: dp_ratio,
            demographic_parity_difference: dp_diff,
            fnr: rates.iter().map(|(&g, r)| (g, r.fnr)).collect(),
            tpr: rates.iter().map(|(&g, r)| (g, r.tpr)).collect(),
            fpr: rates.iter().map(|(&g, r)| (g, r.fpr)).collect(),
            equalized_odds_ratio: eo_ratio,
            equalized_odds_difference: eo_diff,
        })
    }
}
