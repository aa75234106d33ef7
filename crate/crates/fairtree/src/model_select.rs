//! Exhaustive grid search over tree hyper-parameters with stratified
//! k-fold cross-validation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{k_folds, Dataset};
use crate::error::{Error, Result};
use crate::tree::{accuracy, fit, Criterion, TreeParams};

/// The hyper-parameter grid and fold count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub criteria: Vec<Criterion>,
    pub max_depth_values: Vec<usize>,
    pub min_samples_leaf_values: Vec<usize>,
    pub min_samples_split_values: Vec<usize>,
    pub k: usize,
}

impl GridSpec {
    /// The grid searched by default: both criteria, depths 3..=15,
    /// leaf and split minimums {2,3,4,5}, seven folds.
    pub fn standard() -> Self {
        GridSpec {
            criteria: vec![Criterion::Gini, Criterion::Entropy],
            max_depth_values: (3..=15).collect(),
            min_samples_leaf_values: vec![2, 3, 4, 5],
            min_samples_split_values: vec![2, 3, 4, 5],
            k: 7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (dim, empty) in [
            ("criteria", self.criteria.is_empty()),
            ("max_depth_values", self.max_depth_values.is_empty()),
            (
                "min_samples_leaf_values",
                self.min_samples_leaf_values.is_empty(),
            ),
            (
                "min_samples_split_values",
                self.min_samples_split_values.is_empty(),
            ),
        ] {
            if empty {
                return Err(Error::EmptyGridDimension { dimension: dim });
            }
        }
        if self.k < 2 {
            return Err(Error::Config("fold count k must be at least 2".into()));
        }
        Ok(())
    }

    /// Grid points in enumeration order: criterion as listed, then
    /// ascending max_depth, min_samples_leaf, min_samples_split.
    pub fn points(&self) -> Vec<TreeParams> {
        let mut points = Vec::new();
        for &criterion in &self.criteria {
            for &depth in &self.max_depth_values {
                for &leaf in &self.min_samples_leaf_values {
                    for &split in &self.min_samples_split_values {
                        points.push(TreeParams {
                            criterion,
                            max_depth: depth,
                            min_samples_leaf: leaf,
                            min_samples_split: split,
                        });
                    }
                }
            }
        }
        points
    }
}

/// One grid point with its mean validation accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvEntry {
    pub params: TreeParams,
    pub mean_accuracy: f64,
}

/// Evaluate every grid point on a fold partition that is fixed across
/// points, so comparisons are paired. Returns the best parameters
/// (ties broken by enumeration order) and the full table for audit.
pub fn grid_search_cv(
    data: &Dataset,
    grid: &GridSpec,
    rng_seed: u64,
) -> Result<(TreeParams, Vec<CvEntry>)> {
    grid.validate()?;
    let folds = k_folds(data, grid.k, rng_seed)?;

    let mut table = Vec::new();
    let mut best: Option<(TreeParams, f64)> = None;
    for params in grid.points() {
        let mut total = 0.0;
        for (train, validation) in &folds {
            let model = fit(train, &params)?;
            total += accuracy(&model, validation, 0.5);
        }
        let mean_accuracy = total / folds.len() as f64;
        if best.as_ref().is_none_or(|(_, acc)| mean_accuracy > *acc) {
            best = Some((params, mean_accuracy));
        }
        table.push(CvEntry {
            params,
            mean_accuracy,
        });
    }
    let (best_params, _) = best.expect("grid has at least one point");
    Ok((best_params, table))
}

/// Write the cv table as `criterion,max_depth,min_samples_leaf,min_samples_split,mean_accuracy`.
pub fn write_cv_table(table: &[CvEntry], sink: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record([
        "criterion",
        "max_depth",
        "min_samples_leaf",
        "min_samples_split",
        "mean_accuracy",
    ])?;
    for entry in table {
        writer.write_record([
            entry.params.criterion.to_string(),
            entry.params.max_depth.to_string(),
            entry.params.min_samples_leaf.to_string(),
            entry.params.min_samples_split.to_string(),
            format!("{}", entry.mean_accuracy),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
