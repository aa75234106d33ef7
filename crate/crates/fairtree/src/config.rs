//! The single TOML configuration file: instrument definitions, synthetic
//! cohort parameters, the hyper-parameter grid, and experiment settings.
//! Every section and field has a default, so a partial file (or none at
//! all) works.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{ConstraintChoice, ExperimentConfig};
use crate::model_select::GridSpec;
use crate::survey::InstrumentSpec;
use crate::synth::{CellCounts, CohortSpec, ScoreDistribution};
use crate::tree::{Criterion, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentSection,
    pub grid: GridSection,
    pub cohort: CohortSection,
    pub instruments: Vec<InstrumentSpec>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            experiment: ExperimentSection::default(),
            grid: GridSection::default(),
            cohort: CohortSection::default(),
            instruments: default_instruments(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub n_trials: usize,
    pub positive_target: usize,
    pub test_fraction: f64,
    pub constraint: ConstraintName,
    pub master_seed: u64,
    /// Either the string `"auto"` (grid-search once per experiment) or a
    /// fixed parameter table.
    pub tree_params: TreeParamsChoice,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            n_trials: 30,
            positive_target: 20,
            test_fraction: 0.3,
            constraint: ConstraintName::Both,
            master_seed: 42,
            tree_params: TreeParamsChoice::default(),
        }
    }
}

/// Tree parameters in the configuration file: `"auto"` or a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeParamsChoice {
    Auto(AutoMarker),
    Fixed(TreeParamsSection),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoMarker {
    Auto,
}

impl Default for TreeParamsChoice {
    /// A depth-3 gini tree with the most regularized leaf size of the
    /// standard grid; sized for the small training sets this pipeline
    /// works with. Use `"auto"` to grid-search instead.
    fn default() -> Self {
        TreeParamsChoice::Fixed(TreeParamsSection {
            criterion: Criterion::Gini,
            max_depth: 3,
            min_samples_leaf: 5,
            min_samples_split: 2,
        })
    }
}

/// Constraint selector as written in config files and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintName {
    #[serde(alias = "dp")]
    #[value(name = "dp")]
    DemographicParity,
    #[serde(alias = "eo")]
    #[value(name = "eo")]
    EqualizedOdds,
    Both,
}

impl From<ConstraintName> for ConstraintChoice {
    fn from(name: ConstraintName) -> Self {
        match name {
            ConstraintName::DemographicParity => ConstraintChoice::DemographicParity,
            ConstraintName::EqualizedOdds => ConstraintChoice::EqualizedOdds,
            ConstraintName::Both => ConstraintChoice::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeParamsSection {
    pub criterion: Criterion,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub criteria: Vec<Criterion>,
    pub max_depth_min: usize,
    pub max_depth_max: usize,
    pub min_samples_leaf: Vec<usize>,
    pub min_samples_split: Vec<usize>,
    pub k: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            criteria: vec![Criterion::Gini, Criterion::Entropy],
            max_depth_min: 3,
            max_depth_max: 15,
            min_samples_leaf: vec![2, 3, 4, 5],
            min_samples_split: vec![2, 3, 4, 5],
            k: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CohortSection {
    pub pilot_female: usize,
    pub pilot_male: usize,
    pub nonpilot_female: usize,
    pub nonpilot_male: usize,
    pub score_mean: f64,
    pub score_spread: f64,
    pub separation: f64,
    pub sex_confound: f64,
    pub confound_weights: Vec<f64>,
    pub score_correlation: f64,
    pub age_min: u32,
    pub age_max: u32,
}

impl Default for CohortSection {
    fn default() -> Self {
        let spec = CohortSpec::default();
        CohortSection {
            pilot_female: spec.cells.pilot_female,
            pilot_male: spec.cells.pilot_male,
            nonpilot_female: spec.cells.nonpilot_female,
            nonpilot_male: spec.cells.nonpilot_male,
            score_mean: 0.5,
            score_spread: 0.15,
            separation: spec.separation,
            sex_confound: spec.sex_confound,
            confound_weights: spec.confound_weights.to_vec(),
            score_correlation: spec.score_correlation,
            age_min: spec.age_min,
            age_max: spec.age_max,
        }
    }
}

impl Config {
    /// Load from a TOML file, or the built-in defaults when `source` is
    /// the literal string `default`.
    pub fn load(source: &str) -> Result<Config> {
        if source == "default" {
            return Ok(Config::default());
        }
        let text = std::fs::read_to_string(Path::new(source))?;
        let config: Config = toml::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for spec in &self.instruments {
            spec.validate()?;
        }
        self.grid_spec().validate()?;
        self.experiment_config().validate()?;
        if self.cohort.age_min > self.cohort.age_max {
            return Err(Error::Config("age_min exceeds age_max".into()));
        }
        if self.cohort.confound_weights.len() != 8 {
            return Err(Error::Config(format!(
                "confound_weights needs 8 entries, found {}",
                self.cohort.confound_weights.len()
            )));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            criteria: self.grid.criteria.clone(),
            max_depth_values: (self.grid.max_depth_min..=self.grid.max_depth_max).collect(),
            min_samples_leaf_values: self.grid.min_samples_leaf.clone(),
            min_samples_split_values: self.grid.min_samples_split.clone(),
            k: self.grid.k,
        }
    }

    pub fn cohort_spec(&self) -> CohortSpec {
        let dist = ScoreDistribution {
            mean: self.cohort.score_mean,
            spread: self.cohort.score_spread,
        };
        let mut weights = [1.0; 8];
        for (slot, w) in self.cohort.confound_weights.iter().take(8).enumerate() {
            weights[slot] = *w;
        }
        CohortSpec {
            cells: CellCounts {
                pilot_female: self.cohort.pilot_female,
                pilot_male: self.cohort.pilot_male,
                nonpilot_female: self.cohort.nonpilot_female,
                nonpilot_male: self.cohort.nonpilot_male,
            },
            pilot_scores: [dist; 8],
            nonpilot_scores: [dist; 8],
            separation: self.cohort.separation,
            sex_confound: self.cohort.sex_confound,
            confound_weights: weights,
            score_correlation: self.cohort.score_correlation,
            age_min: self.cohort.age_min,
            age_max: self.cohort.age_max,
        }
    }

    pub fn experiment_config(&self) -> ExperimentConfig {
        let tree_params = match self.experiment.tree_params {
            TreeParamsChoice::Auto(_) => None,
            TreeParamsChoice::Fixed(p) => Some(TreeParams {
                criterion: p.criterion,
                max_depth: p.max_depth,
                min_samples_leaf: p.min_samples_leaf,
                min_samples_split: p.min_samples_split,
            }),
        };
        ExperimentConfig {
            n_trials: self.experiment.n_trials,
            positive_target: self.experiment.positive_target,
            test_fraction: self.experiment.test_fraction,
            tree_params,
            grid: self.grid_spec(),
            constraint: self.experiment.constraint.into(),
            master_seed: self.experiment.master_seed,
        }
    }
}

/// Default instrument definitions. Question counts and scales follow the
/// published instruments; which items are inverted is configuration, with
/// conventional defaults here.
pub fn default_instruments() -> Vec<InstrumentSpec> {
    let spec = |name: &str, n: usize, min: i64, max: i64, inverted: &[usize]| InstrumentSpec {
        name: name.to_string(),
        question_count: n,
        min_value: min,
        max_value: max,
        inverted_items: inverted.iter().copied().collect(),
    };
    vec![
        spec("PSS", 10, 0, 4, &[4, 5, 7, 8]),
        spec("JSS", 4, 0, 5, &[]),
        spec("MFI", 20, 1, 5, &[2, 5, 9, 10, 13, 14, 16, 17, 18, 19]),
        spec("GF", 4, 1, 5, &[]),
        spec("PF", 4, 1, 5, &[]),
        spec("RA", 4, 1, 5, &[]),
        spec("RM", 4, 1, 5, &[]),
        spec("MF", 4, 1, 5, &[]),
    ]
}
