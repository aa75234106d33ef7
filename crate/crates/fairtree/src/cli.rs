//! Command-line surface: `ingest`, `synth`, `train`, `audit`, `mitigate`,
//! `experiment`, and `report`, all driven by one configuration file and
//! an explicit seed. Exit codes: 0 success, 1 usage, 2 data/validation,
//! 3 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{Config, ConstraintName};
use crate::dataset::Dataset;
use crate::error::{ExitClass, Result};
use crate::experiment::{
    derive_seed, run_experiment, write_figure_data, write_trials_csv, ExperimentSummary,
};
use crate::fairness::FairnessReport;
use crate::manifest::RunManifest;
use crate::mitigate::{
    apply_policy, fit_demographic_parity, fit_equalized_odds, ConstraintKind, ThresholdPolicy,
};
use crate::model_select::{grid_search_cv, write_cv_table};
use crate::stats::percent_improvement;
use crate::survey::{filter_complete, parse_responses, Sex};
use crate::synth::generate;
use crate::tree::{fit, predict_label, predict_score, DecisionTree};

/// Stream id separating the cohort generated inside `experiment` from the
/// per-trial seeds.
const STREAM_COHORT: u64 = 0xC0C0;

#[derive(Debug, Parser)]
#[command(
    name = "fairtree",
    version,
    about = "Survey scoring, decision-tree training, and group-threshold bias mitigation"
)]
struct Cli {
    /// Configuration file path, or `default` for built-in defaults.
    #[arg(long, global = true, default_value = "default")]
    config: String,

    /// Master seed; overrides the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for emitted files and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a raw survey CSV and emit the scored dataset CSV.
    Ingest {
        /// Raw survey CSV file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a synthetic cohort and emit the dataset CSV.
    Synth,
    /// Grid-search tree hyper-parameters and fit a tree on the dataset.
    Train {
        /// Scored dataset CSV.
        #[arg(long)]
        data: PathBuf,
    },
    /// Audit predictions on a dataset: six fairness metrics as JSON.
    Audit {
        /// Scored dataset CSV.
        #[arg(long)]
        data: PathBuf,
        /// Fitted tree JSON.
        #[arg(long)]
        tree: PathBuf,
        /// Optional policy JSON; absent means the plain 0.5 threshold.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Report format.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Fit mitigation policies on a dataset's scores.
    Mitigate {
        /// Scored dataset CSV.
        #[arg(long)]
        data: PathBuf,
        /// Fitted tree JSON.
        #[arg(long)]
        tree: PathBuf,
        /// Which constraint(s) to fit.
        #[arg(long, value_enum, default_value = "both")]
        constraint: ConstraintName,
    },
    /// Run the repeated-trial evaluation protocol.
    Experiment {
        /// Scored dataset CSV; omitted means a synthetic cohort from the
        /// configuration.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Trial count; overrides the configuration file.
        #[arg(long)]
        trials: Option<usize>,
        /// Constraint selection; overrides the configuration file.
        #[arg(long, value_enum)]
        constraint: Option<ConstraintName>,
    },
    /// Render a summary JSON as human-readable text with percentages.
    Report {
        /// Summary JSON produced by `experiment`.
        #[arg(long)]
        summary: PathBuf,
    },
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e.exit_class() {
                ExitClass::Usage => 1,
                ExitClass::Data => 2,
                ExitClass::Numerical => 3,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let config = Config::load(&cli.config)?;
    let master_seed = cli.seed.unwrap_or(config.experiment.master_seed);
    std::fs::create_dir_all(&cli.out)?;

    let mut manifest = RunManifest::new(command_name(&cli.command), Some(master_seed), {
        let mut snapshot = config.clone();
        snapshot.experiment.master_seed = master_seed;
        snapshot
    });
    if cli.config != "default" {
        manifest.record_input(Path::new(&cli.config))?;
    }

    match &cli.command {
        Command::Ingest { input } => {
            manifest.record_input(input)?;
            let file = File::open(input)?;
            let responses = parse_responses(file, &config.instruments)?;
            let responses = filter_complete(responses);
            let dataset = Dataset::from_responses(&responses, &config.instruments)?;
            let path = cli.out.join("dataset.csv");
            dataset.write_csv(File::create(&path)?)?;
            manifest.record_output(&path)?;
            eprintln!(
                "ingest: {} participants scored -> {}",
                dataset.len(),
                path.display()
            );
        }
        Command::Synth => {
            let dataset = generate(&config.cohort_spec(), master_seed);
            let path = cli.out.join("dataset.csv");
            dataset.write_csv(File::create(&path)?)?;
            manifest.record_output(&path)?;
            eprintln!("synth: {} rows -> {}", dataset.len(), path.display());
        }
        Command::Train { data } => {
            manifest.record_input(data)?;
            let dataset = Dataset::read_csv(File::open(data)?)?;
            let grid = config.grid_spec();
            let (best, table) = grid_search_cv(&dataset, &grid, master_seed)?;
            let model = fit(&dataset, &best)?;

            let tree_path = cli.out.join("tree.json");
            serde_json::to_writer_pretty(File::create(&tree_path)?, &model)?;
            manifest.record_output(&tree_path)?;

            let cv_path = cli.out.join("cv_table.csv");
            write_cv_table(&table, File::create(&cv_path)?)?;
            manifest.record_output(&cv_path)?;
            eprintln!(
                "train: best {} depth={} leaf={} split={} -> {}",
                best.criterion,
                best.max_depth,
                best.min_samples_leaf,
                best.min_samples_split,
                tree_path.display()
            );
        }
        Command::Audit {
            data,
            tree,
            policy,
            format,
        } => {
            manifest.record_input(data)?;
            manifest.record_input(tree)?;
            let dataset = Dataset::read_csv(File::open(data)?)?;
            let model: DecisionTree = serde_json::from_reader(File::open(tree)?)?;
            let truth: Vec<bool> = dataset.rows.iter().map(|r| r.is_positive()).collect();
            let groups: Vec<Sex> = dataset.rows.iter().map(|r| r.sex).collect();
            let predictions: Vec<bool> = match policy {
                Some(policy_path) => {
                    manifest.record_input(policy_path)?;
                    let policy: ThresholdPolicy =
                        serde_json::from_reader(File::open(policy_path)?)?;
                    let scores: Vec<f64> = dataset
                        .rows
                        .iter()
                        .map(|r| predict_score(&model, r))
                        .collect();
                    apply_policy(&policy, &scores, &groups, master_seed)?
                }
                None => dataset
                    .rows
                    .iter()
                    .map(|r| predict_label(&model, r, 0.5).is_positive())
                    .collect(),
            };
            let report = FairnessReport::from_predictions(&truth, &predictions, &groups)?;
            let path = match format {
                Format::Json => {
                    let path = cli.out.join("report.json");
                    serde_json::to_writer_pretty(File::create(&path)?, &report)?;
                    path
                }
                Format::Csv => {
                    let path = cli.out.join("report.csv");
                    write_report_csv(&report, File::create(&path)?)?;
                    path
                }
            };
            manifest.record_output(&path)?;
            eprintln!("audit: report -> {}", path.display());
        }
        Command::Mitigate {
            data,
            tree,
            constraint,
        } => {
            manifest.record_input(data)?;
            manifest.record_input(tree)?;
            let dataset = Dataset::read_csv(File::open(data)?)?;
            let model: DecisionTree = serde_json::from_reader(File::open(tree)?)?;
            let scores: Vec<f64> = dataset
                .rows
                .iter()
                .map(|r| predict_score(&model, r))
                .collect();
            let truth: Vec<bool> = dataset.rows.iter().map(|r| r.is_positive()).collect();
            let groups: Vec<Sex> = dataset.rows.iter().map(|r| r.sex).collect();

            use crate::experiment::ConstraintChoice;
            let choice: ConstraintChoice = (*constraint).into();
            for kind in choice.kinds() {
                let (policy, name) = match kind {
                    ConstraintKind::DemographicParity => (
                        fit_demographic_parity(&scores, &truth, &groups)?,
                        "policy_dp.json",
                    ),
                    ConstraintKind::EqualizedOdds => (
                        fit_equalized_odds(&scores, &truth, &groups)?,
                        "policy_eo.json",
                    ),
                };
                let path = cli.out.join(name);
                serde_json::to_writer_pretty(File::create(&path)?, &policy)?;
                manifest.record_output(&path)?;
                eprintln!("mitigate: {kind} policy -> {}", path.display());
            }
        }
        Command::Experiment {
            data,
            trials,
            constraint,
        } => {
            let mut experiment_config = config.experiment_config();
            experiment_config.master_seed = master_seed;
            if let Some(n) = trials {
                experiment_config.n_trials = *n;
            }
            if let Some(c) = constraint {
                experiment_config.constraint = (*c).into();
            }

            let dataset = match data {
                Some(path) => {
                    manifest.record_input(path)?;
                    Dataset::read_csv(File::open(path)?)?
                }
                None => generate(
                    &config.cohort_spec(),
                    derive_seed(master_seed, STREAM_COHORT),
                ),
            };

            let (records, summary) = run_experiment(&dataset, &experiment_config)?;

            let trials_path = cli.out.join("trials.csv");
            write_trials_csv(&records, File::create(&trials_path)?)?;
            manifest.record_output(&trials_path)?;

            let summary_path = cli.out.join("summary.json");
            serde_json::to_writer_pretty(File::create(&summary_path)?, &summary)?;
            manifest.record_output(&summary_path)?;

            let figures_path = cli.out.join("figure_data.csv");
            write_figure_data(&summary, File::create(&figures_path)?)?;
            manifest.record_output(&figures_path)?;

            eprintln!(
                "experiment: {} trials -> {}",
                experiment_config.n_trials,
                summary_path.display()
            );
        }
        Command::Report { summary } => {
            manifest.record_input(summary)?;
            let summary: ExperimentSummary = serde_json::from_reader(File::open(summary)?)?;
            print!("{}", render_report(&summary)?);
        }
    }

    manifest.write(&cli.out)?;
    Ok(())
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Ingest { .. } => "ingest",
        Command::Synth => "synth",
        Command::Train { .. } => "train",
        Command::Audit { .. } => "audit",
        Command::Mitigate { .. } => "mitigate",
        Command::Experiment { .. } => "experiment",
        Command::Report { .. } => "report",
    }
}

fn write_report_csv(report: &FairnessReport, sink: impl std::io::Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["metric", "group", "value"])?;
    let mut push = |metric: &str, group: &str, value: f64| -> Result<()> {
        writer.write_record([metric, group, &format!("{value}")])?;
        Ok(())
    };
    for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
        push("selection_rate", label, report.selection_rate[&sex])?;
    }
    push("demographic_parity_ratio", "", report.demographic_parity_ratio)?;
    push(
        "demographic_parity_difference",
        "",
        report.demographic_parity_difference,
    )?;
    for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
        push("fnr", label, report.fnr[&sex])?;
        push("tpr", label, report.tpr[&sex])?;
        push("fpr", label, report.fpr[&sex])?;
    }
    push("equalized_odds_ratio", "", report.equalized_odds_ratio)?;
    push("equalized_odds_difference", "", report.equalized_odds_difference)?;
    Ok(())
}

/// Render an experiment summary with percentages; improvements are
/// recomputed from the summary means.
pub fn render_report(summary: &ExperimentSummary) -> Result<String> {
    use std::fmt::Write;
    let mut out = String::new();
    let pct = |v: f64| format!("{:.2}%", v * 100.0);

    writeln!(
        out,
        "experiment: {} trials, seed {}, tree {} (depth {}, leaf {}, split {})",
        summary.n_trials,
        summary.master_seed,
        summary.tree_params.criterion,
        summary.tree_params.max_depth,
        summary.tree_params.min_samples_leaf,
        summary.tree_params.min_samples_split,
    )
    .expect("write to string");

    for kind in &summary.constraints {
        let after = &summary.after[kind];
        let title = match kind {
            ConstraintKind::DemographicParity => "demographic parity",
            ConstraintKind::EqualizedOdds => "equalized odds",
        };
        writeln!(out, "\n{title} constraint:").expect("write to string");
        let mut line = |name: &str, before: f64, after_value: f64, annotate: bool| {
            let improvement = match percent_improvement(before, after_value) {
                Ok(p) if annotate => format!(" (improvement {p:.2}%)"),
                _ => String::new(),
            };
            writeln!(
                out,
                "  {name}: before {}, after {}{improvement}",
                pct(before),
                pct(after_value)
            )
            .expect("write to string");
        };
        match kind {
            ConstraintKind::DemographicParity => {
                for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
                    line(
                        &format!("selection rate ({label})"),
                        summary.before.selection_rate[&sex],
                        after.selection_rate[&sex],
                        false,
                    );
                }
                line(
                    "demographic parity ratio",
                    summary.before.demographic_parity_ratio,
                    after.demographic_parity_ratio,
                    true,
                );
                line(
                    "demographic parity difference",
                    summary.before.demographic_parity_difference,
                    after.demographic_parity_difference,
                    true,
                );
            }
            ConstraintKind::EqualizedOdds => {
                for (sex, label) in [(Sex::Female, "female"), (Sex::Male, "male")] {
                    line(
                        &format!("false negative rate ({label})"),
                        summary.before.fnr[&sex],
                        after.fnr[&sex],
                        false,
                    );
                }
                line(
                    "mean false negative rate",
                    summary.before.mean_fnr,
                    after.mean_fnr,
                    true,
                );
                line(
                    "equalized odds ratio",
                    summary.before.equalized_odds_ratio,
                    after.equalized_odds_ratio,
                    true,
                );
                line(
                    "equalized odds difference",
                    summary.before.equalized_odds_difference,
                    after.equalized_odds_difference,
                    true,
                );
            }
        }
        line("accuracy", summary.before.accuracy, after.accuracy, false);
        if let Some(t) = summary.t_tests.get(kind) {
            writeln!(
                out,
                "  t({}) = {:.2}, p = {:.2e}",
                t.degrees_of_freedom, t.t_statistic, t.p_value
            )
            .expect("write to string");
        }
    }
    Ok(out)
}
