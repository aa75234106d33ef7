//! The full repeated-trial protocol on a synthetic cohort: balance,
//! split, fit, audit, mitigate under both constraints, re-audit, 30
//! times; then print the aggregated report.
//!
//! ```bash
//! cargo run -p fairtree --example run_experiment
//! ```

use fairtree::cli::render_report;
use fairtree::experiment::{run_experiment, ExperimentConfig};
use fairtree::synth::{generate, CohortSpec};

fn main() {
    let cohort = CohortSpec::default();
    let data = generate(&cohort, 2024);
    println!(
        "cohort: {} rows ({} pilots), separation {}, sex confound {}\n",
        data.len(),
        data.positives(),
        cohort.separation,
        cohort.sex_confound
    );

    let config = ExperimentConfig {
        master_seed: 7,
        ..ExperimentConfig::default()
    };

    let (records, summary) = run_experiment(&data, &config).unwrap();
    println!("ran {} trials\n", records.len());
    print!("{}", render_report(&summary).unwrap());
}
