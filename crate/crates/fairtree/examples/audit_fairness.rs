//! Audit a trained classifier: group selection rates, demographic
//! parity, false negative rates, and equalized odds.
//!
//! ```bash
//! cargo run -p fairtree --example audit_fairness
//! ```

use fairtree::dataset::{balance_classes, stratified_split};
use fairtree::fairness::FairnessReport;
use fairtree::survey::Sex;
use fairtree::synth::{generate, CohortSpec};
use fairtree::tree::{fit, predict_label, Criterion, TreeParams};

fn main() {
    let data = generate(&CohortSpec::default(), 5);
    let balanced = balance_classes(&data, 20, 1).unwrap();
    let (train, test) = stratified_split(&balanced, 0.3, 1).unwrap();

    let params = TreeParams::new(Criterion::Gini, 3, 5, 2).unwrap();
    let model = fit(&train, &params).unwrap();

    let truth: Vec<bool> = test.rows.iter().map(|r| r.is_positive()).collect();
    let groups: Vec<Sex> = test.rows.iter().map(|r| r.sex).collect();
    let predictions: Vec<bool> = test
        .rows
        .iter()
        .map(|r| predict_label(&model, r, 0.5).is_positive())
        .collect();

    let report = FairnessReport::from_predictions(&truth, &predictions, &groups).unwrap();

    println!("unmitigated audit on {} test rows:", test.len());
    for sex in [Sex::Female, Sex::Male] {
        println!(
            "  {sex}: selection rate {:.2}, fnr {:.2}, tpr {:.2}, fpr {:.2}",
            report.selection_rate[&sex], report.fnr[&sex], report.tpr[&sex], report.fpr[&sex]
        );
    }
    println!(
        "  demographic parity: ratio {:.3}, difference {:.3}",
        report.demographic_parity_ratio, report.demographic_parity_difference
    );
    println!(
        "  equalized odds:     ratio {:.3}, difference {:.3}",
        report.equalized_odds_ratio, report.equalized_odds_difference
    );

    println!("\nas JSON:\n{}", serde_json::to_string_pretty(&report).unwrap());
}
