//! Fit per-group threshold policies under both fairness constraints and
//! compare the audit before and after mitigation.
//!
//! ```bash
//! cargo run -p fairtree --example mitigate_bias
//! ```

use fairtree::dataset::{balance_classes, stratified_split};
use fairtree::fairness::FairnessReport;
use fairtree::mitigate::{
    apply_policy, expected_rates, fit_demographic_parity, fit_equalized_odds,
};
use fairtree::survey::Sex;
use fairtree::synth::{generate, CohortSpec};
use fairtree::tree::{fit, predict_label, predict_score, Criterion, TreeParams};

fn main() {
    let data = generate(&CohortSpec::default(), 13);
    let balanced = balance_classes(&data, 20, 4).unwrap();
    let (train, test) = stratified_split(&balanced, 0.3, 4).unwrap();
    let params = TreeParams::new(Criterion::Gini, 3, 5, 2).unwrap();
    let model = fit(&train, &params).unwrap();

    let scores = |d: &fairtree::Dataset| -> Vec<f64> {
        d.rows.iter().map(|r| predict_score(&model, r)).collect()
    };
    let truth = |d: &fairtree::Dataset| -> Vec<bool> {
        d.rows.iter().map(|r| r.is_positive()).collect()
    };
    let sexes = |d: &fairtree::Dataset| -> Vec<Sex> { d.rows.iter().map(|r| r.sex).collect() };

    let before: Vec<bool> = test
        .rows
        .iter()
        .map(|r| predict_label(&model, r, 0.5).is_positive())
        .collect();
    let report = FairnessReport::from_predictions(&truth(&test), &before, &sexes(&test)).unwrap();
    println!("before mitigation (threshold 0.5 on the test split):");
    println!(
        "  dp difference {:.3}, eo difference {:.3}",
        report.demographic_parity_difference, report.equalized_odds_difference
    );

    for (name, fitter) in [
        ("demographic parity", fit_demographic_parity as fn(&[f64], &[bool], &[Sex]) -> _),
        ("equalized odds", fit_equalized_odds),
    ] {
        let policy = fitter(&scores(&train), &truth(&train), &sexes(&train)).unwrap();
        println!("\n{name} policy (fitted on the training split):");
        for (sex, rule) in &policy.rules {
            println!(
                "  {sex}: t_low {:.3}, t_high {:.3}, p {:.3}",
                rule.threshold_low, rule.threshold_high, rule.p_low
            );
        }

        // the constraint holds exactly in expectation on the fitting data
        let exact = expected_rates(&policy, &scores(&train), &truth(&train), &sexes(&train))
            .unwrap();
        let f = exact[&Sex::Female];
        let m = exact[&Sex::Male];
        println!(
            "  fitting-data gaps: selection {:.2e}, tpr {:.2e}, fpr {:.2e}",
            (f.selection_rate - m.selection_rate).abs(),
            (f.tpr - m.tpr).abs(),
            (f.fpr - m.fpr).abs()
        );

        let mitigated = apply_policy(&policy, &scores(&test), &sexes(&test), 99).unwrap();
        let after =
            FairnessReport::from_predictions(&truth(&test), &mitigated, &sexes(&test)).unwrap();
        println!(
            "  test audit after: dp difference {:.3}, eo difference {:.3}",
            after.demographic_parity_difference, after.equalized_odds_difference
        );
    }
}
