//! Balance the cohort, split it, fit a depth-3 tree, and inspect the
//! model: accuracy, leaf scores, and the JSON serialization.
//!
//! ```bash
//! cargo run -p fairtree --example train_decision_tree
//! ```

use fairtree::dataset::{balance_classes, stratified_split};
use fairtree::synth::{generate, CohortSpec};
use fairtree::tree::{accuracy, fit, Criterion, TreeParams};

fn main() {
    let data = generate(&CohortSpec::default(), 11);
    let balanced = balance_classes(&data, 20, 1).unwrap();
    let (train, test) = stratified_split(&balanced, 0.3, 2).unwrap();
    println!(
        "balanced {} rows -> {} train / {} test",
        balanced.len(),
        train.len(),
        test.len()
    );

    let params = TreeParams::new(Criterion::Gini, 3, 5, 2).unwrap();
    let model = fit(&train, &params).unwrap();

    println!("depth {} with {} nodes", model.depth(), model.nodes.len());
    println!("leaf (positive_fraction, samples): {:?}", model.leaves());
    println!("train accuracy {:.3}", accuracy(&model, &train, 0.5));
    println!("test accuracy  {:.3}", accuracy(&model, &test, 0.5));

    println!("\nmodel JSON:\n{}", serde_json::to_string_pretty(&model).unwrap());
}
