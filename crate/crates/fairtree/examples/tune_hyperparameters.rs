//! Grid-search the four tree hyper-parameters with stratified 7-fold
//! cross-validation and show the leaders.
//!
//! ```bash
//! cargo run -p fairtree --example tune_hyperparameters
//! ```

use fairtree::dataset::balance_classes;
use fairtree::model_select::{grid_search_cv, GridSpec};
use fairtree::synth::{generate, CohortSpec};

fn main() {
    let data = generate(&CohortSpec::default(), 3);
    let balanced = balance_classes(&data, 20, 9).unwrap();

    let grid = GridSpec::standard();
    println!(
        "searching {} configurations with {}-fold cross-validation...",
        grid.points().len(),
        grid.k
    );

    let (best, table) = grid_search_cv(&balanced, &grid, 17).unwrap();
    println!(
        "best: {} depth={} leaf={} split={}\n",
        best.criterion, best.max_depth, best.min_samples_leaf, best.min_samples_split
    );

    let mut ranked = table.clone();
    ranked.sort_by(|a, b| b.mean_accuracy.total_cmp(&a.mean_accuracy));
    println!("top five by mean validation accuracy:");
    for entry in ranked.iter().take(5) {
        println!(
            "  {} depth={:<2} leaf={} split={}  ->  {:.4}",
            entry.params.criterion,
            entry.params.max_depth,
            entry.params.min_samples_leaf,
            entry.params.min_samples_split,
            entry.mean_accuracy
        );
    }
}
