//! Generate the default synthetic cohort and print its shape and a few
//! rows in the dataset interchange format.
//!
//! ```bash
//! cargo run -p fairtree --example synthesize_cohort
//! ```

use fairtree::survey::Sex;
use fairtree::synth::{generate, CohortSpec};

fn main() {
    let spec = CohortSpec::default();
    let data = generate(&spec, 7);

    let count = |pilot: bool, sex: Sex| {
        data.rows
            .iter()
            .filter(|r| r.is_positive() == pilot && r.sex == sex)
            .count()
    };
    println!("{} rows:", data.len());
    println!(
        "  pilots:     {} female, {} male",
        count(true, Sex::Female),
        count(true, Sex::Male)
    );
    println!(
        "  non-pilots: {} female, {} male",
        count(false, Sex::Female),
        count(false, Sex::Male)
    );
    println!(
        "  separation {}, sex confound {}, score correlation {}\n",
        spec.separation, spec.sex_confound, spec.score_correlation
    );

    let mut csv = Vec::new();
    data.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("... ({} data rows total)", data.len());
}
