//! Tabular feature rows plus the sampling utilities the evaluation
//! protocol needs: class balancing, stratified splitting, k-fold
//! partitioning, and the CSV interchange format.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::survey::{aggregate_score, Cohort, InstrumentSpec, Sex, SurveyResponse, INSTRUMENTS};

/// One scored participant: the sensitive feature, age, the eight
/// normalized instrument scores, and the class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub sex: Sex,
    pub age: u32,
    pub scores: [f64; 8],
    pub label: Cohort,
}

impl FeatureRow {
    /// Numeric value of feature `index` (0 = sex with female 0 / male 1,
    /// 1 = age, 2.. = instrument scores).
    pub fn feature(&self, index: usize) -> f64 {
        match index {
            0 => match self.sex {
                Sex::Female => 0.0,
                Sex::Male => 1.0,
            },
            1 => self.age as f64,
            i => self.scores[i - 2],
        }
    }

    pub fn is_positive(&self) -> bool {
        self.label.is_positive()
    }
}

/// A list of feature rows with the fixed 10-feature schema.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub rows: Vec<FeatureRow>,
}

impl Dataset {
    pub const FEATURE_NAMES: [&'static str; 10] = [
        "sex", "age", "PSS", "JSS", "MFI", "GF", "PF", "RA", "RM", "MF",
    ];

    pub fn new(rows: Vec<FeatureRow>) -> Self {
        Dataset { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.rows.iter().filter(|r| r.is_positive()).count()
    }

    /// Assemble the feature matrix from filtered, scored survey responses.
    /// `specs` must cover all eight canonical instruments.
    pub fn from_responses(responses: &[SurveyResponse], specs: &[InstrumentSpec]) -> Result<Self> {
        let mut rows = Vec::with_capacity(responses.len());
        for response in responses {
            let mut scores = [0.0; 8];
            for (slot, name) in INSTRUMENTS.iter().enumerate() {
                let spec = specs
                    .iter()
                    .find(|s| s.name == *name)
                    .ok_or_else(|| Error::Config(format!("missing instrument spec {name}")))?;
                let answers = response.answers.get(*name).ok_or_else(|| {
                    Error::Config(format!(
                        "participant {} has no answers for {name}",
                        response.participant_id
                    ))
                })?;
                scores[slot] = aggregate_score(answers, spec)?;
            }
            rows.push(FeatureRow {
                sex: response.sex,
                age: response.age,
                scores,
                label: response.cohort,
            });
        }
        Ok(Dataset { rows })
    }

    /// Write the interchange CSV (`sex,age,PSS,...,MF,label`).
    pub fn write_csv(&self, sink: impl Write) -> Result<()> {
        let mut writer = csv::Writer::from_writer(sink);
        let mut header: Vec<&str> = Self::FEATURE_NAMES.to_vec();
        header.push("label");
        writer.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![
                match row.sex {
                    Sex::Female => "F".to_string(),
                    Sex::Male => "M".to_string(),
                },
                row.age.to_string(),
            ];
            for s in &row.scores {
                record.push(format!("{s}"));
            }
            record.push(row.label.to_string());
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Read the interchange CSV.
    pub fn read_csv(source: impl Read) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(source);
        let header = reader.headers()?.clone();
        let mut expected: Vec<&str> = Self::FEATURE_NAMES.to_vec();
        expected.push("label");
        for (index, (found, want)) in header.iter().zip(expected.iter()).enumerate() {
            if found != *want {
                return Err(Error::HeaderMismatch {
                    index,
                    expected: want.to_string(),
                    found: found.to_string(),
                });
            }
        }
        if header.len() != expected.len() {
            return Err(Error::MalformedRow {
                row: 0,
                expected: expected.len(),
                found: header.len(),
            });
        }

        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row_no = i + 1;
            let record = record?;
            if record.len() != expected.len() {
                return Err(Error::MalformedRow {
                    row: row_no,
                    expected: expected.len(),
                    found: record.len(),
                });
            }
            let sex = match &record[0] {
                "F" => Sex::Female,
                "M" => Sex::Male,
                other => {
                    return Err(Error::InvalidField {
                        row: row_no,
                        column: "sex".into(),
                        value: other.to_string(),
                    })
                }
            };
            let age: u32 = record[1].parse().map_err(|_| Error::InvalidField {
                row: row_no,
                column: "age".into(),
                value: record[1].to_string(),
            })?;
            let mut scores = [0.0; 8];
            for (slot, name) in INSTRUMENTS.iter().enumerate() {
                let raw = &record[slot + 2];
                let value: f64 = raw.parse().map_err(|_| Error::InvalidField {
                    row: row_no,
                    column: name.to_string(),
                    value: raw.to_string(),
                })?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::InvalidField {
                        row: row_no,
                        column: name.to_string(),
                        value: raw.to_string(),
                    });
                }
                scores[slot] = value;
            }
            let label = match &record[10] {
                "pilot" => Cohort::Pilot,
                "nonpilot" => Cohort::NonPilot,
                other => {
                    return Err(Error::InvalidField {
                        row: row_no,
                        column: "label".into(),
                        value: other.to_string(),
                    })
                }
            };
            rows.push(FeatureRow {
                sex,
                age,
                scores,
                label,
            });
        }
        Ok(Dataset { rows })
    }
}

/// Keep all negative rows and a uniform without-replacement sample of
/// exactly `positive_target` positive rows. Row order is preserved, so a
/// target equal to the number of positives returns the input unchanged.
pub fn balance_classes(data: &Dataset, positive_target: usize, rng_seed: u64) -> Result<Dataset> {
    let positive_indices: Vec<usize> = data
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_positive())
        .map(|(i, _)| i)
        .collect();
    if positive_indices.len() < positive_target {
        return Err(Error::NotEnoughPositives {
            requested: positive_target,
            available: positive_indices.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut shuffled = positive_indices.clone();
    shuffled.shuffle(&mut rng);
    let mut keep = vec![false; data.rows.len()];
    for &idx in shuffled.iter().take(positive_target) {
        keep[idx] = true;
    }

    let rows = data
        .rows
        .iter()
        .enumerate()
        .filter(|(i, r)| !r.is_positive() || keep[*i])
        .map(|(_, r)| r.clone())
        .collect();
    Ok(Dataset { rows })
}

/// The four (label, sex) strata in a fixed enumeration order.
fn stratum_of(row: &FeatureRow) -> usize {
    let label_bit = usize::from(row.is_positive());
    let sex_bit = usize::from(row.sex == Sex::Male);
    label_bit * 2 + sex_bit
}

fn stratum_name(stratum: usize) -> String {
    let label = if stratum / 2 == 1 { "pilot" } else { "nonpilot" };
    let sex = if stratum % 2 == 1 { "male" } else { "female" };
    format!("({label}, {sex})")
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Stratified train/test split over the four (label, sex) strata.
///
/// Each stratum contributes round-half-up(`test_fraction` * count) rows to
/// the test side; the totals are then repaired against
/// round-half-up(`test_fraction` * n) by adjusting the largest stratum, so
/// the overall split size is exact and deterministic.
pub fn stratified_split(
    data: &Dataset,
    test_fraction: f64,
    rng_seed: u64,
) -> Result<(Dataset, Dataset)> {
    assert!(
        test_fraction > 0.0 && test_fraction < 1.0,
        "test_fraction must lie in (0, 1)"
    );
    let mut strata: [Vec<usize>; 4] = Default::default();
    for (i, row) in data.rows.iter().enumerate() {
        strata[stratum_of(row)].push(i);
    }
    if let Some(empty) = strata.iter().position(Vec::is_empty) {
        return Err(Error::EmptyStratum {
            stratum: stratum_name(empty),
        });
    }

    let total_target = round_half_up(test_fraction * data.len() as f64);
    let mut test_counts: Vec<usize> = strata
        .iter()
        .map(|s| round_half_up(test_fraction * s.len() as f64))
        .collect();

    // Repair the total by adjusting the largest stratum first.
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by_key(|&s| std::cmp::Reverse(strata[s].len()));
    while test_counts.iter().sum::<usize>() > total_target {
        let s = *order
            .iter()
            .find(|&&s| test_counts[s] > 0)
            .expect("some stratum has test rows to give back");
        test_counts[s] -= 1;
    }
    while test_counts.iter().sum::<usize>() < total_target {
        let s = *order
            .iter()
            .find(|&&s| test_counts[s] < strata[s].len())
            .expect("some stratum has spare rows");
        test_counts[s] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut in_test = vec![false; data.len()];
    for (s, indices) in strata.iter().enumerate() {
        let mut shuffled = indices.clone();
        shuffled.shuffle(&mut rng);
        for &idx in shuffled.iter().take(test_counts[s]) {
            in_test[idx] = true;
        }
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, row) in data.rows.iter().enumerate() {
        if in_test[i] {
            test.push(row.clone());
        } else {
            train.push(row.clone());
        }
    }
    Ok((Dataset::new(train), Dataset::new(test)))
}

/// Label-stratified k-fold partition. Fold sizes differ by at most one;
/// each row lands in exactly one validation fold.
pub fn k_folds(data: &Dataset, k: usize, rng_seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    if k < 2 || k > data.len() {
        return Err(Error::BadFoldCount {
            k,
            rows: data.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut fold_of = vec![0usize; data.len()];
    let mut fold_sizes = vec![0usize; k];

    // Deal each class across folds: an even base share everywhere, with the
    // remainder going to the currently smallest folds so overall sizes stay
    // within one of each other.
    for positive in [true, false] {
        let mut class_indices: Vec<usize> = data
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_positive() == positive)
            .map(|(i, _)| i)
            .collect();
        class_indices.shuffle(&mut rng);

        let base = class_indices.len() / k;
        let extras = class_indices.len() % k;
        let mut by_size: Vec<usize> = (0..k).collect();
        by_size.sort_by_key(|&f| (fold_sizes[f], f));
        let mut share = vec![base; k];
        for &f in by_size.iter().take(extras) {
            share[f] += 1;
        }

        let mut cursor = 0;
        for (f, &count) in share.iter().enumerate() {
            for _ in 0..count {
                fold_of[class_indices[cursor]] = f;
                fold_sizes[f] += 1;
                cursor += 1;
            }
        }
    }

    let mut folds = Vec::with_capacity(k);
    for f in 0..k {
        let mut train = Vec::new();
        let mut validation = Vec::new();
        for (i, row) in data.rows.iter().enumerate() {
            if fold_of[i] == f {
                validation.push(row.clone());
            } else {
                train.push(row.clone());
            }
        }
        folds.push((Dataset::new(train), Dataset::new(validation)));
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(sex: Sex, label: Cohort, seed: f64) -> FeatureRow {
        FeatureRow {
            sex,
            age: 20,
            scores: [seed; 8],
            label,
        }
    }

    /// 28 pilots (9 female) and 20 non-pilots (14 female), mirroring the
    /// cohort shape the balancing step is designed around.
    fn skewed_cohort() -> Dataset {
        let mut rows = Vec::new();
        for i in 0..9 {
            rows.push(row(Sex::Female, Cohort::Pilot, i as f64 / 100.0));
        }
        for i in 0..19 {
            rows.push(row(Sex::Male, Cohort::Pilot, i as f64 / 100.0));
        }
        for i in 0..14 {
            rows.push(row(Sex::Female, Cohort::NonPilot, i as f64 / 100.0));
        }
        for i in 0..6 {
            rows.push(row(Sex::Male, Cohort::NonPilot, i as f64 / 100.0));
        }
        Dataset::new(rows)
    }

    fn balanced_40() -> Dataset {
        let mut rows = Vec::new();
        for s in 0..4 {
            for i in 0..10 {
                rows.push(row(
                    if s % 2 == 0 { Sex::Female } else { Sex::Male },
                    if s / 2 == 0 { Cohort::NonPilot } else { Cohort::Pilot },
                    i as f64 / 10.0,
                ));
            }
        }
        Dataset::new(rows)
    }

    #[test]
    fn balance_to_twenty_pilots() {
        let data = skewed_cohort();
        let balanced = balance_classes(&data, 20, 7).unwrap();
        assert_eq!(balanced.positives(), 20);
        assert_eq!(balanced.len() - balanced.positives(), 20);
    }

    #[test]
    fn balance_full_target_is_identity() {
        let data = skewed_cohort();
        let balanced = balance_classes(&data, 28, 7).unwrap();
        assert_eq!(balanced, data);
    }

    #[test]
    fn balance_deterministic_and_bounded() {
        let data = skewed_cohort();
        let a = balance_classes(&data, 20, 99).unwrap();
        let b = balance_classes(&data, 20, 99).unwrap();
        assert_eq!(a, b);
        assert!(balance_classes(&data, 29, 0).is_err());
    }

    #[test]
    fn split_40_rows_at_30_percent() {
        let data = balanced_40();
        let (train, test) = stratified_split(&data, 0.3, 3).unwrap();
        assert_eq!(train.len(), 28);
        assert_eq!(test.len(), 12);
        // each stratum holds 10 rows, so each contributes 3 test rows
        for s in 0..4 {
            let count = test.rows.iter().filter(|r| stratum_of(r) == s).count();
            assert_eq!(count, 3);
        }
    }

    #[test]
    fn tiny_stratum_stays_in_train() {
        let mut rows = vec![row(Sex::Female, Cohort::Pilot, 0.1)];
        for i in 0..9 {
            rows.push(row(Sex::Male, Cohort::Pilot, i as f64 / 10.0));
        }
        for i in 0..9 {
            rows.push(row(Sex::Female, Cohort::NonPilot, i as f64 / 10.0));
        }
        for i in 0..9 {
            rows.push(row(Sex::Male, Cohort::NonPilot, i as f64 / 10.0));
        }
        // 0.2 * 1 rounds to 0: the lone (pilot, female) row trains only
        let (train, test) = stratified_split(&Dataset::new(rows), 0.2, 5).unwrap();
        assert!(test
            .rows
            .iter()
            .all(|r| !(r.sex == Sex::Female && r.label == Cohort::Pilot)));
        assert!(train
            .rows
            .iter()
            .any(|r| r.sex == Sex::Female && r.label == Cohort::Pilot));
    }

    #[test]
    fn split_errors_on_missing_stratum() {
        let rows = vec![
            row(Sex::Female, Cohort::Pilot, 0.5),
            row(Sex::Male, Cohort::Pilot, 0.5),
            row(Sex::Male, Cohort::NonPilot, 0.5),
        ];
        let err = stratified_split(&Dataset::new(rows), 0.3, 0).unwrap_err();
        match err {
            Error::EmptyStratum { stratum } => assert_eq!(stratum, "(nonpilot, female)"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn split_deterministic() {
        let data = skewed_cohort();
        let (tr1, te1) = stratified_split(&data, 0.3, 11).unwrap();
        let (tr2, te2) = stratified_split(&data, 0.3, 11).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
    }

    #[test]
    fn folds_sizes_for_40_rows_k7() {
        let data = balanced_40();
        let folds = k_folds(&data, 7, 13).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(|(_, v)| v.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![5, 5, 6, 6, 6, 6, 6]);
    }

    #[test]
    fn folds_keep_classes_with_k2() {
        let rows = vec![
            row(Sex::Female, Cohort::Pilot, 0.1),
            row(Sex::Male, Cohort::Pilot, 0.2),
            row(Sex::Female, Cohort::NonPilot, 0.3),
            row(Sex::Male, Cohort::NonPilot, 0.4),
        ];
        let folds = k_folds(&Dataset::new(rows), 2, 1).unwrap();
        for (_, validation) in &folds {
            assert_eq!(validation.len(), 2);
            assert_eq!(validation.positives(), 1);
        }
    }

    #[test]
    fn fold_count_bounds() {
        let data = balanced_40();
        assert!(k_folds(&data, 1, 0).is_err());
        assert!(k_folds(&data, 41, 0).is_err());
    }

    proptest! {
        #[test]
        fn split_is_a_partition(seed in 0u64..500, frac in 0.1..0.9f64) {
            let data = skewed_cohort();
            let (train, test) = stratified_split(&data, frac, seed).unwrap();
            prop_assert_eq!(train.len() + test.len(), data.len());
            // multiset equality via score counts per stratum
            let count = |d: &Dataset, s: usize| d.rows.iter().filter(|r| stratum_of(r) == s).count();
            for s in 0..4 {
                prop_assert_eq!(count(&train, s) + count(&test, s), count(&data, s));
            }
        }

        #[test]
        fn folds_partition_and_stay_stratified(seed in 0u64..200, k in 2usize..9) {
            let data = skewed_cohort();
            let folds = k_folds(&data, k, seed).unwrap();
            let total: usize = folds.iter().map(|(_, v)| v.len()).sum();
            prop_assert_eq!(total, data.len());

            let sizes: Vec<usize> = folds.iter().map(|(_, v)| v.len()).collect();
            let max = *sizes.iter().max().unwrap();
            let min = *sizes.iter().min().unwrap();
            prop_assert!(max - min <= 1);

            // per-fold class share within one row of the global share
            let global = data.positives() as f64 / data.len() as f64;
            for (_, validation) in &folds {
                let pos = validation.positives() as f64;
                prop_assert!((pos - global * validation.len() as f64).abs() <= 1.0 + 1e-9);
            }
        }

        #[test]
        fn balance_keeps_negatives(seed in 0u64..200, target in 1usize..28) {
            let data = skewed_cohort();
            let balanced = balance_classes(&data, target, seed).unwrap();
            prop_assert_eq!(balanced.positives(), target);
            let negatives: Vec<&FeatureRow> =
                balanced.rows.iter().filter(|r| !r.is_positive()).collect();
            let original: Vec<&FeatureRow> =
                data.rows.iter().filter(|r| !r.is_positive()).collect();
            prop_assert_eq!(negatives, original);
        }
    }
}
