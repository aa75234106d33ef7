//! Raw survey parsing, scale inversion, completeness filtering, and
//! normalized score aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The eight instruments scored by the pipeline, in canonical column order.
pub const INSTRUMENTS: [&str; 8] = ["PSS", "JSS", "MFI", "GF", "PF", "RA", "RM", "MF"];

/// Sex of a participant; the sensitive feature audited downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sex {
    Female,
    Male,
}

impl std::fmt::Display for Sex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sex::Female => write!(f, "female"),
            Sex::Male => write!(f, "male"),
        }
    }
}

/// Cohort membership, doubling as the classification label
/// (pilot = positive class).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cohort {
    NonPilot,
    Pilot,
}

impl Cohort {
    pub fn is_positive(self) -> bool {
        matches!(self, Cohort::Pilot)
    }
}

impl std::fmt::Display for Cohort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cohort::NonPilot => write!(f, "nonpilot"),
            Cohort::Pilot => write!(f, "pilot"),
        }
    }
}

/// Per-instrument metadata: question count, response scale, and which
/// items need polarity inversion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstrumentSpec {
    pub name: String,
    pub question_count: usize,
    pub min_value: i64,
    pub max_value: i64,
    /// 1-based question indices whose scale is reversed.
    #[serde(default)]
    pub inverted_items: BTreeSet<usize>,
}

impl InstrumentSpec {
    pub fn new(
        name: &str,
        question_count: usize,
        min_value: i64,
        max_value: i64,
        inverted_items: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let spec = InstrumentSpec {
            name: name.to_string(),
            question_count,
            min_value,
            max_value,
            inverted_items: inverted_items.into_iter().collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::BadInstrument {
            name: self.name.clone(),
            reason,
        };
        if self.question_count == 0 {
            return Err(fail("question_count must be at least 1".into()));
        }
        if self.min_value < 0 || self.max_value <= self.min_value {
            return Err(fail(format!(
                "scale [{}, {}] must satisfy max > min >= 0",
                self.min_value, self.max_value
            )));
        }
        if let Some(&bad) = self
            .inverted_items
            .iter()
            .find(|&&i| i == 0 || i > self.question_count)
        {
            return Err(fail(format!(
                "inverted item {bad} outside 1..={}",
                self.question_count
            )));
        }
        Ok(())
    }
}

/// One participant's raw answers, keyed by instrument name.
/// `None` marks a skipped question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyResponse {
    pub participant_id: String,
    pub sex: Sex,
    pub age: u32,
    pub cohort: Cohort,
    pub answers: BTreeMap<String, Vec<Option<i64>>>,
}

/// Parse raw survey rows from CSV.
///
/// Expected header: `participant_id,sex,age,cohort` followed by
/// `<NAME>_q<k>` for each instrument question in `specs` order. Sex is
/// `F`/`M`, cohort is `pilot`/`nonpilot`, and an empty cell is a skipped
/// question. Out-of-range answers are rejected with the participant,
/// instrument, and question named.
pub fn parse_responses(source: impl Read, specs: &[InstrumentSpec]) -> Result<Vec<SurveyResponse>> {
    for spec in specs {
        spec.validate()?;
    }
    let expected_header = expected_header(specs);

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let header = reader.headers()?.clone();
    if header.len() != expected_header.len() {
        return Err(Error::MalformedRow {
            row: 0,
            expected: expected_header.len(),
            found: header.len(),
        });
    }
    for (index, (found, expected)) in header.iter().zip(expected_header.iter()).enumerate() {
        if found != expected {
            return Err(Error::HeaderMismatch {
                index,
                expected: expected.clone(),
                found: found.to_string(),
            });
        }
    }

    let mut responses = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1; // 1-based data row
        let record = record?;
        if record.len() != expected_header.len() {
            return Err(Error::MalformedRow {
                row,
                expected: expected_header.len(),
                found: record.len(),
            });
        }

        let participant_id = record[0].to_string();
        let sex = match &record[1] {
            "F" => Sex::Female,
            "M" => Sex::Male,
            other => {
                return Err(Error::InvalidField {
                    row,
                    column: "sex".into(),
                    value: other.to_string(),
                })
            }
        };
        let age: u32 = record[2].parse().map_err(|_| Error::InvalidField {
            row,
            column: "age".into(),
            value: record[2].to_string(),
        })?;
        let cohort = match &record[3] {
            "pilot" => Cohort::Pilot,
            "nonpilot" => Cohort::NonPilot,
            other => {
                return Err(Error::InvalidField {
                    row,
                    column: "cohort".into(),
                    value: other.to_string(),
                })
            }
        };

        let mut answers = BTreeMap::new();
        let mut cell = 4;
        for spec in specs {
            let mut list = Vec::with_capacity(spec.question_count);
            for q in 1..=spec.question_count {
                let raw = record[cell].trim();
                cell += 1;
                if raw.is_empty() {
                    list.push(None);
                    continue;
                }
                let value: i64 = raw.parse().map_err(|_| Error::InvalidField {
                    row,
                    column: format!("{}_q{}", spec.name, q),
                    value: raw.to_string(),
                })?;
                if value < spec.min_value || value > spec.max_value {
                    return Err(Error::AnswerOutOfRange {
                        participant: participant_id.clone(),
                        instrument: spec.name.clone(),
                        question: q,
                        value,
                        min: spec.min_value,
                        max: spec.max_value,
                    });
                }
                list.push(Some(value));
            }
            answers.insert(spec.name.clone(), list);
        }

        responses.push(SurveyResponse {
            participant_id,
            sex,
            age,
            cohort,
            answers,
        });
    }
    Ok(responses)
}

fn expected_header(specs: &[InstrumentSpec]) -> Vec<String> {
    let mut header = vec![
        "participant_id".to_string(),
        "sex".to_string(),
        "age".to_string(),
        "cohort".to_string(),
    ];
    for spec in specs {
        for q in 1..=spec.question_count {
            header.push(format!("{}_q{}", spec.name, q));
        }
    }
    header
}

/// Reflect an answer on its scale: `(max + min) - answer`.
/// Only items listed in `inverted_items` should be passed through this.
pub fn apply_inversion(answer: i64, spec: &InstrumentSpec) -> i64 {
    debug_assert!(answer >= spec.min_value && answer <= spec.max_value);
    spec.max_value + spec.min_value - answer
}

/// Drop participants for whom at least one instrument set is entirely
/// skipped; partially answered sets are retained.
pub fn filter_complete(responses: Vec<SurveyResponse>) -> Vec<SurveyResponse> {
    responses
        .into_iter()
        .filter(|r| {
            r.answers
                .values()
                .all(|answers| answers.iter().any(Option::is_some))
        })
        .collect()
}

/// Normalized aggregated instrument score `s = sum(r_i) / (n * m)`,
/// after inversion of the instrument's reverse-keyed items. Skipped
/// answers contribute 0 to the numerator while the denominator stays
/// `n * m`, so `0 <= s <= 1`.
pub fn aggregate_score(answers: &[Option<i64>], spec: &InstrumentSpec) -> Result<f64> {
    if answers.len() != spec.question_count {
        return Err(Error::AnswerCountMismatch {
            instrument: spec.name.clone(),
            expected: spec.question_count,
            found: answers.len(),
        });
    }
    if answers.iter().all(Option::is_none) {
        return Err(Error::AllAnswersAbsent {
            instrument: spec.name.clone(),
        });
    }
    let sum: i64 = answers
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            a.map(|value| {
                if spec.inverted_items.contains(&(i + 1)) {
                    apply_inversion(value, spec)
                } else {
                    value
                }
            })
        })
        .sum();
    Ok(sum as f64 / (spec.question_count as f64 * spec.max_value as f64))
}
