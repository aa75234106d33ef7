//! Synthetic cohort generator with the skewed (cohort, sex) cell counts
//! the pipeline is designed around, so the full protocol runs without
//! any real participant data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureRow};
use crate::survey::{Cohort, Sex, INSTRUMENTS};

/// Row counts per (cohort, sex) cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub pilot_female: usize,
    pub pilot_male: usize,
    pub nonpilot_female: usize,
    pub nonpilot_male: usize,
}

/// Mean and spread of one instrument's normalized score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreDistribution {
    pub mean: f64,
    pub spread: f64,
}

/// Parameters of the generated cohort.
///
/// Scores are Gaussian draws clamped to [0, 1]. `separation` pushes the
/// pilot and non-pilot means apart symmetrically; `sex_confound` shifts
/// score means by sex within both cohorts (male up, female down), which
/// manufactures a measurable pre-mitigation disparity. `confound_weights`
/// scales that shift per instrument, so the confound can be concentrated
/// in a subset of instruments while the rest stay clean.
/// `score_correlation` is the share of each score's variance carried by a
/// per-participant latent factor; instruments measuring one underlying
/// state are strongly correlated, and each marginal stays Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub cells: CellCounts,
    pub pilot_scores: [ScoreDistribution; 8],
    pub nonpilot_scores: [ScoreDistribution; 8],
    pub separation: f64,
    pub sex_confound: f64,
    pub confound_weights: [f64; 8],
    pub score_correlation: f64,
    pub age_min: u32,
    pub age_max: u32,
}

impl Default for CohortSpec {
    /// 28 pilots (9 female) and 20 non-pilots (14 female); every score is
    /// centered at 0.5 with spread 0.14 before separation and confound.
    ///
    /// The default shape is deliberately hard for the classifier and easy
    /// for the confound: a weak cohort signal (0.03), a strong sex shift
    /// (0.50), and strongly correlated instruments (0.99, i.e. the eight
    /// scores mostly measure one latent state). Unmitigated trees trained
    /// on it lean on the sex proxy, giving the mitigation step a large,
    /// reliably measurable disparity to remove.
    fn default() -> Self {
        let base = ScoreDistribution {
            mean: 0.5,
            spread: 0.14,
        };
        CohortSpec {
            cells: CellCounts {
                pilot_female: 9,
                pilot_male: 19,
                nonpilot_female: 14,
                nonpilot_male: 6,
            },
            pilot_scores: [base; 8],
            nonpilot_scores: [base; 8],
            separation: 0.03,
            sex_confound: 0.50,
            confound_weights: [1.0; 8],
            score_correlation: 0.99,
            age_min: 18,
            age_max: 27,
        }
    }
}

impl CohortSpec {
    pub fn total_rows(&self) -> usize {
        self.cells.pilot_female
            + self.cells.pilot_male
            + self.cells.nonpilot_female
            + self.cells.nonpilot_male
    }

    fn score_mean(&self, slot: usize, cohort: Cohort, sex: Sex) -> f64 {
        let (base, cohort_shift) = match cohort {
            Cohort::Pilot => (self.pilot_scores[slot].mean, self.separation / 2.0),
            Cohort::NonPilot => (self.nonpilot_scores[slot].mean, -self.separation / 2.0),
        };
        let confound = self.sex_confound * self.confound_weights[slot];
        let sex_shift = match sex {
            Sex::Male => confound / 2.0,
            Sex::Female => -confound / 2.0,
        };
        base + cohort_shift + sex_shift
    }

    fn score_spread(&self, slot: usize, cohort: Cohort) -> f64 {
        match cohort {
            Cohort::Pilot => self.pilot_scores[slot].spread,
            Cohort::NonPilot => self.nonpilot_scores[slot].spread,
        }
    }
}

/// Generate a cohort with exact cell counts, deterministic per seed.
/// Cells are emitted in a fixed order (pilot F, pilot M, non-pilot F,
/// non-pilot M); ages are uniform over the configured range.
pub fn generate(spec: &CohortSpec, rng_seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut rows = Vec::with_capacity(spec.total_rows());
    let cells = [
        (Cohort::Pilot, Sex::Female, spec.cells.pilot_female),
        (Cohort::Pilot, Sex::Male, spec.cells.pilot_male),
        (Cohort::NonPilot, Sex::Female, spec.cells.nonpilot_female),
        (Cohort::NonPilot, Sex::Male, spec.cells.nonpilot_male),
    ];
    let rho = spec.score_correlation.clamp(0.0, 1.0);
    for (cohort, sex, count) in cells {
        for _ in 0..count {
            let age = rng.gen_range(spec.age_min..=spec.age_max);
            let latent = standard_normal(&mut rng);
            let mut scores = [0.0; 8];
            for (slot, score) in scores.iter_mut().enumerate() {
                let mean = spec.score_mean(slot, cohort, sex);
                let spread = spec.score_spread(slot, cohort);
                let noise = rho.sqrt() * latent + (1.0 - rho).sqrt() * standard_normal(&mut rng);
                *score = (mean + spread * noise).clamp(0.0, 1.0);
            }
            rows.push(FeatureRow {
                sex,
                age,
                scores,
                label: cohort,
            });
        }
    }
    debug_assert_eq!(rows.len(), spec.total_rows());
    let _ = INSTRUMENTS; // score slots follow the canonical instrument order
    Dataset::new(rows)
}

/// Box-Muller standard normal from two uniform draws.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
