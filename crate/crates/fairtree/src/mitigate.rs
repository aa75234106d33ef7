//! Post-processing threshold optimizer: per-group randomized threshold
//! rules fitted under a demographic-parity or equalized-odds constraint.
//!
//! Both fitters work on the discretized operating characteristic of the
//! score column. A rule mixes two thresholds, so a group can hit any
//! selection rate (or any ROC point on a chord between two of its
//! operating points) exactly in expectation; the fitters exploit that to
//! drive the constraint gap to zero on the fitting data while maximizing
//! fitting accuracy.

use std::collections::BTreeMap;
use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::survey::Sex;

/// Which fairness constraint a policy was fitted under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    DemographicParity,
    EqualizedOdds,
}

impl std::fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintKind::DemographicParity => write!(f, "demographic_parity"),
            ConstraintKind::EqualizedOdds => write!(f, "equalized_odds"),
        }
    }
}

/// One group's randomized rule: apply `threshold_low` with probability
/// `p`, else `threshold_high`; predict positive iff `score > threshold`.
/// A threshold of negative infinity (JSON `null`) accepts every row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupRule {
    #[serde(rename = "t_low", with = "neg_inf_as_null")]
    pub threshold_low: f64,
    #[serde(rename = "t_high", with = "neg_inf_as_null")]
    pub threshold_high: f64,
    #[serde(rename = "p")]
    pub p_low: f64,
}

mod neg_inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            s.serialize_some(value)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

/// Fitted per-group threshold rules plus the constraint tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy<G: Ord = Sex> {
    pub constraint: ConstraintKind,
    pub rules: BTreeMap<G, GroupRule>,
}

/// One candidate threshold of a group with the counts it induces under
/// the strict `score > threshold` rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub threshold: f64,
    pub selected: usize,
    pub tp: usize,
    pub fp: usize,
}

/// The discretized operating characteristic of one group: every candidate
/// threshold (negative infinity plus each distinct score, ascending) with
/// its selection/true-positive/false-positive counts on the fitting data.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupOperatingPoint {
    pub total: usize,
    pub positives: usize,
    pub negatives: usize,
    pub points: Vec<OperatingPoint>,
}

impl GroupOperatingPoint {
    pub fn selection_rate(&self, i: usize) -> f64 {
        self.points[i].selected as f64 / self.total as f64
    }

    pub fn tpr(&self, i: usize) -> f64 {
        self.points[i].tp as f64 / self.positives as f64
    }

    pub fn fpr(&self, i: usize) -> f64 {
        self.points[i].fp as f64 / self.negatives as f64
    }

    /// Correct predictions at point `i`: tp + tn.
    pub fn correct(&self, i: usize) -> usize {
        self.points[i].tp + (self.negatives - (self.points[i].fp))
    }
}

/// Compute each group's operating characteristic.
pub fn operating_points<G: Ord + Copy + Display>(
    scores: &[f64],
    y_true: &[bool],
    groups: &[G],
) -> Result<BTreeMap<G, GroupOperatingPoint>> {
    if scores.len() != y_true.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: y_true.len(),
        });
    }
    if scores.len() != groups.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: groups.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::LengthMismatch { left: 0, right: 0 });
    }

    let mut rows: BTreeMap<G, Vec<(f64, bool)>> = BTreeMap::new();
    for ((&score, &truth), &group) in scores.iter().zip(y_true).zip(groups) {
        rows.entry(group).or_default().push((score, truth));
    }

    let mut result = BTreeMap::new();
    for (group, rows) in rows {
        let total = rows.len();
        let positives = rows.iter().filter(|(_, t)| *t).count();
        let negatives = total - positives;

        let mut thresholds: Vec<f64> = rows.iter().map(|(s, _)| *s).collect();
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        thresholds.insert(0, f64::NEG_INFINITY);

        let points = thresholds
            .into_iter()
            .map(|threshold| {
                let mut selected = 0;
                let mut tp = 0;
                let mut fp = 0;
                for &(score, truth) in &rows {
                    if score > threshold {
                        selected += 1;
                        if truth {
                            tp += 1;
                        } else {
                            fp += 1;
                        }
                    }
                }
                OperatingPoint {
                    threshold,
                    selected,
                    tp,
                    fp,
                }
            })
            .collect();

        result.insert(
            group,
            GroupOperatingPoint {
                total,
                positives,
                negatives,
                points,
            },
        );
    }
    Ok(result)
}

/// Upper concave envelope of `(x, value)` points, returned as indices into
/// the input (which must be sorted by x ascending with distinct x).
fn upper_envelope(points: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        while hull.len() >= 2 {
            let a = points[hull[hull.len() - 2]];
            let b = points[hull[hull.len() - 1]];
            let c = points[i];
            // drop b when it lies on or below chord a-c
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Realization of a target selection rate for one group: the rule and the
/// expected number of correct predictions it attains.
struct RateRealization {
    rule: GroupRule,
    expected_correct: f64,
}

/// Best randomized rule hitting selection rate `target` exactly, chosen on
/// the upper envelope of the group's (rate, correct) trade-off.
fn realize_rate(op: &GroupOperatingPoint, envelope: &[usize], target: f64) -> RateRealization {
    // envelope indices are ordered by ascending selection rate
    for window in envelope.windows(2) {
        let (lo_rate_idx, hi_rate_idx) = (window[0], window[1]);
        let r_lo = op.selection_rate(lo_rate_idx);
        let r_hi = op.selection_rate(hi_rate_idx);
        if target < r_lo - 1e-12 || target > r_hi + 1e-12 {
            continue;
        }
        if (target - r_lo).abs() <= 1e-12 {
            return degenerate(op, lo_rate_idx);
        }
        if (target - r_hi).abs() <= 1e-12 {
            return degenerate(op, hi_rate_idx);
        }
        // mix the two envelope vertices; the higher-rate vertex has the
        // lower threshold
        let weight_hi = (target - r_lo) / (r_hi - r_lo);
        let expected_correct = (1.0 - weight_hi) * op.correct(lo_rate_idx) as f64
            + weight_hi * op.correct(hi_rate_idx) as f64;
        return RateRealization {
            rule: GroupRule {
                threshold_low: op.points[hi_rate_idx].threshold,
                threshold_high: op.points[lo_rate_idx].threshold,
                p_low: weight_hi,
            },
            expected_correct,
        };
    }
    // single envelope point (degenerate characteristic)
    degenerate(op, envelope[0])
}

fn degenerate(op: &GroupOperatingPoint, idx: usize) -> RateRealization {
    RateRealization {
        rule: GroupRule {
            threshold_low: op.points[idx].threshold,
            threshold_high: op.points[idx].threshold,
            p_low: 1.0,
        },
        expected_correct: op.correct(idx) as f64,
    }
}

/// Fit per-group randomized thresholds that equalize selection rates
/// exactly (in expectation) on the fitting data.
///
/// Candidate common rates are every group-achievable rate plus the
/// midpoints between consecutive candidates; each group realizes a
/// candidate on the upper envelope of its (rate, correct) operating
/// points, and the candidate with the highest expected fitting accuracy
/// wins (ties to the lowest rate).
pub fn fit_demographic_parity<G: Ord + Copy + Display>(
    scores: &[f64],
    y_true: &[bool],
    groups: &[G],
) -> Result<ThresholdPolicy<G>> {
    let ops = operating_points(scores, y_true, groups)?;

    let mut candidates: Vec<f64> = ops
        .values()
        .flat_map(|op| (0..op.points.len()).map(|i| op.selection_rate(i)))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let midpoints: Vec<f64> = candidates
        .windows(2)
        .map(|w| (w[0] + w[1]) / 2.0)
        .collect();
    candidates.extend(midpoints);
    candidates.sort_by(f64::total_cmp);

    // (rate, correct) envelope per group, rates ascending
    let envelopes: BTreeMap<G, Vec<usize>> = ops
        .iter()
        .map(|(&g, op)| {
            let mut order: Vec<usize> = (0..op.points.len()).collect();
            order.reverse(); // points are threshold-ascending = rate-descending
            let pts: Vec<(f64, f64)> = order
                .iter()
                .map(|&i| (op.selection_rate(i), op.correct(i) as f64))
                .collect();
            let env: Vec<usize> = upper_envelope(&pts).into_iter().map(|k| order[k]).collect();
            (g, env)
        })
        .collect();

    let total_rows: usize = ops.values().map(|op| op.total).sum();
    let mut best: Option<(f64, BTreeMap<G, GroupRule>)> = None;
    for &target in &candidates {
        let mut rules = BTreeMap::new();
        let mut expected_correct = 0.0;
        for (&g, op) in &ops {
            let realization = realize_rate(op, &envelopes[&g], target);
            expected_correct += realization.expected_correct;
            rules.insert(g, realization.rule);
        }
        let accuracy = expected_correct / total_rows as f64;
        if best.as_ref().is_none_or(|(acc, _)| accuracy > *acc) {
            best = Some((accuracy, rules));
        }
    }

    let (_, rules) = best.expect("at least one candidate rate");
    Ok(ThresholdPolicy {
        constraint: ConstraintKind::DemographicParity,
        rules,
    })
}

/// A point in ROC space together with, per group, the operating-point pair
/// whose chord realizes it.
struct EoCandidate<G: Ord> {
    fpr: f64,
    tpr: f64,
    chords: BTreeMap<G, (usize, usize)>,
}

/// Fit per-group randomized thresholds equalizing TPR and FPR exactly
/// (in expectation) on the fitting data.
///
/// A group mixing two thresholds can realize exactly the chords between
/// its ROC points, so the exactly-fair points are those lying on a chord
/// of every group. Candidates are the pairwise chord intersections
/// (including collinear overlaps, whose endpoints suffice because the
/// objective is linear); the candidate minimizing weighted fitting error
/// wins, ties to the lexicographically smallest (fpr, tpr). The diagonal
/// chord between the accept-all and reject-all points exists for every
/// group, so the search is never empty.
pub fn fit_equalized_odds<G: Ord + Copy + Display>(
    scores: &[f64],
    y_true: &[bool],
    groups: &[G],
) -> Result<ThresholdPolicy<G>> {
    let ops = operating_points(scores, y_true, groups)?;
    for (g, op) in &ops {
        if op.positives == 0 || op.negatives == 0 {
            return Err(Error::OneClassGroup {
                group: g.to_string(),
            });
        }
    }

    let keys: Vec<G> = ops.keys().copied().collect();
    let roc: BTreeMap<G, Vec<(f64, f64)>> = ops
        .iter()
        .map(|(&g, op)| {
            let pts = (0..op.points.len())
                .map(|i| (op.fpr(i), op.tpr(i)))
                .collect();
            (g, pts)
        })
        .collect();

    // candidate points from the first two groups, then filtered through the rest
    let mut candidates: Vec<EoCandidate<G>> = Vec::new();
    if keys.len() == 1 {
        // single group: any of its own points is exactly fair; pick them all
        let g = keys[0];
        for (i, &(fpr, tpr)) in roc[&g].iter().enumerate() {
            candidates.push(EoCandidate {
                fpr,
                tpr,
                chords: BTreeMap::from([(g, (i, i))]),
            });
        }
    } else {
        let (ga, gb) = (keys[0], keys[1]);
        for (ia, ja) in chord_pairs(roc[&ga].len()) {
            for (ib, jb) in chord_pairs(roc[&gb].len()) {
                for (fpr, tpr) in
                    segment_intersections(roc[&ga][ia], roc[&ga][ja], roc[&gb][ib], roc[&gb][jb])
                {
                    let mut chords = BTreeMap::new();
                    chords.insert(ga, (ia, ja));
                    chords.insert(gb, (ib, jb));
                    let mut ok = true;
                    for &g in &keys[2..] {
                        match containing_chord(&roc[&g], (fpr, tpr)) {
                            Some(pair) => {
                                chords.insert(g, pair);
                            }
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        candidates.push(EoCandidate { fpr, tpr, chords });
                    }
                }
            }
        }
    }

    // maximize expected correct = sum_g pos_g*tpr + neg_g*(1 - fpr),
    // equivalently minimize the population-weighted error
    let mut best: Option<(f64, &EoCandidate<G>)> = None;
    for cand in &candidates {
        let mut correct = 0.0;
        for op in ops.values() {
            correct +=
                op.positives as f64 * cand.tpr + op.negatives as f64 * (1.0 - cand.fpr);
        }
        let better = match &best {
            None => true,
            Some((acc, incumbent)) => {
                correct > *acc + 1e-15
                    || ((correct - *acc).abs() <= 1e-15
                        && (cand.fpr, cand.tpr) < (incumbent.fpr, incumbent.tpr))
            }
        };
        if better {
            best = Some((correct, cand));
        }
    }
    let (_, chosen) = best.expect("the diagonal chord always intersects itself");

    // Realize the point per group on the chord that leaves the fewest rows
    // exposed to the coin flip; the generating chord is the fallback, so
    // exactness is never lost.
    let mut rules = BTreeMap::new();
    for (&g, &source) in &chosen.chords {
        let op = &ops[&g];
        let target = (chosen.fpr, chosen.tpr);
        let mut best_rule = realize_roc_point(op, &roc[&g], source.0, source.1, target);
        let mut best_mass = randomization_mass(op, &best_rule);
        for (i, j) in chord_pairs(roc[&g].len()) {
            let rule = realize_roc_point(op, &roc[&g], i, j, target);
            let realized = mix_roc(&roc[&g], i, j, rule.p_low);
            if (realized.0 - target.0).abs() > 1e-12 || (realized.1 - target.1).abs() > 1e-12 {
                continue;
            }
            let mass = randomization_mass(op, &rule);
            if mass < best_mass {
                best_mass = mass;
                best_rule = rule;
            }
        }
        rules.insert(g, best_rule);
    }
    Ok(ThresholdPolicy {
        constraint: ConstraintKind::EqualizedOdds,
        rules,
    })
}

fn chord_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Rows whose prediction depends on the coin: score in (t_low, t_high].
fn randomization_mass(op: &GroupOperatingPoint, rule: &GroupRule) -> usize {
    if rule.p_low == 0.0 || rule.p_low == 1.0 {
        return 0;
    }
    let selected_at = |threshold: f64| {
        op.points
            .iter()
            .find(|p| p.threshold == threshold)
            .map(|p| p.selected)
            .unwrap_or(0)
    };
    selected_at(rule.threshold_low) - selected_at(rule.threshold_high)
}

fn mix_roc(roc: &[(f64, f64)], i: usize, j: usize, weight_low: f64) -> (f64, f64) {
    (
        weight_low * roc[i].0 + (1.0 - weight_low) * roc[j].0,
        weight_low * roc[i].1 + (1.0 - weight_low) * roc[j].1,
    )
}

/// Mix the two thresholds of chord (i, j) to land on `target` exactly.
fn realize_roc_point(
    op: &GroupOperatingPoint,
    roc: &[(f64, f64)],
    i: usize,
    j: usize,
    target: (f64, f64),
) -> GroupRule {
    if i == j {
        return GroupRule {
            threshold_low: op.points[i].threshold,
            threshold_high: op.points[i].threshold,
            p_low: 1.0,
        };
    }
    let a = roc[i];
    let b = roc[j];
    if (target.0 - a.0).abs() <= 1e-12 && (target.1 - a.1).abs() <= 1e-12 {
        return degenerate_rule(op, i);
    }
    if (target.0 - b.0).abs() <= 1e-12 && (target.1 - b.1).abs() <= 1e-12 {
        return degenerate_rule(op, j);
    }
    // solve the mixing weight on the better-conditioned coordinate
    let w_on_a = if (a.0 - b.0).abs() >= (a.1 - b.1).abs() {
        (target.0 - b.0) / (a.0 - b.0)
    } else {
        (target.1 - b.1) / (a.1 - b.1)
    };
    let w_on_a = w_on_a.clamp(0.0, 1.0);
    // i < j means threshold_i < threshold_j; weight on the low threshold
    GroupRule {
        threshold_low: op.points[i].threshold,
        threshold_high: op.points[j].threshold,
        p_low: w_on_a,
    }
}

fn degenerate_rule(op: &GroupOperatingPoint, idx: usize) -> GroupRule {
    GroupRule {
        threshold_low: op.points[idx].threshold,
        threshold_high: op.points[idx].threshold,
        p_low: 1.0,
    }
}

/// Chord of `points` containing `target`, if any (first by index order).
fn containing_chord(points: &[(f64, f64)], target: (f64, f64)) -> Option<(usize, usize)> {
    for i in 0..points.len() {
        for j in i..points.len() {
            if point_on_segment(points[i], points[j], target, 1e-12) {
                return Some((i, j));
            }
        }
    }
    None
}

fn point_on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64), eps: f64) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    if cross.abs() > eps {
        return false;
    }
    let within = |lo: f64, hi: f64, v: f64| v >= lo.min(hi) - eps && v <= lo.max(hi) + eps;
    within(a.0, b.0, p.0) && within(a.1, b.1, p.1)
}

/// Intersection candidates of segments a1-a2 and b1-b2: the proper
/// intersection point, or the overlap endpoints when collinear.
fn segment_intersections(
    a1: (f64, f64),
    a2: (f64, f64),
    b1: (f64, f64),
    b2: (f64, f64),
) -> Vec<(f64, f64)> {
    const EPS: f64 = 1e-12;
    let d1 = (a2.0 - a1.0, a2.1 - a1.1);
    let d2 = (b2.0 - b1.0, b2.1 - b1.1);
    let cross = d1.0 * d2.1 - d1.1 * d2.0;
    let qp = (b1.0 - a1.0, b1.1 - a1.1);

    if cross.abs() > EPS {
        let t = (qp.0 * d2.1 - qp.1 * d2.0) / cross;
        let u = (qp.0 * d1.1 - qp.1 * d1.0) / cross;
        if (-EPS..=1.0 + EPS).contains(&t) && (-EPS..=1.0 + EPS).contains(&u) {
            let t = t.clamp(0.0, 1.0);
            return vec![(a1.0 + t * d1.0, a1.1 + t * d1.1)];
        }
        return Vec::new();
    }

    // parallel; reject unless collinear
    if (qp.0 * d1.1 - qp.1 * d1.0).abs() > EPS {
        return Vec::new();
    }

    // collinear (possibly degenerate single points): overlap endpoints
    let len_sq = d1.0 * d1.0 + d1.1 * d1.1;
    if len_sq <= EPS * EPS {
        // a is a single point; keep it when it sits on b
        if point_on_segment(b1, b2, a1, EPS) {
            return vec![a1];
        }
        return Vec::new();
    }
    let param = |p: (f64, f64)| ((p.0 - a1.0) * d1.0 + (p.1 - a1.1) * d1.1) / len_sq;
    let (tb1, tb2) = (param(b1), param(b2));
    let lo = tb1.min(tb2).max(0.0);
    let hi = tb1.max(tb2).min(1.0);
    if lo > hi + EPS {
        return Vec::new();
    }
    let mut out = vec![(a1.0 + lo * d1.0, a1.1 + lo * d1.1)];
    if hi - lo > EPS {
        out.push((a1.0 + hi * d1.0, a1.1 + hi * d1.1));
    }
    out
}

/// Apply a fitted policy: each row draws `u ~ Uniform(0,1)` from the
/// seeded stream, uses `threshold_low` when `u < p`, and predicts
/// positive iff `score > threshold`.
pub fn apply_policy<G: Ord + Copy + Display>(
    policy: &ThresholdPolicy<G>,
    scores: &[f64],
    groups: &[G],
    rng_seed: u64,
) -> Result<Vec<bool>> {
    if scores.len() != groups.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: groups.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut predictions = Vec::with_capacity(scores.len());
    for (&score, &group) in scores.iter().zip(groups) {
        let rule = policy.rules.get(&group).ok_or_else(|| Error::UnknownGroup {
            group: group.to_string(),
        })?;
        let u: f64 = rng.gen();
        let threshold = if u < rule.p_low {
            rule.threshold_low
        } else {
            rule.threshold_high
        };
        predictions.push(score > threshold);
    }
    Ok(predictions)
}

/// Expected selection rate, TPR, and FPR of one group under a policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedRates {
    pub selection_rate: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// Expected per-group rates under the policy mixture, computed
/// analytically from fitting (or evaluation) data without sampling.
pub fn expected_rates<G: Ord + Copy + Display>(
    policy: &ThresholdPolicy<G>,
    scores: &[f64],
    y_true: &[bool],
    groups: &[G],
) -> Result<BTreeMap<G, ExpectedRates>> {
    let ops = operating_points(scores, y_true, groups)?;
    let mut result = BTreeMap::new();
    for (&g, op) in &ops {
        let rule = policy.rules.get(&g).ok_or_else(|| Error::UnknownGroup {
            group: g.to_string(),
        })?;
        // count directly against the threshold; thresholds fitted on other
        // data may fall between this group's cut points
        let rates_at = |threshold: f64| {
            let mut selected = 0usize;
            let mut tp = 0usize;
            let mut fp = 0usize;
            for i in 0..scores.len() {
                if groups[i] != g || scores[i] <= threshold {
                    continue;
                }
                selected += 1;
                if y_true[i] {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
            (
                selected as f64 / op.total as f64,
                if op.positives > 0 {
                    tp as f64 / op.positives as f64
                } else {
                    f64::NAN
                },
                if op.negatives > 0 {
                    fp as f64 / op.negatives as f64
                } else {
                    f64::NAN
                },
            )
        };
        let low = rates_at(rule.threshold_low);
        let high = rates_at(rule.threshold_high);
        let mix = |a: f64, b: f64| rule.p_low * a + (1.0 - rule.p_low) * b;
        result.insert(
            g,
            ExpectedRates {
                selection_rate: mix(low.0, high.0),
                tpr: mix(low.1, high.1),
                fpr: mix(low.2, high.2),
            },
        );
    }
    Ok(result)
}

/// Expected fitting accuracy of a policy, analytically from the mixture.
pub fn expected_accuracy<G: Ord + Copy + Display>(
    policy: &ThresholdPolicy<G>,
    scores: &[f64],
    y_true: &[bool],
    groups: &[G],
) -> Result<f64> {
    let rates = expected_rates(policy, scores, y_true, groups)?;
    let ops = operating_points(scores, y_true, groups)?;
    let mut correct = 0.0;
    for (g, r) in &rates {
        let op = &ops[g];
        let tp = if op.positives > 0 { r.tpr * op.positives as f64 } else { 0.0 };
        let tn = if op.negatives > 0 {
            (1.0 - r.fpr) * op.negatives as f64
        } else {
            0.0
        };
        correct += tp + tn;
    }
    Ok(correct / scores.len() as f64)
}
