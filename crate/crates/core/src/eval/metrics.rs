use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// A metric that may have no meaningful value, such as precision when
/// nothing was predicted positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum Metric {
    Defined(f64),
    Undefined,
}

impl Metric {
    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Defined(v) => Some(v),
            Metric::Undefined => None,
        }
    }

    fn ratio(num: u64, den: u64) -> Metric {
        if den == 0 {
            Metric::Undefined
        } else {
            Metric::Defined(num as f64 / den as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub threshold: f64,
    pub confusion: Confusion,
    pub accuracy: Metric,
    pub precision: Metric,
    pub recall: Metric,
    pub f1: Metric,
}

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::data(format!("{} scores but {} labels", scores.len(), labels.len())));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::data(format!("score at position {i} is not finite")));
    }
    if let Some(i) = labels.iter().position(|&y| y > 1) {
        return Err(Error::data(format!("label at position {i} is not 0 or 1")));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    Ok((pos, labels.len() - pos))
}

fn require_both(pos: usize, neg: usize) -> Result<()> {
    if pos == 0 || neg == 0 {
        return Err(Error::data(format!("ROC analysis needs both classes, got {pos} positive and {neg} negative")));
    }
    Ok(())
}

/// Indices ordered by descending score.
fn descending(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

/// ROC curve from a descending threshold sweep, one point per distinct score
/// plus the `(0, 0)` origin.
pub fn roc_points(scores: &[f64], labels: &[u8]) -> Result<Vec<RocPoint>> {
    let (pos, neg) = check_inputs(scores, labels)?;
    require_both(pos, neg)?;
    let idx = descending(scores);
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    for (k, &i) in idx.iter().enumerate() {
        if labels[i] == 1 {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_group = idx.get(k + 1).is_none_or(|&j| scores[j] != scores[i]);
        if last_of_group {
            points.push(RocPoint { fpr: fp as f64 / neg as f64, tpr: tp as f64 / pos as f64 });
        }
    }
    Ok(points)
}

/// Area under the ROC curve via the Mann-Whitney rank sum, ties at half
/// credit.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (pos, neg) = check_inputs(scores, labels)?;
    require_both(pos, neg)?;
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum keeps midranks integral.
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let mid2 = (i + 1 + j + 1) as u128;
        let group_pos = idx[i..=j].iter().filter(|&&k| labels[k] == 1).count() as u128;
        rank_sum2 += mid2 * group_pos;
        i = j + 1;
    }
    let (p, n) = (pos as u128, neg as u128);
    let u2 = rank_sum2 - p * (p + 1);
    Ok(u2 as f64 / (2 * p * n) as f64)
}

/// Trapezoidal area under a list of ROC points.
pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0).sum()
}

/// Predicts positive when `score >= threshold`.
pub fn classification_metrics(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ClassificationMetrics> {
    check_inputs(scores, labels)?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::config(format!("threshold {threshold} outside [0, 1]")));
    }
    let mut c = Confusion::default();
    for (&s, &y) in scores.iter().zip(labels) {
        match (s >= threshold, y == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(metrics_from_confusion(c, threshold))
}

pub fn metrics_from_confusion(c: Confusion, threshold: f64) -> ClassificationMetrics {
    let precision = Metric::ratio(c.tp, c.tp + c.fp);
    let recall = Metric::ratio(c.tp, c.tp + c.fn_);
    let f1 = match (precision, recall) {
        (Metric::Defined(p), Metric::Defined(r)) if p + r > 0.0 => Metric::Defined(2.0 * p * r / (p + r)),
        (Metric::Defined(_), Metric::Defined(_)) => Metric::Defined(0.0),
        _ => Metric::Undefined,
    };
    ClassificationMetrics {
        threshold,
        confusion: c,
        accuracy: Metric::ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f1,
    }
}

/// The observed score that maximizes F1 when used as the threshold; ties go
/// to the higher threshold.
pub fn best_f1_threshold(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (pos, neg) = check_inputs(scores, labels)?;
    require_both(pos, neg)?;
    let idx = descending(scores);
    let (mut tp, mut fp) = (0u64, 0u64);
    let (mut best, mut best_f1) = (scores[idx[0]], -1.0);
    for (k, &i) in idx.iter().enumerate() {
        if labels[i] == 1 {
            tp += 1;
        } else {
            fp += 1;
        }
        if idx.get(k + 1).is_some_and(|&j| scores[j] == scores[i]) {
            continue;
        }
        let f1 = 2.0 * tp as f64 / (2 * tp + fp + (pos as u64 - tp)) as f64;
        if f1 > best_f1 {
            best_f1 = f1;
            best = scores[i];
        }
    }
    Ok(best.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
        let (mut num2, mut pairs) = (0u64, 0u64);
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi == 1 && yj == 0 {
                    pairs += 1;
                    num2 += match scores[i].partial_cmp(&scores[j]).unwrap() {
                        std::cmp::Ordering::Greater => 2,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Less => 0,
                    };
                }
            }
        }
        num2 as f64 / (2 * pairs) as f64
    }

    #[test]
    fn roc_examples() {
        let p = roc_points(&[0.8, 0.6, 0.4, 0.2], &[1, 0, 1, 0]).unwrap();
        let xy: Vec<(f64, f64)> = p.iter().map(|q| (q.fpr, q.tpr)).collect();
        assert_eq!(xy, [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]);
        let flat = roc_points(&[0.3; 4], &[1, 0, 1, 0]).unwrap();
        assert_eq!(flat.len(), 2);
        let perfect = roc_points(&[0.9, 0.8, 0.1], &[1, 1, 0]).unwrap();
        assert!(perfect.contains(&RocPoint { fpr: 0.0, tpr: 1.0 }));
        assert!(roc_points(&[0.1, 0.2], &[1, 1]).is_err());
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.8, 0.6, 0.4, 0.2], &[1, 0, 1, 0]).unwrap(), 0.75);
        assert_eq!(auc(&[0.9, 0.1], &[1, 0]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5; 6], &[1, 0, 1, 0, 0, 0]).unwrap(), 0.5);
        assert!(auc(&[0.5, 0.5], &[0, 0]).is_err());
    }

    #[test]
    fn metric_examples() {
        let scores = [0.9, 0.8, 0.7, 0.3, 0.2, 0.1, 0.1, 0.1, 0.1, 0.1];
        let labels = [1, 1, 0, 1, 0, 0, 0, 0, 0, 0];
        let m = classification_metrics(&scores, &labels, 0.5).unwrap();
        assert_eq!(m.confusion, Confusion { tp: 2, fp: 1, tn: 6, fn_: 1 });
        assert_eq!(m.accuracy, Metric::Defined(0.8));
        assert!((m.precision.value().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1.value().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(classification_metrics(&scores, &labels, 0.0).unwrap().recall, Metric::Defined(1.0));
        let none = classification_metrics(&scores, &labels, 0.95).unwrap();
        assert_eq!(none.precision, Metric::Undefined);
        assert_eq!(none.f1, Metric::Undefined);
    }

    #[test]
    fn f1_threshold_picks_best_cut() {
        let t = best_f1_threshold(&[0.9, 0.8, 0.3, 0.2], &[1, 1, 0, 0]).unwrap();
        assert_eq!(t, 0.8);
    }

    #[test]
    fn metric_serde_shape() {
        let j = serde_json::to_string(&Metric::Undefined).unwrap();
        assert_eq!(j, r#"{"status":"undefined"}"#);
        let back: Metric = serde_json::from_str(&serde_json::to_string(&Metric::Defined(0.25)).unwrap()).unwrap();
        assert_eq!(back, Metric::Defined(0.25));
    }

    fn fixture() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
        (2usize..200)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(0u8..20, n)
                        .prop_map(|v| v.into_iter().map(|s| f64::from(s) / 20.0).collect()),
                    proptest::collection::vec(0u8..2, n),
                )
            })
            .prop_filter("both classes", |(_, y)| y.contains(&0) && y.contains(&1))
    }

    proptest! {
        #[test]
        fn auc_equals_pair_counting((s, y) in fixture()) {
            prop_assert_eq!(auc(&s, &y).unwrap(), brute_auc(&s, &y));
        }

        #[test]
        fn trapezoid_matches_rank_auc((s, y) in fixture()) {
            let a = auc(&s, &y).unwrap();
            let t = trapezoid_area(&roc_points(&s, &y).unwrap());
            prop_assert!((a - t).abs() <= 1e-12);
        }

        #[test]
        fn auc_flip_and_monotone_transform(n in 2usize..100, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut s: Vec<f64> = (0..n).map(|i| i as f64 + rng.random::<f64>() * 0.5).collect();
            let y: Vec<u8> = (0..n).map(|i| u8::from(i % 3 == 0)).collect();
            s.reverse();
            prop_assume!(y.contains(&0) && y.contains(&1));
            let a = auc(&s, &y).unwrap();
            let flipped: Vec<u8> = y.iter().map(|v| 1 - v).collect();
            prop_assert!((a - (1.0 - auc(&s, &flipped).unwrap())).abs() < 1e-12);
            let t: Vec<f64> = s.iter().map(|v| (v * 0.1).exp()).collect();
            prop_assert_eq!(auc(&t, &y).unwrap(), a);
        }

        #[test]
        fn roc_monotone((s, y) in fixture()) {
            let p = roc_points(&s, &y).unwrap();
            prop_assert_eq!(p[0], RocPoint { fpr: 0.0, tpr: 0.0 });
            prop_assert_eq!(*p.last().unwrap(), RocPoint { fpr: 1.0, tpr: 1.0 });
            for w in p.windows(2) {
                prop_assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
            }
        }

        #[test]
        fn metric_identities((s, y) in fixture(), t in 0.0f64..=1.0) {
            let m = classification_metrics(&s, &y, t).unwrap();
            let c = m.confusion;
            prop_assert_eq!(c.total() as usize, s.len());
            prop_assert_eq!(m.accuracy, Metric::Defined((c.tp + c.tn) as f64 / c.total() as f64));
            if let (Some(p), Some(r)) = (m.precision.value(), m.recall.value()) {
                let f = m.f1.value().unwrap();
                if p + r > 0.0 {
                    prop_assert!((f - 2.0 * p * r / (p + r)).abs() <= 1e-12);
                }
            }
        }
    }
}
