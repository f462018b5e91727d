use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn class_indices(labels: &[u8]) -> [Vec<usize>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (i, &y) in labels.iter().enumerate() {
        out[usize::from(y == 1)].push(i);
    }
    out
}

/// Per-class proportional split. Each class sends `round(n_c * test_fraction)`
/// rows (clamped to leave at least one on each side) to the test side.
/// Both index lists come back sorted.
pub fn stratified_split<R: Rng>(labels: &[u8], test_fraction: f64, rng: &mut R) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::config(format!("test fraction {test_fraction} must lie in (0, 1)")));
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (class, mut idx) in class_indices(labels).into_iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::data(format!(
                "class {class} has {} rows; a stratified split needs at least 2",
                idx.len()
            )));
        }
        idx.shuffle(rng);
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Keeps every minority row and samples majority rows without replacement so
/// that `n_minority / n_majority` is as close to `ratio` as an integer count
/// allows. Returns sorted row indices.
pub fn random_undersample<R: Rng>(labels: &[u8], ratio: f64, rng: &mut R) -> Result<Vec<usize>> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::config(format!("sampling strategy {ratio} must lie in (0, 1]")));
    }
    let [neg, pos] = class_indices(labels);
    if neg.is_empty() || pos.is_empty() {
        return Err(Error::data("undersampling needs both classes present"));
    }
    let (minority, majority) = if pos.len() <= neg.len() { (pos, neg) } else { (neg, pos) };
    let target = (minority.len() as f64 / ratio).round() as usize;
    if target > majority.len() {
        return Err(Error::data(format!(
            "sampling strategy {ratio} needs {target} majority rows but only {} exist",
            majority.len()
        )));
    }
    let mut out = minority;
    out.extend(index::sample(rng, majority.len(), target).into_iter().map(|i| majority[i]));
    out.sort_unstable();
    Ok(out)
}

/// Stratified assignment of rows to `k` validation folds.
pub fn stratified_kfold<R: Rng>(labels: &[u8], k: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::config(format!("cross-validation needs k >= 2, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::data(format!("{} rows cannot fill {k} folds", labels.len())));
    }
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for mut idx in class_indices(labels) {
        idx.shuffle(rng);
        for i in idx {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Multiplicity of each row in a bootstrap sample of size `n`.
pub fn bootstrap_counts<R: Rng>(n: usize, rng: &mut R) -> Vec<u32> {
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeight {
    #[default]
    None,
    /// `w_c = N / (2 * N_c)`.
    Balanced,
}

impl ClassWeight {
    /// `[w_negative, w_positive]` for `labels`.
    pub fn weights(self, labels: &[u8]) -> [f64; 2] {
        match self {
            ClassWeight::None => [1.0, 1.0],
            ClassWeight::Balanced => {
                let n = labels.len() as f64;
                let pos = labels.iter().filter(|&&y| y == 1).count() as f64;
                let neg = n - pos;
                let w = |c: f64| if c > 0.0 { n / (2.0 * c) } else { 0.0 };
                [w(neg), w(pos)]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(s: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(s)
    }

    fn labels(pos: usize, neg: usize) -> Vec<u8> {
        let mut v = vec![1u8; pos];
        v.extend(vec![0u8; neg]);
        v
    }

    #[test]
    fn split_small_case() {
        let y = labels(2, 8);
        let (train, test) = stratified_split(&y, 0.5, &mut rng(1)).unwrap();
        assert_eq!(train.len(), 5);
        assert_eq!(test.len(), 5);
        assert_eq!(test.iter().filter(|&&i| y[i] == 1).count(), 1);
        assert_eq!(train.iter().filter(|&&i| y[i] == 1).count(), 1);
        assert!(stratified_split(&labels(1, 9), 0.5, &mut rng(1)).is_err());
    }

    #[test]
    fn archive_sized_split() {
        let y = labels(4019, 80362 - 4019);
        let (train, test) = stratified_split(&y, 0.33, &mut rng(3)).unwrap();
        assert!((test.len() as i64 - 26520).abs() <= 1);
        assert_eq!(train.len() + test.len(), 80362);
        let rate = |idx: &[usize]| idx.iter().filter(|&&i| y[i] == 1).count() as f64 / idx.len() as f64;
        assert!((rate(&train) - rate(&test)).abs() <= 1.0 / 4019.0);
    }

    #[test]
    fn undersample_examples() {
        let y = labels(5, 95);
        let a = random_undersample(&y, 1.0, &mut rng(0)).unwrap();
        assert_eq!(a.len(), 10);
        let b = random_undersample(&y, 0.5, &mut rng(0)).unwrap();
        assert_eq!(b.iter().filter(|&&i| y[i] == 0).count(), 10);
        assert_eq!(b.iter().filter(|&&i| y[i] == 1).count(), 5);
        let sub: Vec<u8> = a.iter().map(|&i| y[i]).collect();
        let again = random_undersample(&sub, 1.0, &mut rng(9)).unwrap();
        assert_eq!(again, (0..10).collect::<Vec<_>>());
        assert!(random_undersample(&labels(5, 6), 0.5, &mut rng(0)).is_err());
    }

    #[test]
    fn balanced_weights() {
        let w = ClassWeight::Balanced.weights(&labels(1, 3));
        assert_eq!(w, [4.0 / 6.0, 2.0]);
        assert_eq!(ClassWeight::None.weights(&[0, 1]), [1.0, 1.0]);
    }

    proptest! {
        #[test]
        fn split_is_a_stratified_partition(pos in 2usize..40, neg in 2usize..200, f in 0.05f64..0.95, seed in any::<u64>()) {
            let y = labels(pos, neg);
            let (train, test) = stratified_split(&y, f, &mut rng(seed)).unwrap();
            let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
            let rate = |idx: &[usize]| idx.iter().filter(|&&i| y[i] == 1).count() as f64 / idx.len() as f64;
            let rounding = 1.0 / test.len() as f64 + 1.0 / train.len() as f64;
            let bound = (1.0 / pos.min(neg) as f64).max(rounding);
            prop_assert!((rate(&train) - rate(&test)).abs() <= bound + 1e-12);
            prop_assert_eq!(stratified_split(&y, f, &mut rng(seed)).unwrap(), (train, test));
        }

        #[test]
        fn undersample_hits_ratio(pos in 1usize..30, extra in 0usize..300, r in 0.05f64..=1.0, seed in any::<u64>()) {
            let y = labels(pos, pos + extra);
            match random_undersample(&y, r, &mut rng(seed)) {
                Ok(idx) => {
                    let kept_pos = idx.iter().filter(|&&i| y[i] == 1).count();
                    let kept_neg = idx.len() - kept_pos;
                    prop_assert_eq!(kept_pos, pos);
                    prop_assert_eq!(kept_neg, (pos as f64 / r).round() as usize);
                }
                Err(_) => prop_assert!((pos as f64 / r).round() as usize > pos + extra),
            }
        }

        #[test]
        fn kfold_partitions(n in 10usize..120, k in 2usize..6, seed in any::<u64>()) {
            let y: Vec<u8> = (0..n).map(|i| u8::from(i % 4 == 0)).collect();
            let folds = stratified_kfold(&y, k, &mut rng(seed)).unwrap();
            let mut all: Vec<usize> = folds.concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
