use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::derived_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldMode {
    #[default]
    SliceLevel,
    PatientGrouped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Sample index to fold index.
    pub assignments: Vec<usize>,
    pub mode: FoldMode,
    pub seed: u64,
}

impl FoldPlan {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// `(train, test)` sample indices for fold `fold`, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.assignments.len()).partition(|&i| self.assignments[i] != fold)
    }
}

pub fn make_folds(dataset: &Dataset, k: usize, mode: FoldMode, seed: u64) -> Result<FoldPlan> {
    let labels = dataset.labels();
    let patients: Vec<&str> = dataset.records().iter().map(|r| r.patient_id.as_str()).collect();
    make_folds_from(&labels, &patients, k, mode, seed)
}

/// Slice-level: each class is shuffled and dealt round-robin, continuing the
/// rotation across classes, so fold sizes differ by at most one. Grouped:
/// shuffled patients, largest first, each to the currently smallest fold.
pub fn make_folds_from(
    labels: &[u8],
    patients: &[&str],
    k: usize,
    mode: FoldMode,
    seed: u64,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if labels.len() != patients.len() {
        return Err(Error::Shape(format!(
            "{} labels for {} patient ids",
            labels.len(),
            patients.len()
        )));
    }
    let n = labels.len();
    let mut assignments = vec![0; n];
    match mode {
        FoldMode::SliceLevel => {
            if n < k {
                return Err(Error::InvalidArgument(format!("{n} samples cannot fill {k} folds")));
            }
            let mut next = 0;
            for class in [0u8, 1] {
                let mut idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
                idx.shuffle(&mut derived_rng(seed, "folds", class as u64));
                for i in idx {
                    assignments[i] = next % k;
                    next += 1;
                }
            }
        }
        FoldMode::PatientGrouped => {
            let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, p) in patients.iter().enumerate() {
                groups.entry(p).or_default().push(i);
            }
            if groups.len() < k {
                return Err(Error::InvalidArgument(format!(
                    "{} distinct patients cannot fill {k} folds",
                    groups.len()
                )));
            }
            let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
            groups.shuffle(&mut derived_rng(seed, "folds", 2));
            groups.sort_by_key(|g| std::cmp::Reverse(g.len()));
            let mut sizes = vec![0usize; k];
            for g in groups {
                let f = (0..k).min_by_key(|&f| sizes[f]).expect("k >= 2");
                sizes[f] += g.len();
                for i in g {
                    assignments[i] = f;
                }
            }
        }
    }
    Ok(FoldPlan { k, assignments, mode, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn eight_into_four() {
        let labels = [0, 1, 0, 1, 0, 1, 0, 1];
        let p = ids(8);
        let refs: Vec<&str> = p.iter().map(String::as_str).collect();
        let plan = make_folds_from(&labels, &refs, 4, FoldMode::SliceLevel, 3).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2, 2, 2, 2]);
    }

    #[test]
    fn stratified_balance() {
        let labels: Vec<u8> = (0..103).map(|i| (i % 3 == 0) as u8).collect();
        let p = ids(103);
        let refs: Vec<&str> = p.iter().map(String::as_str).collect();
        let plan = make_folds_from(&labels, &refs, 4, FoldMode::SliceLevel, 9).unwrap();
        let sizes = plan.fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for f in 0..4 {
            let pos = (0..103).filter(|&i| plan.assignments[i] == f && labels[i] == 1).count();
            assert!((8..=9).contains(&pos), "fold {f} has {pos} positives");
        }
    }

    #[test]
    fn grouped_keeps_patients_together() {
        let patients: Vec<String> = (0..40).map(|i| format!("p{}", i / 3)).collect();
        let refs: Vec<&str> = patients.iter().map(String::as_str).collect();
        let labels: Vec<u8> = (0..40).map(|i| ((i / 3) % 2) as u8).collect();
        let plan = make_folds_from(&labels, &refs, 4, FoldMode::PatientGrouped, 1).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                if refs[i] == refs[j] {
                    assert_eq!(plan.assignments[i], plan.assignments[j]);
                }
            }
        }
        assert!(plan.fold_sizes().iter().all(|&s| s > 0));
    }

    #[test]
    fn too_few_patients() {
        let refs = ["a", "a", "b", "b", "c"];
        let err = make_folds_from(&[0, 1, 0, 1, 0], &refs, 4, FoldMode::PatientGrouped, 0);
        assert!(err.is_err());
        assert!(make_folds_from(&[0, 1], &["a", "b"], 1, FoldMode::SliceLevel, 0).is_err());
    }

    #[test]
    fn split_partitions() {
        let labels = [0, 1, 0, 1, 0, 1];
        let p = ids(6);
        let refs: Vec<&str> = p.iter().map(String::as_str).collect();
        let plan = make_folds_from(&labels, &refs, 3, FoldMode::SliceLevel, 5).unwrap();
        let (train, test) = plan.split(1);
        assert_eq!(train.len() + test.len(), 6);
        assert!(test.iter().all(|&i| plan.assignments[i] == 1));
    }
}
