//! Leave-subjects-out cross-validation: subjects shuffled by seed and dealt
//! round-robin into 5 groups; each group serves as the test fold once.

use rand::seq::SliceRandom;

use crate::error::{DafdError, Result};
use crate::rng::stream;

pub const FOLD_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    groups: Vec<Vec<String>>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn test_subjects(&self, fold: usize) -> &[String] {
        &self.groups[fold]
    }

    pub fn train_subjects(&self, fold: usize) -> Vec<String> {
        self.groups
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != fold)
            .flat_map(|(_, g)| g.iter().cloned())
            .collect()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }
}

/// Deterministic 5-group plan over the given subjects (order-insensitive:
/// ids are sorted and deduplicated before the seeded shuffle).
pub fn lsocv_folds(subject_ids: &[String], seed: u64) -> Result<FoldPlan> {
    let mut ids: Vec<String> = subject_ids.to_vec();
    ids.sort();
    ids.dedup();
    if ids.len() < FOLD_COUNT {
        return Err(DafdError::InvalidArgument(format!(
            "leave-subjects-out needs at least {FOLD_COUNT} subjects, got {}",
            ids.len()
        )));
    }
    let mut rng = stream(seed, 0x0f01d);
    ids.shuffle(&mut rng);
    let mut groups = vec![Vec::new(); FOLD_COUNT];
    for (i, id) in ids.into_iter().enumerate() {
        groups[i % FOLD_COUNT].push(id);
    }
    Ok(FoldPlan { groups, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn subjects(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("S{i:02}")).collect()
    }

    #[test]
    fn seventeen_subjects_split_4_4_3_3_3() {
        let plan = lsocv_folds(&subjects(17), 1).unwrap();
        let mut sizes = plan.group_sizes();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![4, 4, 3, 3, 3]);
    }

    #[test]
    fn twelve_subjects_split_3_3_2_2_2() {
        let plan = lsocv_folds(&subjects(12), 1).unwrap();
        let mut sizes = plan.group_sizes();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![3, 3, 2, 2, 2]);
    }

    #[test]
    fn groups_partition_the_subject_set() {
        let ids = subjects(13);
        let plan = lsocv_folds(&ids, 9).unwrap();
        let mut seen = BTreeSet::new();
        for fold in 0..plan.k() {
            for s in plan.test_subjects(fold) {
                assert!(seen.insert(s.clone()), "{s} in two folds");
            }
        }
        assert_eq!(seen.len(), ids.len());
    }

    #[test]
    fn same_ids_and_seed_reproduce_the_plan() {
        let ids = subjects(9);
        let a = lsocv_folds(&ids, 7).unwrap();
        let mut shuffled = ids.clone();
        shuffled.reverse();
        let b = lsocv_folds(&shuffled, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn train_and_test_subjects_are_disjoint() {
        let plan = lsocv_folds(&subjects(11), 3).unwrap();
        for fold in 0..plan.k() {
            let test: BTreeSet<_> = plan.test_subjects(fold).iter().collect();
            for s in plan.train_subjects(fold) {
                assert!(!test.contains(&s));
            }
        }
    }

    #[test]
    fn fewer_than_five_subjects_is_an_error() {
        assert!(lsocv_folds(&subjects(4), 0).is_err());
    }
}
