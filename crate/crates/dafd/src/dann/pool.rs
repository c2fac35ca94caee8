//! Segment pools: the unit of data handed to training.

use std::collections::BTreeSet;

use crate::error::{DafdError, Result};
use crate::ingest::Class;
use crate::signal::{DomainTag, Segment};

/// An immutable set of segments sharing one domain tag, with per-class index
/// lists over the labeled members. Label visibility is decided at
/// construction: unlabeled pools drop their class labels so downstream code
/// cannot leak them into training.
#[derive(Debug, Clone)]
pub struct SegmentPool {
    segments: Vec<Segment>,
    domain: DomainTag,
    adl_indices: Vec<usize>,
    fall_indices: Vec<usize>,
}

impl SegmentPool {
    /// Pool that keeps labels (the labeled side of an experiment).
    pub fn labeled(segments: Vec<Segment>, domain: DomainTag) -> Result<Self> {
        if segments.iter().any(|s| s.label.is_none()) {
            return Err(DafdError::InvalidSpec(
                "labeled pool requires a label on every segment".into(),
            ));
        }
        Self::build(segments, domain)
    }

    /// Pool with all labels masked (the adaptation target).
    pub fn unlabeled(mut segments: Vec<Segment>, domain: DomainTag) -> Result<Self> {
        for s in &mut segments {
            s.label = None;
        }
        Self::build(segments, domain)
    }

    /// Pool restricted to ADL segments, then masked: the `DAFD_adl` target.
    /// Segments without a label are dropped along with the falls.
    pub fn adl_only(segments: Vec<Segment>, domain: DomainTag) -> Result<Self> {
        let adl: Vec<Segment> = segments
            .into_iter()
            .filter(|s| s.label == Some(Class::Adl))
            .collect();
        if adl.is_empty() {
            return Err(DafdError::InvalidSpec(
                "no target ADL segments available for dafd_adl".into(),
            ));
        }
        Self::unlabeled(adl, domain)
    }

    fn build(segments: Vec<Segment>, domain: DomainTag) -> Result<Self> {
        let mut adl = Vec::new();
        let mut fall = Vec::new();
        for (i, s) in segments.iter().enumerate() {
            if s.domain != domain {
                return Err(DafdError::InvalidSpec(format!(
                    "segment {} tagged {} in a {} pool",
                    s.trial_id, s.domain, domain
                )));
            }
            match s.label {
                Some(Class::Adl) => adl.push(i),
                Some(Class::Fall) => fall.push(i),
                None => {}
            }
        }
        Ok(SegmentPool {
            segments,
            domain,
            adl_indices: adl,
            fall_indices: fall,
        })
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn get(&self, index: usize) -> &Segment {
        &self.segments[index]
    }

    pub fn adl_indices(&self) -> &[usize] {
        &self.adl_indices
    }

    pub fn fall_indices(&self) -> &[usize] {
        &self.fall_indices
    }

    /// Count of the larger class among the labeled segments.
    pub fn majority_class_count(&self) -> usize {
        self.adl_indices.len().max(self.fall_indices.len())
    }

    /// Sorted unique subject ids.
    pub fn subject_ids(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.segments.iter().map(|s| s.subject_id.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }

    /// Splits into (kept, held-out) by subject membership, preserving the
    /// pool's label policy by construction.
    pub fn split_by_subjects(&self, held_out: &BTreeSet<String>) -> (SegmentPool, SegmentPool) {
        let (mut keep, mut held) = (Vec::new(), Vec::new());
        for s in &self.segments {
            if held_out.contains(&s.subject_id) {
                held.push(s.clone());
            } else {
                keep.push(s.clone());
            }
        }
        (
            Self::build(keep, self.domain).expect("subset of a valid pool"),
            Self::build(held, self.domain).expect("subset of a valid pool"),
        )
    }

    /// Splits by segment index: indices in `held_out` (deduplicated) go to the
    /// second pool.
    pub fn split_by_indices(&self, held_out: &BTreeSet<usize>) -> (SegmentPool, SegmentPool) {
        let (mut keep, mut held) = (Vec::new(), Vec::new());
        for (i, s) in self.segments.iter().enumerate() {
            if held_out.contains(&i) {
                held.push(s.clone());
            } else {
                keep.push(s.clone());
            }
        }
        (
            Self::build(keep, self.domain).expect("subset of a valid pool"),
            Self::build(held, self.domain).expect("subset of a valid pool"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(subject: &str, label: Option<Class>, domain: DomainTag) -> Segment {
        Segment {
            values: vec![[0.5, 0.5, 0.5]; 66],
            label,
            domain,
            subject_id: subject.into(),
            trial_id: format!("{subject}-x"),
            impact_index: 37,
        }
    }

    #[test]
    fn labeled_pool_partitions_by_class() {
        let segs = vec![
            segment("S01", Some(Class::Adl), DomainTag::Source),
            segment("S01", Some(Class::Fall), DomainTag::Source),
            segment("S02", Some(Class::Adl), DomainTag::Source),
        ];
        let pool = SegmentPool::labeled(segs, DomainTag::Source).unwrap();
        assert_eq!(pool.adl_indices(), &[0, 2]);
        assert_eq!(pool.fall_indices(), &[1]);
        assert_eq!(pool.majority_class_count(), 2);
        assert_eq!(pool.subject_ids(), vec!["S01".to_string(), "S02".to_string()]);
    }

    #[test]
    fn unlabeled_pool_masks_labels() {
        let segs = vec![segment("S01", Some(Class::Fall), DomainTag::Target)];
        let pool = SegmentPool::unlabeled(segs, DomainTag::Target).unwrap();
        assert!(pool.get(0).label.is_none());
        assert!(pool.fall_indices().is_empty());
    }

    #[test]
    fn adl_only_drops_falls_then_masks() {
        let segs = vec![
            segment("S01", Some(Class::Adl), DomainTag::Target),
            segment("S01", Some(Class::Fall), DomainTag::Target),
        ];
        let pool = SegmentPool::adl_only(segs, DomainTag::Target).unwrap();
        assert_eq!(pool.len(), 1);
        assert!(pool.get(0).label.is_none());
    }

    #[test]
    fn adl_only_with_no_adl_is_an_error() {
        let segs = vec![segment("S01", Some(Class::Fall), DomainTag::Target)];
        assert!(SegmentPool::adl_only(segs, DomainTag::Target).is_err());
    }

    #[test]
    fn wrong_domain_tag_is_rejected() {
        let segs = vec![segment("S01", Some(Class::Adl), DomainTag::Target)];
        assert!(SegmentPool::labeled(segs, DomainTag::Source).is_err());
    }

    #[test]
    fn subject_split_is_disjoint() {
        let segs = vec![
            segment("S01", Some(Class::Adl), DomainTag::Source),
            segment("S02", Some(Class::Adl), DomainTag::Source),
            segment("S03", Some(Class::Fall), DomainTag::Source),
        ];
        let pool = SegmentPool::labeled(segs, DomainTag::Source).unwrap();
        let held: BTreeSet<String> = ["S02".to_string()].into();
        let (keep, held_pool) = pool.split_by_subjects(&held);
        assert_eq!(keep.len(), 2);
        assert_eq!(held_pool.len(), 1);
        assert_eq!(held_pool.get(0).subject_id, "S02");
    }
}
