use crate::error::{QdError, Result};
use crate::rng::RandomSource;
use crate::types::Individual;

/// A bounded multiset of individuals. When over capacity, uniformly random
/// members are evicted.
#[derive(Clone, Debug)]
pub struct UnstructuredArchive {
    max_size: Option<usize>,
    members: Vec<Individual>,
}

impl UnstructuredArchive {
    /// `None` means unlimited.
    pub fn new(max_size: Option<usize>) -> Result<Self> {
        if max_size == Some(0) {
            return Err(QdError::usage("archive max_size must be >= 1"));
        }
        Ok(Self {
            max_size,
            members: Vec::new(),
        })
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    /// Appends `add_count` candidates chosen uniformly at random (without
    /// replacement), then evicts random members down to capacity.
    pub fn insert_random(&mut self, candidates: &[Individual], add_count: usize, rng: &mut RandomSource) {
        let picks = rng.choose_distinct(candidates.len(), add_count);
        self.members.extend(picks.into_iter().map(|i| candidates[i].clone()));
        self.evict_to_capacity(rng);
    }

    /// Appends `ind` unconditionally, then evicts down to capacity.
    pub fn insert(&mut self, ind: Individual, rng: &mut RandomSource) {
        self.members.push(ind);
        self.evict_to_capacity(rng);
    }

    fn evict_to_capacity(&mut self, rng: &mut RandomSource) {
        if let Some(max) = self.max_size {
            while self.members.len() > max {
                let victim = rng.index(self.members.len());
                self.members.swap_remove(victim);
            }
        }
    }

    pub fn sample(&self, count: usize, rng: &mut RandomSource) -> Result<Vec<&Individual>> {
        if self.members.is_empty() {
            return Err(QdError::usage("cannot sample from an empty archive"));
        }
        Ok((0..count)
            .map(|_| &self.members[rng.index(self.members.len())])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Behavior, Genotype};

    fn ind(id: u64) -> Individual {
        Individual {
            id,
            genotype: Genotype::new(vec![id as f64]),
            behavior: Behavior::new(vec![id as f64]),
            born_at: 0,
        }
    }

    #[test]
    fn unbounded_grows() {
        let mut rng = RandomSource::new(1);
        let mut a = UnstructuredArchive::new(None).unwrap();
        let cands: Vec<_> = (0..30).map(ind).collect();
        a.insert_random(&cands, 10, &mut rng);
        assert_eq!(a.len(), 10);
        a.insert_random(&cands, 10, &mut rng);
        assert_eq!(a.len(), 20);
    }

    #[test]
    fn capacity_is_conserved() {
        let mut rng = RandomSource::new(2);
        let mut a = UnstructuredArchive::new(Some(200)).unwrap();
        let first: Vec<_> = (0..200).map(ind).collect();
        a.insert_random(&first, 200, &mut rng);
        assert_eq!(a.len(), 200);
        let fresh: Vec<_> = (1000..1010).map(ind).collect();
        a.insert_random(&fresh, 10, &mut rng);
        assert_eq!(a.len(), 200);
        // each new id was appended before eviction; some may be evicted again
        let added = a.members().iter().filter(|m| m.id >= 1000).count();
        assert!(added <= 10);
        let mut rng = RandomSource::new(3);
        let mut b = UnstructuredArchive::new(Some(200)).unwrap();
        for i in 0..500 {
            b.insert(ind(i), &mut rng);
            assert!(b.len() <= 200);
        }
    }

    #[test]
    fn eviction_is_uniform() {
        // 10 members, one insertion forces one eviction among 11 slots.
        let trials = 10_000;
        let mut counts = [0usize; 11];
        let mut rng = RandomSource::new(99);
        for _ in 0..trials {
            let mut a = UnstructuredArchive::new(Some(10)).unwrap();
            for i in 0..10 {
                a.members.push(ind(i));
            }
            a.insert(ind(10), &mut rng);
            let present: Vec<u64> = a.members().iter().map(|m| m.id).collect();
            let gone = (0..11).find(|i| !present.contains(i)).unwrap();
            counts[gone as usize] += 1;
        }
        let p = 1.0 / 11.0;
        let mean = trials as f64 * p;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 3.0 * sd + 1.0, "{counts:?}");
        }
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
        // 10 degrees of freedom, 99.9th percentile
        assert!(chi2 < 29.59, "chi2 {chi2}");
    }

    #[test]
    fn sampling() {
        let mut rng = RandomSource::new(5);
        let mut a = UnstructuredArchive::new(Some(5)).unwrap();
        assert!(a.sample(1, &mut rng).is_err());
        a.insert(ind(7), &mut rng);
        assert!(a.sample(4, &mut rng).unwrap().iter().all(|m| m.id == 7));
        for i in 0..5 {
            a.insert(ind(i), &mut rng);
        }
        let ids: Vec<u64> = a.members().iter().map(|m| m.id).collect();
        assert!(a.sample(50, &mut rng).unwrap().iter().all(|m| ids.contains(&m.id)));
        assert!(UnstructuredArchive::new(Some(0)).is_err());
    }
}
