use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::rational::Rational;
use crate::vector::{Label, OffspringVector};

/// A finitely supported probability distribution on offspring vectors.
///
/// Only positive entries are stored, so "has positive probability" is the
/// same as "is a key". Probabilities sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    n: usize,
    entries: BTreeMap<OffspringVector, Rational>,
}

impl Distribution {
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = (OffspringVector, Rational)>,
    ) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for (c, p) in entries {
            if c.len() != n {
                return Err(Error::InvalidDistribution(format!(
                    "vector {c} has length {}, expected {n}",
                    c.len()
                )));
            }
            if !p.is_positive() || !p.is_probability() {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} of {c} is not in (0,1]"
                )));
            }
            if map.insert(c.clone(), p).is_some() {
                return Err(Error::InvalidDistribution(format!("duplicate entry {c}")));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Distribution { n, entries: map })
    }

    pub fn point_mass(c: OffspringVector) -> Self {
        let n = c.len();
        let mut entries = BTreeMap::new();
        entries.insert(c, Rational::one());
        Distribution { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, c: &OffspringVector) -> Option<&Rational> {
        self.entries.get(c)
    }

    pub fn prob(&self, c: &OffspringVector) -> Rational {
        self.entries.get(c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, c: &OffspringVector) -> bool {
        self.entries.contains_key(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OffspringVector, &Rational)> {
        self.entries.iter()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &OffspringVector> {
        self.entries.keys()
    }

    /// `A(ρ)`: labels appearing with positive count in some stored vector.
    pub fn active_labels(&self) -> BTreeSet<Label> {
        self.entries.keys().flat_map(|c| c.support()).collect()
    }

    /// `D(ρ)`: totals of the stored vectors.
    pub fn degrees(&self) -> BTreeSet<u32> {
        self.entries.keys().map(OffspringVector::total).collect()
    }

    /// Probability that the total equals `degree`.
    pub fn degree_mass(&self, degree: u32) -> Rational {
        self.entries
            .iter()
            .filter(|(c, _)| c.total() == degree)
            .map(|(_, p)| p)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[u32]) -> OffspringVector {
        OffspringVector::new(c.to_vec())
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn active_labels_examples() {
        // ν_{1,1} of the two-label running example
        let nu11 = Distribution::new(2, [(v(&[0, 1]), r(3, 7)), (v(&[1, 1]), r(4, 7))]).unwrap();
        assert_eq!(nu11.active_labels(), BTreeSet::from([1, 2]));
        let nu12 = Distribution::point_mass(v(&[0, 1]));
        assert_eq!(nu12.active_labels(), BTreeSet::from([2]));
        assert!(Distribution::point_mass(v(&[0, 0, 0])).active_labels().is_empty());
    }

    #[test]
    fn degrees_examples() {
        let nu22 = Distribution::new(2, [(v(&[0, 2]), r(2, 3)), (v(&[1, 0]), r(1, 3))]).unwrap();
        assert_eq!(nu22.degrees(), BTreeSet::from([1, 2]));
        assert_eq!(Distribution::point_mass(v(&[1, 1])).degrees(), BTreeSet::from([2]));
        assert!(matches!(
            Distribution::new(2, []),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(Distribution::new(2, [(v(&[1]), r(1, 1))]).is_err());
        assert!(Distribution::new(1, [(v(&[1]), r(1, 2))]).is_err());
        assert!(Distribution::new(1, [(v(&[1]), r(0, 1)), (v(&[2]), r(1, 1))]).is_err());
        assert!(Distribution::new(1, [(v(&[1]), r(1, 2)), (v(&[1]), r(1, 2))]).is_err());
    }
}
