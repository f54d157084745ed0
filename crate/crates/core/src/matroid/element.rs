use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of an element in the ground set. Identity is positional: two ids
/// carrying equal vectors are still distinct (parallel) elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl ElementId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ElementId {
    fn from(i: usize) -> Self {
        ElementId(i as u32)
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sorted, duplicate-free set of element ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ElementSet(Vec<ElementId>);

impl ElementSet {
    pub fn new() -> Self {
        ElementSet(Vec::new())
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        ids.into_iter().map(ElementId::from).collect()
    }

    /// Builds a set from an already sorted, duplicate-free vector.
    /// Returns `None` when the input is not strictly increasing.
    pub fn from_sorted(v: Vec<ElementId>) -> Option<Self> {
        if v.windows(2).all(|w| w[0] < w[1]) {
            Some(ElementSet(v))
        } else {
            None
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn contains(&self, x: ElementId) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = ElementId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.0
    }

    /// Inserts `x`; returns false if it was already present.
    pub fn insert(&mut self, x: ElementId) -> bool {
        match self.0.binary_search(&x) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, x);
                true
            }
        }
    }

    /// Removes `x`; returns false if it was absent.
    pub fn remove(&mut self, x: ElementId) -> bool {
        match self.0.binary_search(&x) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, x: ElementId) -> Self {
        let mut s = self.clone();
        s.insert(x);
        s
    }

    pub fn without(&self, x: ElementId) -> Self {
        let mut s = self.clone();
        s.remove(x);
        s
    }

    pub fn union(&self, other: &ElementSet) -> Self {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &ElementSet) -> Self {
        ElementSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &ElementSet) -> Self {
        ElementSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }
}

impl FromIterator<ElementId> for ElementSet {
    fn from_iter<I: IntoIterator<Item = ElementId>>(iter: I) -> Self {
        let mut v: Vec<ElementId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ElementSet(v)
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = ElementId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, ElementId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

// Deserialization must re-establish the sortedness invariant.
impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<ElementId>::deserialize(d)?;
        ElementSet::from_sorted(v).ok_or_else(|| {
            serde::de::Error::custom("element set must be sorted and duplicate-free")
        })
    }
}
