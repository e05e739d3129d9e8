//! Small dynamic bitset over a fixed universe `0..nbits`.

use std::fmt;

/// Set of indices below a fixed universe size. Word storage is canonical:
/// trailing bits past `nbits` are always zero, so `Eq`/`Hash` are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSet {
    nbits: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(nbits: usize) -> Self {
        BitSet {
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    pub fn full(nbits: usize) -> Self {
        let mut s = BitSet::new(nbits);
        for i in 0..nbits {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(nbits: usize, idx: &[usize]) -> Self {
        let mut s = BitSet::new(nbits);
        for &i in idx {
            s.insert(i);
        }
        s
    }

    pub fn singleton(nbits: usize, i: usize) -> Self {
        Self::from_indices(nbits, &[i])
    }

    pub fn universe(&self) -> usize {
        self.nbits
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.nbits);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.nbits);
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.nbits, other.nbits);
        BitSet {
            nbits: self.nbits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.nbits, other.nbits);
        BitSet {
            nbits: self.nbits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn difference(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.nbits, other.nbits);
        BitSet {
            nbits: self.nbits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn complement(&self) -> BitSet {
        let mut out = BitSet::new(self.nbits);
        for i in 0..self.nbits {
            if !self.contains(i) {
                out.insert(i);
            }
        }
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.nbits, other.nbits);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(move |&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.iter().next()
    }
}

/// Orders first by cardinality, then by the ascending index sequence.
/// Used wherever a deterministic listing of subsets is reported.
pub fn set_order(a: &BitSet, b: &BitSet) -> std::cmp::Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.indices().cmp(&b.indices()))
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = BitSet::new(130);
        s.insert(0);
        s.insert(129);
        assert!(s.contains(0) && s.contains(129) && !s.contains(64));
        assert_eq!(s.len(), 2);
        let t = BitSet::from_indices(130, &[64, 129]);
        assert_eq!(s.union(&t).len(), 3);
        assert_eq!(s.intersection(&t).indices(), vec![129]);
        assert!(t.is_subset(&s.union(&t)));
        assert_eq!(s.difference(&t).indices(), vec![0]);
    }

    #[test]
    fn order_is_by_size_then_lex() {
        let a = BitSet::from_indices(4, &[1, 3]);
        let b = BitSet::from_indices(4, &[2, 3]);
        let c = BitSet::from_indices(4, &[0]);
        assert_eq!(set_order(&c, &a), std::cmp::Ordering::Less);
        assert_eq!(set_order(&a, &b), std::cmp::Ordering::Less);
    }
}
