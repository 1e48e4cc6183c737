//! Fixed-length edge bitsets used for witness bookkeeping.

use std::cmp::Ordering;

use crate::graph::{EdgeSet, Graph};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeBits(Box<[u64]>);

impl EdgeBits {
    pub fn empty(m: usize) -> Self {
        EdgeBits(vec![0; m.div_ceil(64).max(1)].into_boxed_slice())
    }

    pub fn set(&mut self, e: usize) {
        self.0[e / 64] |= 1 << (e % 64);
    }

    pub fn get(&self, e: usize) -> bool {
        self.0[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &EdgeBits) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= *b;
        }
    }

    pub fn union(&self, other: &EdgeBits) -> EdgeBits {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_edge_set(&self, g: &Graph) -> EdgeSet {
        EdgeSet::from_edge_ids(g, self.ids())
    }

    /// Tie-break order: the set containing the lowest edge on which the two
    /// differ comes first. On sets of equal size this is lexicographic order
    /// of the sorted edge lists.
    pub fn tie_order(&self, other: &EdgeBits) -> Ordering {
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            let x = a ^ b;
            if x != 0 {
                let low = x & x.wrapping_neg();
                return if a & low != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

/// Value paired with an optional witness, ordered by value then witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scored {
    pub cost: u64,
    pub witness: Option<EdgeBits>,
}

impl Scored {
    /// True when `self` should replace `incumbent`.
    pub fn beats(&self, incumbent: &Scored) -> bool {
        match self.cost.cmp(&incumbent.cost) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match (&self.witness, &incumbent.witness) {
                (Some(a), Some(b)) => a.tie_order(b) == Ordering::Less,
                _ => false,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_order_is_lexicographic_on_equal_sizes() {
        let mk = |ids: &[usize]| {
            let mut b = EdgeBits::empty(130);
            for &i in ids {
                b.set(i);
            }
            b
        };
        assert_eq!(mk(&[0, 5]).tie_order(&mk(&[1, 2])), Ordering::Less);
        assert_eq!(mk(&[1, 70]).tie_order(&mk(&[1, 65])), Ordering::Greater);
        assert_eq!(mk(&[128]).tie_order(&mk(&[128])), Ordering::Equal);
        let u = mk(&[3]).union(&mk(&[100]));
        assert_eq!(u.ids().collect::<Vec<_>>(), vec![3, 100]);
        assert_eq!(u.count(), 2);
        assert!(u.get(100) && !u.get(99));
    }
}
