use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Formal linear combination with keys kept sorted and zero terms dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lin<K: Ord>(BTreeMap<K, Scalar>);

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin(BTreeMap::new())
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn new() -> Self {
        Lin(BTreeMap::new())
    }

    pub fn term(key: K, coeff: Scalar) -> Self {
        let mut l = Lin::new();
        l.add_term(key, coeff);
        l
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.0.entry(key) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &coeff;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_lin(&mut self, other: &Lin<K>, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        for (k, c) in other.iter() {
            self.add_term(k.clone(), c * coeff);
        }
    }

    pub fn scaled(&self, coeff: &Scalar) -> Lin<K> {
        let mut out = Lin::new();
        out.add_lin(self, coeff);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Scalar> {
        self.0.iter()
    }

    pub fn get(&self, key: &K) -> Option<&Scalar> {
        self.0.get(key)
    }

    pub fn first(&self) -> Option<(&K, &Scalar)> {
        self.0.iter().next()
    }

    pub fn map_keys<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> Lin<L> {
        let mut out = Lin::new();
        for (k, c) in self.iter() {
            out.add_term(f(k), c.clone());
        }
        out
    }

    pub fn into_vec(self) -> Vec<(K, Scalar)> {
        self.0.into_iter().collect()
    }

    pub fn sub(&self, other: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out.add_lin(other, &Scalar::int(-1));
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Scalar)>>(iter: I) -> Self {
        let mut l = Lin::new();
        for (k, c) in iter {
            l.add_term(k, c);
        }
        l
    }
}

impl<'a, K: Ord> IntoIterator for &'a Lin<K> {
    type Item = (&'a K, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
