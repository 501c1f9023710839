use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;

use super::rational::Rational;

/// Finite formal linear combination of keys with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lin<K: Ord>(BTreeMap<K, Rational>);

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin(BTreeMap::new())
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: Rational) -> Self {
        let mut l = Self::new();
        l.add(k, c);
        l
    }

    pub fn basis(k: K) -> Self {
        Self::single(k, Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, Rational)>) -> Self {
        let mut l = Self::new();
        for (k, c) in terms {
            l.add(k, c);
        }
        l
    }

    pub fn add(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(k) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_ref(&mut self, k: &K, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if let Some(v) = self.0.get_mut(k) {
            *v += c;
            if v.is_zero() {
                self.0.remove(k);
            }
        } else {
            self.0.insert(k.clone(), c.clone());
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Lin<K>, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.0 {
            self.add_ref(k, &(v * c));
        }
    }

    pub fn add_lin(&mut self, other: &Lin<K>) {
        for (k, v) in &other.0 {
            self.add_ref(k, v);
        }
    }

    pub fn sub_lin(&mut self, other: &Lin<K>) {
        for (k, v) in &other.0 {
            self.add_ref(k, &-v);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Lin(self.0.iter().map(|(k, v)| (k.clone(), v * c)).collect())
    }

    pub fn neg(&self) -> Self {
        Lin(self.0.iter().map(|(k, v)| (k.clone(), -v)).collect())
    }

    pub fn plus(&self, other: &Lin<K>) -> Self {
        let mut out = self.clone();
        out.add_lin(other);
        out
    }

    pub fn minus(&self, other: &Lin<K>) -> Self {
        let mut out = self.clone();
        out.sub_lin(other);
        out
    }

    pub fn get(&self, k: &K) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn remove(&mut self, k: &K) -> Option<Rational> {
        self.0.remove(k)
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

    pub fn iter(&self) -> btree_map::Iter<'_, K, Rational> {
        self.0.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, Rational> {
        self.0.keys()
    }

    pub fn retain(&mut self, f: impl FnMut(&K, &mut Rational) -> bool) {
        self.0.retain(f)
    }

    /// Applies a linear map given on keys.
    pub fn map_linear<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<L>) -> Lin<L> {
        let mut out = Lin::new();
        for (k, c) in &self.0 {
            out.add_scaled(&f(k), c);
        }
        out
    }

    pub fn map_keys<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> L) -> Lin<L> {
        let mut out = Lin::new();
        for (k, c) in &self.0 {
            out.add(f(k), c.clone());
        }
        out
    }
}

impl<K: Ord> IntoIterator for Lin<K> {
    type Item = (K, Rational);
    type IntoIter = btree_map::IntoIter<K, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a, K: Ord> IntoIterator for &'a Lin<K> {
    type Item = (&'a K, &'a Rational);
    type IntoIter = btree_map::Iter<'a, K, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        Lin::from_terms(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn cancellation_removes_keys() {
        let mut l = Lin::single("a", q(1, 2));
        l.add("a", q(-1, 2));
        assert!(l.is_zero());
    }

    #[test]
    fn map_linear_expands() {
        let l = Lin::from_terms([(1u32, q(2, 1)), (2, q(1, 1))]);
        let m = l.map_linear(|&k| Lin::from_terms([(k % 2, q(1, 1))]));
        assert_eq!(m.get(&0), q(1, 1));
        assert_eq!(m.get(&1), q(2, 1));
    }
}
