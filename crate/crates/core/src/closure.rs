//! Enumeration of the sequential closure `S = A⁺/Q` of a machine.
//!
//! Elements are discovered breadth first by word length, so the element order
//! is canonical and each element's witness word is the shortest word that
//! produces it, ties broken lexicographically by generator order.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{Machine, Transform};

pub const DEFAULT_CLOSURE_LIMIT: usize = 1_000_000;

/// Closures up to this size carry a precomputed Cayley table.
pub const CAYLEY_TABLE_LIMIT: usize = 2048;

#[derive(Clone, Debug)]
pub struct SemigroupClosure {
    n: usize,
    labels: Vec<String>,
    elements: Vec<Transform>,
    index: HashMap<Transform, usize>,
    /// `right[x * |A| + g]` is the index of `x` followed by generator `g`.
    right: Vec<u32>,
    /// Parent pointer into the BFS tree: (prefix element, last generator).
    /// `u32::MAX` as prefix marks a length-one word.
    parent: Vec<(u32, u32)>,
    generator_indices: Vec<usize>,
    cayley: Option<Vec<u32>>,
}

impl SemigroupClosure {
    /// Breadth-first closure of the machine's generators, capped at `limit` elements.
    pub fn generate(machine: &Machine, limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidLimit);
        }
        let gens: Vec<&Transform> = machine.transforms().collect();
        let k = gens.len();
        let mut elements: Vec<Transform> = Vec::new();
        let mut index: HashMap<Transform, usize> = HashMap::new();
        let mut parent = Vec::new();
        let mut generator_indices = Vec::with_capacity(k);

        for (g, t) in gens.iter().enumerate() {
            let idx = match index.get(*t) {
                Some(&idx) => idx,
                None => {
                    if elements.len() == limit {
                        return Err(Error::BudgetExceeded {
                            limit,
                            partial: elements.len(),
                        });
                    }
                    index.insert((*t).clone(), elements.len());
                    elements.push((*t).clone());
                    parent.push((u32::MAX, g as u32));
                    elements.len() - 1
                }
            };
            generator_indices.push(idx);
        }
        let mut right: Vec<u32> = Vec::new();
        let mut cursor = 0;
        while cursor < elements.len() {
            for (g, t) in gens.iter().enumerate() {
                let next = elements[cursor].then(t);
                let idx = match index.get(&next) {
                    Some(&idx) => idx,
                    None => {
                        if elements.len() == limit {
                            return Err(Error::BudgetExceeded {
                                limit,
                                partial: elements.len(),
                            });
                        }
                        index.insert(next.clone(), elements.len());
                        elements.push(next);
                        parent.push((cursor as u32, g as u32));
                        elements.len() - 1
                    }
                };
                right.push(idx as u32);
            }
            cursor += 1;
        }

        let mut closure = SemigroupClosure {
            n: machine.n(),
            labels: machine.labels().map(str::to_owned).collect(),
            elements,
            index,
            right,
            parent,
            generator_indices,
            cayley: None,
        };
        if closure.len() <= CAYLEY_TABLE_LIMIT {
            closure.cayley = Some(closure.build_cayley());
        }
        Ok(closure)
    }

    fn build_cayley(&self) -> Vec<u32> {
        let size = self.len();
        let mut table = Vec::with_capacity(size * size);
        for x in &self.elements {
            for y in &self.elements {
                table.push(self.index[&x.then(y)] as u32);
            }
        }
        table
    }

    /// Number of states the elements act on.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Transform] {
        &self.elements
    }

    pub fn element(&self, x: usize) -> &Transform {
        &self.elements[x]
    }

    pub fn index_of(&self, t: &Transform) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn generator_labels(&self) -> &[String] {
        &self.labels
    }

    /// Element index of each generator, in generator order.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    /// Index of `x` followed by generator number `g`.
    pub fn right_by_generator(&self, x: usize, g: usize) -> usize {
        self.right[x * self.labels.len() + g] as usize
    }

    /// Index of `xy`.
    pub fn product(&self, x: usize, y: usize) -> usize {
        match &self.cayley {
            Some(table) => table[x * self.len() + y] as usize,
            None => self.index[&self.elements[x].then(&self.elements[y])],
        }
    }

    /// Row-major `|S| × |S|` table of product indices, present for small closures.
    pub fn cayley_table(&self) -> Option<&[u32]> {
        self.cayley.as_deref()
    }

    pub fn checked_index(&self, x: usize) -> Result<usize> {
        if x < self.len() {
            Ok(x)
        } else {
            Err(Error::NoSuchElement {
                index: x,
                size: self.len(),
            })
        }
    }

    /// Shortest generator word for `x`, as generator numbers.
    pub fn witness_word(&self, x: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = x;
        loop {
            let (prefix, g) = self.parent[cur];
            word.push(g as usize);
            if prefix == u32::MAX {
                break;
            }
            cur = prefix as usize;
        }
        word.reverse();
        word
    }

    /// Witness word spelled with the input labels.
    pub fn witness_labels(&self, x: usize) -> Vec<&str> {
        self.witness_word(x)
            .into_iter()
            .map(|g| self.labels[g].as_str())
            .collect()
    }

    pub fn rank_spectrum(&self) -> RankSpectrum {
        RankSpectrum::from_ranks(self.elements.iter().map(Transform::rank))
    }

    pub fn is_constant_rank(&self) -> bool {
        let spectrum = self.rank_spectrum();
        spectrum.min_rank == spectrum.max_rank
    }

    /// All elements of rank at most `k`, in canonical order. This set is always an ideal.
    pub fn ideal_at_most(&self, k: usize) -> Vec<usize> {
        let ideal: Vec<usize> = (0..self.len())
            .filter(|&x| self.elements[x].rank() <= k)
            .collect();
        debug_assert!(self.is_ideal(&ideal));
        ideal
    }

    /// Elements of minimum rank.
    pub fn minimal_rank_ideal(&self) -> Vec<usize> {
        self.ideal_at_most(self.rank_spectrum().min_rank)
    }

    /// Checks `SZ ⊆ Z` and `ZS ⊆ Z`; multiplying by generators suffices.
    pub fn is_ideal(&self, subset: &[usize]) -> bool {
        let mut member = vec![false; self.len()];
        for &z in subset {
            member[z] = true;
        }
        subset.iter().all(|&z| {
            self.generator_indices
                .iter()
                .all(|&g| member[self.product(z, g)] && member[self.product(g, z)])
        })
    }

    /// Smallest ideal containing `x`: `S¹xS¹`, sorted.
    pub fn principal_ideal(&self, x: usize) -> Vec<usize> {
        let mut member = vec![false; self.len()];
        let mut ideal = self.grow_ideal(x, &mut member, |_| false).1;
        ideal.sort_unstable();
        ideal
    }

    /// Closes `{x}` under multiplication by generators on both sides. Stops early
    /// (returning `true`) as soon as an element satisfying `stop` is reached.
    fn grow_ideal(
        &self,
        x: usize,
        member: &mut [bool],
        stop: impl Fn(usize) -> bool,
    ) -> (bool, Vec<usize>) {
        let mut found = vec![x];
        member[x] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(z) = queue.pop_front() {
            if stop(z) {
                return (true, found);
            }
            for &g in &self.generator_indices {
                for w in [self.product(z, g), self.product(g, z)] {
                    if !member[w] {
                        member[w] = true;
                        found.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        (false, found)
    }

    /// True iff every principal ideal is the whole closure.
    pub fn is_simple(&self) -> bool {
        let size = self.len();
        // full[y]: the principal ideal of y is known to be all of S
        let mut full = vec![false; size];
        let mut member = vec![false; size];
        for x in 0..size {
            if full[x] {
                continue;
            }
            let (hit, found) = self.grow_ideal(x, &mut member, |z| full[z]);
            for &z in &found {
                member[z] = false;
            }
            if !hit && found.len() < size {
                return false;
            }
            // ideal(x) contains an element with full ideal, or is itself all of S
            full[x] = true;
        }
        true
    }
}

impl PartialEq for SemigroupClosure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.elements == other.elements
    }
}

/// Histogram of element ranks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankSpectrum {
    pub counts: BTreeMap<usize, usize>,
    pub min_rank: usize,
    pub max_rank: usize,
}

impl RankSpectrum {
    pub fn from_ranks(ranks: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = BTreeMap::new();
        for r in ranks {
            *counts.entry(r).or_insert(0) += 1;
        }
        let min_rank = counts.keys().next().copied().unwrap_or(0);
        let max_rank = counts.keys().next_back().copied().unwrap_or(0);
        RankSpectrum {
            counts,
            min_rank,
            max_rank,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

impl fmt::Display for RankSpectrum {
    /// Highest rank first, e.g. `{2:1, 1:1}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (rank, count)) in self.counts.iter().rev().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{rank}:{count}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn machine(n: usize, images: &[&[usize]]) -> Machine {
        Machine::from_images(n, images).unwrap()
    }

    fn closure(n: usize, images: &[&[usize]]) -> SemigroupClosure {
        SemigroupClosure::generate(&machine(n, images), DEFAULT_CLOSURE_LIMIT).unwrap()
    }

    fn idx(s: &SemigroupClosure, img: &[usize]) -> usize {
        s.index_of(&Transform::new(img.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn basic_closure_sizes() {
        assert_eq!(closure(3, &[&[0, 1, 1], &[0, 1, 0]]).len(), 2);
        let c2 = closure(2, &[&[1, 0]]);
        assert_eq!(c2.len(), 2);
        assert!(c2.index_of(&Transform::identity(2)).is_some());
        assert_eq!(closure(3, &[&[1, 0, 2], &[1, 2, 0], &[0, 0, 2]]).len(), 27);
    }

    #[test]
    fn witness_words_are_shortlex() {
        let s = closure(3, &[&[1, 0, 2], &[1, 2, 0]]);
        assert_eq!(s.len(), 6);
        for x in 0..s.len() {
            let word = s.witness_word(x);
            let mut t = s.element(s.generator_indices()[word[0]]).clone();
            for &g in &word[1..] {
                t = t.then(s.element(s.generator_indices()[g]));
            }
            assert_eq!(&t, s.element(x));
        }
        // identity = swap·swap, found at length 2 before any longer word
        let id = s.index_of(&Transform::identity(3)).unwrap();
        assert_eq!(s.witness_word(id), vec![0, 0]);
        // word lengths never decrease along canonical order
        let lens: Vec<usize> = (0..s.len()).map(|x| s.witness_word(x).len()).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn duplicate_generators_share_an_element() {
        let s = closure(2, &[&[1, 0], &[1, 0]]);
        assert_eq!(s.generator_indices(), &[0, 0]);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let m = machine(3, &[&[1, 0, 2], &[1, 2, 0], &[0, 0, 2]]);
        assert_eq!(
            SemigroupClosure::generate(&m, 10).unwrap_err(),
            Error::BudgetExceeded {
                limit: 10,
                partial: 10
            }
        );
        assert_eq!(SemigroupClosure::generate(&m, 27).unwrap().len(), 27);
        assert_eq!(
            SemigroupClosure::generate(&m, 0).unwrap_err(),
            Error::InvalidLimit
        );
    }

    #[test]
    fn cayley_matches_composition() {
        let s = closure(3, &[&[1, 0, 2], &[1, 2, 0], &[0, 0, 2]]);
        assert!(s.cayley_table().is_some());
        for x in 0..s.len() {
            for y in 0..s.len() {
                assert_eq!(s.element(s.product(x, y)), &s.element(x).then(s.element(y)));
            }
            for g in 0..3 {
                assert_eq!(
                    s.right_by_generator(x, g),
                    s.product(x, s.generator_indices()[g])
                );
            }
        }
    }

    #[test]
    fn spectra() {
        let c2 = closure(2, &[&[1, 0]]);
        assert_eq!(c2.rank_spectrum().counts, BTreeMap::from([(2, 2)]));
        let u2 = closure(3, &[&[0, 0, 1]]);
        assert_eq!(u2.rank_spectrum().counts, BTreeMap::from([(2, 1), (1, 1)]));
        assert_eq!(u2.rank_spectrum().to_string(), "{2:1, 1:1}");
        let r2 = closure(2, &[&[1, 1], &[0, 0]]);
        assert_eq!(r2.rank_spectrum().counts, BTreeMap::from([(1, 2)]));
        assert_eq!(r2.rank_spectrum().total(), 2);
    }

    #[test]
    fn ideals_by_rank() {
        let u2 = closure(3, &[&[0, 0, 1]]);
        let zero = idx(&u2, &[0, 0, 0]);
        assert_eq!(u2.ideal_at_most(1), vec![zero]);
        assert!(u2.is_ideal(&[zero]));
        assert_eq!(u2.ideal_at_most(2).len(), u2.len());
        let c2 = closure(2, &[&[1, 0]]);
        assert!(c2.ideal_at_most(1).is_empty());
    }

    #[test]
    fn principal_ideals() {
        let s3 = closure(3, &[&[1, 0, 2], &[1, 2, 0]]);
        for x in 0..s3.len() {
            assert_eq!(s3.principal_ideal(x).len(), 6);
        }
        let h2 = closure(2, &[&[0, 1], &[0, 0]]);
        let zero = idx(&h2, &[0, 0]);
        assert_eq!(h2.principal_ideal(zero), vec![zero]);
        let u2 = closure(3, &[&[0, 0, 1]]);
        let g = u2.generator_indices()[0];
        assert_eq!(u2.principal_ideal(g).len(), 2);
    }

    #[test]
    fn simplicity_of_basic_machines() {
        assert!(closure(3, &[&[0, 1, 1], &[0, 1, 0]]).is_simple());
        assert!(closure(2, &[&[1, 1], &[0, 0]]).is_simple());
        assert!(closure(2, &[&[1, 0]]).is_simple());
        assert!(!closure(3, &[&[0, 0, 1]]).is_simple());
        assert!(!closure(2, &[&[0, 1], &[0, 0]]).is_simple());
        assert!(closure(4, &[&[1, 2, 3, 0], &[1, 0, 2, 3]]).is_simple());
    }

    #[test]
    fn constant_rank_flags() {
        assert!(closure(2, &[&[1, 1], &[0, 0]]).is_constant_rank());
        assert!(!closure(3, &[&[0, 0, 1]]).is_constant_rank());
        assert!(closure(3, &[&[0, 1, 2]]).is_constant_rank());
    }

    #[test]
    fn large_closure_without_table() {
        // full transformation monoid on 5 states has 3125 elements
        let s = closure(
            5,
            &[&[1, 0, 2, 3, 4], &[1, 2, 3, 4, 0], &[0, 0, 2, 3, 4]],
        );
        assert_eq!(s.len(), 3125);
        assert!(s.cayley_table().is_none());
        let a = s.generator_indices()[1];
        assert_eq!(s.element(s.product(a, a)), &s.element(a).power(2));
        assert!(!s.is_simple());
    }
}
