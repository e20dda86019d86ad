//! Idempotent structure of a closure: ordering, L/R/D equivalence, the
//! idempotent grid, rectangular bands and maximal subgroups.
//!
//! Conventions follow the left-to-right product of [`SemigroupClosure::product`].
//! For idempotents `a`, `b`:
//! - `a L b` when `ab = a` and `ba = b` (same column of the grid),
//! - `a R b` when `ab = b` and `ba = a` (same row of the grid),
//! - `a D b` when they are joined by an alternating chain of the two.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::closure::SemigroupClosure;
use crate::error::{Error, Result};

/// Idempotent elements in canonical order.
pub fn idempotents(s: &SemigroupClosure) -> Vec<usize> {
    (0..s.len()).filter(|&x| s.product(x, x) == x).collect()
}

fn require_idempotent(s: &SemigroupClosure, e: usize) -> Result<()> {
    s.checked_index(e)?;
    if s.product(e, e) == e {
        Ok(())
    } else {
        Err(Error::NotIdempotent(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderRelation {
    Equal,
    /// `e ≥ z`: `ez = ze = z`.
    Above,
    /// `z ≥ e`.
    Below,
    /// Commuting but incomparable.
    Unordered,
    NonCommuting,
}

/// Natural partial order between two idempotents.
pub fn order_invariants(s: &SemigroupClosure, e: usize, z: usize) -> Result<OrderRelation> {
    require_idempotent(s, e)?;
    require_idempotent(s, z)?;
    let ez = s.product(e, z);
    let ze = s.product(z, e);
    Ok(if e == z {
        OrderRelation::Equal
    } else if ez != ze {
        OrderRelation::NonCommuting
    } else if ez == z {
        OrderRelation::Above
    } else if ez == e {
        OrderRelation::Below
    } else {
        OrderRelation::Unordered
    })
}

/// Both sides of "`z ≤ e` iff range(z) ⊆ range(e)" for a commuting pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeOrdering {
    pub ordered: bool,
    pub range_contained: bool,
}

impl RangeOrdering {
    pub fn is_consistent(&self) -> bool {
        self.ordered == self.range_contained
    }
}

pub fn check_range_ordering(s: &SemigroupClosure, e: usize, z: usize) -> Result<RangeOrdering> {
    require_idempotent(s, e)?;
    require_idempotent(s, z)?;
    let ez = s.product(e, z);
    if ez != s.product(z, e) {
        return Err(Error::NonCommuting(e, z));
    }
    let range_e = s.element(e).range();
    Ok(RangeOrdering {
        ordered: ez == z,
        range_contained: s.element(z).range().is_subset(&range_e),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equivalence {
    Left,
    Right,
    Diagonal,
    None,
}

fn left_equivalent(s: &SemigroupClosure, a: usize, b: usize) -> bool {
    s.product(a, b) == a && s.product(b, a) == b
}

fn right_equivalent(s: &SemigroupClosure, a: usize, b: usize) -> bool {
    s.product(a, b) == b && s.product(b, a) == a
}

/// Classifies a pair of idempotents. An idempotent is left-equivalent to itself.
pub fn equivalence(s: &SemigroupClosure, a: usize, b: usize) -> Result<Equivalence> {
    require_idempotent(s, a)?;
    require_idempotent(s, b)?;
    if left_equivalent(s, a, b) {
        return Ok(Equivalence::Left);
    }
    if right_equivalent(s, a, b) {
        return Ok(Equivalence::Right);
    }
    Ok(match equivalence_path(s, a, b) {
        Some(_) => Equivalence::Diagonal,
        None => Equivalence::None,
    })
}

/// Shortest chain `a = c0, c1, ..., ck = b` of idempotents with consecutive
/// entries L or R equivalent.
fn equivalence_path(s: &SemigroupClosure, a: usize, b: usize) -> Option<Vec<usize>> {
    let idem = idempotents(s);
    let mut parent: HashMap<usize, usize> = HashMap::from([(a, a)]);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            let mut path = vec![b];
            while *path.last().unwrap() != a {
                path.push(parent[path.last().unwrap()]);
            }
            path.reverse();
            return Some(path);
        }
        for &y in &idem {
            if !parent.contains_key(&y) && (left_equivalent(s, x, y) || right_equivalent(s, x, y)) {
                parent.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    None
}

/// Idempotents arranged by R-class (rows) and L-class (columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentGrid {
    pub idempotents: Vec<usize>,
    /// R-classes, in order of first appearance.
    pub rows: Vec<Vec<usize>>,
    /// L-classes, in order of first appearance.
    pub cols: Vec<Vec<usize>>,
    /// `cells[i][j]`: the idempotent in row `i` and column `j`, if any.
    pub cells: Vec<Vec<Option<usize>>>,
}

impl IdempotentGrid {
    pub fn build(s: &SemigroupClosure) -> Self {
        let idempotents = idempotents(s);
        let rows = classes(&idempotents, |a, b| right_equivalent(s, a, b));
        let cols = classes(&idempotents, |a, b| left_equivalent(s, a, b));
        let mut cells = vec![vec![None; cols.len()]; rows.len()];
        let mut row_of = HashMap::new();
        for (i, row) in rows.iter().enumerate() {
            for &e in row {
                row_of.insert(e, i);
            }
        }
        for (j, col) in cols.iter().enumerate() {
            for &e in col {
                // an idempotent both L- and R-related to another is equal to it
                cells[row_of[&e]][j] = Some(e);
            }
        }
        IdempotentGrid {
            idempotents,
            rows,
            cols,
            cells,
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    /// Every row meets every column in an idempotent.
    pub fn is_full(&self) -> bool {
        self.cells.iter().flatten().all(Option::is_some)
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<usize> {
        self.cells[row][col]
    }

    /// (row, column) of an idempotent.
    pub fn position(&self, e: usize) -> Option<(usize, usize)> {
        self.cells.iter().enumerate().find_map(|(i, row)| {
            row.iter()
                .position(|&c| c == Some(e))
                .map(|j| (i, j))
        })
    }
}

/// Greedy partition by an equivalence relation, classes in order of first member.
fn classes(items: &[usize], related: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for &x in items {
        match out.iter_mut().find(|class| related(class[0], x)) {
            Some(class) => class.push(x),
            None => out.push(vec![x]),
        }
    }
    out
}

/// Every element is idempotent and `aba = a` for all pairs.
pub fn is_rectangular_band(s: &SemigroupClosure) -> bool {
    (0..s.len()).all(|a| {
        s.product(a, a) == a && (0..s.len()).all(|b| s.product(s.product(a, b), a) == a)
    })
}

/// No two distinct elements commute.
pub fn is_anti_commutative(s: &SemigroupClosure) -> bool {
    (0..s.len()).all(|a| (a + 1..s.len()).all(|b| s.product(a, b) != s.product(b, a)))
}

pub fn is_all_idempotent(s: &SemigroupClosure) -> bool {
    (0..s.len()).all(|x| s.product(x, x) == x)
}

/// Every pair of idempotents is L, R or D equivalent.
pub fn idempotents_pairwise_equivalent(s: &SemigroupClosure) -> bool {
    // the L ∪ R graph is connected iff every pair is equivalent
    let idem = &idempotents(s);
    let Some(&start) = idem.first() else {
        return true;
    };
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in idem {
            if !seen.contains(&y) && (left_equivalent(s, x, y) || right_equivalent(s, x, y)) {
                seen.push(y);
                queue.push_back(y);
            }
        }
    }
    seen.len() == idem.len()
}

/// Checks that `x ↦ (row, column)` of the idempotent grid is an isomorphism
/// onto `Lm × Rn`, whose product is `(i, j)(k, l) = (i, l)`.
pub fn matches_band_reconstruction(s: &SemigroupClosure) -> bool {
    if !is_all_idempotent(s) {
        return false;
    }
    let grid = IdempotentGrid::build(s);
    if !grid.is_full() || grid.row_count() * grid.col_count() != s.len() {
        return false;
    }
    let coords: Vec<(usize, usize)> = (0..s.len())
        .map(|x| grid.position(x).expect("all elements are idempotent"))
        .collect();
    (0..s.len()).all(|x| {
        (0..s.len()).all(|y| coords[s.product(x, y)] == (coords[x].0, coords[y].1))
    })
}

/// Tail, period and generated idempotent of one element, computed in the closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementPeriodicity {
    pub tail: usize,
    pub period: usize,
    /// Index of the idempotent power.
    pub invariant: usize,
}

pub fn element_periodicity(s: &SemigroupClosure, x: usize) -> ElementPeriodicity {
    let mut position: HashMap<usize, usize> = HashMap::from([(x, 1)]);
    let mut powers = vec![x];
    loop {
        let next = s.product(*powers.last().expect("non-empty"), x);
        if let Some(&first) = position.get(&next) {
            let tail = first - 1;
            let period = powers.len() - tail;
            let invariant = powers[(tail / period + 1) * period - 1];
            return ElementPeriodicity {
                tail,
                period,
                invariant,
            };
        }
        position.insert(next, powers.len() + 1);
        powers.push(next);
    }
}

pub fn periodicity_report(s: &SemigroupClosure) -> Vec<ElementPeriodicity> {
    (0..s.len()).map(|x| element_periodicity(s, x)).collect()
}

/// Order, commutativity and element-order multiset of a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub order: usize,
    pub abelian: bool,
    /// element order → number of elements with that order
    pub element_orders: BTreeMap<usize, usize>,
}

/// The group of periodic elements that generate one idempotent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxSubgroup {
    pub identity: usize,
    /// Element indices in canonical order.
    pub members: Vec<usize>,
}

impl MaxSubgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Position of `x` within `members`.
    pub fn local_index(&self, x: usize) -> Option<usize> {
        self.members.binary_search(&x).ok()
    }

    /// Multiplication table on local indices; `None` if the members are not closed.
    pub fn table(&self, s: &SemigroupClosure) -> Option<Vec<Vec<usize>>> {
        self.members
            .iter()
            .map(|&x| {
                self.members
                    .iter()
                    .map(|&y| self.local_index(s.product(x, y)))
                    .collect()
            })
            .collect()
    }

    pub fn inverse(&self, s: &SemigroupClosure, x: usize) -> Option<usize> {
        self.members.iter().copied().find(|&y| {
            s.product(x, y) == self.identity && s.product(y, x) == self.identity
        })
    }

    /// Closure, two-sided identity and inverses.
    pub fn verify_axioms(&self, s: &SemigroupClosure) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::InvariantViolation(format!(
                "subgroup at idempotent {}: {what}",
                self.identity
            )))
        };
        if !self.contains(self.identity) {
            return fail("identity is not a member");
        }
        if self.table(s).is_none() {
            return fail("not closed under composition");
        }
        for &x in &self.members {
            if s.product(self.identity, x) != x || s.product(x, self.identity) != x {
                return fail("identity is not two-sided");
            }
            if self.inverse(s, x).is_none() {
                return fail("missing inverse");
            }
        }
        Ok(())
    }

    pub fn summary(&self, s: &SemigroupClosure) -> GroupSummary {
        let abelian = self.members.iter().all(|&x| {
            self.members
                .iter()
                .all(|&y| s.product(x, y) == s.product(y, x))
        });
        let mut element_orders = BTreeMap::new();
        for &x in &self.members {
            let order = element_periodicity(s, x).period;
            *element_orders.entry(order).or_insert(0) += 1;
        }
        GroupSummary {
            order: self.order(),
            abelian,
            element_orders,
        }
    }
}

/// Periodic elements whose powers reach `e`. In a simple closure this set is `eSe`,
/// which is checked.
pub fn max_subgroup(s: &SemigroupClosure, e: usize) -> Result<MaxSubgroup> {
    require_idempotent(s, e)?;
    let members: Vec<usize> = (0..s.len())
        .filter(|&x| {
            let p = element_periodicity(s, x);
            p.tail == 0 && p.invariant == e
        })
        .collect();
    let group = MaxSubgroup {
        identity: e,
        members,
    };
    group.verify_axioms(s)?;
    if s.is_simple() {
        let mut ese: Vec<usize> = (0..s.len())
            .map(|x| s.product(s.product(e, x), e))
            .collect();
        ese.sort_unstable();
        ese.dedup();
        if ese != group.members {
            return Err(Error::InvariantViolation(format!(
                "subgroup at idempotent {e} differs from eSe in a simple closure"
            )));
        }
    }
    Ok(group)
}

/// All maximal subgroups, one per idempotent, computed in one pass.
pub fn max_subgroups(s: &SemigroupClosure) -> Vec<MaxSubgroup> {
    let report = periodicity_report(s);
    let mut by_identity: BTreeMap<usize, Vec<usize>> = idempotents(s)
        .into_iter()
        .map(|e| (e, Vec::new()))
        .collect();
    for (x, p) in report.iter().enumerate() {
        if p.tail == 0 {
            by_identity.get_mut(&p.invariant).expect("idempotent").push(x);
        }
    }
    by_identity
        .into_iter()
        .map(|(identity, members)| MaxSubgroup { identity, members })
        .collect()
}

/// Isomorphism `G_b → G_a` between subgroups of equivalent idempotents:
/// `x ↦ ax` when `a L b`, `x ↦ xa` when `a R b`. Diagonal pairs are joined
/// by a chain of such steps and the step maps are composed. Returned as pairs
/// `(x, image)` over the members of `G_b`, after verifying it is a bijective homomorphism.
pub fn subgroup_isomorphism(
    s: &SemigroupClosure,
    a: usize,
    b: usize,
) -> Result<Vec<(usize, usize)>> {
    require_idempotent(s, a)?;
    require_idempotent(s, b)?;
    let path = equivalence_path(s, a, b).ok_or(Error::NotEquivalent(a, b))?;
    // compose the one-step maps G_{c(i+1)} -> G_{c(i)} from b back to a
    let step = |c: usize, d: usize, x: usize| {
        if left_equivalent(s, c, d) {
            s.product(c, x)
        } else {
            s.product(x, c)
        }
    };
    let map = |x: usize| {
        path.windows(2)
            .rev()
            .fold(x, |y, w| step(w[0], w[1], y))
    };
    let ga = max_subgroup(s, a)?;
    let gb = max_subgroup(s, b)?;
    let pairs: Vec<(usize, usize)> = gb.members.iter().map(|&x| (x, map(x))).collect();

    let violation = |what: &str| {
        Err(Error::InvariantViolation(format!(
            "map from subgroup at {b} to subgroup at {a}: {what}"
        )))
    };
    if ga.order() != gb.order() {
        return violation("orders differ");
    }
    let mut images: Vec<usize> = pairs.iter().map(|&(_, y)| y).collect();
    images.sort_unstable();
    if images != ga.members {
        return violation("not a bijection onto the target subgroup");
    }
    let image_of: HashMap<usize, usize> = pairs.iter().copied().collect();
    for &x in &gb.members {
        for &y in &gb.members {
            if image_of[&s.product(x, y)] != s.product(image_of[&x], image_of[&y]) {
                return violation("does not preserve composition");
            }
        }
    }
    Ok(pairs)
}
