//! Rees coordinates of a simple closure and its branch/reset/permutation components.
//!
//! Every element `x` of a simple closure lives in the subgroup of some idempotent
//! at grid cell `(i, j)`. With `e` the reference idempotent at `(0, 0)`, `x` gets
//! coordinates `(i, j, exe)` and products follow the law
//!
//! ```text
//! (i₁, j₁, g₁)(i₂, j₂, g₂) = (i₁, j₂, g₁ · P[j₁][i₂] · g₂)
//! ```
//!
//! with sandwich entries `P[j][i] = e₀ⱼ · eᵢ₀`. The law is checked over all pairs
//! before a decomposition is returned.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analyzer::{self, IdempotentGrid, MaxSubgroup};
use crate::closure::SemigroupClosure;
use crate::error::{Error, Result};
use crate::machine::{Machine, Transform};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReesCoord {
    pub row: usize,
    pub col: usize,
    /// Position within the reference group's members.
    pub group: usize,
}

impl fmt::Display for ReesCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.row, self.col, self.group)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    Direct,
    Semidirect,
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProductKind::Direct => "direct",
            ProductKind::Semidirect => "semidirect",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReesDecomposition {
    /// Number of rows: the size of the left-copy factor.
    pub m: usize,
    /// Number of columns: the size of the right-copy factor.
    pub n: usize,
    pub grid: IdempotentGrid,
    pub reference: usize,
    pub group: MaxSubgroup,
    /// Multiplication table of `group` on local indices.
    pub group_table: Vec<Vec<usize>>,
    /// Coordinates of every element, indexed by element.
    pub coords: Vec<ReesCoord>,
    /// `sandwich[j][i]`, `n × m`, as local group indices.
    pub sandwich: Vec<Vec<usize>>,
    pub kind: ProductKind,
    /// Whether every product of two idempotents is idempotent.
    pub idempotents_closed: bool,
}

impl ReesDecomposition {
    pub fn group_order(&self) -> usize {
        self.group.order()
    }

    pub fn group_identity(&self) -> usize {
        self.group
            .local_index(self.reference)
            .expect("reference idempotent is in its group")
    }

    pub fn group_mul(&self, g: usize, h: usize) -> usize {
        self.group_table[g][h]
    }

    pub fn group_inverse(&self, g: usize) -> usize {
        let id = self.group_identity();
        (0..self.group_order())
            .find(|&h| self.group_table[g][h] == id)
            .expect("group elements have inverses")
    }

    /// Product of two coordinate triples under the sandwich law.
    pub fn multiply(&self, x: ReesCoord, y: ReesCoord) -> ReesCoord {
        let p = self.sandwich[x.col][y.row];
        ReesCoord {
            row: x.row,
            col: y.col,
            group: self.group_mul(self.group_mul(x.group, p), y.group),
        }
    }

    /// Sandwich rescaled so row 0 and column 0 are the identity:
    /// `Q[j][i] = P[0][0] · P[j][0]⁻¹ · P[j][i] · P[0][i]⁻¹`.
    pub fn normalized_sandwich(&self) -> Vec<Vec<usize>> {
        let p = &self.sandwich;
        let p00 = p[0][0];
        (0..self.n)
            .map(|j| {
                let u = self.group_mul(p00, self.group_inverse(p[j][0]));
                (0..self.m)
                    .map(|i| {
                        let v = self.group_inverse(p[0][i]);
                        self.group_mul(self.group_mul(u, p[j][i]), v)
                    })
                    .collect()
            })
            .collect()
    }

    /// Element of the closure with the given coordinates.
    pub fn element_at(&self, c: ReesCoord) -> Option<usize> {
        self.coords.iter().position(|&d| d == c)
    }
}

/// Rees coordinates of a simple closure, verified against every product.
pub fn decompose(s: &SemigroupClosure) -> Result<ReesDecomposition> {
    if !s.is_simple() {
        return Err(Error::NotSimple {
            spectrum: s.rank_spectrum().to_string(),
        });
    }
    let grid = IdempotentGrid::build(s);
    if !grid.is_full() {
        return Err(Error::InvariantViolation(
            "idempotent grid of a simple closure is not full".into(),
        ));
    }
    let (m, n) = (grid.row_count(), grid.col_count());
    let reference = grid.cell(0, 0).expect("full grid");
    let group = analyzer::max_subgroup(s, reference)?;
    let group_table = group.table(s).ok_or_else(|| {
        Error::InvariantViolation("reference subgroup is not closed".into())
    })?;
    let local = |x: usize| {
        group.local_index(x).ok_or_else(|| {
            Error::InvariantViolation(format!("element {x} expected in the reference group"))
        })
    };

    let mut coords = Vec::with_capacity(s.len());
    for x in 0..s.len() {
        let p = analyzer::element_periodicity(s, x);
        if p.tail != 0 {
            return Err(Error::InvariantViolation(format!(
                "element {x} has a tail in a simple closure"
            )));
        }
        let (row, col) = grid
            .position(p.invariant)
            .expect("invariant powers are idempotents");
        let g = s.product(s.product(reference, x), reference);
        coords.push(ReesCoord {
            row,
            col,
            group: local(g)?,
        });
    }

    let mut sandwich = vec![vec![0; m]; n];
    for (j, row) in sandwich.iter_mut().enumerate() {
        for (i, entry) in row.iter_mut().enumerate() {
            let top = grid.cell(0, j).expect("full grid");
            let left = grid.cell(i, 0).expect("full grid");
            *entry = local(s.product(top, left))?;
        }
    }

    let idem = &grid.idempotents;
    let idempotents_closed = idem.iter().all(|&a| {
        idem.iter().all(|&b| {
            let ab = s.product(a, b);
            s.product(ab, ab) == ab
        })
    });

    let mut d = ReesDecomposition {
        m,
        n,
        grid,
        reference,
        group,
        group_table,
        coords,
        sandwich,
        kind: ProductKind::Direct,
        idempotents_closed,
    };
    let id = d.group_identity();
    if d.normalized_sandwich().iter().flatten().any(|&q| q != id) {
        d.kind = ProductKind::Semidirect;
    }

    if d.m * d.n * d.group_order() != s.len() {
        return Err(Error::InvariantViolation(format!(
            "|S| = {} but m·n·|G| = {}·{}·{}",
            s.len(),
            d.m,
            d.n,
            d.group_order()
        )));
    }
    for x in 0..s.len() {
        for y in 0..s.len() {
            let expected = d.multiply(d.coords[x], d.coords[y]);
            if d.coords[s.product(x, y)] != expected {
                return Err(Error::InvariantViolation(format!(
                    "product of elements {x} and {y} breaks the Rees law"
                )));
            }
        }
    }
    Ok(d)
}

/// The three component machines of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSet {
    pub branch: Machine,
    pub reset: Machine,
    pub permutation: Machine,
}

fn trivial_machine() -> Machine {
    Machine::new(1, [("0", Transform::identity(1))]).expect("valid")
}

/// `m` inputs on `m + 1` states: input `i` fixes `0..m` and sends state `m` to `i`.
pub fn branch_machine(m: usize) -> Machine {
    if m <= 1 {
        return trivial_machine();
    }
    let generators = (0..m).map(|i| {
        let mut image: Vec<usize> = (0..m).collect();
        image.push(i);
        (i.to_string(), Transform::new(image).expect("valid branch input"))
    });
    Machine::new(m + 1, generators).expect("valid branch machine")
}

/// `n` inputs on `n` states: input `j` resets every state to `j`.
pub fn reset_machine(n: usize) -> Machine {
    if n <= 1 {
        return trivial_machine();
    }
    let generators = (0..n).map(|j| (j.to_string(), Transform::constant(n, j)));
    Machine::new(n, generators).expect("valid reset machine")
}

/// A small generating set of a group given by its table, as local indices.
pub fn group_generators(table: &[Vec<usize>], identity: usize) -> Vec<usize> {
    let order = table.len();
    let mut generated = vec![false; order];
    generated[identity] = true;
    let mut chosen = Vec::new();
    for g in 0..order {
        if generated[g] {
            continue;
        }
        chosen.push(g);
        // close the generated set under right multiplication by chosen elements
        let mut frontier: Vec<usize> = (0..order).filter(|&x| generated[x]).collect();
        while let Some(x) = frontier.pop() {
            for &c in &chosen {
                let y = table[x][c];
                if !generated[y] {
                    generated[y] = true;
                    frontier.push(y);
                }
            }
        }
    }
    chosen
}

/// Right-regular representation: states are group elements, input `h` maps `g ↦ gh`.
pub fn permutation_machine(table: &[Vec<usize>], identity: usize) -> Machine {
    let order = table.len();
    let gens = group_generators(table, identity);
    if gens.is_empty() {
        return trivial_machine();
    }
    let generators = gens.into_iter().map(|h| {
        let image: Vec<usize> = (0..order).map(|g| table[g][h]).collect();
        (h.to_string(), Transform::new(image).expect("valid permutation"))
    });
    Machine::new(order, generators).expect("valid permutation machine")
}

pub fn synthesize_components(d: &ReesDecomposition) -> ComponentSet {
    ComponentSet {
        branch: branch_machine(d.m),
        reset: reset_machine(d.n),
        permutation: permutation_machine(&d.group_table, d.group_identity()),
    }
}

/// Confirms closure(branch) ≅ Lm, closure(reset) ≅ Rn and closure(permutation) ≅ G.
pub fn verify_components(d: &ReesDecomposition, c: &ComponentSet) -> Result<()> {
    let violation = |what: String| Err(Error::InvariantViolation(what));
    let limit = d.group_order().max(d.m).max(d.n) + 1;

    let branch = SemigroupClosure::generate(&c.branch, limit)?;
    if branch.len() != d.m
        || !(0..branch.len()).all(|x| (0..branch.len()).all(|y| branch.product(x, y) == x))
    {
        return violation(format!("branch closure is not a left-copy semigroup of order {}", d.m));
    }
    let reset = SemigroupClosure::generate(&c.reset, limit)?;
    if reset.len() != d.n
        || !(0..reset.len()).all(|x| (0..reset.len()).all(|y| reset.product(x, y) == y))
    {
        return violation(format!("reset closure is not a right-copy semigroup of order {}", d.n));
    }

    // each permutation is identified by where it sends the identity state
    let perm = SemigroupClosure::generate(&c.permutation, limit)?;
    if perm.len() != d.group_order() {
        return violation(format!(
            "permutation closure has order {}, group has order {}",
            perm.len(),
            d.group_order()
        ));
    }
    let start = d.group_identity();
    let phi: Vec<usize> = perm.elements().iter().map(|t| t.apply(start)).collect();
    let mut sorted = phi.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != perm.len() {
        return violation("permutation closure does not map onto the group".into());
    }
    for x in 0..perm.len() {
        for y in 0..perm.len() {
            if phi[perm.product(x, y)] != d.group_mul(phi[x], phi[y]) {
                return violation("permutation closure is not isomorphic to the group".into());
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub left: usize,
    pub right: usize,
    /// Coordinates the Rees law predicts for the product.
    pub expected: ReesCoord,
    /// Coordinates of the actual product in the closure.
    pub actual: ReesCoord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    /// Coordinates are a bijection onto all `m·n·|G|` triples.
    pub bijective: bool,
    pub pairs_checked: usize,
    pub first_mismatch: Option<Mismatch>,
}

/// Rebuilds the abstract semigroup on triples from the sandwich matrix and checks
/// that the coordinate map is an isomorphism from the closure onto it.
pub fn recompose_verify(s: &SemigroupClosure, d: &ReesDecomposition) -> VerificationReport {
    let k = d.group_order();
    let size = d.m * d.n * k;
    let encode = |c: ReesCoord| (c.row * d.n + c.col) * k + c.group;
    let decode = |t: usize| ReesCoord {
        row: t / (d.n * k),
        col: (t / k) % d.n,
        group: t % k,
    };

    // abstract table on encoded triples
    let mut table = vec![0usize; size * size];
    for a in 0..size {
        for b in 0..size {
            let (ca, cb) = (decode(a), decode(b));
            let p = d.sandwich[ca.col][cb.row];
            let g = d.group_mul(d.group_mul(ca.group, p), cb.group);
            table[a * size + b] = encode(ReesCoord {
                row: ca.row,
                col: cb.col,
                group: g,
            });
        }
    }

    let mut hit = vec![false; size];
    let mut bijective = s.len() == size && d.coords.len() == s.len();
    if bijective {
        for &c in &d.coords {
            let t = encode(c);
            if c.row >= d.m || c.col >= d.n || c.group >= k || hit[t] {
                bijective = false;
                break;
            }
            hit[t] = true;
        }
    }
    if !bijective {
        return VerificationReport {
            passed: false,
            bijective,
            pairs_checked: 0,
            first_mismatch: None,
        };
    }

    let phi: Vec<usize> = d.coords.iter().map(|&c| encode(c)).collect();
    let mut pairs_checked = 0;
    for x in 0..s.len() {
        for y in 0..s.len() {
            pairs_checked += 1;
            let expected = table[phi[x] * size + phi[y]];
            let actual = phi[s.product(x, y)];
            if expected != actual {
                return VerificationReport {
                    passed: false,
                    bijective,
                    pairs_checked,
                    first_mismatch: Some(Mismatch {
                        left: x,
                        right: y,
                        expected: decode(expected),
                        actual: decode(actual),
                    }),
                };
            }
        }
    }
    VerificationReport {
        passed: true,
        bijective,
        pairs_checked,
        first_mismatch: None,
    }
}

/// The five semigroups of order two, cyclic groups of prime order, or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasicType {
    /// Cyclic group of prime order `p`; `Cyclic(2)` is C2.
    Cyclic(usize),
    /// U2: `x² = 0` with `0` absorbing.
    Monotone,
    /// H2: two commuting, ordered idempotents.
    Hierarchy,
    /// L2: `ab = a`.
    LeftCopy,
    /// R2: `ab = b`.
    RightCopy,
    Other,
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicType::Cyclic(p) => write!(f, "C{p}"),
            BasicType::Monotone => f.write_str("U2"),
            BasicType::Hierarchy => f.write_str("H2"),
            BasicType::LeftCopy => f.write_str("L2"),
            BasicType::RightCopy => f.write_str("R2"),
            BasicType::Other => f.write_str("other"),
        }
    }
}

impl FromStr for BasicType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "U2" => BasicType::Monotone,
            "H2" => BasicType::Hierarchy,
            "L2" => BasicType::LeftCopy,
            "R2" => BasicType::RightCopy,
            "other" => BasicType::Other,
            _ => match s.strip_prefix('C').and_then(|p| p.parse().ok()) {
                Some(p) => BasicType::Cyclic(p),
                None => return Err(format!("unknown basic type `{s}`")),
            },
        })
    }
}

impl Serialize for BasicType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasicType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn classify_basic(s: &SemigroupClosure) -> BasicType {
    if s.len() == 2 {
        let (x, y) = (0, 1);
        let xy = s.product(x, y);
        let yx = s.product(y, x);
        let idem = [s.product(x, x) == x, s.product(y, y) == y];
        return match idem {
            [true, true] if xy == x && yx == y => BasicType::LeftCopy,
            [true, true] if xy == y && yx == x => BasicType::RightCopy,
            [true, true] => BasicType::Hierarchy,
            [true, false] | [false, true] => {
                let (e, g) = if idem[0] { (x, y) } else { (y, x) };
                if s.product(e, g) == g && s.product(g, e) == g {
                    BasicType::Cyclic(2)
                } else {
                    BasicType::Monotone
                }
            }
            [false, false] => BasicType::Other,
        };
    }
    if is_prime(s.len()) {
        let cyclic = (0..s.len()).any(|x| {
            let p = analyzer::element_periodicity(s, x);
            p.tail == 0 && p.period == s.len()
        });
        if cyclic {
            return BasicType::Cyclic(s.len());
        }
    }
    BasicType::Other
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::DEFAULT_CLOSURE_LIMIT;

    fn closure(n: usize, images: &[&[usize]]) -> SemigroupClosure {
        SemigroupClosure::generate(&Machine::from_images(n, images).unwrap(), DEFAULT_CLOSURE_LIMIT)
            .unwrap()
    }

    fn images(m: &Machine) -> Vec<Vec<usize>> {
        m.transforms().map(|t| t.image().to_vec()).collect()
    }

    #[test]
    fn r2_decomposition() {
        let s = closure(2, &[&[1, 1], &[0, 0]]);
        let d = decompose(&s).unwrap();
        assert_eq!((d.m, d.n, d.group_order()), (1, 2, 1));
        assert_eq!(d.kind, ProductKind::Direct);
        assert!(recompose_verify(&s, &d).passed);
    }

    #[test]
    fn l2_decomposition() {
        let s = closure(3, &[&[0, 1, 1], &[0, 1, 0]]);
        let d = decompose(&s).unwrap();
        assert_eq!((d.m, d.n, d.group_order()), (2, 1, 1));
        let c = synthesize_components(&d);
        verify_components(&d, &c).unwrap();
        assert_eq!(c.branch.n(), 3);
        assert_eq!(c.reset.n(), 1);
        assert_eq!(c.permutation.n(), 1);
    }

    #[test]
    fn cyclic_group_decomposition() {
        let s = closure(3, &[&[1, 2, 0]]);
        let d = decompose(&s).unwrap();
        assert_eq!((d.m, d.n, d.group_order()), (1, 1, 3));
        assert_eq!(d.kind, ProductKind::Direct);
        let c = synthesize_components(&d);
        verify_components(&d, &c).unwrap();
        assert_eq!(c.permutation.n(), 3);
        assert!(recompose_verify(&s, &d).passed);
    }

    #[test]
    fn non_simple_is_rejected() {
        let s = closure(3, &[&[0, 0, 1]]);
        assert_eq!(
            decompose(&s).unwrap_err(),
            Error::NotSimple {
                spectrum: "{2:1, 1:1}".into()
            }
        );
    }

    #[test]
    fn component_tables_match_basic_machines() {
        let mut branch = images(&branch_machine(2));
        branch.sort();
        assert_eq!(branch, vec![vec![0, 1, 0], vec![0, 1, 1]]);
        let mut reset = images(&reset_machine(2));
        reset.sort();
        assert_eq!(reset, vec![vec![0, 0], vec![1, 1]]);
        let c2 = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(images(&permutation_machine(&c2, 0)), vec![vec![1, 0]]);
        assert_eq!(branch_machine(1).n(), 1);
        assert_eq!(reset_machine(1).n(), 1);
    }

    #[test]
    fn generators_of_klein_group() {
        // Z2 × Z2 with elements 0=(0,0), 1=(1,0), 2=(0,1), 3=(1,1)
        let table: Vec<Vec<usize>> = (0..4)
            .map(|a| (0..4).map(|b| a ^ b).collect())
            .collect();
        assert_eq!(group_generators(&table, 0), vec![1, 2]);
        let m = permutation_machine(&table, 0);
        assert_eq!(SemigroupClosure::generate(&m, 100).unwrap().len(), 4);
    }

    #[test]
    fn recompose_reports_a_broken_sandwich() {
        // S3 on 3 states: one cell, sandwich entry must be the identity
        let s = closure(3, &[&[1, 0, 2], &[1, 2, 0]]);
        let mut d = decompose(&s).unwrap();
        assert!(recompose_verify(&s, &d).passed);
        d.sandwich[0][0] = 1;
        let report = recompose_verify(&s, &d);
        assert!(!report.passed);
        assert!(report.bijective);
        assert!(report.first_mismatch.is_some());
        d.coords[1] = d.coords[0];
        let report = recompose_verify(&s, &d);
        assert!(!report.bijective && !report.passed);
    }

    #[test]
    fn classification() {
        assert_eq!(classify_basic(&closure(2, &[&[1, 0]])), BasicType::Cyclic(2));
        assert_eq!(classify_basic(&closure(3, &[&[0, 0, 1]])), BasicType::Monotone);
        assert_eq!(classify_basic(&closure(2, &[&[0, 1], &[0, 0]])), BasicType::Hierarchy);
        assert_eq!(classify_basic(&closure(3, &[&[0, 1, 1], &[0, 1, 0]])), BasicType::LeftCopy);
        assert_eq!(classify_basic(&closure(2, &[&[1, 1], &[0, 0]])), BasicType::RightCopy);
        assert_eq!(classify_basic(&closure(5, &[&[1, 2, 3, 4, 0]])), BasicType::Cyclic(5));
        // order 3 but with a tail
        assert_eq!(classify_basic(&closure(4, &[&[1, 2, 3, 3]])), BasicType::Other);
        assert_eq!(classify_basic(&closure(4, &[&[1, 2, 3, 0]])), BasicType::Other);
    }

    #[test]
    fn basic_type_labels_round_trip() {
        for t in [
            BasicType::Cyclic(2),
            BasicType::Cyclic(7),
            BasicType::Monotone,
            BasicType::Hierarchy,
            BasicType::LeftCopy,
            BasicType::RightCopy,
            BasicType::Other,
        ] {
            assert_eq!(t.to_string().parse::<BasicType>().unwrap(), t);
        }
        assert!("X9".parse::<BasicType>().is_err());
    }
}
