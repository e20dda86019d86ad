#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use crsm::{Machine, SemigroupClosure, Transform, DEFAULT_CLOSURE_LIMIT};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn closure(m: &Machine) -> SemigroupClosure {
    SemigroupClosure::generate(m, DEFAULT_CLOSURE_LIMIT).unwrap()
}

pub fn machine(n: usize, images: &[&[usize]]) -> Machine {
    Machine::from_images(n, images).unwrap()
}

/// The five order-two machines, states indexed as in their tables.
pub fn basic_machines() -> Vec<(&'static str, Machine)> {
    vec![
        ("C2", machine(2, &[&[1, 0]])),
        ("U2", machine(3, &[&[0, 0, 1]])),
        ("H2", machine(2, &[&[0, 1], &[0, 0]])),
        ("L2", machine(3, &[&[0, 1, 1], &[0, 1, 0]])),
        ("R2", machine(2, &[&[1, 1], &[0, 0]])),
    ]
}

// ---- composition oracle, independent of the library ----

pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().map(|&q| b[q]).collect()
}

pub fn rank(a: &[usize]) -> usize {
    a.iter().collect::<BTreeSet<_>>().len()
}

// ---- random transforms ----

pub fn random_image(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Random idempotent: pick a non-empty set of fixed states and send every other
/// state into it.
pub fn random_idempotent(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let fixed = &states[..rng.random_range(1..=n)];
    (0..n)
        .map(|q| {
            if fixed.contains(&q) {
                q
            } else {
                fixed[rng.random_range(0..fixed.len())]
            }
        })
        .collect()
}

/// Random machine with `2..=4` states and `1..=3` inputs. Each input is an arbitrary
/// map, an idempotent, or a permutation with equal odds, so band-like and group-like
/// closures show up alongside generic ones.
pub fn random_machine(rng: &mut impl Rng) -> Machine {
    let n = rng.random_range(2..=4);
    let k = rng.random_range(1..=3);
    let images: Vec<Vec<usize>> = (0..k)
        .map(|_| match rng.random_range(0..3) {
            0 => random_image(rng, n),
            1 => random_idempotent(rng, n),
            _ => random_permutation(rng, n),
        })
        .collect();
    let rows: Vec<&[usize]> = images.iter().map(Vec::as_slice).collect();
    machine(n, &rows)
}

/// Every transform reachable by a word of length `1..=n^n`, by level sets: the set
/// for length `k + 1` is the set for length `k` composed with each generator.
pub fn naive_closure(m: &Machine) -> HashSet<Vec<usize>> {
    let gens: Vec<Vec<usize>> = m.transforms().map(|t| t.image().to_vec()).collect();
    let n = m.n();
    let max_len = n.pow(n as u32);
    let mut level: HashSet<Vec<usize>> = gens.iter().cloned().collect();
    let mut all = level.clone();
    for _ in 1..max_len {
        let next: HashSet<Vec<usize>> = level
            .iter()
            .flat_map(|w| gens.iter().map(move |g| compose(w, g)))
            .collect();
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

// ---- Rees product oracle ----

/// Abstract Rees semigroup over a group with `m` rows and `n` columns:
/// `(i, j, g)(k, l, h) = (i, l, g · P[j][k] · h)`.
pub struct ReesOracle {
    pub m: usize,
    pub n: usize,
    /// `group[g][h]` = `g · h`.
    pub group: Vec<Vec<usize>>,
    /// `sandwich[j][i]`.
    pub sandwich: Vec<Vec<usize>>,
}

impl ReesOracle {
    pub fn size(&self) -> usize {
        self.m * self.n * self.group.len()
    }

    pub fn decode(&self, t: usize) -> (usize, usize, usize) {
        let k = self.group.len();
        (t / (self.n * k), (t / k) % self.n, t % k)
    }

    pub fn encode(&self, (i, j, g): (usize, usize, usize)) -> usize {
        (i * self.n + j) * self.group.len() + g
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let (i, j, g) = self.decode(a);
        let (k, l, h) = self.decode(b);
        let p = self.sandwich[j][k];
        self.encode((i, l, self.group[self.group[g][p]][h]))
    }

    /// Right-regular action on the semigroup with an identity adjoined: state `t`
    /// goes to `t·x`, the extra state goes to `x`. Faithful, so the closure of
    /// the resulting machine is isomorphic to the abstract semigroup.
    pub fn as_machine(&self) -> Machine {
        let size = self.size();
        let gens = (0..size).map(|x| {
            let mut image: Vec<usize> = (0..size).map(|t| self.mul(t, x)).collect();
            image.push(x);
            (format!("t{x}"), Transform::new(image).unwrap())
        });
        Machine::new(size + 1, gens).unwrap()
    }
}

pub fn cyclic_table(order: usize) -> Vec<Vec<usize>> {
    (0..order)
        .map(|a| (0..order).map(|b| (a + b) % order).collect())
        .collect()
}

/// Two rows, two columns over C2 with `P = [[e, e], [e, g]]`.
pub fn rees_2x2_c2_semidirect() -> ReesOracle {
    ReesOracle {
        m: 2,
        n: 2,
        group: cyclic_table(2),
        sandwich: vec![vec![0, 0], vec![0, 1]],
    }
}
