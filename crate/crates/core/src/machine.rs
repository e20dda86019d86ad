//! State transforms and the machines built from them.
//!
//! A [`Transform`] is a total function on the states `0..n`, stored as its
//! image sequence. Composition reads left to right: in `a.compose(&b)` the
//! transform `a` is applied first, so `q(ab) = (qa)b`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type State = usize;

/// A total function on a finite state set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<State>", into = "Vec<State>")]
pub struct Transform {
    image: Vec<State>,
}

impl Transform {
    /// Builds a transform from its image sequence; entry `q` is the next state of `q`.
    pub fn new(image: Vec<State>) -> Result<Self> {
        if image.is_empty() {
            return Err(Error::NoStates);
        }
        let n = image.len();
        if let Some(&state) = image.iter().find(|&&q| q >= n) {
            return Err(Error::StateOutOfRange { state, states: n });
        }
        Ok(Transform { image })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "transform on zero states");
        Transform {
            image: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, target: State) -> Self {
        assert!(target < n, "constant target {target} out of range for {n} states");
        Transform {
            image: vec![target; n],
        }
    }

    /// Number of states of the domain.
    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[State] {
        &self.image
    }

    pub fn apply(&self, q: State) -> State {
        self.image[q]
    }

    /// Left-to-right composition: `self` first, then `other`.
    pub fn compose(&self, other: &Transform) -> Result<Transform> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(self.then(other))
    }

    /// Unchecked composition for callers that already know both sides share a state set.
    pub(crate) fn then(&self, other: &Transform) -> Transform {
        debug_assert_eq!(self.n(), other.n());
        Transform {
            image: self.image.iter().map(|&q| other.image[q]).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let mut seen = vec![false; self.n()];
        let mut count = 0;
        for &q in &self.image {
            if !seen[q] {
                seen[q] = true;
                count += 1;
            }
        }
        count
    }

    /// Sorted set of next states.
    pub fn range(&self) -> BTreeSet<State> {
        self.image.iter().copied().collect()
    }

    pub fn kernel_partition(&self) -> Partition {
        Partition::from_labels(&self.image)
    }

    pub fn is_idempotent(&self) -> bool {
        // every state in the range is fixed
        self.image.iter().all(|&q| self.image[q] == q)
    }

    pub fn is_permutation(&self) -> bool {
        self.rank() == self.n()
    }

    /// `self` composed with itself `k >= 1` times.
    pub fn power(&self, k: usize) -> Transform {
        assert!(k >= 1, "powers start at 1");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.then(self);
        }
        acc
    }

    /// Tail and period of the power sequence `a, a², a³, ...`.
    pub fn iterate_profile(&self) -> IterationProfile {
        let mut seen: HashMap<Transform, usize> = HashMap::new();
        let mut powers = vec![self.clone()];
        seen.insert(self.clone(), 1);
        loop {
            let next = powers.last().expect("non-empty").then(self);
            if let Some(&first) = seen.get(&next) {
                // a^(len+1) = a^first, so the tail is first - 1
                let tail = first - 1;
                let period = powers.len() - tail;
                let invariant_position = (tail / period + 1) * period;
                let invariant_power = powers[invariant_position - 1].clone();
                return IterationProfile {
                    tail,
                    period,
                    invariant_position,
                    invariant_power,
                    powers,
                };
            }
            seen.insert(next.clone(), powers.len() + 1);
            powers.push(next);
        }
    }
}

impl TryFrom<Vec<State>> for Transform {
    type Error = Error;

    fn try_from(image: Vec<State>) -> Result<Self> {
        Transform::new(image)
    }
}

impl From<Transform> for Vec<State> {
    fn from(t: Transform) -> Self {
        t.image
    }
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.image)
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, q) in self.image.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "]")
    }
}

/// A partition of the states into blocks, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<State>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Groups states that carry the same label.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut index: HashMap<&T, usize> = HashMap::new();
        let mut blocks: Vec<Vec<State>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (q, label) in labels.iter().enumerate() {
            let b = *index.entry(label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(q);
            block_of.push(b);
        }
        Partition { blocks, block_of }
    }

    pub fn blocks(&self) -> &[Vec<State>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, q: State) -> usize {
        self.block_of[q]
    }

    /// True when every block of `finer` lies inside a block of `self`.
    pub fn is_coarser_or_equal(&self, finer: &Partition) -> bool {
        self.block_of.len() == finer.block_of.len()
            && finer
                .blocks
                .iter()
                .all(|block| block.iter().all(|&q| self.block_of[q] == self.block_of[block[0]]))
    }
}

/// Tail-cycle structure of the powers of one transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationProfile {
    pub tail: usize,
    pub period: usize,
    /// Exponent of the unique idempotent power: the multiple of `period` inside the cycle.
    pub invariant_position: usize,
    pub invariant_power: Transform,
    /// The distinct powers `a¹ .. a^(tail + period)`.
    pub powers: Vec<Transform>,
}

impl IterationProfile {
    pub fn is_periodic(&self) -> bool {
        self.tail == 0
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.powers.iter().map(Transform::rank).collect()
    }
}

/// A deterministic, complete state machine: a state set and a list of labelled inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MachineFile", into = "MachineFile")]
pub struct Machine {
    state_names: Vec<String>,
    generators: Vec<(String, Transform)>,
}

impl Machine {
    /// Machine whose states are named by their indices.
    pub fn new<L: Into<String>>(
        n: usize,
        generators: impl IntoIterator<Item = (L, Transform)>,
    ) -> Result<Self> {
        Machine::with_state_names((0..n).map(|q| q.to_string()).collect(), generators)
    }

    pub fn with_state_names<L: Into<String>>(
        state_names: Vec<String>,
        generators: impl IntoIterator<Item = (L, Transform)>,
    ) -> Result<Self> {
        let n = state_names.len();
        if n == 0 {
            return Err(Error::NoStates);
        }
        let generators: Vec<(String, Transform)> = generators
            .into_iter()
            .map(|(label, t)| (label.into(), t))
            .collect();
        if generators.is_empty() {
            return Err(Error::NoGenerators);
        }
        let mut labels = HashSet::new();
        for (label, t) in &generators {
            if t.n() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: t.n(),
                });
            }
            if !labels.insert(label.as_str()) {
                return Err(Error::DuplicateInput(label.clone()));
            }
        }
        Ok(Machine {
            state_names,
            generators,
        })
    }

    /// Machine from raw image rows, with inputs labelled `0, 1, ...`.
    pub fn from_images(n: usize, images: &[&[State]]) -> Result<Self> {
        let generators = images
            .iter()
            .enumerate()
            .map(|(k, img)| Ok((k.to_string(), Transform::new(img.to_vec())?)))
            .collect::<Result<Vec<_>>>()?;
        Machine::new(n, generators)
    }

    pub fn n(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn generators(&self) -> &[(String, Transform)] {
        &self.generators
    }

    pub fn transforms(&self) -> impl Iterator<Item = &Transform> {
        self.generators.iter().map(|(_, t)| t)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.generators.iter().map(|(l, _)| l.as_str())
    }
}

/// Serialized shape of a machine: `{"states": n, "inputs": {"a": [..], ...}}`.
/// Input order is preserved and duplicate labels are rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineFile {
    states: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    state_names: Option<Vec<String>>,
    inputs: Inputs,
}

struct Inputs(Vec<(String, Vec<State>)>);

impl Serialize for Inputs {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (label, image) in &self.0 {
            map.serialize_entry(label, image)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Inputs {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;

        impl<'de> serde::de::Visitor<'de> for Visitor {
            type Value = Inputs;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from input label to next-state list")
            }

            fn visit_map<A: serde::de::MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<Inputs, A::Error> {
                let mut inputs = Vec::new();
                while let Some((label, image)) = access.next_entry::<String, Vec<State>>()? {
                    inputs.push((label, image));
                }
                Ok(Inputs(inputs))
            }
        }

        deserializer.deserialize_map(Visitor)
    }
}

impl TryFrom<MachineFile> for Machine {
    type Error = Error;

    fn try_from(file: MachineFile) -> Result<Self> {
        let names = match file.state_names {
            Some(names) if names.len() != file.states => {
                return Err(Error::StateNameCount {
                    expected: file.states,
                    actual: names.len(),
                })
            }
            Some(names) => names,
            None => (0..file.states).map(|q| q.to_string()).collect(),
        };
        let generators = file
            .inputs
            .0
            .into_iter()
            .map(|(label, image)| {
                if image.len() != file.states {
                    return Err(Error::SizeMismatch {
                        left: file.states,
                        right: image.len(),
                    });
                }
                Ok((label, Transform::new(image)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Machine::with_state_names(names, generators)
    }
}

impl From<Machine> for MachineFile {
    fn from(m: Machine) -> Self {
        let default_names = m
            .state_names
            .iter()
            .enumerate()
            .all(|(q, name)| *name == q.to_string());
        MachineFile {
            states: m.n(),
            state_names: (!default_names).then_some(m.state_names),
            inputs: Inputs(
                m.generators
                    .into_iter()
                    .map(|(label, t)| (label, t.image))
                    .collect(),
            ),
        }
    }
}
