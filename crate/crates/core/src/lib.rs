//! Sequential closures of finite state machines and the decomposition of
//! constant-rank machines into branch, reset and permutation components.
//!
//! The pipeline runs from a [`Machine`] to its closure ([`SemigroupClosure`]),
//! through the idempotent structure ([`analyzer`]) to Rees coordinates and
//! component machines ([`decompose`]). [`decompose_machine`] runs all of it.
//!
//! ```
//! use crsm::{Machine, SemigroupClosure, DEFAULT_CLOSURE_LIMIT};
//!
//! let m = Machine::from_images(3, &[&[0, 1, 1], &[0, 1, 0]]).unwrap();
//! let s = SemigroupClosure::generate(&m, DEFAULT_CLOSURE_LIMIT).unwrap();
//! assert_eq!(s.len(), 2);
//! assert!(s.is_simple());
//! let d = crsm::decompose::decompose(&s).unwrap();
//! assert_eq!((d.m, d.n, d.group_order()), (2, 1, 1));
//! ```

pub mod analyzer;
pub mod cli;
pub mod closure;
pub mod decompose;
pub mod error;
pub mod machine;
pub mod report;
pub mod text;

pub use closure::{RankSpectrum, SemigroupClosure, DEFAULT_CLOSURE_LIMIT};
pub use error::{Error, Result};
pub use machine::{IterationProfile, Machine, Partition, State, Transform};
pub use report::{decompose_machine, MachineReport};
