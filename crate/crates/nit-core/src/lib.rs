//! Exact arithmetic for quantum information carried by radix-`n` state
//! partitions.
//!
//! The objects here live on a set of `N = n^k` states, thought of as `k`
//! subsystems with `n` levels each:
//!
//! - [`Partition`] and [`Frame`]: `n`-block partitions of the states and
//!   ordered `k`-tuples of them. A frame that *separates* the states
//!   pins any state down with `k` base-`n` answers, so it carries `k`
//!   units of base-`n` information regardless of whether its partitions
//!   look at one subsystem each or at entangled combinations.
//! - [`Permutation`]: relabelings of the states, used to transport
//!   frames into each other ([`mapping_permutations`]) and to check that
//!   separation is a label-free property ([`orbit_separation_exhaustive`]).
//! - [`DiagonalOperator`]: integer diagonal observables encoding a
//!   partition through repeated eigenvalues; products of them encode
//!   whole frames when the frame separates.
//! - [`ExactBasis`]: orthogonal bases with integer coordinates whose
//!   vectors are supported on the blocks of entangled partitions.
//! - [`Strategy`]: question plans that identify a hidden state through a
//!   frame's partitions, with exact worst-case and expected question
//!   counts as rationals.
//!
//! Everything is exact — `u64`/[`num_bigint::BigInt`] entries and
//! [`num_rational`] ratios — so equality assertions are meaningful and
//! no tolerance appears anywhere.
//!
//! # Features
//!
//! `parallel` (default): run the exhaustive searches (frame enumeration,
//! whole-group orbit scans, strategy optimization inputs) on a rayon
//! pool. The sequential fallback compiles the same algorithms without
//! rayon; `*_seq` entry points are available in both builds and produce
//! bit-identical results, which the benches rely on.

mod basis;
mod error;
mod frame;
pub mod json;
mod limits;
mod operator;
mod partition;
mod perm;
mod radix;
mod search;

pub use basis::{
    basis_refines, diagonal_bases, diagonal_bases_with_limits, index_from_tuple,
    measurement_probabilities, overlap_sq, standard_basis, standard_basis_with_limits,
    tuple_from_index, ExactBasis, ExactVector, RefineOutcome,
};
pub use error::{Error, Result};
pub use frame::{
    canonical_frame, canonical_frame_with_limits, enumerate_separating_frames,
    enumerate_separating_frames_seq, enumerate_separating_frames_with_limits,
    mapping_permutations, mapping_permutations_with_limits, orbit_separation_exhaustive,
    orbit_separation_exhaustive_seq, orbit_separation_sample, Frame, OrbitScan,
    SeparationVerdict, SeparationWitness,
};
pub use limits::Limits;
pub use operator::{
    canonical_nit_operators, context_operator, frame_operators, operator_from_partition,
    partition_from_operator, DiagonalOperator, PrimeLabelSet, SpectrumVerdict,
};
pub use partition::{classify_partition, Classification, Partition, StateIndex};
pub use perm::Permutation;
pub use search::{
    compare, compare_with_limits, optimal_strategy, optimal_strategy_with_limits,
    plan_straight_line, Comparison, Outcome, Repertoire, SearchReport, Strategy, StrategyNode,
    Transcript, TranscriptStep, WorstCase,
};
