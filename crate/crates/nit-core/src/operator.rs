//! Diagonal integer operators that encode partitions in their spectra.
//!
//! A partition with `n` blocks becomes a diagonal operator by picking
//! `n` distinct primes and giving every state of block `b` the `b`-th
//! prime as its diagonal entry: the partition is exactly the grouping of
//! equal eigenvalues, so [`operator_from_partition`] and
//! [`partition_from_operator`] invert each other. Multiplying one such
//! operator per frame partition ([`context_operator`]) encodes the whole
//! frame at once: when the prime sets are disjoint, unique factorization
//! makes two states share a product entry exactly when no partition
//! tells them apart, so a separating frame — and only a separating
//! frame — yields a product with all `n^k` entries distinct (checked by
//! [`DiagonalOperator::spectrum`]).
//!
//! Entries are exact [`BigInt`]s; nothing here rounds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::partition::{Partition, StateIndex};
use crate::perm::Permutation;

/// An ordered set of distinct primes used as block labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeLabelSet {
    primes: Vec<u64>,
}

impl PrimeLabelSet {
    /// Validates that every label is prime and no label repeats.
    pub fn new(primes: Vec<u64>) -> Result<PrimeLabelSet> {
        if primes.is_empty() {
            return Err(Error::domain("a label set needs at least one prime"));
        }
        for &p in &primes {
            if !is_prime_u64(p) {
                return Err(Error::domain(format!("label {p} is not prime")));
            }
        }
        let mut sorted = primes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("label primes must be distinct"));
        }
        Ok(PrimeLabelSet { primes })
    }

    /// The first `count` primes, in order: 2, 3, 5, ...
    pub fn first(count: usize) -> PrimeLabelSet {
        let mut primes = Vec::with_capacity(count);
        let mut candidate = 2u64;
        while primes.len() < count {
            if is_prime_u64(candidate) {
                primes.push(candidate);
            }
            candidate += 1;
        }
        PrimeLabelSet { primes }
    }

    /// `count` primes starting from the first prime not below `floor`.
    pub fn first_from(floor: u64, count: usize) -> PrimeLabelSet {
        let mut primes = Vec::with_capacity(count);
        let mut candidate = floor.max(2);
        while primes.len() < count {
            if is_prime_u64(candidate) {
                primes.push(candidate);
            }
            candidate += 1;
        }
        PrimeLabelSet { primes }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

impl<'de> Deserialize<'de> for PrimeLabelSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            primes: Vec<u64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        PrimeLabelSet::new(raw.primes).map_err(D::Error::custom)
    }
}

/// Deterministic Miller–Rabin for the full `u64` range; the listed
/// witness set is known to be exact below 3.3 * 10^24.
fn is_prime_u64(value: u64) -> bool {
    if value < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if value == small {
            return true;
        }
        if value % small == 0 {
            return false;
        }
    }
    let mut d = value - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % value as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= value;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == value - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == value - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A diagonal operator with exact integer entries, indexed by state.
#[derive(Clone, PartialEq, Eq)]
pub struct DiagonalOperator {
    entries: Vec<BigInt>,
}

impl DiagonalOperator {
    pub fn from_entries(entries: Vec<BigInt>) -> Result<DiagonalOperator> {
        if entries.is_empty() {
            return Err(Error::domain("a diagonal operator needs at least one entry"));
        }
        Ok(DiagonalOperator { entries })
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn ground_size(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn entry(&self, state: StateIndex) -> Option<&BigInt> {
        self.entries.get(state.zero_based())
    }

    /// Conjugation by a state relabeling: the image operator's entry at
    /// `p(s)` is this operator's entry at `s`.
    pub fn permuted(&self, p: &Permutation) -> Result<DiagonalOperator> {
        if p.size() != self.ground_size() {
            return Err(Error::domain(format!(
                "permutation of {} elements cannot act on {} diagonal entries",
                p.size(),
                self.ground_size()
            )));
        }
        let mut entries = vec![BigInt::default(); self.entries.len()];
        for s0 in 0..self.entries.len() {
            let target = p.image_of(StateIndex::from_zero_based(s0));
            entries[target.zero_based()] = self.entries[s0].clone();
        }
        DiagonalOperator::from_entries(entries)
    }

    /// Whether all entries are pairwise distinct, with the first
    /// repeated value (by ascending state) and every state holding it
    /// reported otherwise.
    pub fn spectrum(&self) -> SpectrumVerdict {
        let mut first_seen: BTreeMap<&BigInt, usize> = BTreeMap::new();
        let mut collision: Option<usize> = None;
        for (s0, value) in self.entries.iter().enumerate() {
            if first_seen.insert(value, s0).is_some() {
                collision = Some(s0);
                break;
            }
        }
        match collision {
            None => SpectrumVerdict::Distinct,
            Some(s0) => {
                let value = self.entries[s0].clone();
                let positions = self
                    .entries
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v == value)
                    .map(|(t0, _)| StateIndex::from_zero_based(t0))
                    .collect();
                SpectrumVerdict::Collision { value, positions }
            }
        }
    }

    pub fn has_distinct_spectrum(&self) -> bool {
        matches!(self.spectrum(), SpectrumVerdict::Distinct)
    }
}

impl std::fmt::Debug for DiagonalOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "diag(")?;
        for (index, entry) in self.entries.iter().enumerate() {
            if index > 0 {
                write!(f, ",")?;
            }
            write!(f, "{entry}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for DiagonalOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DiagonalOperator", 1)?;
        let digits: Vec<String> = self.entries.iter().map(BigInt::to_string).collect();
        st.serialize_field("diag", &digits)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for DiagonalOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            diag: Vec<String>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let entries: std::result::Result<Vec<BigInt>, D::Error> = raw
            .diag
            .iter()
            .map(|text| {
                text.parse::<BigInt>()
                    .map_err(|_| D::Error::custom(format!("bad integer literal {text:?}")))
            })
            .collect();
        DiagonalOperator::from_entries(entries?).map_err(D::Error::custom)
    }
}

/// Outcome of [`DiagonalOperator::spectrum`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumVerdict {
    Distinct,
    Collision {
        value: BigInt,
        positions: Vec<StateIndex>,
    },
}

/// Labels block `b` of the partition (in canonical block order) with the
/// `b`-th prime: states get equal entries exactly when they share a
/// block, so the operator is a faithful observable for the partition.
pub fn operator_from_partition(
    partition: &Partition,
    labels: &PrimeLabelSet,
) -> Result<DiagonalOperator> {
    if labels.len() != partition.num_blocks() {
        return Err(Error::domain(format!(
            "{} labels for a partition with {} blocks",
            labels.len(),
            partition.num_blocks()
        )));
    }
    let assignment = partition.block_assignment();
    let entries = assignment
        .iter()
        .map(|&block| BigInt::from(labels.primes()[block as usize]))
        .collect();
    DiagonalOperator::from_entries(entries)
}

/// Groups states by equal diagonal entry — the inverse of
/// [`operator_from_partition`] and, whenever the entries come from a
/// product of disjoint prime sets, also the meet of the encoded
/// partitions.
pub fn partition_from_operator(op: &DiagonalOperator) -> Partition {
    Partition::from_grouping(op.ground_size(), |s| op.entries()[s.zero_based()].clone())
}

/// One operator per subsystem of the digit-grouping frame: operator `i`
/// reads the `i`-th base-`n` digit of the state label through the `i`-th
/// label set. Every label set needs `n` primes; sets may repeat primes,
/// but then the product operator of [`context_operator`] can collide.
pub fn canonical_nit_operators(
    n: u64,
    k: u32,
    label_sets: &[PrimeLabelSet],
) -> Result<Vec<DiagonalOperator>> {
    let frame = crate::frame::canonical_frame(n, k)?;
    if label_sets.len() != k as usize {
        return Err(Error::domain(format!(
            "{} label sets for k = {k} subsystems",
            label_sets.len()
        )));
    }
    frame
        .partitions()
        .iter()
        .zip(label_sets)
        .map(|(partition, labels)| operator_from_partition(partition, labels))
        .collect()
}

/// One operator per partition of `frame`, using the `i`-th label set for
/// the `i`-th partition.
pub fn frame_operators(frame: &Frame, label_sets: &[PrimeLabelSet]) -> Result<Vec<DiagonalOperator>> {
    if label_sets.len() != frame.k() as usize {
        return Err(Error::domain(format!(
            "{} label sets for a frame with k = {} partitions",
            label_sets.len(),
            frame.k()
        )));
    }
    frame
        .partitions()
        .iter()
        .zip(label_sets)
        .map(|(partition, labels)| operator_from_partition(partition, labels))
        .collect()
}

/// The componentwise product of the operators: one measurement whose
/// outcome determines the outcome of every factor (by factorization)
/// when the factors' prime sets are disjoint.
pub fn context_operator(operators: &[DiagonalOperator]) -> Result<DiagonalOperator> {
    let first = operators
        .first()
        .ok_or_else(|| Error::domain("a context needs at least one operator"))?;
    let size = first.ground_size();
    if let Some(bad) = operators.iter().find(|op| op.ground_size() != size) {
        return Err(Error::domain(format!(
            "operators act on different state counts: {} vs {}",
            size,
            bad.ground_size()
        )));
    }
    let mut entries = vec![BigInt::one(); size as usize];
    for op in operators {
        for (acc, factor) in entries.iter_mut().zip(op.entries()) {
            *acc *= factor;
        }
    }
    DiagonalOperator::from_entries(entries)
}
