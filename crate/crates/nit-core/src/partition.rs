//! Partitions of the state set `{1, .., N}` in canonical form.
//!
//! A [`Partition`] splits the states into disjoint nonempty blocks that
//! cover everything. Two partitions are the same mathematical object iff
//! they are structurally equal here, because construction always
//! canonicalizes: each block is sorted ascending and blocks are ordered
//! by their smallest element.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::radix;

/// One-based label of a product state. Valid values are `1..=N` for the
/// ground set at hand; the upper bound is checked wherever a ground set
/// is known.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateIndex(u32);

impl StateIndex {
    /// Wraps a one-based state number. Only the lower bound can be
    /// checked here; range checks against `N` happen at the use site.
    pub fn new(value: u32) -> Result<Self> {
        if value == 0 {
            return Err(Error::domain("state indices are one-based; 0 is not a state"));
        }
        Ok(StateIndex(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// The 0-based array offset of this state.
    pub fn zero_based(self) -> usize {
        (self.0 - 1) as usize
    }

    pub(crate) fn from_zero_based(offset: usize) -> Self {
        StateIndex(offset as u32 + 1)
    }
}

impl fmt::Debug for StateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for StateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for StateIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.0)
    }
}

impl<'de> Deserialize<'de> for StateIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = u32::deserialize(deserializer)?;
        StateIndex::new(raw).map_err(D::Error::custom)
    }
}

/// A partition of `{1, .., N}` into disjoint nonempty blocks.
///
/// Held in canonical form (blocks sorted ascending, ordered by smallest
/// element), so derived equality is set equality. The empty partition of
/// an empty ground set is allowed as a degenerate value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    ground_size: u32,
    blocks: Vec<Vec<StateIndex>>,
}

impl Partition {
    /// Builds a partition from raw one-based state numbers, validating
    /// that the blocks are nonempty, disjoint, in range, and jointly
    /// cover `{1, .., ground_size}`. Input order is irrelevant; the
    /// result is canonical.
    pub fn from_blocks<I, B>(ground_size: u32, blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = B>,
        B: IntoIterator<Item = u32>,
    {
        let mut seen = vec![false; ground_size as usize];
        let mut canonical: Vec<Vec<StateIndex>> = Vec::new();
        for block in blocks {
            let mut states: Vec<StateIndex> = Vec::new();
            for raw in block {
                let s = StateIndex::new(raw)?;
                if s.get() > ground_size {
                    return Err(Error::domain(format!(
                        "state {s} is outside the ground set 1..={ground_size}"
                    )));
                }
                if std::mem::replace(&mut seen[s.zero_based()], true) {
                    return Err(Error::domain(format!("state {s} appears in two blocks")));
                }
                states.push(s);
            }
            if states.is_empty() {
                return Err(Error::domain("blocks must be nonempty"));
            }
            states.sort_unstable();
            canonical.push(states);
        }
        if let Some(missing) = seen.iter().position(|covered| !covered) {
            return Err(Error::domain(format!(
                "state {} is not covered by any block",
                missing + 1
            )));
        }
        canonical.sort_unstable_by_key(|block| block[0]);
        Ok(Partition {
            ground_size,
            blocks: canonical,
        })
    }

    /// Internal fast path for blocks that are already canonical
    /// (each sorted, ordered by smallest element, disjoint, covering).
    pub(crate) fn from_sorted_blocks_unchecked(
        ground_size: u32,
        blocks: Vec<Vec<StateIndex>>,
    ) -> Self {
        #[cfg(debug_assertions)]
        {
            let rebuilt = Partition::from_blocks(
                ground_size,
                blocks
                    .iter()
                    .map(|b| b.iter().map(|s| s.get()).collect::<Vec<_>>()),
            )
            .expect("unchecked blocks must be valid");
            debug_assert_eq!(rebuilt.blocks, blocks, "unchecked blocks must be canonical");
        }
        Partition {
            ground_size,
            blocks,
        }
    }

    /// Groups `{1, .., ground_size}` by an arbitrary key function; states
    /// with equal keys share a block. Total: every keying yields a valid
    /// partition.
    pub fn from_grouping<K, F>(ground_size: u32, mut key_of: F) -> Self
    where
        K: Ord,
        F: FnMut(StateIndex) -> K,
    {
        let mut groups: BTreeMap<K, Vec<StateIndex>> = BTreeMap::new();
        for offset in 0..ground_size as usize {
            let s = StateIndex::from_zero_based(offset);
            groups.entry(key_of(s)).or_default().push(s);
        }
        let mut blocks: Vec<Vec<StateIndex>> = groups.into_values().collect();
        blocks.sort_unstable_by_key(|block| block[0]);
        Partition {
            ground_size,
            blocks,
        }
    }

    /// The partition of `{1, .., n}` into `n` singletons.
    pub fn discrete(ground_size: u32) -> Self {
        Partition {
            ground_size,
            blocks: (0..ground_size as usize)
                .map(|offset| vec![StateIndex::from_zero_based(offset)])
                .collect(),
        }
    }

    /// The one-block partition of a nonempty ground set.
    pub fn indiscrete(ground_size: u32) -> Result<Self> {
        if ground_size == 0 {
            return Err(Error::domain("the indiscrete partition needs at least one state"));
        }
        Ok(Partition {
            ground_size,
            blocks: vec![(0..ground_size as usize)
                .map(StateIndex::from_zero_based)
                .collect()],
        })
    }

    pub fn ground_size(&self) -> u32 {
        self.ground_size
    }

    pub fn blocks(&self) -> &[Vec<StateIndex>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index (in canonical block order) of the block containing `s`.
    pub fn block_of(&self, s: StateIndex) -> Result<usize> {
        if s.get() > self.ground_size {
            return Err(Error::domain(format!(
                "state {s} is outside the ground set 1..={}",
                self.ground_size
            )));
        }
        Ok(self.block_assignment()[s.zero_based()] as usize)
    }

    /// For every state (0-based offset), the index of its block. The
    /// flat form most of the hot loops work on.
    pub fn block_assignment(&self) -> Vec<u32> {
        let mut assignment = vec![0u32; self.ground_size as usize];
        for (index, block) in self.blocks.iter().enumerate() {
            for &s in block {
                assignment[s.zero_based()] = index as u32;
            }
        }
        assignment
    }

    /// True iff every block is a singleton.
    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.ground_size as usize
    }

    /// The common refinement: blocks are all nonempty pairwise
    /// intersections of a block of `self` with a block of `other`.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        if self.ground_size != other.ground_size {
            return Err(Error::domain(format!(
                "cannot meet partitions over different ground sets ({} vs {})",
                self.ground_size, other.ground_size
            )));
        }
        let left = self.block_assignment();
        let right = other.block_assignment();
        Ok(Partition::from_grouping(self.ground_size, |s| {
            (left[s.zero_based()], right[s.zero_based()])
        }))
    }

    /// The image partition `{ p(B) : B block }`, re-canonicalized.
    pub fn apply_permutation(&self, p: &Permutation) -> Result<Partition> {
        if p.size() != self.ground_size {
            return Err(Error::domain(format!(
                "permutation of {} elements cannot act on {} states",
                p.size(),
                self.ground_size
            )));
        }
        let mut blocks: Vec<Vec<StateIndex>> = self
            .blocks
            .iter()
            .map(|block| {
                let mut image: Vec<StateIndex> =
                    block.iter().map(|&s| p.image_of(s)).collect();
                image.sort_unstable();
                image
            })
            .collect();
        blocks.sort_unstable_by_key(|block| block[0]);
        Ok(Partition {
            ground_size: self.ground_size,
            blocks,
        })
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self
            .blocks
            .iter()
            .map(|block| {
                let inner: Vec<String> = block.iter().map(|s| s.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        write!(f, "{{{}}}", rendered.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<Vec<u32>> = Vec::deserialize(deserializer)?;
        let ground: usize = raw.iter().map(|block| block.len()).sum();
        let ground = u32::try_from(ground)
            .map_err(|_| D::Error::custom("partition has too many states"))?;
        Partition::from_blocks(ground, raw).map_err(D::Error::custom)
    }
}

/// How a partition of `n^k` product states relates to the subsystem
/// structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// The blocks are exactly the level sets of one base-`n` digit of the
    /// state label: the partition measures a single subsystem, possibly
    /// with its outcomes renamed.
    Local {
        /// 1-based position of the subsystem being measured.
        particle: u32,
        /// `relabeling[block_index] = digit value` — the bijection between
        /// canonical block order and outcome values.
        relabeling: Vec<u32>,
    },
    /// No single digit explains the blocks; the partition genuinely mixes
    /// subsystems.
    Nonlocal,
}

/// Decides whether a partition with exactly `n` blocks over `n^k` states
/// measures a single subsystem (see [`Classification`]). When several
/// subsystems qualify (impossible for `n >= 2` with `k >= 2`, but `k = 1`
/// is trivial), the smallest particle index is reported.
pub fn classify_partition(p: &Partition, n: u64, k: u32) -> Result<Classification> {
    if n < 2 || k < 1 {
        return Err(Error::domain("classification needs n >= 2 and k >= 1"));
    }
    let states = radix::checked_pow(n, k)
        .ok_or_else(|| Error::domain(format!("n^k overflows for n={n}, k={k}")))?;
    if u64::from(p.ground_size()) != states {
        return Err(Error::domain(format!(
            "partition covers {} states but n^k = {states}",
            p.ground_size()
        )));
    }
    if p.num_blocks() as u64 != n {
        return Err(Error::domain(format!(
            "partition has {} blocks but a single-subsystem measurement has n = {n}",
            p.num_blocks()
        )));
    }
    'particles: for particle in 0..k {
        let mut relabeling = Vec::with_capacity(p.num_blocks());
        let mut value_used = vec![false; n as usize];
        for block in p.blocks() {
            let value = radix::digit(block[0].zero_based() as u64, particle, n, k);
            if block
                .iter()
                .any(|s| radix::digit(s.zero_based() as u64, particle, n, k) != value)
            {
                continue 'particles;
            }
            if std::mem::replace(&mut value_used[value as usize], true) {
                continue 'particles;
            }
            relabeling.push(value as u32);
        }
        // n blocks with constant, pairwise distinct digit values must be
        // the n level sets themselves.
        return Ok(Classification::Local {
            particle: particle + 1,
            relabeling,
        });
    }
    Ok(Classification::Nonlocal)
}
