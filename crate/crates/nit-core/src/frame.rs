//! Ordered frames of block partitions and the separating property.
//!
//! A [`Frame`] is an ordered list of `k` partitions, each with exactly
//! `n` blocks, over the `N = n^k` product states. A frame *separates*
//! the states when every choice of one block per partition intersects in
//! exactly one state — equivalently, when the iterated meet of its
//! partitions is the discrete partition. Separating frames answer "which
//! state is it?" with `k` base-`n` questions.
//!
//! The exhaustive operations in this module (frame enumeration and
//! whole-group permutation scans) run their inner loops through rayon
//! when the `parallel` feature is enabled. Results are identical either
//! way: work is split over a deterministic index space and recombined in
//! index order, never in completion order. The `_seq` variants are always
//! available so the two code paths can be compared directly.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partition::{Partition, StateIndex};
use crate::perm::Permutation;
use crate::radix;

/// An ordered frame of `k` partitions with `n` blocks each over the
/// `N = n^k` product states.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    n: u32,
    k: u32,
    partitions: Vec<Partition>,
}

impl Frame {
    /// Validates shape only: `k` partitions over exactly `n^k` states
    /// with exactly `n` blocks each. Unbalanced blocks are allowed; use
    /// [`Frame::new_balanced`] to insist on blocks of `n^(k-1)` states.
    pub fn new(n: u32, k: u32, partitions: Vec<Partition>) -> Result<Frame> {
        if n < 2 {
            return Err(Error::domain("frames need n >= 2 blocks per partition"));
        }
        if k < 1 {
            return Err(Error::domain("frames need at least one partition"));
        }
        let states = radix::checked_pow(u64::from(n), k)
            .filter(|&states| states <= u64::from(u32::MAX))
            .ok_or_else(|| Error::domain(format!("n^k overflows for n={n}, k={k}")))?;
        if partitions.len() as u32 != k {
            return Err(Error::domain(format!(
                "frame says k={k} but holds {} partitions",
                partitions.len()
            )));
        }
        for (index, p) in partitions.iter().enumerate() {
            if u64::from(p.ground_size()) != states {
                return Err(Error::domain(format!(
                    "partition {index} covers {} states, expected n^k = {states}",
                    p.ground_size()
                )));
            }
            if p.num_blocks() as u32 != n {
                return Err(Error::domain(format!(
                    "partition {index} has {} blocks, expected n = {n}",
                    p.num_blocks()
                )));
            }
        }
        Ok(Frame { n, k, partitions })
    }

    /// Like [`Frame::new`] but additionally requires every block to hold
    /// exactly `n^(k-1)` states.
    pub fn new_balanced(n: u32, k: u32, partitions: Vec<Partition>) -> Result<Frame> {
        let frame = Frame::new(n, k, partitions)?;
        if let Some((index, block)) = frame.first_unbalanced_block() {
            return Err(Error::domain(format!(
                "partition {index} has a block of {block} states; balanced frames need n^(k-1) = {} per block",
                frame.num_states() / u64::from(frame.n)
            )));
        }
        Ok(frame)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn num_states(&self) -> u64 {
        radix::checked_pow(u64::from(self.n), self.k).expect("validated at construction")
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn partition(&self, index: usize) -> Option<&Partition> {
        self.partitions.get(index)
    }

    fn first_unbalanced_block(&self) -> Option<(usize, usize)> {
        let per_block = self.num_states() / u64::from(self.n);
        self.partitions.iter().enumerate().find_map(|(index, p)| {
            p.blocks()
                .iter()
                .find(|block| block.len() as u64 != per_block)
                .map(|block| (index, block.len()))
        })
    }

    /// True iff every block of every partition holds `n^(k-1)` states.
    pub fn is_balanced(&self) -> bool {
        self.first_unbalanced_block().is_none()
    }

    /// The states consistent with observing block `outcomes[i]` of
    /// partition `i`, for the first `outcomes.len()` partitions. An empty
    /// outcome list leaves the full state set.
    pub fn conjunct(&self, outcomes: &[usize]) -> Result<Vec<StateIndex>> {
        if outcomes.len() > self.partitions.len() {
            return Err(Error::domain(format!(
                "{} outcomes given but the frame has only {} partitions",
                outcomes.len(),
                self.partitions.len()
            )));
        }
        for (index, &block) in outcomes.iter().enumerate() {
            if block >= self.n as usize {
                return Err(Error::domain(format!(
                    "outcome {block} of partition {index} is outside 0..{}",
                    self.n
                )));
            }
        }
        let assignments: Vec<Vec<u32>> = self.partitions[..outcomes.len()]
            .iter()
            .map(|p| p.block_assignment())
            .collect();
        Ok((0..self.num_states() as usize)
            .map(StateIndex::from_zero_based)
            .filter(|s| {
                outcomes
                    .iter()
                    .zip(&assignments)
                    .all(|(&block, assignment)| assignment[s.zero_based()] as usize == block)
            })
            .collect())
    }

    /// Full separating check; [`Frame::is_separating`] is the boolean
    /// shorthand. Equivalent to asking whether the iterated meet of all
    /// partitions is discrete, but reports a concrete witness on failure.
    pub fn check_separating(&self) -> SeparationVerdict {
        let states = self.num_states() as usize;
        let n = self.n as usize;
        let assignments: Vec<Vec<u32>> =
            self.partitions.iter().map(|p| p.block_assignment()).collect();
        let signature_of = |s0: usize| -> usize {
            assignments
                .iter()
                .fold(0usize, |acc, a| acc * n + a[s0] as usize)
        };
        // There are exactly n^k = N possible signatures for N states, so
        // the frame separates iff no two states share one: injectivity
        // forces every block choice to capture exactly one state.
        let mut owner: Vec<Option<StateIndex>> = vec![None; states];
        for s0 in 0..states {
            let signature = signature_of(s0);
            if owner[signature].is_some() {
                let block_choices: Vec<usize> =
                    assignments.iter().map(|a| a[s0] as usize).collect();
                let intersection: Vec<StateIndex> = (0..states)
                    .filter(|&t0| signature_of(t0) == signature)
                    .map(StateIndex::from_zero_based)
                    .collect();
                return SeparationVerdict::NotSeparating {
                    witness: SeparationWitness {
                        block_choices,
                        intersection,
                    },
                };
            }
            owner[signature] = Some(StateIndex::from_zero_based(s0));
        }
        SeparationVerdict::Separating
    }

    pub fn is_separating(&self) -> bool {
        matches!(self.check_separating(), SeparationVerdict::Separating)
    }

    /// The iterated meet of all partitions in the frame.
    pub fn meet_all(&self) -> Partition {
        let mut meet = self.partitions[0].clone();
        for p in &self.partitions[1..] {
            meet = meet.meet(p).expect("frame partitions share a ground set");
        }
        meet
    }

    /// Applies `p` to every partition: blocks map elementwise and are
    /// re-canonicalized. Relabeling states cannot create or destroy the
    /// separating property.
    pub fn apply_permutation(&self, p: &Permutation) -> Result<Frame> {
        if u64::from(p.size()) != self.num_states() {
            return Err(Error::domain(format!(
                "permutation of {} elements cannot act on {} states",
                p.size(),
                self.num_states()
            )));
        }
        let partitions: Result<Vec<Partition>> = self
            .partitions
            .iter()
            .map(|partition| partition.apply_permutation(p))
            .collect();
        Frame::new(self.n, self.k, partitions?)
    }
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Frame(n={}, k={}, {:?})", self.n, self.k, self.partitions)
    }
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Frame", 3)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("partitions", &self.partitions)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    n: u32,
    k: u32,
    partitions: Vec<Partition>,
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFrame::deserialize(deserializer)?;
        Frame::new(raw.n, raw.k, raw.partitions).map_err(D::Error::custom)
    }
}

/// Outcome of [`Frame::check_separating`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparationVerdict {
    Separating,
    NotSeparating { witness: SeparationWitness },
}

/// A block choice whose intersection does not hold exactly one state.
///
/// The reported choice is the one shared by the first pair of states
/// (in ascending order) that no partition tells apart, so its
/// intersection always has two or more states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationWitness {
    /// One block index per partition, in frame order.
    pub block_choices: Vec<usize>,
    /// Every state consistent with that choice.
    pub intersection: Vec<StateIndex>,
}

/// The frame whose `i`-th partition groups states by the `i`-th base-`n`
/// digit of the state label (0-based digits, most significant first).
/// Partition `i` (1-based) consists of `n` blocks of `n^(k-1)` states,
/// each block being `n^(i-1)` runs of `n^(k-i)` consecutive states. It
/// separates by construction and every partition measures one subsystem.
pub fn canonical_frame(n: u64, k: u32) -> Result<Frame> {
    canonical_frame_with_limits(n, k, &Limits::DEFAULT)
}

/// [`canonical_frame`] with an explicit state cap.
pub fn canonical_frame_with_limits(n: u64, k: u32, limits: &Limits) -> Result<Frame> {
    if n < 2 || k < 1 {
        return Err(Error::domain("canonical frames need n >= 2 and k >= 1"));
    }
    let states = radix::checked_pow(n, k).ok_or(Error::Capacity {
        what: "canonical frame states",
        requested: u64::MAX,
        limit: limits.max_states,
    })?;
    if states > limits.max_states || states > u64::from(u32::MAX) {
        return Err(Error::Capacity {
            what: "canonical frame states",
            requested: states,
            limit: limits.max_states.min(u64::from(u32::MAX)),
        });
    }
    let partitions = (0..k)
        .map(|digit_pos| {
            let mut blocks: Vec<Vec<StateIndex>> =
                vec![Vec::with_capacity((states / n) as usize); n as usize];
            for s0 in 0..states {
                let value = radix::digit(s0, digit_pos, n, k) as usize;
                blocks[value].push(StateIndex::from_zero_based(s0 as usize));
            }
            // Ascending fill keeps blocks sorted, and the value-v block's
            // least state 1 + v*n^(k-1-pos) grows with v, so value order
            // is already canonical order.
            Partition::from_sorted_blocks_unchecked(states as u32, blocks)
        })
        .collect();
    Frame::new(n as u32, k, partitions)
}

/// All permutations `p` with `a.apply_permutation(p) == b`, sorted by
/// one-line form. Empty when the frames are not relabelings of each
/// other; `mapping_permutations(f, f)` lists the symmetries of `f`.
pub fn mapping_permutations(a: &Frame, b: &Frame) -> Result<Vec<Permutation>> {
    mapping_permutations_with_limits(a, b, &Limits::DEFAULT)
}

/// [`mapping_permutations`] with an explicit cap on the state count.
pub fn mapping_permutations_with_limits(
    a: &Frame,
    b: &Frame,
    limits: &Limits,
) -> Result<Vec<Permutation>> {
    if a.n() != b.n() || a.k() != b.k() {
        return Err(Error::domain(format!(
            "frames have different shapes: n={},k={} vs n={},k={}",
            a.n(),
            a.k(),
            b.n(),
            b.k()
        )));
    }
    let states = a.num_states();
    if states > limits.max_permutation_states {
        return Err(Error::Capacity {
            what: "permutation search states",
            requested: states,
            limit: limits.max_permutation_states,
        });
    }
    let states = states as usize;
    let k = a.k() as usize;

    // A valid p must send the blocks of a's partition i onto the blocks
    // of b's partition i, so it induces one size-preserving block
    // bijection per partition. Fixing those bijections pins down, for
    // each joint block-signature class of states, which class it must
    // land on; any per-class pairing completes a valid permutation, and
    // every valid permutation arises exactly once this way.
    let assignments_a: Vec<Vec<u32>> =
        a.partitions().iter().map(|p| p.block_assignment()).collect();
    let assignments_b: Vec<Vec<u32>> =
        b.partitions().iter().map(|p| p.block_assignment()).collect();

    let mut per_partition_bijections: Vec<Vec<Vec<usize>>> = Vec::with_capacity(k);
    for i in 0..k {
        let sizes_a: Vec<usize> = a.partitions()[i].blocks().iter().map(Vec::len).collect();
        let sizes_b: Vec<usize> = b.partitions()[i].blocks().iter().map(Vec::len).collect();
        let bijections = keyed_bijections(&sizes_a, &sizes_b);
        if bijections.is_empty() {
            return Ok(Vec::new());
        }
        per_partition_bijections.push(bijections);
    }

    let class_key = |assignments: &[Vec<u32>], s0: usize| -> Vec<u32> {
        assignments.iter().map(|a| a[s0]).collect()
    };
    let mut classes_a: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    let mut classes_b: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for s0 in 0..states {
        classes_a.entry(class_key(&assignments_a, s0)).or_default().push(s0);
        classes_b.entry(class_key(&assignments_b, s0)).or_default().push(s0);
    }

    let mut found: Vec<Permutation> = Vec::new();
    let mut combo: Vec<&Vec<usize>> = Vec::with_capacity(k);
    collect_for_block_combos(
        &per_partition_bijections,
        &classes_a,
        &classes_b,
        &mut combo,
        &mut found,
        states,
    );
    found.sort_unstable_by(|p, q| p.images().cmp(q.images()));
    Ok(found)
}

/// Recursion over the per-partition block bijections.
fn collect_for_block_combos<'a>(
    remaining: &'a [Vec<Vec<usize>>],
    classes_a: &BTreeMap<Vec<u32>, Vec<usize>>,
    classes_b: &BTreeMap<Vec<u32>, Vec<usize>>,
    combo: &mut Vec<&'a Vec<usize>>,
    found: &mut Vec<Permutation>,
    states: usize,
) {
    let Some((head, tail)) = remaining.split_first() else {
        // All block bijections chosen: map each a-class key through them
        // and check the b-side classes line up.
        let mut pairs: Vec<(&Vec<usize>, &Vec<usize>)> = Vec::with_capacity(classes_a.len());
        for (key, members_a) in classes_a {
            let mapped: Vec<u32> = key
                .iter()
                .zip(combo.iter())
                .map(|(&block, bijection)| bijection[block as usize] as u32)
                .collect();
            match classes_b.get(&mapped) {
                Some(members_b) if members_b.len() == members_a.len() => {
                    pairs.push((members_a, members_b));
                }
                _ => return,
            }
        }
        let mut images = vec![0u32; states];
        emit_class_pairings(&pairs, 0, &mut images, found);
        return;
    };
    for bijection in head {
        combo.push(bijection);
        collect_for_block_combos(tail, classes_a, classes_b, combo, found, states);
        combo.pop();
    }
}

/// Every way to biject each a-class onto its target b-class.
fn emit_class_pairings(
    pairs: &[(&Vec<usize>, &Vec<usize>)],
    index: usize,
    images: &mut Vec<u32>,
    found: &mut Vec<Permutation>,
) {
    if index == pairs.len() {
        found.push(
            Permutation::from_images(images.clone()).expect("pairings form a bijection"),
        );
        return;
    }
    let (from, to) = pairs[index];
    let mut order: Vec<usize> = (0..to.len()).collect();
    permute_assign(from, to, &mut order, 0, images, &mut |images| {
        emit_class_pairings(pairs, index + 1, images, found);
    });
}

/// Enumerates all assignments from -> to (both same length) in
/// lexicographic order of the chosen target indices.
fn permute_assign(
    from: &[usize],
    to: &[usize],
    order: &mut Vec<usize>,
    depth: usize,
    images: &mut Vec<u32>,
    emit: &mut dyn FnMut(&mut Vec<u32>),
) {
    if depth == from.len() {
        emit(images);
        return;
    }
    for slot in depth..order.len() {
        order.swap(depth, slot);
        // Keep remaining choices sorted so emission order is stable.
        order[depth + 1..].sort_unstable();
        images[from[depth]] = to[order[depth]] as u32 + 1;
        permute_assign(from, to, order, depth + 1, images, emit);
    }
    order[depth..].sort_unstable();
}

/// All bijections f of 0..len with keys_a[i] == keys_b[f(i)], as image
/// vectors in lexicographic order. Empty iff the key multisets differ.
fn keyed_bijections<K: Ord + Copy>(keys_a: &[K], keys_b: &[K]) -> Vec<Vec<usize>> {
    let mut result = Vec::new();
    let mut image = vec![usize::MAX; keys_a.len()];
    let mut used = vec![false; keys_b.len()];
    fn recurse<K: Ord + Copy>(
        keys_a: &[K],
        keys_b: &[K],
        slot: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        result: &mut Vec<Vec<usize>>,
    ) {
        if slot == keys_a.len() {
            result.push(image.clone());
            return;
        }
        for target in 0..keys_b.len() {
            if !used[target] && keys_b[target] == keys_a[slot] {
                used[target] = true;
                image[slot] = target;
                recurse(keys_a, keys_b, slot + 1, image, used, result);
                used[target] = false;
            }
        }
    }
    if keys_a.len() == keys_b.len() {
        recurse(keys_a, keys_b, 0, &mut image, &mut used, &mut result);
    }
    result
}

/// Every separating frame over `n^k` states in one deterministic order:
/// candidate partitions are generated in restricted-growth order and
/// combined lexicographically. With `balanced_only` the candidates are
/// restricted to blocks of exactly `n^(k-1)` states — which loses
/// nothing, since a separating frame is balanced automatically (each
/// block meets every complementary choice in exactly one state), but
/// shrinks the search space considerably.
pub fn enumerate_separating_frames(
    n: u64,
    k: u32,
    balanced_only: bool,
) -> Result<Vec<Frame>> {
    enumerate_separating_frames_with_limits(n, k, balanced_only, &Limits::DEFAULT)
}

/// [`enumerate_separating_frames`] with an explicit state cap.
pub fn enumerate_separating_frames_with_limits(
    n: u64,
    k: u32,
    balanced_only: bool,
    limits: &Limits,
) -> Result<Vec<Frame>> {
    let plan = EnumerationPlan::prepare(n, k, balanced_only, limits)?;
    #[cfg(feature = "parallel")]
    {
        let nested: Vec<Vec<Frame>> = (0..plan.candidates.len())
            .into_par_iter()
            .map(|first| plan.survivors_for_first(first))
            .collect();
        Ok(nested.into_iter().flatten().collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..plan.candidates.len())
            .flat_map(|first| plan.survivors_for_first(first))
            .collect())
    }
}

/// Single-threaded [`enumerate_separating_frames`]; the default build
/// parallelizes over the leading partition choice instead.
pub fn enumerate_separating_frames_seq(
    n: u64,
    k: u32,
    balanced_only: bool,
    limits: &Limits,
) -> Result<Vec<Frame>> {
    let plan = EnumerationPlan::prepare(n, k, balanced_only, limits)?;
    Ok((0..plan.candidates.len())
        .flat_map(|first| plan.survivors_for_first(first))
        .collect())
}

struct EnumerationPlan {
    n: usize,
    k: usize,
    states: usize,
    /// Block assignment (state offset -> block id) per candidate
    /// partition, in restricted-growth (canonical) order.
    candidates: Vec<Vec<u8>>,
}

impl EnumerationPlan {
    fn prepare(n: u64, k: u32, balanced_only: bool, limits: &Limits) -> Result<Self> {
        if n < 2 || k < 1 {
            return Err(Error::domain("enumeration needs n >= 2 and k >= 1"));
        }
        let states = radix::checked_pow(n, k).ok_or(Error::Capacity {
            what: "frame enumeration states",
            requested: u64::MAX,
            limit: limits.max_enumeration_states,
        })?;
        if states > limits.max_enumeration_states {
            return Err(Error::Capacity {
                what: "frame enumeration states",
                requested: states,
                limit: limits.max_enumeration_states,
            });
        }
        let states = states as usize;
        let n = n as usize;
        let block_size = states / n;
        let mut candidates = Vec::new();
        let mut assignment = vec![0u8; states];
        grow_partitions(&mut assignment, 1, 1, n, &mut |candidate| {
            if balanced_only {
                let mut counts = vec![0usize; n];
                for &block in candidate.iter() {
                    counts[block as usize] += 1;
                }
                if counts.iter().any(|&count| count != block_size) {
                    return;
                }
            }
            candidates.push(candidate.to_vec());
        });
        Ok(EnumerationPlan {
            n,
            k: k as usize,
            states,
            candidates,
        })
    }

    /// All separating frames whose first partition is candidate `first`,
    /// in lexicographic order of the remaining candidate indices.
    fn survivors_for_first(&self, first: usize) -> Vec<Frame> {
        let mut survivors = Vec::new();
        let mut tuple = vec![0usize; self.k];
        tuple[0] = first;
        // Epoch-stamped "seen" buffer avoids clearing between tuples.
        let mut seen = vec![0u32; self.states];
        let mut epoch = 0u32;
        loop {
            epoch += 1;
            let separating = (0..self.states).all(|s0| {
                let signature = tuple
                    .iter()
                    .fold(0usize, |acc, &c| acc * self.n + self.candidates[c][s0] as usize);
                let fresh = seen[signature] != epoch;
                seen[signature] = epoch;
                fresh
            });
            if separating {
                survivors.push(self.realize(&tuple));
            }
            // Odometer over positions 1..k (position 0 is fixed).
            let mut pos = self.k;
            loop {
                if pos == 1 {
                    return survivors;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < self.candidates.len() {
                    break;
                }
                tuple[pos] = 0;
            }
        }
    }

    fn realize(&self, tuple: &[usize]) -> Frame {
        let partitions: Vec<Partition> = tuple
            .iter()
            .map(|&c| {
                let assignment = &self.candidates[c];
                Partition::from_grouping(self.states as u32, |s| assignment[s.zero_based()])
            })
            .collect();
        Frame::new(self.n as u32, self.k as u32, partitions)
            .expect("enumerated candidates have frame shape")
    }
}

/// Restricted growth strings with exactly `blocks` distinct values:
/// every partition of `{1, .., len}` into `blocks` blocks appears once,
/// labeled in first-occurrence order, enumerated lexicographically.
fn grow_partitions(
    assignment: &mut Vec<u8>,
    position: usize,
    used: usize,
    blocks: usize,
    emit: &mut impl FnMut(&[u8]),
) {
    if position == assignment.len() {
        if used == blocks {
            emit(assignment);
        }
        return;
    }
    // Prune: the remaining positions must be able to reach `blocks`
    // distinct values.
    let remaining = assignment.len() - position;
    if used + remaining < blocks {
        return;
    }
    let ceiling = (used + 1).min(blocks);
    for value in 0..ceiling {
        assignment[position] = value as u8;
        let next_used = used.max(value + 1);
        grow_partitions(assignment, position + 1, next_used, blocks, emit);
    }
}

/// Result of scanning permutations for separation (dis)agreement.
#[derive(Debug, Clone)]
pub struct OrbitScan {
    /// How many permutations were examined.
    pub checked: u64,
    /// The first permutation examined whose image frame disagrees with
    /// the source frame's separating verdict, if any. "First" means
    /// lowest lexicographic rank for the exhaustive scan and lowest
    /// sample index for the sampled scan, independent of scheduling.
    pub counterexample: Option<Permutation>,
}

impl OrbitScan {
    /// True when every examined permutation preserved the verdict.
    pub fn consistent(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Does applying `p` to the frame flip its separating verdict? Runs the
/// full public pipeline (elementwise block images, re-canonicalization,
/// fresh verdict) rather than a shortcut, so the scan exercises exactly
/// what callers of [`Frame::apply_permutation`] get.
fn verdict_flips(frame: &Frame, base_separating: bool, p: &Permutation) -> bool {
    let image = frame
        .apply_permutation(p)
        .expect("scan permutations match the frame size");
    image.is_separating() != base_separating
}

/// Checks every one of the `N!` state permutations: relabeling states
/// must never change whether the frame separates. `N` is capped by
/// `limits.max_permutation_states`.
pub fn orbit_separation_exhaustive(frame: &Frame, limits: &Limits) -> Result<OrbitScan> {
    let (total, base) = orbit_exhaustive_plan(frame, limits)?;
    let size = frame.num_states() as u32;
    let flips = |rank: u64| {
        let p = Permutation::unrank(size, rank).expect("rank < N!");
        verdict_flips(frame, base, &p)
    };
    #[cfg(feature = "parallel")]
    let violation = (0..total).into_par_iter().find_first(|&rank| flips(rank));
    #[cfg(not(feature = "parallel"))]
    let violation = (0..total).find(|&rank| flips(rank));
    Ok(OrbitScan {
        checked: total,
        counterexample: violation.map(|rank| Permutation::unrank(size, rank).expect("rank < N!")),
    })
}

/// Single-threaded [`orbit_separation_exhaustive`].
pub fn orbit_separation_exhaustive_seq(frame: &Frame, limits: &Limits) -> Result<OrbitScan> {
    let (total, base) = orbit_exhaustive_plan(frame, limits)?;
    let size = frame.num_states() as u32;
    let violation = (0..total).find(|&rank| {
        let p = Permutation::unrank(size, rank).expect("rank < N!");
        verdict_flips(frame, base, &p)
    });
    Ok(OrbitScan {
        checked: total,
        counterexample: violation.map(|rank| Permutation::unrank(size, rank).expect("rank < N!")),
    })
}

fn orbit_exhaustive_plan(frame: &Frame, limits: &Limits) -> Result<(u64, bool)> {
    let states = frame.num_states();
    if states > limits.max_permutation_states {
        return Err(Error::Capacity {
            what: "permutation scan states",
            requested: states,
            limit: limits.max_permutation_states,
        });
    }
    Ok((Permutation::count(states as u32)?, frame.is_separating()))
}

/// Checks `samples` seeded pseudorandom state permutations instead of
/// all `N!`; reproducible from the seed, and identical with or without
/// the `parallel` feature (each sample derives its own RNG stream, so
/// no draw depends on scheduling).
pub fn orbit_separation_sample(frame: &Frame, samples: u64, seed: u64) -> Result<OrbitScan> {
    let base = frame.is_separating();
    let size = frame.num_states() as u32;
    let perm_at = |index: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Permutation::sample(size, &mut rng)
    };
    #[cfg(feature = "parallel")]
    let violation = (0..samples)
        .into_par_iter()
        .find_first(|&index| verdict_flips(frame, base, &perm_at(index)));
    #[cfg(not(feature = "parallel"))]
    let violation = (0..samples).find(|&index| verdict_flips(frame, base, &perm_at(index)));
    Ok(OrbitScan {
        checked: samples,
        counterexample: violation.map(perm_at),
    })
}
