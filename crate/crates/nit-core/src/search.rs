//! Identification strategies: plan question trees over a repertoire of
//! partitions, score them exactly, and replay them against a hidden
//! state.
//!
//! A *question* is a partition: asking it reveals which block holds the
//! hidden state. A [`Strategy`] is a decision tree whose internal nodes
//! name a question and branch per observed block; leaves carry the
//! candidate states still possible. [`optimal_strategy`] searches all
//! adaptive trees that keep refining while any question still splits the
//! candidates, and minimizes lexicographically: worst-case question
//! count first, then expected question count under a uniform hidden
//! state, then lowest question index at every choice. Scores are exact
//! ([`BigRational`]); when the repertoire cannot tell some states apart
//! the report says so and lists the residual candidate sets instead of
//! pretending a depth.
//!
//! The optimizer runs in two memoized passes over candidate subsets
//! (bitmasks): first the minimax worst case `W`, then the minimum
//! expected count among trees whose worst case stays within budget.
//! Expected count alone is not compositional with the lexicographic
//! order — a subtree may trade worst case against expectation — so the
//! budget-constrained second pass is what makes the per-node choice
//! globally valid.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::limits::Limits;
use crate::partition::{Partition, StateIndex};

/// Masks index states; 64 states is the hard ceiling of the exact
/// search regardless of configured limits.
const MASK_CEILING: u64 = 64;

/// A pool of available questions over a common ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repertoire {
    ground_size: u32,
    questions: Vec<Partition>,
}

impl Repertoire {
    pub fn new(ground_size: u32, questions: Vec<Partition>) -> Result<Repertoire> {
        if ground_size == 0 {
            return Err(Error::domain("a repertoire needs at least one state"));
        }
        for (index, q) in questions.iter().enumerate() {
            if q.ground_size() != ground_size {
                return Err(Error::domain(format!(
                    "question {index} covers {} states, repertoire says {ground_size}",
                    q.ground_size()
                )));
            }
        }
        Ok(Repertoire {
            ground_size,
            questions,
        })
    }

    /// The frame's partitions as questions, in frame order.
    pub fn from_frame(frame: &Frame) -> Repertoire {
        Repertoire {
            ground_size: frame.num_states() as u32,
            questions: frame.partitions().to_vec(),
        }
    }

    pub fn ground_size(&self) -> u32 {
        self.ground_size
    }

    pub fn questions(&self) -> &[Partition] {
        &self.questions
    }
}

impl Serialize for Repertoire {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Repertoire", 2)?;
        st.serialize_field("ground_size", &self.ground_size)?;
        st.serialize_field("questions", &self.questions)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Repertoire {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            ground_size: u32,
            questions: Vec<Partition>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Repertoire::new(raw.ground_size, raw.questions).map_err(D::Error::custom)
    }
}

/// One node of a strategy tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyNode {
    /// Ask `question`; continue with the child keyed by the observed
    /// block. Blocks that no remaining candidate occupies have no child.
    Ask {
        question: usize,
        children: BTreeMap<usize, StrategyNode>,
    },
    /// Stop with these candidates (ascending). A singleton identifies
    /// the state; anything larger is a residual the questions cannot
    /// split.
    Leaf { candidates: Vec<StateIndex> },
}

/// A decision tree over a repertoire's questions. Carries the questions
/// themselves so a serialized strategy replays standalone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    ground_size: u32,
    questions: Vec<Partition>,
    root: StrategyNode,
}

/// Worst-case question count of a strategy, or the admission that the
/// questions cannot identify every state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorstCase {
    Depth(u32),
    NotSeparating,
}

impl Serialize for WorstCase {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WorstCase::Depth(d) => serializer.serialize_u32(*d),
            WorstCase::NotSeparating => serializer.serialize_str("not_separating"),
        }
    }
}

/// Exact scorecard of a strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    /// Maximum questions asked on any path, or `NotSeparating` when
    /// some leaf holds more than one candidate.
    pub worst_case: WorstCase,
    /// Mean questions asked under a uniformly random hidden state.
    pub expected: BigRational,
    /// The non-singleton leaf candidate sets, in tree order; empty for
    /// complete strategies.
    pub residual: Vec<Vec<StateIndex>>,
}

impl Serialize for SearchReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SearchReport", 3)?;
        st.serialize_field("expected", &RatioRepr::from(&self.expected))?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("worst_case", &self.worst_case)?;
        st.end()
    }
}

/// `{"den": "...", "num": "..."}` with decimal-string integers, lowest
/// terms (guaranteed by [`BigRational`]'s reduced form).
#[derive(Serialize)]
struct RatioRepr {
    den: String,
    num: String,
}

impl From<&BigRational> for RatioRepr {
    fn from(value: &BigRational) -> Self {
        RatioRepr {
            den: value.denom().to_string(),
            num: value.numer().to_string(),
        }
    }
}

impl Strategy {
    pub fn ground_size(&self) -> u32 {
        self.ground_size
    }

    pub fn questions(&self) -> &[Partition] {
        &self.questions
    }

    pub fn root(&self) -> &StrategyNode {
        &self.root
    }

    /// Builds with full validation: every `Ask` must branch exactly into
    /// the nonempty intersections of its candidates with the question's
    /// blocks, and every leaf must hold exactly the candidates that
    /// reach it — the same invariants [`optimal_strategy`] guarantees by
    /// construction.
    pub fn new(ground_size: u32, questions: Vec<Partition>, root: StrategyNode) -> Result<Strategy> {
        if ground_size == 0 {
            return Err(Error::domain("a strategy needs at least one state"));
        }
        for (index, q) in questions.iter().enumerate() {
            if q.ground_size() != ground_size {
                return Err(Error::domain(format!(
                    "question {index} covers {} states, strategy says {ground_size}",
                    q.ground_size()
                )));
            }
        }
        let all: Vec<StateIndex> = (0..ground_size as usize)
            .map(StateIndex::from_zero_based)
            .collect();
        validate_node(&root, &questions, &all)?;
        Ok(Strategy {
            ground_size,
            questions,
            root,
        })
    }

    /// Replays the strategy against a hidden state: records every
    /// question asked and block observed, then reports the leaf — the
    /// identified state for singleton leaves, the surviving candidates
    /// otherwise.
    pub fn evaluate(&self, hidden: StateIndex) -> Result<Transcript> {
        if hidden.get() > self.ground_size {
            return Err(Error::domain(format!(
                "hidden state {hidden} is outside 1..{}",
                self.ground_size
            )));
        }
        let mut steps = Vec::new();
        let mut node = &self.root;
        loop {
            match node {
                StrategyNode::Leaf { candidates } => {
                    let outcome = if candidates.len() == 1 {
                        Outcome::Identified {
                            identified: candidates[0],
                        }
                    } else {
                        Outcome::Residual {
                            residual: candidates.clone(),
                        }
                    };
                    return Ok(Transcript { steps, outcome });
                }
                StrategyNode::Ask { question, children } => {
                    let block = self.questions[*question]
                        .block_of(hidden)
                        .expect("hidden state is within the ground set");
                    steps.push(TranscriptStep {
                        question: *question,
                        block,
                    });
                    node = children.get(&block).ok_or_else(|| {
                        Error::domain(format!(
                            "strategy has no branch for block {block} of question {question}; \
                             the hidden state was not among the node's candidates"
                        ))
                    })?;
                }
            }
        }
    }

    /// Scores the tree: worst-case and expected question counts under a
    /// uniform hidden state, plus the residual candidate sets of any
    /// non-singleton leaves.
    pub fn report(&self) -> SearchReport {
        let mut leaves: Vec<(u32, Vec<StateIndex>)> = Vec::new();
        collect_leaves(&self.root, 0, &mut leaves);
        let mut worst_depth = 0u32;
        let mut complete = true;
        let mut weighted = BigInt::zero();
        let mut residual = Vec::new();
        for (depth, candidates) in &leaves {
            worst_depth = worst_depth.max(*depth);
            weighted += BigInt::from(*depth) * BigInt::from(candidates.len());
            if candidates.len() != 1 {
                complete = false;
                residual.push(candidates.clone());
            }
        }
        SearchReport {
            worst_case: if complete {
                WorstCase::Depth(worst_depth)
            } else {
                WorstCase::NotSeparating
            },
            expected: BigRational::new(weighted, BigInt::from(self.ground_size)),
            residual,
        }
    }
}

fn collect_leaves(node: &StrategyNode, depth: u32, out: &mut Vec<(u32, Vec<StateIndex>)>) {
    match node {
        StrategyNode::Leaf { candidates } => out.push((depth, candidates.clone())),
        StrategyNode::Ask { children, .. } => {
            for child in children.values() {
                collect_leaves(child, depth + 1, out);
            }
        }
    }
}

fn validate_node(
    node: &StrategyNode,
    questions: &[Partition],
    candidates: &[StateIndex],
) -> Result<()> {
    match node {
        StrategyNode::Leaf { candidates: stated } => {
            if stated != candidates {
                return Err(Error::domain(format!(
                    "leaf lists candidates {stated:?} but {candidates:?} reach it"
                )));
            }
            Ok(())
        }
        StrategyNode::Ask { question, children } => {
            let q = questions.get(*question).ok_or_else(|| {
                Error::domain(format!(
                    "node asks question {question} but only {} exist",
                    questions.len()
                ))
            })?;
            let mut by_block: BTreeMap<usize, Vec<StateIndex>> = BTreeMap::new();
            for &s in candidates {
                by_block
                    .entry(q.block_of(s).expect("candidates lie in the ground set"))
                    .or_default()
                    .push(s);
            }
            if children.keys().ne(by_block.keys()) {
                return Err(Error::domain(format!(
                    "question {question} splits the candidates into blocks {:?} \
                     but the node branches on {:?}",
                    by_block.keys().collect::<Vec<_>>(),
                    children.keys().collect::<Vec<_>>()
                )));
            }
            for (block, child) in children {
                validate_node(child, questions, &by_block[block])?;
            }
            Ok(())
        }
    }
}

// --- Strategy / node JSON ------------------------------------------------
//
// Nodes serialize as {"ask": q, "children": {"<block>": node, ...}} and
// {"leaf": [states]}; the strategy wraps them with its ground size and
// question list so a file replays standalone.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AskRepr {
    ask: usize,
    children: BTreeMap<String, NodeRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafRepr {
    leaf: Vec<StateIndex>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeRepr {
    Ask(AskRepr),
    Leaf(LeafRepr),
}

impl From<&StrategyNode> for NodeRepr {
    fn from(node: &StrategyNode) -> Self {
        match node {
            StrategyNode::Ask { question, children } => NodeRepr::Ask(AskRepr {
                ask: *question,
                children: children
                    .iter()
                    .map(|(block, child)| (block.to_string(), NodeRepr::from(child)))
                    .collect(),
            }),
            StrategyNode::Leaf { candidates } => NodeRepr::Leaf(LeafRepr {
                leaf: candidates.clone(),
            }),
        }
    }
}

impl NodeRepr {
    fn into_node(self) -> Result<StrategyNode> {
        match self {
            NodeRepr::Ask(AskRepr { ask, children }) => {
                let mut parsed = BTreeMap::new();
                for (key, child) in children {
                    let block: usize = key
                        .parse()
                        .map_err(|_| Error::parse(format!("branch key {key:?} is not a block index")))?;
                    parsed.insert(block, child.into_node()?);
                }
                Ok(StrategyNode::Ask {
                    question: ask,
                    children: parsed,
                })
            }
            NodeRepr::Leaf(LeafRepr { leaf }) => Ok(StrategyNode::Leaf { candidates: leaf }),
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Strategy", 3)?;
        st.serialize_field("ground_size", &self.ground_size)?;
        st.serialize_field("questions", &self.questions)?;
        st.serialize_field("tree", &NodeRepr::from(&self.root))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            ground_size: u32,
            questions: Vec<Partition>,
            tree: NodeRepr,
        }
        let raw = Raw::deserialize(deserializer)?;
        let root = raw.tree.into_node().map_err(D::Error::custom)?;
        Strategy::new(raw.ground_size, raw.questions, root).map_err(D::Error::custom)
    }
}

/// One asked question and the observed block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TranscriptStep {
    pub block: usize,
    pub question: usize,
}

/// Where a replay ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Identified { identified: StateIndex },
    Residual { residual: Vec<StateIndex> },
}

/// The record of replaying a strategy against one hidden state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub steps: Vec<TranscriptStep>,
    pub outcome: Outcome,
}

impl Serialize for Transcript {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Transcript", 2)?;
        st.serialize_field("outcome", &self.outcome)?;
        st.serialize_field("steps", &self.steps)?;
        st.end()
    }
}

/// The fixed-order strategy that asks a separating frame's partitions
/// first to last on every path: depth exactly `k`, every leaf a
/// singleton, no adaptivity needed. Rejects non-separating frames.
pub fn plan_straight_line(frame: &Frame) -> Result<Strategy> {
    if !frame.is_separating() {
        return Err(Error::domain(
            "the frame does not separate its states; a fixed question order cannot identify them",
        ));
    }
    let questions = frame.partitions().to_vec();
    let all: Vec<StateIndex> = (0..frame.num_states() as usize)
        .map(StateIndex::from_zero_based)
        .collect();
    let root = straight_line_node(&questions, 0, all);
    Strategy::new(frame.num_states() as u32, questions, root)
}

fn straight_line_node(
    questions: &[Partition],
    depth: usize,
    candidates: Vec<StateIndex>,
) -> StrategyNode {
    if depth == questions.len() {
        return StrategyNode::Leaf { candidates };
    }
    let mut by_block: BTreeMap<usize, Vec<StateIndex>> = BTreeMap::new();
    for &s in &candidates {
        by_block
            .entry(questions[depth].block_of(s).expect("candidate in range"))
            .or_default()
            .push(s);
    }
    StrategyNode::Ask {
        question: depth,
        children: by_block
            .into_iter()
            .map(|(block, child)| (block, straight_line_node(questions, depth + 1, child)))
            .collect(),
    }
}

/// The best adaptive strategy for the repertoire and its exact
/// scorecard. "Best" is lexicographic: minimize the worst-case question
/// count, then the expected count under a uniform hidden state, then
/// prefer the lowest question index at every decision. Strategies keep
/// asking while any question splits the remaining candidates; when none
/// does and several candidates remain, the repertoire cannot separate
/// them and the report carries the residual sets.
pub fn optimal_strategy(repertoire: &Repertoire) -> Result<(Strategy, SearchReport)> {
    optimal_strategy_with_limits(repertoire, &Limits::DEFAULT)
}

/// [`optimal_strategy`] with an explicit state cap.
pub fn optimal_strategy_with_limits(
    repertoire: &Repertoire,
    limits: &Limits,
) -> Result<(Strategy, SearchReport)> {
    let states = u64::from(repertoire.ground_size());
    let cap = limits.max_search_states.min(MASK_CEILING);
    if states > cap {
        return Err(Error::Capacity {
            what: "strategy search states",
            requested: states,
            limit: cap,
        });
    }
    let mut planner = Planner::new(repertoire);
    let full: Mask = if states == MASK_CEILING {
        u64::MAX
    } else {
        (1u64 << states) - 1
    };
    let budget = planner.worst(full);
    let root = planner.build(full, budget);
    let strategy = Strategy::new(
        repertoire.ground_size(),
        repertoire.questions().to_vec(),
        root,
    )
    .expect("planned trees satisfy the strategy invariants");
    let report = strategy.report();
    Ok((strategy, report))
}

/// Scores two repertoires over the same states with
/// [`optimal_strategy`] and their exact differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub reference: SearchReport,
    pub other: SearchReport,
    /// `other - reference` worst-case depths; `None` when either side
    /// is `NotSeparating`.
    pub worst_case_difference: Option<i64>,
    /// `other - reference` expected question counts.
    pub expected_difference: BigRational,
    /// True when `other` fails to separate or is strictly worse on
    /// either metric.
    pub other_inferior: bool,
}

/// Plans both repertoires optimally and reports how `other` compares to
/// `reference`.
pub fn compare(reference: &Repertoire, other: &Repertoire) -> Result<Comparison> {
    compare_with_limits(reference, other, &Limits::DEFAULT)
}

/// [`compare`] with an explicit state cap.
pub fn compare_with_limits(
    reference: &Repertoire,
    other: &Repertoire,
    limits: &Limits,
) -> Result<Comparison> {
    if reference.ground_size() != other.ground_size() {
        return Err(Error::domain(format!(
            "repertoires cover different state counts: {} vs {}",
            reference.ground_size(),
            other.ground_size()
        )));
    }
    let (_, report_ref) = optimal_strategy_with_limits(reference, limits)?;
    let (_, report_other) = optimal_strategy_with_limits(other, limits)?;
    let worst_case_difference = match (report_ref.worst_case, report_other.worst_case) {
        (WorstCase::Depth(a), WorstCase::Depth(b)) => Some(i64::from(b) - i64::from(a)),
        _ => None,
    };
    let expected_difference = &report_other.expected - &report_ref.expected;
    let other_inferior = match (report_ref.worst_case, report_other.worst_case) {
        (_, WorstCase::NotSeparating) => true,
        (WorstCase::NotSeparating, WorstCase::Depth(_)) => false,
        (WorstCase::Depth(a), WorstCase::Depth(b)) => {
            b > a || report_other.expected > report_ref.expected
        }
    };
    Ok(Comparison {
        reference: report_ref,
        other: report_other,
        worst_case_difference,
        expected_difference,
        other_inferior,
    })
}

type Mask = u64;

struct Planner {
    /// Per question, per state: the block index.
    assignments: Vec<Vec<u32>>,
    states: u32,
    worst_memo: HashMap<Mask, u32>,
    /// Keyed by (candidates, remaining budget): minimal expected
    /// further questions and the question that attains it (`None` at
    /// terminal nodes).
    expected_memo: HashMap<(Mask, u32), (BigRational, Option<usize>)>,
}

impl Planner {
    fn new(repertoire: &Repertoire) -> Planner {
        Planner {
            assignments: repertoire
                .questions()
                .iter()
                .map(|q| q.block_assignment())
                .collect(),
            states: repertoire.ground_size(),
            worst_memo: HashMap::new(),
            expected_memo: HashMap::new(),
        }
    }

    /// The nonempty (block, candidates) pairs of asking `question`, or
    /// `None` when everything lands in one block (the question teaches
    /// nothing there and is pruned — this also covers re-asking).
    fn split(&self, mask: Mask, question: usize) -> Option<Vec<(usize, Mask)>> {
        let assignment = &self.assignments[question];
        let mut by_block: BTreeMap<usize, Mask> = BTreeMap::new();
        let mut rest = mask;
        while rest != 0 {
            let s0 = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            *by_block.entry(assignment[s0] as usize).or_insert(0) |= 1u64 << s0;
        }
        if by_block.len() < 2 {
            return None;
        }
        Some(by_block.into_iter().collect())
    }

    /// Minimax further-question count: 0 at singletons and at candidate
    /// sets no question splits (the strategy must stop there), otherwise
    /// 1 + the best achievable maximum over the children.
    fn worst(&mut self, mask: Mask) -> u32 {
        if mask.count_ones() <= 1 {
            return 0;
        }
        if let Some(&w) = self.worst_memo.get(&mask) {
            return w;
        }
        let mut best: Option<u32> = None;
        for question in 0..self.assignments.len() {
            if let Some(children) = self.split(mask, question) {
                let mut deepest = 0;
                for (_, child) in children {
                    deepest = deepest.max(self.worst(child));
                }
                best = Some(best.map_or(deepest + 1, |b| b.min(deepest + 1)));
            }
        }
        let w = best.unwrap_or(0);
        self.worst_memo.insert(mask, w);
        w
    }

    /// Minimal expected further questions among subtrees whose worst
    /// case stays within `budget`, and the (lowest-index) question that
    /// attains it. `budget >= worst(mask)` always admits a choice.
    fn expected(&mut self, mask: Mask, budget: u32) -> (BigRational, Option<usize>) {
        if mask.count_ones() <= 1 {
            return (BigRational::zero(), None);
        }
        if let Some(cached) = self.expected_memo.get(&(mask, budget)) {
            return cached.clone();
        }
        let population = BigInt::from(mask.count_ones());
        let mut best: Option<(BigRational, usize)> = None;
        let mut splittable = false;
        for question in 0..self.assignments.len() {
            let Some(children) = self.split(mask, question) else {
                continue;
            };
            splittable = true;
            if budget == 0 {
                continue;
            }
            if children.iter().any(|&(_, child)| self.worst(child) > budget - 1) {
                continue;
            }
            let mut acc = BigRational::zero();
            for &(_, child) in &children {
                let weight = BigRational::new(
                    BigInt::from(child.count_ones()),
                    population.clone(),
                );
                acc += weight * self.expected(child, budget - 1).0;
            }
            let cost = acc + BigRational::from(BigInt::from(1));
            // Strict improvement only: the first question reaching the
            // minimum keeps the choice, giving the lowest-index
            // tie-break.
            let improves = match &best {
                Some((current, _)) => cost < *current,
                None => true,
            };
            if improves {
                best = Some((cost, question));
            }
        }
        let result = match best {
            Some((cost, question)) => (cost, Some(question)),
            None => {
                debug_assert!(!splittable, "budget below the minimax worst case");
                (BigRational::zero(), None)
            }
        };
        self.expected_memo.insert((mask, budget), result.clone());
        result
    }

    fn build(&mut self, mask: Mask, budget: u32) -> StrategyNode {
        let (_, choice) = self.expected(mask, budget);
        match choice {
            None => StrategyNode::Leaf {
                candidates: mask_states(mask, self.states),
            },
            Some(question) => {
                let children = self
                    .split(mask, question)
                    .expect("the chosen question splits");
                StrategyNode::Ask {
                    question,
                    children: children
                        .into_iter()
                        .map(|(block, child)| (block, self.build(child, budget - 1)))
                        .collect(),
                }
            }
        }
    }
}

fn mask_states(mask: Mask, states: u32) -> Vec<StateIndex> {
    (0..states as usize)
        .filter(|s0| mask & (1u64 << s0) != 0)
        .map(StateIndex::from_zero_based)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{canonical_frame, Frame};

    fn part(ground: u32, blocks: &[&[u32]]) -> Partition {
        Partition::from_blocks(ground, blocks.iter().map(|b| b.iter().copied())).unwrap()
    }

    fn states(values: &[u32]) -> Vec<StateIndex> {
        values.iter().map(|&v| StateIndex::new(v).unwrap()).collect()
    }

    fn ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn unbalanced_repertoire() -> Repertoire {
        Repertoire::new(
            9,
            vec![
                part(9, &[&[1], &[2, 3], &[4, 5, 6, 7, 8, 9]]),
                part(9, &[&[1, 4, 7], &[2, 5, 8], &[3, 6, 9]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn straight_line_plan_for_two_trits() {
        let frame = canonical_frame(3, 2).unwrap();
        let strategy = plan_straight_line(&frame).unwrap();
        let report = strategy.report();
        assert_eq!(report.worst_case, WorstCase::Depth(2));
        assert_eq!(report.expected, ratio(2, 1));
        assert!(report.residual.is_empty());
        for hidden in 1..=9u32 {
            let transcript = strategy.evaluate(StateIndex::new(hidden).unwrap()).unwrap();
            assert_eq!(transcript.steps.len(), 2);
            assert_eq!(
                transcript.outcome,
                Outcome::Identified {
                    identified: StateIndex::new(hidden).unwrap()
                }
            );
        }
    }

    #[test]
    fn straight_line_transcript_blocks() {
        let frame = canonical_frame(3, 2).unwrap();
        let strategy = plan_straight_line(&frame).unwrap();
        let transcript = strategy.evaluate(StateIndex::new(3).unwrap()).unwrap();
        // State 3 sits in block 0 of the row partition ({1,2,3}) and
        // block 2 of the column partition ({3,6,9}).
        assert_eq!(
            transcript.steps,
            vec![
                TranscriptStep { block: 0, question: 0 },
                TranscriptStep { block: 2, question: 1 },
            ]
        );
    }

    #[test]
    fn straight_line_rejects_non_separating() {
        let rows = part(9, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let frame = Frame::new(3, 2, vec![rows.clone(), rows]).unwrap();
        assert!(plan_straight_line(&frame).is_err());
    }

    #[test]
    fn straight_line_single_question() {
        let frame = canonical_frame(5, 1).unwrap();
        let strategy = plan_straight_line(&frame).unwrap();
        let report = strategy.report();
        assert_eq!(report.worst_case, WorstCase::Depth(1));
        assert_eq!(report.expected, ratio(1, 1));
        let transcript = strategy.evaluate(StateIndex::new(5).unwrap()).unwrap();
        assert_eq!(transcript.steps.len(), 1);
        assert_eq!(
            transcript.outcome,
            Outcome::Identified {
                identified: StateIndex::new(5).unwrap()
            }
        );
    }

    #[test]
    fn optimal_on_canonical_two_trits() {
        let repertoire = Repertoire::from_frame(&canonical_frame(3, 2).unwrap());
        let (strategy, report) = optimal_strategy(&repertoire).unwrap();
        assert_eq!(report.worst_case, WorstCase::Depth(2));
        assert_eq!(report.expected, ratio(2, 1));
        assert!(report.residual.is_empty());
        assert_eq!(strategy.report(), report);
    }

    #[test]
    fn optimal_on_unbalanced_pair_reports_residual() {
        let (strategy, report) = optimal_strategy(&unbalanced_repertoire()).unwrap();
        assert_eq!(report.worst_case, WorstCase::NotSeparating);
        assert_eq!(report.expected, ratio(17, 9));
        assert_eq!(
            report.residual,
            vec![states(&[4, 7]), states(&[5, 8]), states(&[6, 9])]
        );
        // The narrow first question pays off in expectation: the best
        // tree asks it first even though both orders refine maximally.
        match strategy.root() {
            StrategyNode::Ask { question, .. } => assert_eq!(*question, 0),
            StrategyNode::Leaf { .. } => panic!("root must ask"),
        }
        let transcript = strategy.evaluate(StateIndex::new(7).unwrap()).unwrap();
        assert_eq!(
            transcript.outcome,
            Outcome::Residual {
                residual: states(&[4, 7])
            }
        );
        let identified = strategy.evaluate(StateIndex::new(1).unwrap()).unwrap();
        assert_eq!(
            identified.outcome,
            Outcome::Identified {
                identified: StateIndex::new(1).unwrap()
            }
        );
        assert_eq!(identified.steps.len(), 1);
    }

    #[test]
    fn optimal_on_four_state_pairs() {
        // Any two distinct balanced 2-block questions separate 4 states.
        let questions = vec![
            part(4, &[&[1, 2], &[3, 4]]),
            part(4, &[&[1, 3], &[2, 4]]),
            part(4, &[&[1, 4], &[2, 3]]),
        ];
        let repertoire = Repertoire::new(4, questions).unwrap();
        let (_, report) = optimal_strategy(&repertoire).unwrap();
        assert_eq!(report.worst_case, WorstCase::Depth(2));
        assert_eq!(report.expected, ratio(2, 1));
    }

    #[test]
    fn optimal_prefers_lower_expected_within_equal_worst() {
        // Question 0 splits 1|234; questions 1 and 2 together separate
        // everything in two steps. Asking 1 first costs worst 2,
        // expected 2; asking 0 first costs worst 3. The optimum takes
        // worst 2 despite question 0's cheap singleton.
        let questions = vec![
            part(4, &[&[1], &[2, 3, 4]]),
            part(4, &[&[1, 2], &[3, 4]]),
            part(4, &[&[1, 3], &[2, 4]]),
        ];
        let repertoire = Repertoire::new(4, questions).unwrap();
        let (strategy, report) = optimal_strategy(&repertoire).unwrap();
        assert_eq!(report.worst_case, WorstCase::Depth(2));
        assert_eq!(report.expected, ratio(2, 1));
        match strategy.root() {
            StrategyNode::Ask { question, .. } => assert_eq!(*question, 1),
            StrategyNode::Leaf { .. } => panic!("root must ask"),
        }
    }

    #[test]
    fn empty_repertoire_is_all_residual() {
        let repertoire = Repertoire::new(4, vec![]).unwrap();
        let (strategy, report) = optimal_strategy(&repertoire).unwrap();
        assert_eq!(report.worst_case, WorstCase::NotSeparating);
        assert_eq!(report.expected, ratio(0, 1));
        assert_eq!(report.residual, vec![states(&[1, 2, 3, 4])]);
        assert_eq!(
            strategy.evaluate(StateIndex::new(2).unwrap()).unwrap().outcome,
            Outcome::Residual {
                residual: states(&[1, 2, 3, 4])
            }
        );
    }

    #[test]
    fn single_state_needs_no_questions() {
        let repertoire = Repertoire::new(1, vec![]).unwrap();
        let (_, report) = optimal_strategy(&repertoire).unwrap();
        assert_eq!(report.worst_case, WorstCase::Depth(0));
        assert_eq!(report.expected, ratio(0, 1));
        assert!(report.residual.is_empty());
    }

    #[test]
    fn capacity_cap_applies() {
        let repertoire = Repertoire::new(21, vec![]).unwrap();
        assert!(matches!(
            optimal_strategy(&repertoire),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn compare_unbalanced_against_canonical() {
        let reference = Repertoire::from_frame(&canonical_frame(3, 2).unwrap());
        let comparison = compare(&reference, &unbalanced_repertoire()).unwrap();
        assert!(comparison.other_inferior);
        assert_eq!(comparison.worst_case_difference, None);
        assert_eq!(comparison.expected_difference, ratio(-1, 9));
        assert_eq!(comparison.other.worst_case, WorstCase::NotSeparating);
    }

    #[test]
    fn compare_repertoire_with_itself_is_equal() {
        let repertoire = Repertoire::from_frame(&canonical_frame(2, 2).unwrap());
        let comparison = compare(&repertoire, &repertoire).unwrap();
        assert!(!comparison.other_inferior);
        assert_eq!(comparison.worst_case_difference, Some(0));
        assert_eq!(comparison.expected_difference, ratio(0, 1));
    }

    #[test]
    fn compare_canonical_with_full_pair_pool() {
        let reference = Repertoire::from_frame(&canonical_frame(2, 2).unwrap());
        let pool = Repertoire::new(
            4,
            vec![
                part(4, &[&[1, 2], &[3, 4]]),
                part(4, &[&[1, 3], &[2, 4]]),
                part(4, &[&[1, 4], &[2, 3]]),
            ],
        )
        .unwrap();
        let comparison = compare(&reference, &pool).unwrap();
        assert_eq!(comparison.worst_case_difference, Some(0));
        assert!(!comparison.other_inferior);
    }

    #[test]
    fn compare_rejects_mismatched_grounds() {
        let a = Repertoire::from_frame(&canonical_frame(2, 2).unwrap());
        let b = Repertoire::from_frame(&canonical_frame(3, 2).unwrap());
        assert!(compare(&a, &b).is_err());
    }

    #[test]
    fn evaluate_rejects_out_of_range_hidden() {
        let strategy = plan_straight_line(&canonical_frame(2, 2).unwrap()).unwrap();
        assert!(strategy.evaluate(StateIndex::new(5).unwrap()).is_err());
    }

    #[test]
    fn strategy_validation_catches_inconsistent_trees() {
        let questions = vec![part(2, &[&[1], &[2]])];
        // Correct tree.
        let good = StrategyNode::Ask {
            question: 0,
            children: BTreeMap::from([
                (0, StrategyNode::Leaf { candidates: states(&[1]) }),
                (1, StrategyNode::Leaf { candidates: states(&[2]) }),
            ]),
        };
        assert!(Strategy::new(2, questions.clone(), good).is_ok());
        // Leaf lies about its candidates.
        let lying = StrategyNode::Ask {
            question: 0,
            children: BTreeMap::from([
                (0, StrategyNode::Leaf { candidates: states(&[2]) }),
                (1, StrategyNode::Leaf { candidates: states(&[2]) }),
            ]),
        };
        assert!(Strategy::new(2, questions.clone(), lying).is_err());
        // Missing branch.
        let missing = StrategyNode::Ask {
            question: 0,
            children: BTreeMap::from([(0, StrategyNode::Leaf { candidates: states(&[1]) })]),
        };
        assert!(Strategy::new(2, questions.clone(), missing).is_err());
        // Question index out of range.
        let dangling = StrategyNode::Ask {
            question: 3,
            children: BTreeMap::new(),
        };
        assert!(Strategy::new(2, questions, dangling).is_err());
    }

    #[test]
    fn strategy_serde_round_trip() {
        let (strategy, _) = optimal_strategy(&unbalanced_repertoire()).unwrap();
        let json = serde_json::to_value(&strategy).unwrap().to_string();
        let back: Strategy = serde_json::from_str(&json).unwrap();
        assert_eq!(back, strategy);
        // A tampered leaf fails validation on the way back in.
        let tampered = json.replace("\"leaf\":[4,7]", "\"leaf\":[4,8]");
        assert_ne!(tampered, json);
        assert!(serde_json::from_str::<Strategy>(&tampered).is_err());
    }

    #[test]
    fn report_serialization_shape() {
        let (_, report) = optimal_strategy(&unbalanced_repertoire()).unwrap();
        let json = serde_json::to_value(&report).unwrap().to_string();
        assert_eq!(
            json,
            r#"{"expected":{"den":"9","num":"17"},"residual":[[4,7],[5,8],[6,9]],"worst_case":"not_separating"}"#
        );
        let complete =
            plan_straight_line(&canonical_frame(2, 2).unwrap()).unwrap();
        let json = serde_json::to_value(&complete.report()).unwrap().to_string();
        assert_eq!(
            json,
            r#"{"expected":{"den":"1","num":"2"},"residual":[],"worst_case":2}"#
        );
    }

    #[test]
    fn transcript_serialization_shape() {
        let strategy = plan_straight_line(&canonical_frame(3, 2).unwrap()).unwrap();
        let transcript = strategy.evaluate(StateIndex::new(3).unwrap()).unwrap();
        let json = serde_json::to_value(&transcript).unwrap().to_string();
        assert_eq!(
            json,
            r#"{"outcome":{"identified":3},"steps":[{"block":0,"question":0},{"block":2,"question":1}]}"#
        );
        let (residual_strategy, _) = optimal_strategy(&unbalanced_repertoire()).unwrap();
        let transcript = residual_strategy.evaluate(StateIndex::new(7).unwrap()).unwrap();
        let json = serde_json::to_value(&transcript).unwrap().to_string();
        assert_eq!(
            json,
            r#"{"outcome":{"residual":[4,7]},"steps":[{"block":2,"question":0},{"block":0,"question":1}]}"#
        );
    }

    #[test]
    fn repertoire_serde() {
        let repertoire = unbalanced_repertoire();
        let json = serde_json::to_value(&repertoire).unwrap().to_string();
        assert_eq!(
            json,
            r#"{"ground_size":9,"questions":[[[1],[2,3],[4,5,6,7,8,9]],[[1,4,7],[2,5,8],[3,6,9]]]}"#
        );
        let back: Repertoire = serde_json::from_str(&json).unwrap();
        assert_eq!(back, repertoire);
        assert!(serde_json::from_str::<Repertoire>(
            r#"{"ground_size":4,"questions":[[[1],[2,3]]]}"#
        )
        .is_err());
    }
}
