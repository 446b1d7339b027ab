//! Exact Hilbert-space layer: tensor indexing, integer-coordinate
//! vectors with symbolic normalization, and the entangled diagonal
//! bases.
//!
//! A vector here is a list of integer coefficients together with a
//! positive integer `norm_sq`; the actual unit vector is
//! `coeffs / sqrt(norm_sq)`, so normalization (`sum of squares ==
//! norm_sq`), orthogonality, overlaps, and measurement probabilities are
//! all equality checks on integers and rationals — no floating point and
//! no tolerances.
//!
//! [`diagonal_bases`] builds, for odd `n` at `k = 2`, two families of
//! `n` vectors: family 1 sums the product states along the cyclic
//! diagonals `(j, (j+m) mod n)` and family 2 along the antidiagonals
//! `(j, (m-j) mod n)`. Each family is orthonormal with disjoint
//! supports, the two support partitions separate the `n^2` states, and
//! every cross-family pair overlaps in exactly one product state, giving
//! squared overlap `1/n^2` — the mutual-unbiasedness pattern, realized
//! with nothing but 0/1 coefficients. For even `n` the two cyclic Latin
//! squares fail to be orthogonal and the construction breaks down, so
//! even `n` is rejected rather than silently returning a non-separating
//! pair.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partition::{Partition, StateIndex};
use crate::radix;

/// State number (1-based) of the product state with the given per-
/// subsystem levels: `coords[i]` is the 0-based level of subsystem `i`,
/// and states are ordered lexicographically, so `(0,..,0)` is state 1
/// and `(n-1,..,n-1)` is state `n^k`.
pub fn index_from_tuple(coords: &[u64], n: u64, k: u32) -> Result<StateIndex> {
    if n < 2 || k < 1 {
        return Err(Error::domain("product labels need n >= 2 and k >= 1"));
    }
    let states = radix::checked_pow(n, k)
        .filter(|&states| states <= u64::from(u32::MAX))
        .ok_or_else(|| Error::domain(format!("n^k overflows a state index for n={n}, k={k}")))?;
    if coords.len() != k as usize {
        return Err(Error::domain(format!(
            "{} coordinates for k = {k} subsystems",
            coords.len()
        )));
    }
    let mut index0 = 0u64;
    for (position, &coord) in coords.iter().enumerate() {
        if coord >= n {
            return Err(Error::domain(format!(
                "coordinate {coord} at position {position} is outside 0..{n}"
            )));
        }
        index0 = index0 * n + coord;
    }
    debug_assert!(index0 < states);
    Ok(StateIndex::from_zero_based(index0 as usize))
}

/// The per-subsystem levels of a state number — inverse of
/// [`index_from_tuple`].
pub fn tuple_from_index(state: StateIndex, n: u64, k: u32) -> Result<Vec<u64>> {
    if n < 2 || k < 1 {
        return Err(Error::domain("product labels need n >= 2 and k >= 1"));
    }
    let states = radix::checked_pow(n, k)
        .filter(|&states| states <= u64::from(u32::MAX))
        .ok_or_else(|| Error::domain(format!("n^k overflows a state index for n={n}, k={k}")))?;
    if u64::from(state.get()) > states {
        return Err(Error::domain(format!(
            "state {state} is outside 1..{states}"
        )));
    }
    let index0 = state.zero_based() as u64;
    Ok((0..k).map(|pos| radix::digit(index0, pos, n, k)).collect())
}

/// An integer-coordinate vector `coeffs / sqrt(norm_sq)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactVector {
    coeffs: Vec<BigInt>,
    norm_sq: BigInt,
}

impl ExactVector {
    /// `norm_sq` must be positive; it is a claim, checked by
    /// [`ExactVector::is_normalized`], not recomputed from the
    /// coefficients.
    pub fn new(coeffs: Vec<BigInt>, norm_sq: BigInt) -> Result<ExactVector> {
        if coeffs.is_empty() {
            return Err(Error::domain("a vector needs at least one coefficient"));
        }
        if norm_sq <= BigInt::zero() {
            return Err(Error::domain(format!(
                "norm_sq must be a positive integer, got {norm_sq}"
            )));
        }
        Ok(ExactVector { coeffs, norm_sq })
    }

    /// The standard unit vector pointing along `state`.
    pub fn unit(dimension: u32, state: StateIndex) -> Result<ExactVector> {
        if state.get() > dimension {
            return Err(Error::domain(format!(
                "state {state} is outside 1..{dimension}"
            )));
        }
        let mut coeffs = vec![BigInt::zero(); dimension as usize];
        coeffs[state.zero_based()] = BigInt::one();
        ExactVector::new(coeffs, BigInt::one())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> &BigInt {
        &self.norm_sq
    }

    pub fn dimension(&self) -> u32 {
        self.coeffs.len() as u32
    }

    /// Does the sum of squared coefficients equal the declared
    /// `norm_sq`, i.e. is `coeffs / sqrt(norm_sq)` a unit vector?
    pub fn is_normalized(&self) -> bool {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc + c * c)
            == self.norm_sq
    }

    /// The states with nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<StateIndex> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s0, _)| StateIndex::from_zero_based(s0))
            .collect()
    }

    /// The integer dot product of the coefficient lists (normalization
    /// prefactors not applied).
    pub fn dot(&self, other: &ExactVector) -> Result<BigInt> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::domain(format!(
                "vectors of dimension {} and {} have no inner product",
                self.coeffs.len(),
                other.coeffs.len()
            )));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
    }
}

impl std::fmt::Debug for ExactVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (index, coeff) in self.coeffs.iter().enumerate() {
            if index > 0 {
                write!(f, ",")?;
            }
            write!(f, "{coeff}")?;
        }
        write!(f, ")/sqrt({})", self.norm_sq)
    }
}

impl Serialize for ExactVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ExactVector", 2)?;
        let digits: Vec<String> = self.coeffs.iter().map(BigInt::to_string).collect();
        st.serialize_field("coeffs", &digits)?;
        st.serialize_field("norm_sq", &self.norm_sq.to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ExactVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            coeffs: Vec<String>,
            norm_sq: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let parse = |text: &str| {
            text.parse::<BigInt>()
                .map_err(|_| D::Error::custom(format!("bad integer literal {text:?}")))
        };
        let coeffs: std::result::Result<Vec<BigInt>, D::Error> =
            raw.coeffs.iter().map(|c| parse(c)).collect();
        ExactVector::new(coeffs?, parse(&raw.norm_sq)?).map_err(D::Error::custom)
    }
}

/// An orthonormal family: normalized vectors of one dimension with
/// pairwise zero dot products. Not necessarily complete — the diagonal
/// families put `n` vectors in an `n^2`-dimensional space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactBasis {
    vectors: Vec<ExactVector>,
}

impl ExactBasis {
    pub fn new(vectors: Vec<ExactVector>) -> Result<ExactBasis> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::domain("a basis needs at least one vector"))?;
        let dimension = first.dimension();
        for (index, vector) in vectors.iter().enumerate() {
            if vector.dimension() != dimension {
                return Err(Error::domain(format!(
                    "vector {index} has dimension {}, expected {dimension}",
                    vector.dimension()
                )));
            }
            if !vector.is_normalized() {
                return Err(Error::domain(format!(
                    "vector {index} is not normalized: squared coefficients do not sum to its norm_sq"
                )));
            }
        }
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                let dot = vectors[i].dot(&vectors[j]).expect("dimensions checked");
                if !dot.is_zero() {
                    return Err(Error::domain(format!(
                        "vectors {i} and {j} are not orthogonal (dot product {dot})"
                    )));
                }
            }
        }
        Ok(ExactBasis { vectors })
    }

    pub fn vectors(&self) -> &[ExactVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dimension(&self) -> u32 {
        self.vectors[0].dimension()
    }

    /// True when the family has as many vectors as dimensions —
    /// orthonormal vectors are independent, so that is completeness.
    pub fn is_complete(&self) -> bool {
        self.vectors.len() == self.dimension() as usize
    }

    /// The partition whose blocks are the vector supports; fails if the
    /// supports overlap or miss a state.
    pub fn support_partition(&self) -> Result<Partition> {
        Partition::from_blocks(
            self.dimension(),
            self.vectors
                .iter()
                .map(|v| v.support().iter().map(|s| s.get()).collect::<Vec<u32>>()),
        )
    }
}

impl Serialize for ExactBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.vectors.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactBasis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let vectors = Vec::<ExactVector>::deserialize(deserializer)?;
        ExactBasis::new(vectors).map_err(D::Error::custom)
    }
}

/// The complete standard basis of the `n^k`-dimensional space: unit
/// vector `s` for every state `s`.
pub fn standard_basis(n: u64, k: u32) -> Result<ExactBasis> {
    standard_basis_with_limits(n, k, &Limits::DEFAULT)
}

/// [`standard_basis`] with an explicit dimension cap.
pub fn standard_basis_with_limits(n: u64, k: u32, limits: &Limits) -> Result<ExactBasis> {
    if n < 2 || k < 1 {
        return Err(Error::domain("the standard basis needs n >= 2 and k >= 1"));
    }
    let states = radix::checked_pow(n, k).ok_or(Error::Capacity {
        what: "standard basis dimension",
        requested: u64::MAX,
        limit: limits.max_basis_states,
    })?;
    if states > limits.max_basis_states {
        return Err(Error::Capacity {
            what: "standard basis dimension",
            requested: states,
            limit: limits.max_basis_states,
        });
    }
    let dimension = states as u32;
    let vectors: Result<Vec<ExactVector>> = (0..states as usize)
        .map(|s0| ExactVector::unit(dimension, StateIndex::from_zero_based(s0)))
        .collect();
    ExactBasis::new(vectors?)
}

/// The two entangled diagonal families for two `n`-level subsystems
/// (odd `n` only): family 1 vector `m` is the unnormalized sum of the
/// product states `(j, (j+m) mod n)` over `j`, family 2 vector `m` sums
/// `(j, (m-j) mod n)`; both carry `norm_sq = n`.
pub fn diagonal_bases(n: u64) -> Result<(ExactBasis, ExactBasis)> {
    diagonal_bases_with_limits(n, &Limits::DEFAULT)
}

/// [`diagonal_bases`] with an explicit dimension cap.
pub fn diagonal_bases_with_limits(n: u64, limits: &Limits) -> Result<(ExactBasis, ExactBasis)> {
    if n < 2 {
        return Err(Error::domain(format!(
            "diagonal families need n >= 3, got n = {n}"
        )));
    }
    if n % 2 == 0 {
        return Err(Error::Unsupported(format!(
            "diagonal families exist only for odd n: for n = {n} the cyclic Latin squares \
             j+m and m-j (mod n) are not orthogonal, so the support partitions fail to \
             separate the {} states and the construction degenerates",
            n * n
        )));
    }
    let states = radix::checked_pow(n, 2).ok_or(Error::Capacity {
        what: "diagonal family dimension",
        requested: u64::MAX,
        limit: limits.max_basis_states,
    })?;
    if states > limits.max_basis_states {
        return Err(Error::Capacity {
            what: "diagonal family dimension",
            requested: states,
            limit: limits.max_basis_states,
        });
    }
    let dimension = states as u32;
    let build_family = |second_coord: &dyn Fn(u64, u64) -> u64| -> Result<ExactBasis> {
        let vectors: Result<Vec<ExactVector>> = (0..n)
            .map(|m| {
                let mut coeffs = vec![BigInt::zero(); dimension as usize];
                for j in 0..n {
                    let state = index_from_tuple(&[j, second_coord(j, m)], n, 2)?;
                    coeffs[state.zero_based()] = BigInt::one();
                }
                ExactVector::new(coeffs, BigInt::from(n))
            })
            .collect();
        ExactBasis::new(vectors?)
    };
    let family1 = build_family(&|j, m| (j + m) % n)?;
    let family2 = build_family(&|j, m| (m + n - j) % n)?;
    Ok((family1, family2))
}

/// The squared overlap of two normalized vectors:
/// `(dot of coefficient lists)^2 / (norm_sq(u) * norm_sq(v))`, exact.
pub fn overlap_sq(u: &ExactVector, v: &ExactVector) -> Result<BigRational> {
    if !u.is_normalized() || !v.is_normalized() {
        return Err(Error::domain(
            "overlap is defined for normalized vectors only",
        ));
    }
    let dot = u.dot(v)?;
    Ok(BigRational::new(&dot * &dot, u.norm_sq() * v.norm_sq()))
}

/// Outcome of [`basis_refines`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RefineOutcome {
    /// Every vector's support sits inside one block: vector `i` inside
    /// block `block_of_vector[i]`.
    Refines { block_of_vector: Vec<usize> },
    /// Some vector's support meets two or more blocks; the first such
    /// vector and the blocks it touches.
    Straddles { vector: usize, blocks: Vec<usize> },
}

/// Can a measurement distinguishing these vectors decide the partition's
/// outcome? Yes exactly when every vector is supported inside a single
/// block; the map from vectors to their blocks is returned. Zero vectors
/// and dimension mismatches are domain errors.
pub fn basis_refines(vectors: &[ExactVector], p: &Partition) -> Result<RefineOutcome> {
    if vectors.is_empty() {
        return Err(Error::domain("no vectors to check against the partition"));
    }
    let mut block_of_vector = Vec::with_capacity(vectors.len());
    for (index, vector) in vectors.iter().enumerate() {
        if vector.dimension() != p.ground_size() {
            return Err(Error::domain(format!(
                "vector {index} has dimension {}, partition covers {} states",
                vector.dimension(),
                p.ground_size()
            )));
        }
        let support = vector.support();
        if support.is_empty() {
            return Err(Error::domain(format!(
                "vector {index} is zero; it belongs to no block"
            )));
        }
        let mut blocks: Vec<usize> = support
            .iter()
            .map(|&s| p.block_of(s).expect("support states are in range"))
            .collect();
        blocks.sort_unstable();
        blocks.dedup();
        if blocks.len() > 1 {
            return Ok(RefineOutcome::Straddles {
                vector: index,
                blocks,
            });
        }
        block_of_vector.push(blocks[0]);
    }
    Ok(RefineOutcome::Refines { block_of_vector })
}

/// Born probabilities of the partition's outcomes in the given
/// normalized state: block `B` gets `sum of coeffs[s]^2 for s in B`,
/// divided by `norm_sq`. One exact rational per block, summing to 1.
pub fn measurement_probabilities(state: &ExactVector, p: &Partition) -> Result<Vec<BigRational>> {
    if state.dimension() != p.ground_size() {
        return Err(Error::domain(format!(
            "state has dimension {}, partition covers {} states",
            state.dimension(),
            p.ground_size()
        )));
    }
    if !state.is_normalized() {
        return Err(Error::domain(
            "measurement probabilities need a normalized state",
        ));
    }
    Ok(p.blocks()
        .iter()
        .map(|block| {
            let weight = block.iter().fold(BigInt::zero(), |acc, s| {
                let c = &state.coeffs()[s.zero_based()];
                acc + c * c
            });
            BigRational::new(weight, state.norm_sq().clone())
        })
        .collect())
}
