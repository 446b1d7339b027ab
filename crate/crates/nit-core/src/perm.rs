//! Permutations of `{1, .., N}` with cycle-notation support.
//!
//! Stored in one-line form (`images[i - 1]` is the image of `i`). Cycle
//! strings such as `(1)(2,9,3,5)(4,6,7,8)` parse and render losslessly:
//! rendering lists every cycle (fixed points included) starting from its
//! smallest element, cycles ordered by smallest element, so render →
//! parse → render is the identity.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partition::StateIndex;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(size: u32) -> Self {
        Permutation {
            images: (1..=size).collect(),
        }
    }

    /// Builds a permutation from one-line form, validating that `images`
    /// is a bijection of `{1, .., images.len()}`.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let size = images.len() as u32;
        let mut seen = vec![false; images.len()];
        for &image in &images {
            if image == 0 || image > size {
                return Err(Error::domain(format!(
                    "image {image} is outside 1..={size}"
                )));
            }
            if std::mem::replace(&mut seen[(image - 1) as usize], true) {
                return Err(Error::domain(format!("image {image} occurs twice")));
            }
        }
        Ok(Permutation { images })
    }

    /// Parses disjoint-cycle notation over `{1, .., size}`. Elements not
    /// mentioned are fixed points; whitespace between tokens is ignored.
    pub fn from_cycles(text: &str, size: u32) -> Result<Self> {
        let mut images: Vec<u32> = (1..=size).collect();
        let mut mentioned = vec![false; size as usize];
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(Error::parse("empty cycle string; the identity is written ()"));
        }
        while !rest.is_empty() {
            let Some(after_open) = rest.strip_prefix('(') else {
                return Err(Error::parse(format!(
                    "expected '(' at: {rest:?}"
                )));
            };
            let Some(close) = after_open.find(')') else {
                return Err(Error::parse("unclosed '(' in cycle string"));
            };
            let body = &after_open[..close];
            rest = after_open[close + 1..].trim_start();
            let mut cycle: Vec<u32> = Vec::new();
            for token in body.split(',') {
                let token = token.trim();
                if token.is_empty() {
                    if body.trim().is_empty() && cycle.is_empty() {
                        break; // "()" denotes the identity contribution
                    }
                    return Err(Error::parse("empty element in cycle"));
                }
                let value: u32 = token
                    .parse()
                    .map_err(|_| Error::parse(format!("bad cycle element {token:?}")))?;
                if value == 0 || value > size {
                    return Err(Error::parse(format!(
                        "cycle element {value} is outside 1..={size}"
                    )));
                }
                if std::mem::replace(&mut mentioned[(value - 1) as usize], true) {
                    return Err(Error::parse(format!(
                        "element {value} appears twice in cycle string"
                    )));
                }
                cycle.push(value);
            }
            for pair in 0..cycle.len() {
                let from = cycle[pair];
                let to = cycle[(pair + 1) % cycle.len()];
                images[(from - 1) as usize] = to;
            }
        }
        Ok(Permutation { images })
    }

    /// Canonical disjoint-cycle rendering; see the module docs.
    pub fn cycles(&self) -> String {
        if self.images.is_empty() {
            return "()".to_string();
        }
        let mut out = String::new();
        let mut visited = vec![false; self.images.len()];
        for start in 1..=self.images.len() as u32 {
            if visited[(start - 1) as usize] {
                continue;
            }
            out.push('(');
            let mut current = start;
            loop {
                visited[(current - 1) as usize] = true;
                out.push_str(&current.to_string());
                current = self.images[(current - 1) as usize];
                if current == start {
                    break;
                }
                out.push(',');
            }
            out.push(')');
        }
        out
    }

    pub fn size(&self) -> u32 {
        self.images.len() as u32
    }

    /// One-line form: entry `i` is the image of state `i + 1`.
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Image of a state. Panics if `s` exceeds the permutation size;
    /// callers check size compatibility once up front.
    pub fn image_of(&self, s: StateIndex) -> StateIndex {
        StateIndex::new(self.images[s.zero_based()]).expect("images are one-based")
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (from0, &to) in self.images.iter().enumerate() {
            images[(to - 1) as usize] = from0 as u32 + 1;
        }
        Permutation { images }
    }

    /// `self` followed by `other`: the result maps `i` to
    /// `other(self(i))`.
    pub fn then(&self, other: &Permutation) -> Result<Permutation> {
        if self.size() != other.size() {
            return Err(Error::domain(format!(
                "cannot compose permutations of sizes {} and {}",
                self.size(),
                other.size()
            )));
        }
        Ok(Permutation {
            images: self
                .images
                .iter()
                .map(|&mid| other.images[(mid - 1) as usize])
                .collect(),
        })
    }

    /// `size!`, the number of permutations, if it fits in `u64`
    /// (`size <= 20`).
    pub fn count(size: u32) -> Result<u64> {
        let mut total: u64 = 1;
        for factor in 2..=u64::from(size) {
            total = total.checked_mul(factor).ok_or(Error::Capacity {
                what: "permutation count",
                requested: u64::from(size),
                limit: 20,
            })?;
        }
        Ok(total)
    }

    /// The `rank`-th permutation (0-based) in lexicographic one-line
    /// order, via the factorial number system.
    pub fn unrank(size: u32, rank: u64) -> Result<Permutation> {
        let total = Permutation::count(size)?;
        if rank >= total {
            return Err(Error::domain(format!(
                "rank {rank} is outside 0..{total} for size {size}"
            )));
        }
        let mut remaining: Vec<u32> = (1..=size).collect();
        let mut images = Vec::with_capacity(size as usize);
        let mut radix = total;
        let mut rank = rank;
        for slot in 0..size {
            radix /= u64::from(size - slot);
            let pick = (rank / radix) as usize;
            rank %= radix;
            images.push(remaining.remove(pick));
        }
        Ok(Permutation { images })
    }

    /// All `size!` permutations in lexicographic one-line order.
    pub fn all(size: u32) -> Result<impl Iterator<Item = Permutation>> {
        let total = Permutation::count(size)?;
        Ok((0..total).map(move |rank| {
            Permutation::unrank(size, rank).expect("rank < size! by construction")
        }))
    }

    /// A uniformly random permutation (Fisher–Yates).
    pub fn sample<R: Rng>(size: u32, rng: &mut R) -> Permutation {
        let mut images: Vec<u32> = (1..=size).collect();
        images.shuffle(rng);
        Permutation { images }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Permutation", 3)?;
        st.serialize_field("cycles", &self.cycles())?;
        st.serialize_field("images", &self.images)?;
        st.serialize_field("size", &self.size())?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPermutation {
    #[serde(default)]
    cycles: Option<String>,
    #[serde(default)]
    images: Option<Vec<u32>>,
    #[serde(default)]
    size: Option<u32>,
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPermutation::deserialize(deserializer)?;
        if let Some(size) = raw.size {
            if let Some(images) = &raw.images {
                if images.len() as u32 != size {
                    return Err(D::Error::custom(format!(
                        "size field says {size} but {} images given",
                        images.len()
                    )));
                }
            }
        }
        let perm = match (raw.images, raw.cycles.as_deref()) {
            (Some(images), cycles) => {
                let perm = Permutation::from_images(images).map_err(D::Error::custom)?;
                if let Some(text) = cycles {
                    let from_cycles =
                        Permutation::from_cycles(text, perm.size()).map_err(D::Error::custom)?;
                    if from_cycles != perm {
                        return Err(D::Error::custom(
                            "cycles and images describe different permutations",
                        ));
                    }
                }
                perm
            }
            (None, Some(text)) => {
                let size = raw.size.ok_or_else(|| {
                    D::Error::custom("a cycles-only permutation needs an explicit size")
                })?;
                Permutation::from_cycles(text, size).map_err(D::Error::custom)?
            }
            (None, None) => {
                return Err(D::Error::custom(
                    "permutation needs either images or cycles plus size",
                ))
            }
        };
        Ok(perm)
    }
}
