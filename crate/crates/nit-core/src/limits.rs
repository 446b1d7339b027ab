/// Capacity limits for the constructions that grow combinatorially.
///
/// Every exhaustive operation takes its cap from here instead of a
/// hard-coded constant, so callers with more patience (or more machine)
/// can raise a field and keep the same code path. The defaults keep each
/// operation comfortably interactive on a single core.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest state-set size `N = n^k` any constructor will materialize.
    pub max_states: u64,
    /// Largest `N` for permutation searches between frames; these walk an
    /// `N!`-shaped space even with the block-structure shortcuts.
    pub max_permutation_states: u64,
    /// Largest `N` for exhaustive enumeration of separating frames.
    pub max_enumeration_states: u64,
    /// Largest `N` for the exact strategy optimizer, which tabulates
    /// candidate subsets as `N`-bit masks.
    pub max_search_states: u64,
    /// Largest `N` for full-basis construction, which stores `N^2` exact
    /// coefficients.
    pub max_basis_states: u64,
}

impl Limits {
    pub const DEFAULT: Limits = Limits {
        max_states: 1_000_000,
        max_permutation_states: 12,
        max_enumeration_states: 9,
        max_search_states: 20,
        max_basis_states: 1024,
    };
}

impl Default for Limits {
    fn default() -> Self {
        Limits::DEFAULT
    }
}
