//! Base-`n` positional arithmetic shared by the indexing, classification,
//! and operator constructors.
//!
//! A composite system of `k` subsystems with `n` levels each has
//! `N = n^k` product states, numbered `1..=N`. State number `s`
//! corresponds to the big-endian digit string of `s - 1` in base `n`:
//! digit 0 is the most significant (first subsystem), digit `k - 1` the
//! least significant (last subsystem). So state 1 is `(0, .., 0)` and
//! state `N` is `(n-1, .., n-1)`.

/// `n^k`, or `None` on overflow.
pub(crate) fn checked_pow(n: u64, k: u32) -> Option<u64> {
    n.checked_pow(k)
}

/// Digit `pos` (0-based, most significant first) of the 0-based state
/// index `state0` in base `n` with `k` digits.
///
/// Callers must have validated `state0 < n^k`, which also guarantees the
/// internal power fits in `u64`.
pub(crate) fn digit(state0: u64, pos: u32, n: u64, k: u32) -> u64 {
    debug_assert!(pos < k);
    (state0 / n.pow(k - 1 - pos)) % n
}
