//! Exact integer roots. No floating point is involved anywhere.

/// Largest `r` with `r^k <= n`.
///
/// Binary search over `[0, 2^ceil(bits/k)]`, every candidate verified with a
/// checked power so overflow reads as "too large".
pub fn iroot(n: u128, k: u32) -> u128 {
    assert!(k >= 1, "root degree must be at least 1");
    if k == 1 || n < 2 {
        return n;
    }
    let bits = 128 - n.leading_zeros();
    let mut lo: u128 = 1;
    let mut hi: u128 = 1u128 << bits.div_ceil(k).min(127);
    // invariant: lo^k <= n < hi^k
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match mid.checked_pow(k) {
            Some(p) if p <= n => lo = mid,
            _ => hi = mid,
        }
    }
    lo
}

/// `Some(r)` when `n == r^k` exactly.
pub fn exact_root(n: u128, k: u32) -> Option<u128> {
    let r = iroot(n, k);
    (r.checked_pow(k) == Some(n)).then_some(r)
}

/// Number of `x >= 1` with `coefficient · x^k <= bound`.
pub fn count_powers_upto(bound: u128, coefficient: u64, k: u32) -> u128 {
    iroot(bound / coefficient as u128, k)
}
