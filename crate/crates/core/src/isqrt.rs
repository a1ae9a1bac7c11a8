//! Exact integer square roots.

/// Returns `(⌊√v⌋, is_square)`.
///
/// The root is computed with integer Newton iteration only; no floating
/// point enters the result, so the perfect-square predicate is exact for
/// every `u128`.
pub fn integer_sqrt_checked(v: u128) -> (u128, bool) {
    let root = isqrt_u128(v);
    (root, root * root == v)
}

/// `⌊√v⌋` for any `u128`.
pub fn isqrt_u128(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    // Start above the root: 2^ceil(bits/2) > √v.
    let bits = 128 - v.leading_zeros();
    let mut x: u128 = 1 << bits.div_ceil(2);
    loop {
        let y = (x + v / x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Returns the root when `v` is a perfect square.
pub fn exact_sqrt(v: u128) -> Option<u128> {
    match integer_sqrt_checked(v) {
        (r, true) => Some(r),
        _ => None,
    }
}
