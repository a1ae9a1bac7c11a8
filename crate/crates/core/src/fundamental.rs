//! The fundamental function `F(n) = t²(kx−n)² − 2nxt` and everything built
//! directly on it: admissible domains, the quadratic solver and exact
//! verification of decompositions.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal;
use crate::isqrt::integer_sqrt_checked;
use crate::solution::{ConstructionMethod, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("exact evaluation exceeds the supported 128-bit width")]
    OverflowBeyondSupportedWidth,
    #[error("kx must exceed n")]
    KxNotAboveN,
    #[error("F = {f} is negative (t below the admissible threshold)")]
    OutOfDomain { f: i128 },
    #[error("F = {f} is not a perfect square")]
    NotASquare { f: i128 },
    #[error("(y + z) / (2(kx − n)) is not a positive integer")]
    NonIntegerT,
    #[error("(x, y, z) does not satisfy k/n = 1/x + 1/y + 1/z")]
    IdentityViolation,
}

/// A point `(k, n, x, t)` at which `F` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parametrization {
    #[serde(with = "decimal")]
    pub k: u64,
    #[serde(with = "decimal")]
    pub n: u64,
    #[serde(with = "decimal")]
    pub x: u64,
    #[serde(with = "decimal")]
    pub t: u64,
}

impl Parametrization {
    pub fn new(k: u64, n: u64, x: u64, t: u64) -> Result<Self, FError> {
        let p = Parametrization { k, n, x, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), FError> {
        if self.k < 4 {
            return Err(FError::InvalidParameter("k must be ≥ 4"));
        }
        if self.n < 2 {
            return Err(FError::InvalidParameter("n must be ≥ 2"));
        }
        if self.x < 1 {
            return Err(FError::InvalidParameter("x must be ≥ 1"));
        }
        if self.t < 1 {
            return Err(FError::InvalidParameter("t must be ≥ 1"));
        }
        Ok(())
    }

    /// `kx − n`, which may be negative.
    pub fn gap(&self) -> i128 {
        (self.k as i128) * (self.x as i128) - self.n as i128
    }
}

/// Default lower threshold `N₁(k)`.
///
/// `N₁(4) = 2` and `N₁(5) = 11` are known; for larger `k` this returns
/// `max(2, ⌈k/3⌉)`, which is only a configuration default.
pub fn default_n1(k: u64) -> u64 {
    match k {
        4 => 2,
        5 => 11,
        _ => k.div_ceil(3).max(2),
    }
}

/// Evaluates `F = t²(kx−n)² − 2nxt` exactly.
pub fn eval_f(p: &Parametrization) -> Result<i128, FError> {
    p.validate()?;
    eval_f_raw(p.k, p.n, p.x, p.t)
}

pub(crate) fn eval_f_raw(k: u64, n: u64, x: u64, t: u64) -> Result<i128, FError> {
    let gap = (k as i128) * (x as i128) - n as i128;
    let td = (t as i128)
        .checked_mul(gap)
        .ok_or(FError::OverflowBeyondSupportedWidth)?;
    let sq = td
        .checked_mul(td)
        .ok_or(FError::OverflowBeyondSupportedWidth)?;
    let lin = (2 * n as i128)
        .checked_mul(x as i128)
        .and_then(|v| v.checked_mul(t as i128))
        .ok_or(FError::OverflowBeyondSupportedWidth)?;
    sq.checked_sub(lin)
        .ok_or(FError::OverflowBeyondSupportedWidth)
}

/// The contiguous interval of `n` on which `F_{x,t}` is nonnegative, with
/// the values of `F` at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleDomain {
    #[serde(with = "decimal")]
    pub k: u64,
    #[serde(with = "decimal")]
    pub x: u64,
    #[serde(with = "decimal")]
    pub t: u64,
    #[serde(with = "decimal")]
    pub n1: u64,
    #[serde(with = "decimal")]
    pub n_min: u64,
    #[serde(with = "decimal")]
    pub n_max: u64,
    /// `F(n_min)`, the upper bound of `F` on the domain.
    #[serde(with = "decimal")]
    pub f_at_min: i128,
    /// `F(n_max)`, the minimum of `F` on the domain.
    #[serde(with = "decimal")]
    pub f_at_max: i128,
}

impl AdmissibleDomain {
    pub fn contains(&self, n: u64) -> bool {
        (self.n_min..=self.n_max).contains(&n)
    }

    pub fn len(&self) -> u64 {
        self.n_max - self.n_min + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.n_min..=self.n_max
    }

    pub fn f(&self, n: u64) -> Result<i128, FError> {
        eval_f_raw(self.k, n, self.x, self.t)
    }
}

/// `n < kx` and `t(kx−n)² ≥ 2nx`, decided exactly.
pub fn in_domain(k: u64, x: u64, t: u64, n: u64) -> bool {
    let kx = k as u128 * x as u128;
    let n = n as u128;
    if n >= kx {
        return false;
    }
    let d = kx - n;
    let lhs = d.checked_mul(d).and_then(|v| v.checked_mul(t as u128));
    let rhs = (2 * n).checked_mul(x as u128);
    match (lhs, rhs) {
        (Some(l), Some(r)) => l >= r,
        (None, Some(_)) => true,
        _ => {
            let l = BigUint::from(d) * BigUint::from(d) * BigUint::from(t);
            let r = BigUint::from(2 * n) * BigUint::from(x);
            l >= r
        }
    }
}

/// Largest `n` with `n < kx` and `t(kx−n)² ≥ 2nx`.
///
/// Starts from the lower root of `tn² − 2x(tk+1)n + tk²x² = 0` and corrects
/// the floating-point estimate against the exact inequality. `n = 0` always
/// qualifies, so the result exists.
pub fn domain_upper_bound(k: u64, x: u64, t: u64) -> u64 {
    let kx = k as u128 * x as u128;
    let top = u64::try_from(kx - 1).unwrap_or(u64::MAX);
    let (kf, xf, tf) = (k as f64, x as f64, t as f64);
    let root = kf * xf + (xf / tf) * (1.0 - (2.0 * tf * kf + 1.0).sqrt());
    let mut est = if root.is_finite() && root > 0.0 {
        (root.floor() as u64).min(top)
    } else {
        0
    };
    for _ in 0..2 {
        if in_domain(k, x, t, est) {
            break;
        }
        est = est.saturating_sub(1);
    }
    for _ in 0..2 {
        if est < top && in_domain(k, x, t, est + 1) {
            est += 1;
        }
    }
    let settled = in_domain(k, x, t, est) && (est == top || !in_domain(k, x, t, est + 1));
    if settled {
        return est;
    }
    // Estimate was more than two steps off; bisect on the monotone predicate.
    let (mut lo, mut hi) = (0u64, top);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if in_domain(k, x, t, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// The admissible domain of `(x, t)` for numerator `k`, restricted to
/// `n ≥ n1`. `Ok(None)` is an empty domain.
pub fn admissible_domain(
    k: u64,
    x: u64,
    t: u64,
    n1: u64,
) -> Result<Option<AdmissibleDomain>, FError> {
    if k < 4 {
        return Err(FError::InvalidParameter("k must be ≥ 4"));
    }
    if x < 1 || t < 1 {
        return Err(FError::InvalidParameter("x and t must be ≥ 1"));
    }
    if n1 < 2 {
        return Err(FError::InvalidParameter("n1 must be ≥ 2"));
    }
    let n_max = domain_upper_bound(k, x, t);
    if n1 > n_max {
        return Ok(None);
    }
    Ok(Some(AdmissibleDomain {
        k,
        x,
        t,
        n1,
        n_min: n1,
        n_max,
        f_at_min: eval_f_raw(k, n1, x, t)?,
        f_at_max: eval_f_raw(k, n_max, x, t)?,
    }))
}

/// Solves via the quadratic parametrization: if `F = m²` then
/// `y = t(kx−n) + m` and `z = t(kx−n) − m`.
///
/// The returned solution is tagged `ParametricSearch(x, t)`; callers that
/// reached `(x, t)` through a closed form relabel it.
pub fn solve_via_f(p: &Parametrization) -> Result<Solution, FError> {
    p.validate()?;
    let gap = p.gap();
    if gap <= 0 {
        return Err(FError::KxNotAboveN);
    }
    let f = eval_f_raw(p.k, p.n, p.x, p.t)?;
    if f < 0 {
        return Err(FError::OutOfDomain { f });
    }
    let (m, square) = integer_sqrt_checked(f as u128);
    if !square {
        return Err(FError::NotASquare { f });
    }
    // F < (t·gap)² whenever n, x, t > 0, hence m < t·gap and z ≥ 1.
    let td = (p.t as u128) * (gap as u128);
    debug_assert!(m < td);
    let y = td + m;
    let z = td - m;
    if !verify_identity(p.k, p.n, p.x, y, z) {
        return Err(FError::IdentityViolation);
    }
    Ok(Solution {
        k: p.k,
        n: p.n,
        x: p.x,
        y,
        z,
        method: ConstructionMethod::ParametricSearch { x: p.x, t: p.t },
        t: Some(p.t),
        m: Some(m),
    })
}

/// Recovers `t = (y+z) / (2(kx−n))` from a known decomposition.
pub fn recover_t(k: u64, n: u64, x: u64, y: u128, z: u128) -> Result<u64, FError> {
    if !verify_identity(k, n, x, y, z) {
        return Err(FError::IdentityViolation);
    }
    let kx = k as u128 * x as u128;
    if kx <= n as u128 {
        return Err(FError::KxNotAboveN);
    }
    let denom = 2 * (kx - n as u128);
    let sum = y
        .checked_add(z)
        .ok_or(FError::OverflowBeyondSupportedWidth)?;
    if sum % denom != 0 {
        return Err(FError::NonIntegerT);
    }
    let t = sum / denom;
    if t == 0 {
        return Err(FError::NonIntegerT);
    }
    // yz = 2nxt must hold as well; it follows from the identity, but check.
    let lhs = BigUint::from(y) * BigUint::from(z);
    let rhs = BigUint::from(2 * n as u128) * BigUint::from(x) * BigUint::from(t);
    if lhs != rhs {
        return Err(FError::NonIntegerT);
    }
    u64::try_from(t).map_err(|_| FError::OverflowBeyondSupportedWidth)
}

/// `true` iff `n(xy + yz + zx) = kxyz`, i.e. `k/n = 1/x + 1/y + 1/z`.
///
/// Evaluated in checked 128-bit arithmetic, widened to arbitrary precision
/// when an intermediate does not fit.
pub fn verify_identity(k: u64, n: u64, x: u64, y: u128, z: u128) -> bool {
    if k == 0 || n == 0 || x == 0 || y == 0 || z == 0 {
        return false;
    }
    match identity_sides_u128(k, n, x, y, z) {
        Some((l, r)) => l == r,
        None => {
            let (k, n, x, y, z) = (
                BigUint::from(k),
                BigUint::from(n),
                BigUint::from(x),
                BigUint::from(y),
                BigUint::from(z),
            );
            let lhs = &n * (&x * &y + &y * &z + &z * &x);
            let rhs = k * x * y * z;
            lhs == rhs
        }
    }
}

fn identity_sides_u128(k: u64, n: u64, x: u64, y: u128, z: u128) -> Option<(u128, u128)> {
    let x = x as u128;
    let xy = x.checked_mul(y)?;
    let yz = y.checked_mul(z)?;
    let zx = z.checked_mul(x)?;
    let lhs = xy
        .checked_add(yz)?
        .checked_add(zx)?
        .checked_mul(n as u128)?;
    let rhs = xy.checked_mul(z)?.checked_mul(k as u128)?;
    Some((lhs, rhs))
}
