use serde::{Deserialize, Serialize};

use super::sieve::SpfTable;
use super::DensityError;

fn primes_up_to(limit: u64) -> Result<Vec<u64>, DensityError> {
    if limit < 2 {
        return Err(DensityError::InvalidParameter(format!(
            "prime limit {limit} must be ≥ 2"
        )));
    }
    Ok(SpfTable::new(limit).primes().collect())
}

fn check_s(s: f64, strict_above_one: bool) -> Result<(), DensityError> {
    let ok = if strict_above_one { s > 1.0 } else { s > 0.0 };
    if !ok || !s.is_finite() {
        return Err(DensityError::InvalidParameter(format!(
            "s = {s} out of range"
        )));
    }
    Ok(())
}

/// Partial product `P(s) = ∏ (1 − p^{−s})` over primes `p ≡ 3 (mod 4)`,
/// `p ≤ prime_limit`, multiplied in ascending order of `p`.
pub fn euler_product_p(s: f64, prime_limit: u64) -> Result<f64, DensityError> {
    check_s(s, false)?;
    Ok(primes_up_to(prime_limit)?
        .into_iter()
        .filter(|p| p % 4 == 3)
        .fold(1.0, |acc, p| acc * (1.0 - (p as f64).powf(-s))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorCheck {
    /// Truncated `∏_{p ≡ 1 (4)} (1 − p^{−s})^{−1}`.
    pub lhs: f64,
    /// Truncated `ζ(s) · (1 − 2^{−s}) · P(s)`.
    pub rhs: f64,
    pub rel_err: f64,
}

/// Compares the two sides of `D(s) = ζ(s)(1 − 2^{−s})P(s)` with every Euler
/// product truncated at the same prime limit. The truncations agree factor
/// by factor, so only rounding separates them.
pub fn dirichlet_factor_check(s: f64, prime_limit: u64) -> Result<FactorCheck, DensityError> {
    check_s(s, true)?;
    let primes = primes_up_to(prime_limit)?;
    let factor = |p: u64| 1.0 - (p as f64).powf(-s);
    let mut lhs = 1.0;
    let mut zeta = 1.0;
    let mut p3 = 1.0;
    for &p in &primes {
        let f = factor(p);
        zeta /= f;
        match p % 4 {
            1 => lhs /= f,
            3 => p3 *= f,
            _ => {}
        }
    }
    let rhs = zeta * factor(2) * p3;
    let rel_err = ((lhs - rhs) / lhs).abs();
    Ok(FactorCheck { lhs, rhs, rel_err })
}

/// `Σ 1/p` over primes `p ≡ 3 (mod 4)`, `p ≤ limit`.
pub fn reciprocal_sum_3mod4(limit: u64) -> Result<f64, DensityError> {
    Ok(primes_up_to(limit)?
        .into_iter()
        .filter(|p| p % 4 == 3)
        .map(|p| 1.0 / p as f64)
        .sum())
}

/// The first prime `p ≡ 3 (mod 4)`, `p ≤ limit`, at which the running sum
/// of `1/p` exceeds `threshold`.
pub fn reciprocal_sum_exceedance(threshold: f64, limit: u64) -> Result<Option<u64>, DensityError> {
    let mut acc = 0.0;
    for p in primes_up_to(limit)?.into_iter().filter(|p| p % 4 == 3) {
        acc += 1.0 / p as f64;
        if acc > threshold {
            return Ok(Some(p));
        }
    }
    Ok(None)
}
