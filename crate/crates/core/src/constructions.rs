//! Closed-form symmetric solutions (`F = 0`, so `y = z`) for `k = 4`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal;
use crate::fundamental::{eval_f_raw, solve_via_f, FError, Parametrization};
use crate::solution::{ConstructionMethod, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("n = {n} is ≡ 1 (mod 4); no residue-class construction applies")]
    NotApplicable { n: u64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("gcd({modulus}, {b}) ≠ 1; no modular inverse")]
    NotCoprime { modulus: u64, b: u64 },
    #[error("divisor {0} is not ≡ 3 (mod 4)")]
    InvalidDivisor(u64),
    #[error(transparent)]
    Arithmetic(#[from] FError),
}

/// Residue-class construction for `n ≢ 1 (mod 4)`.
pub fn construct_mod4(n: u64) -> Result<Solution, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::PreconditionFailed(
            "n must be ≥ 2".into(),
        ));
    }
    let r = n / 4;
    let x = r + 1;
    let (t, method) = match n % 4 {
        0 => (
            r.checked_mul(r + 1).map(|v| v / 2),
            ConstructionMethod::Mod4Zero,
        ),
        2 => ((2 * r + 1).checked_mul(r + 1), ConstructionMethod::Mod4Two),
        3 => (
            n.checked_mul(r + 1).and_then(|v| v.checked_mul(2)),
            ConstructionMethod::Mod4Three,
        ),
        _ => return Err(ConstructionError::NotApplicable { n }),
    };
    let t = t.ok_or(FError::OverflowBeyondSupportedWidth)?;
    symmetric(n, x, t, method)
}

/// Divisor construction for `n ≡ 1 (mod 4)` with `b ≡ 3 (mod 4)`, `b | n`:
/// `x = (n+b)/4`, `w = n/b`, `t = w(w+1)/2`, `y = z = tb`.
pub fn construct_divisor_b(n: u64, b: u64) -> Result<Solution, ConstructionError> {
    let fail = |msg: String| Err(ConstructionError::PreconditionFailed(msg));
    if n % 4 != 1 {
        return fail(format!("n = {n} is not ≡ 1 (mod 4)"));
    }
    if b % 4 != 3 {
        return fail(format!("b = {b} is not ≡ 3 (mod 4)"));
    }
    if !n.is_multiple_of(b) {
        return fail(format!("b = {b} does not divide n = {n}"));
    }
    let x = (n as u128 + b as u128) / 4;
    let w = (n / b) as u128;
    let twice_t = w * (w + 1);
    // consecutive integers: one of w, w+1 is even
    debug_assert_eq!(twice_t % 2, 0);
    let t = twice_t / 2;
    let x = u64::try_from(x).map_err(|_| FError::OverflowBeyondSupportedWidth)?;
    let t = u64::try_from(t).map_err(|_| FError::OverflowBeyondSupportedWidth)?;
    symmetric(n, x, t, ConstructionMethod::DivisorB(b))
}

fn symmetric(
    n: u64,
    x: u64,
    t: u64,
    method: ConstructionMethod,
) -> Result<Solution, ConstructionError> {
    let p = Parametrization::new(4, n, x, t)?;
    if eval_f_raw(4, n, x, t)? != 0 {
        return Err(ConstructionError::PreconditionFailed(format!(
            "F(4, {n}, {x}, {t}) ≠ 0"
        )));
    }
    let sol = solve_via_f(&p)?;
    debug_assert!(sol.is_symmetric());
    Ok(sol.with_method(method))
}

/// Smallest prime `p ≡ 3 (mod 4)` dividing `n`, by trial division.
///
/// `None` exactly when every prime factor of `n` is 2 or `≡ 1 (mod 4)`
/// (including `n = 1`).
pub fn smallest_divisor_3mod4(n: u64) -> Option<u64> {
    let mut m = n;
    if m == 0 {
        return None;
    }
    m >>= m.trailing_zeros();
    let mut f = 3u64;
    while f.saturating_mul(f) <= m {
        if m.is_multiple_of(f) {
            if f % 4 == 3 {
                return Some(f);
            }
            while m.is_multiple_of(f) {
                m /= f;
            }
        }
        f += 2;
    }
    (m > 1 && m % 4 == 3).then_some(m)
}

/// The arithmetic progression of `n` with `n ≡ base_residue (mod base_modulus)`
/// and `b | n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionSpec {
    #[serde(with = "decimal")]
    pub b: u64,
    #[serde(with = "decimal")]
    pub base_modulus: u64,
    #[serde(with = "decimal")]
    pub base_residue: u64,
    /// `j (mod b)` such that `base_modulus·j + base_residue ≡ 0 (mod b)`.
    #[serde(with = "decimal")]
    pub step_residue: u64,
    #[serde(with = "decimal")]
    pub result_modulus: u64,
    #[serde(with = "decimal")]
    pub result_residue: u64,
}

impl ProgressionSpec {
    pub fn contains(&self, n: u64) -> bool {
        n % self.result_modulus == self.result_residue
    }

    /// Members of the progression in ascending order.
    pub fn members(&self) -> impl Iterator<Item = u64> {
        let step = self.result_modulus;
        let mut next = Some(self.result_residue);
        std::iter::from_fn(move || {
            let cur = next?;
            next = cur.checked_add(step);
            Some(cur)
        })
    }
}

/// Solves `base_modulus·j + base_residue ≡ 0 (mod b)` for `j` and returns the
/// combined progression modulo `base_modulus·b`.
pub fn progression_for_divisor(
    b: u64,
    base_modulus: u64,
    base_residue: u64,
) -> Result<ProgressionSpec, ConstructionError> {
    if b % 4 != 3 {
        return Err(ConstructionError::InvalidDivisor(b));
    }
    if base_modulus == 0 {
        return Err(ConstructionError::PreconditionFailed(
            "modulus must be positive".into(),
        ));
    }
    let result_modulus = base_modulus
        .checked_mul(b)
        .ok_or(FError::OverflowBeyondSupportedWidth)?;
    let inv = mod_inverse(base_modulus % b, b).ok_or(ConstructionError::NotCoprime {
        modulus: base_modulus,
        b,
    })?;
    let residue = base_residue % base_modulus;
    let neg_res = (b - residue % b) % b;
    let j = ((neg_res as u128 * inv as u128) % b as u128) as u64;
    Ok(ProgressionSpec {
        b,
        base_modulus,
        base_residue: residue,
        step_residue: j,
        result_modulus,
        result_residue: base_modulus * j + residue,
    })
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let eg = (a as i128).extended_gcd(&(m as i128));
    (eg.gcd == 1).then(|| eg.x.rem_euclid(m as i128) as u64)
}

/// Residues mod 840 (`1, 11², 13², 17², 19², 23²`) left open by Mordell's
/// classical identities.
pub const MORDELL_RESIDUES: [u64; 6] = [1, 121, 169, 289, 361, 529];

pub fn mordell_uncovered(n: u64) -> bool {
    MORDELL_RESIDUES.contains(&(n % 840))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::{admissible_domain, verify_identity};

    fn check(sol: &Solution) {
        assert_eq!(sol.k, 4);
        assert!(sol.is_symmetric());
        assert_eq!(sol.m, Some(0));
        assert!(verify_identity(4, sol.n, sol.x, sol.y, sol.z));
        let t = sol.t.unwrap();
        assert_eq!(eval_f_raw(4, sol.n, sol.x, t), Ok(0));
        let dom = admissible_domain(4, sol.x, t, 2).unwrap().unwrap();
        assert_eq!(dom.n_max, sol.n, "zero must sit at the top of the domain");
    }

    #[test]
    fn mod4_examples() {
        let s = construct_mod4(6).unwrap();
        assert_eq!((s.x, s.t, s.y, s.z), (2, Some(6), 12, 12));
        assert_eq!(s.method, ConstructionMethod::Mod4Two);
        let s = construct_mod4(7).unwrap();
        assert_eq!((s.x, s.t, s.y, s.z), (2, Some(28), 28, 28));
        assert_eq!(s.method, ConstructionMethod::Mod4Three);
        let s = construct_mod4(12).unwrap();
        assert_eq!((s.x, s.t, s.y), (4, Some(6), 24));
        assert_eq!(s.method, ConstructionMethod::Mod4Zero);
        assert_eq!(
            construct_mod4(9),
            Err(ConstructionError::NotApplicable { n: 9 })
        );
        assert!(matches!(
            construct_mod4(1),
            Err(ConstructionError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn mod4_total_on_small_range() {
        for n in 2..5000u64 {
            match construct_mod4(n) {
                Ok(s) => check(&s),
                Err(ConstructionError::NotApplicable { .. }) => assert_eq!(n % 4, 1),
                Err(e) => panic!("n = {n}: {e}"),
            }
        }
    }

    #[test]
    fn divisor_examples() {
        let s = construct_divisor_b(9, 3).unwrap();
        assert_eq!((s.x, s.t, s.y, s.z), (3, Some(6), 18, 18));
        let s = construct_divisor_b(6721, 11).unwrap();
        assert_eq!(
            (s.x, s.t, s.y, s.z),
            (1683, Some(186966), 2_056_626, 2_056_626)
        );
        assert_eq!(s.method, ConstructionMethod::DivisorB(11));
        let s = construct_divisor_b(21, 7).unwrap();
        assert_eq!((s.x, s.t, s.y, s.z), (7, Some(6), 42, 42));
        // composite b ≡ 3 (mod 4)
        let s = construct_divisor_b(45, 15).unwrap();
        check(&s);
    }

    #[test]
    fn divisor_preconditions() {
        assert!(matches!(
            construct_divisor_b(11, 3),
            Err(ConstructionError::PreconditionFailed(_))
        ));
        assert!(matches!(
            construct_divisor_b(25, 5),
            Err(ConstructionError::PreconditionFailed(_))
        ));
        assert!(matches!(
            construct_divisor_b(13, 3),
            Err(ConstructionError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn divisor_succeeds_iff_preconditions() {
        for n in 2..400u64 {
            for b in 1..=n {
                let pre = n % 4 == 1 && b % 4 == 3 && n % b == 0;
                match construct_divisor_b(n, b) {
                    Ok(s) => {
                        assert!(pre);
                        check(&s);
                        let w = (n / b) as u128;
                        assert_eq!(2 * s.t.unwrap() as u128, w * (w + 1));
                    }
                    Err(_) => assert!(!pre, "n={n} b={b}"),
                }
            }
        }
    }

    #[test]
    fn smallest_divisor_examples() {
        assert_eq!(smallest_divisor_3mod4(21), Some(3));
        assert_eq!(smallest_divisor_3mod4(25), None);
        assert_eq!(smallest_divisor_3mod4(6721), Some(11));
        assert_eq!(smallest_divisor_3mod4(1), None);
        assert_eq!(smallest_divisor_3mod4(2 * 5 * 13), None);
        assert_eq!(smallest_divisor_3mod4(5 * 5 * 19 * 7), Some(7));
        assert_eq!(smallest_divisor_3mod4(4 * 1_000_003), Some(1_000_003));
    }

    #[test]
    fn progression_examples() {
        let p = progression_for_divisor(11, 840, 1).unwrap();
        assert_eq!(
            (p.step_residue, p.result_residue, p.result_modulus),
            (8, 6721, 9240)
        );
        let p = progression_for_divisor(3, 4, 1).unwrap();
        assert_eq!((p.result_residue, p.result_modulus), (9, 12));
        let p = progression_for_divisor(7, 4, 1).unwrap();
        assert_eq!((p.result_residue, p.result_modulus), (21, 28));
        let scan: Vec<u64> = (1..=100).filter(|n| n % 4 == 1 && n % 7 == 0).collect();
        let members: Vec<u64> = p.members().take_while(|&n| n <= 100).collect();
        assert_eq!(scan, members);

        assert_eq!(
            progression_for_divisor(7, 840, 1),
            Err(ConstructionError::NotCoprime { modulus: 840, b: 7 })
        );
        assert_eq!(
            progression_for_divisor(5, 4, 1),
            Err(ConstructionError::InvalidDivisor(5))
        );
    }

    #[test]
    fn progression_membership_sampled() {
        for &(b, m, r) in &[
            (11u64, 840u64, 1u64),
            (3, 4, 1),
            (7, 4, 1),
            (19, 840, 121),
            (23, 840, 169),
            (31, 4, 1),
        ] {
            let p = progression_for_divisor(b, m, r).unwrap();
            for n in p.members().take_while(|&n| n <= 100_000) {
                assert_eq!(n % m, r % m);
                assert_eq!(n % b, 0);
            }
            let scan = (0..=100_000u64)
                .filter(|n| n % m == r % m && n % b == 0)
                .count();
            assert_eq!(p.members().take_while(|&n| n <= 100_000).count(), scan);
        }
    }

    #[test]
    fn mordell_examples() {
        assert!(mordell_uncovered(6721));
        assert!(!mordell_uncovered(5));
        assert!(mordell_uncovered(1009));
        assert!(mordell_uncovered(840 + 529));
    }

    #[test]
    fn inverse() {
        assert_eq!(mod_inverse(4, 11), Some(3));
        assert_eq!(mod_inverse(6, 9), None);
        for m in 2..60u64 {
            for a in 1..m {
                if let Some(i) = mod_inverse(a, m) {
                    assert_eq!(a * i % m, 1);
                }
            }
        }
    }
}
