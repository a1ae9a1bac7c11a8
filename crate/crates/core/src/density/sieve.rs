use rayon::prelude::*;

use super::DensityError;
use crate::isqrt::isqrt_u128;

/// Above this limit, ℬ is counted segment by segment instead of from a full
/// smallest-prime-factor table.
pub const SEGMENT_THRESHOLD: u64 = 10_000_000;

const SEGMENT_SPAN: u64 = 1 << 20;

/// Smallest prime factor of every integer in `2..=limit`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    /// Linear sieve. Panics if `limit` does not fit in `u32`.
    pub fn new(limit: u64) -> Self {
        let lim = u32::try_from(limit).expect("SpfTable limit must fit in u32") as usize;
        let mut spf = vec![0u32; lim + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=lim {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > lim {
                    break;
                }
                spf[m] = p;
            }
        }
        SpfTable { limit, spf }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, for `2 ≤ n ≤ limit`.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.spf(n) == Some(n)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.spf[n as usize] as u64 == n)
    }

    /// Distinct prime factors of `n` in ascending order.
    pub fn prime_factors(&self, n: u64) -> Result<Vec<u64>, DensityError> {
        self.check(n)?;
        let mut out = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            out.push(p as u64);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        Ok(out)
    }

    /// Smallest prime `p ≡ 3 (mod 4)` dividing `n`.
    pub fn smallest_divisor_3mod4(&self, n: u64) -> Result<Option<u64>, DensityError> {
        Ok(self.prime_factors(n)?.into_iter().find(|p| p % 4 == 3))
    }

    fn check(&self, n: u64) -> Result<(), DensityError> {
        if n == 0 || n > self.limit {
            return Err(DensityError::OutOfTableRange {
                n,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// `n ∈ ℬ`: `n ≡ 1 (mod 4)` and every prime factor is `≡ 1 (mod 4)`.
/// `n = 1` is a member (no prime factors).
pub fn is_in_b(n: u64, table: &SpfTable) -> Result<bool, DensityError> {
    table.check(n)?;
    if n % 4 != 1 {
        return Ok(false);
    }
    let mut m = n as usize;
    while m > 1 {
        let p = table.spf[m] as usize;
        if p % 4 != 1 {
            return Ok(false);
        }
        m /= p;
    }
    Ok(true)
}

/// `B(c)` for each checkpoint `c`, walking a full table. `n = 1` counted.
pub fn count_b_with_table(table: &SpfTable, checkpoints: &[u64]) -> Result<Vec<u64>, DensityError> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut count = 0u64;
    let mut n = 1u64;
    for &c in checkpoints {
        if c > table.limit() {
            return Err(DensityError::OutOfTableRange {
                n: c,
                limit: table.limit(),
            });
        }
        while n <= c {
            if is_in_b(n, table)? {
                count += 1;
            }
            n += 1;
        }
        out.push(count);
    }
    Ok(out)
}

/// `B(c)` for each ascending checkpoint, sieving independent segments in
/// parallel. Within a segment only `n ≡ 1 (mod 4)` are tracked; each odd
/// base prime `p ≤ √max` either disqualifies its multiples (`p ≡ 3`) or is
/// divided out (`p ≡ 1`). A cofactor left over is a single prime `> √max`.
pub fn count_b_segmented(checkpoints: &[u64]) -> Vec<u64> {
    let Some(&max) = checkpoints.last() else {
        return Vec::new();
    };
    let root = isqrt_u128(max as u128) as u64;
    let base: Vec<u64> = SpfTable::new(root.max(2))
        .primes()
        .filter(|&p| p > 2)
        .collect();
    let segments = max.div_ceil(SEGMENT_SPAN);
    let partials: Vec<Vec<u64>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = 1 + s * SEGMENT_SPAN;
            let hi = (lo + SEGMENT_SPAN).min(max + 1);
            segment_counts(lo, hi, &base, checkpoints)
        })
        .collect();
    let mut totals = vec![0u64; checkpoints.len()];
    for part in partials {
        for (t, p) in totals.iter_mut().zip(part) {
            *t += p;
        }
    }
    totals
}

/// Members of ℬ in `[lo, hi)` that are `≤ c`, for each checkpoint `c`.
fn segment_counts(lo: u64, hi: u64, base: &[u64], checkpoints: &[u64]) -> Vec<u64> {
    // first n ≥ lo with n ≡ 1 (mod 4)
    let first = lo + (4 + 1 - lo % 4) % 4;
    if first >= hi {
        return vec![0; checkpoints.len()];
    }
    let len = ((hi - 1 - first) / 4 + 1) as usize;
    let mut rem: Vec<u64> = (0..len as u64).map(|i| first + 4 * i).collect();
    let mut bad = vec![false; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        // n = p·j with n ≡ 1 (mod 4) ⇔ j ≡ p (mod 4); step 4p.
        let mut j = lo.div_ceil(p);
        j += (p % 4 + 4 - j % 4) % 4;
        let mut n = p * j;
        while n < hi {
            let i = ((n - first) / 4) as usize;
            if p % 4 == 3 {
                bad[i] = true;
            } else if !bad[i] {
                while rem[i].is_multiple_of(p) {
                    rem[i] /= p;
                }
            }
            n += 4 * p;
        }
    }
    let mut counts = vec![0u64; checkpoints.len()];
    for i in 0..len {
        if bad[i] || rem[i] % 4 != 1 {
            continue;
        }
        let n = first + 4 * i as u64;
        let from = checkpoints.partition_point(|&c| c < n);
        for c in &mut counts[from..] {
            *c += 1;
        }
    }
    counts
}
