//! Trial-division factorization for the moderate operands the search sees.

/// Prime factorization of `n` as ascending `(prime, exponent)` pairs.
/// `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        out.push((2, twos));
        n >>= twos;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) {
            let mut e = 0;
            while n.is_multiple_of(f) {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += 2;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Merges two factorizations, adding exponents of shared primes.
pub fn merge(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(p, e)), Some(&(q, f))) if p == q => {
                out.push((p, e + f));
                i += 1;
                j += 1;
            }
            (Some(&(p, e)), Some(&(q, _))) if p < q => {
                out.push((p, e));
                i += 1;
            }
            (Some(_), Some(&(q, f))) | (None, Some(&(q, f))) => {
                out.push((q, f));
                j += 1;
            }
            (Some(&(p, e)), None) => {
                out.push((p, e));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// All divisors `u ≤ bound` of the number whose factorization is given,
/// sorted descending. Products that overflow `u128` are never `≤ bound`.
pub fn divisors_up_to(factors: &[(u64, u32)], bound: u128) -> Vec<u128> {
    let mut divs: Vec<u128> = vec![1];
    for &(p, e) in factors {
        let p = p as u128;
        let len = divs.len();
        for i in 0..len {
            let mut d = divs[i];
            for _ in 0..e {
                match d.checked_mul(p) {
                    Some(v) if v <= bound => {
                        d = v;
                        divs.push(d);
                    }
                    _ => break,
                }
            }
        }
    }
    divs.sort_unstable_by(|a, b| b.cmp(a));
    divs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        assert!(factorize(1).is_empty());
        assert_eq!(factorize(6721), vec![(11, 1), (13, 1), (47, 1)]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        for n in 2..3000u64 {
            let prod: u64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn divisors_of_square() {
        let n = 60u64;
        let sq: Vec<(u64, u32)> = factorize(n).into_iter().map(|(p, e)| (p, 2 * e)).collect();
        let got = divisors_up_to(&sq, n as u128);
        let want: Vec<u128> = (1..=n as u128).rev().filter(|d| 3600 % d == 0).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn merge_factorizations() {
        let m = merge(&factorize(12), &factorize(45));
        assert_eq!(m, factorize(540));
        assert_eq!(merge(&[], &factorize(7)), vec![(7, 1)]);
    }
}
