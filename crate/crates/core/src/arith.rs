//! Elementary arithmetic: sieves, prime powers, the von Mangoldt weight.

/// All primes `<= limit` by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Streams every prime `<= limit` in increasing order through `visit`.
///
/// Segmented, so memory stays at O(sqrt(limit)) plus one segment; used for
/// the condition checkers that sum over primes up to e^20.
pub fn for_each_prime(limit: u64, mut visit: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    for &p in &base {
        if p <= limit {
            visit(p);
        }
    }
    const SEGMENT: u64 = 1 << 18;
    let mut lo = root + 1;
    let mut flags = vec![true; SEGMENT as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        flags[..len].iter_mut().for_each(|f| *f = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= hi {
                flags[(j - lo) as usize] = false;
                j += p;
            }
        }
        for (i, &f) in flags[..len].iter().enumerate() {
            if f {
                visit(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
}

/// Returns `(p, k)` when `n = p^k` with `p` prime and `k >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = smallest_prime_factor(n);
    let mut m = n;
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

/// Λ(n): `log p` when `n = p^k`, zero otherwise.
pub fn von_mangoldt(n: u64) -> f64 {
    prime_power(n).map_or(0.0, |(p, _)| (p as f64).ln())
}

/// Prime powers `n` with `2 <= n <= limit`, ascending, with their prime.
pub fn prime_powers_up_to(limit: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in primes_up_to(limit) {
        let mut q = p;
        loop {
            out.push((q, p));
            match q.checked_mul(p) {
                Some(next) if next <= limit => q = next,
                _ => break,
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segmented_sieve_matches_plain_sieve() {
        let plain = primes_up_to(300_000);
        let mut streamed = Vec::new();
        for_each_prime(300_000, |p| streamed.push(p));
        assert_eq!(plain, streamed);
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(49), Some((7, 2)));
        assert!((von_mangoldt(8) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(von_mangoldt(6), 0.0);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(9), vec![1, 3, 9]);
    }

    #[test]
    fn prime_power_list() {
        let pp: Vec<u64> = prime_powers_up_to(10).into_iter().map(|(n, _)| n).collect();
        assert_eq!(pp, vec![2, 3, 4, 5, 7, 8, 9]);
    }
}
