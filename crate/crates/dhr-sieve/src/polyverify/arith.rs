//! Small deterministic number-theory kernels shared by the congruence
//! counting and census code: a prime sieve, 64-bit Miller-Rabin, and
//! trial-division factorization.

/// Primes below `bound` by a plain sieve of Eratosthenes.
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound <= 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for p in 2..n {
        if composite[p] {
            continue;
        }
        out.push(p as u64);
        let mut q = p * p;
        while q < n {
            composite[q] = true;
            q += p;
        }
    }
    out
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin over the full 64-bit range; the seven-base
/// witness set below has been verified exhaustively for n < 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        if a % n == 0 {
            continue; // a base divisible by n says nothing
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest integer whose square does not exceed n.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Full factorization of n as (prime, exponent) pairs in increasing prime
/// order: trial division to 10^6 plus a primality check on the cofactor.
/// A composite cofactor with no factor below 10^6 exceeds the desk-scale
/// budget.
pub fn factor_u64(mut n: u64) -> crate::Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(crate::Error::Usage("cannot factor 0".into()));
    }
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in std::iter::once(2u64).chain((3..1_000_000).step_by(2)) {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        if n < 1_000_000u64.pow(2) || is_prime_u64(n) {
            out.push((n, 1));
        } else {
            return Err(crate::Error::Budget(format!(
                "cofactor {n} has no prime factor below 10^6"
            )));
        }
    }
    Ok(out)
}
