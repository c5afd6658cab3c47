//! Brute-force census of square-free almost-prime polynomial values.
//!
//! For each n up to x the factor values |H_i(n)| are factored separately:
//! trial division below 10^6, then a deterministic primality test on the
//! cofactor. A cofactor with no factor below 10^6 that is composite and
//! not a perfect square is a product of exactly two distinct primes
//! whenever it is at most 10^18, so mu^2 and Omega of the product come out
//! exact without ever factoring a hard semiprime. Cross-factor prime
//! collisions are caught by pairwise gcds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::arith::{is_prime_u64, isqrt_u64, primes_below};
use super::PolySystem;
use crate::par;

/// Trial-division bound; cofactors below its square are prime.
const TRIAL_BOUND: u64 = 1_000_000;
/// Largest n-range the desk-scale census will sweep.
const X_BUDGET: u64 = 10_000_000;

/// Counts from one census sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusReport {
    /// n <= x with H(n) nonzero, mu^2(H(n)) = 1 and Omega(H(n)) <= r.
    pub total: u64,
    /// The same count restricted to (H(n), P(z)) = 1, i.e. to values with
    /// no prime factor below z. Equals `total` when z <= 2.
    pub rough: u64,
}

/// Exhaustive count of square-free r-almost-prime values H(n), n <= x.
pub fn census(sys: &PolySystem, x: u64, r: u32, z: u64) -> crate::Result<CensusReport> {
    if x == 0 {
        return Err(crate::Error::Usage("the census range needs x >= 1".into()));
    }
    if x > X_BUDGET {
        return Err(crate::Error::Budget(format!(
            "census over {x} values exceeds the desk-scale budget"
        )));
    }
    if z > TRIAL_BOUND {
        return Err(crate::Error::Budget(format!(
            "roughness threshold z = {z} exceeds the trial bound"
        )));
    }
    // Values must stay 64-bit-safe: bound each |H_i| by sum |c| x^deg.
    let limit = BigInt::from(i64::MAX);
    let xi = BigInt::from(x);
    for f in sys.factors() {
        let mut bound = BigInt::zero();
        for c in f.coeffs().iter().rev() {
            bound = bound * &xi + c.abs();
        }
        if bound >= limit {
            return Err(crate::Error::Budget(
                "factor values exceed 64-bit-safe magnitudes at this x".into(),
            ));
        }
    }
    let coeffs: Vec<Vec<i128>> = sys
        .factors()
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .map(|c| c.to_i128().expect("bounded coefficient"))
                .collect()
        })
        .collect();
    let primes = primes_below(TRIAL_BOUND);

    let chunk = 512u64;
    let starts: Vec<u64> = (0..=(x - 1) / chunk).map(|i| i * chunk + 1).collect();
    let partials = par::par_map(starts, |start| {
        let mut total = 0u64;
        let mut rough = 0u64;
        for n in start..=(start + chunk - 1).min(x) {
            match survey(n, &coeffs, &primes, r, z)? {
                Verdict::Counted { is_rough } => {
                    total += 1;
                    if is_rough {
                        rough += 1;
                    }
                }
                Verdict::Skipped => {}
            }
        }
        Ok::<(u64, u64), crate::Error>((total, rough))
    });
    let mut total = 0u64;
    let mut rough = 0u64;
    for p in partials {
        let (t, g) = p?;
        total += t;
        rough += g;
    }
    Ok(CensusReport { total, rough })
}

enum Verdict {
    Counted { is_rough: bool },
    Skipped,
}

fn survey(
    n: u64,
    coeffs: &[Vec<i128>],
    primes: &[u64],
    r: u32,
    z: u64,
) -> crate::Result<Verdict> {
    let mut vals = Vec::with_capacity(coeffs.len());
    for cs in coeffs {
        let mut acc: i128 = 0;
        for &c in cs.iter().rev() {
            acc = acc * n as i128 + c;
        }
        if acc == 0 {
            // H(n) = 0 terms are skipped, not counted as failures.
            return Ok(Verdict::Skipped);
        }
        vals.push(acc.unsigned_abs() as u64);
    }
    // A prime shared by two factor values squares in the product.
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            if vals[i].gcd(&vals[j]) != 1 {
                return Ok(Verdict::Skipped);
            }
        }
    }
    let mut omega = 0u32;
    let mut is_rough = true;
    for &v0 in &vals {
        let mut v = v0;
        for &p in primes {
            if p * p > v {
                break;
            }
            if v % p == 0 {
                v /= p;
                if v % p == 0 {
                    return Ok(Verdict::Skipped); // p^2 divides
                }
                omega += 1;
                if p < z {
                    is_rough = false;
                }
            }
        }
        if v > 1 {
            if v < TRIAL_BOUND * TRIAL_BOUND || is_prime_u64(v) {
                // No factor up to min(sqrt v, trial bound): v is prime.
                omega += 1;
                if v < z {
                    is_rough = false;
                }
            } else {
                let s = isqrt_u64(v);
                if s * s == v {
                    return Ok(Verdict::Skipped); // square of a prime
                }
                if v > 1_000_000_000_000_000_000 {
                    return Err(crate::Error::Budget(format!(
                        "composite cofactor {v} cannot be resolved at desk scale"
                    )));
                }
                // Two distinct primes, both above the trial bound (and z).
                omega += 2;
            }
        }
    }
    if omega <= r {
        Ok(Verdict::Counted { is_rough })
    } else {
        Ok(Verdict::Skipped)
    }
}
