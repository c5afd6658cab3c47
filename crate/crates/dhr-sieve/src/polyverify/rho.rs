//! Exact root counts modulo prime powers.
//!
//! The count rho(g; q) of residues nu mod q with g(nu) = 0 mod q is
//! multiplicative in q, so everything reduces to prime powers p^k. At a
//! prime not dividing the discriminant every root mod p is simple and
//! lifts uniquely (Hensel), so rho(p^k) = rho(p) at no extra cost; at the
//! finitely many ramified primes the lift is enumerated branch by branch,
//! which is exact at desk scale.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::arith::factor_u64;
use super::intpoly::IntPoly;

/// Largest prime we are willing to enumerate residues for.
const ENUM_BOUND: u64 = 10_000_000;
/// Cap on lift branching work per prime power.
const BRANCH_BUDGET: u64 = 10_000_000;

/// Coefficients reduced into [0, m) for fast modular Horner evaluation.
fn reduce_coeffs(g: &IntPoly, m: u64) -> Vec<u64> {
    let mm = BigInt::from(m);
    g.coeffs()
        .iter()
        .map(|c| c.mod_floor(&mm).to_u64().expect("reduced below u64 modulus"))
        .collect()
}

fn eval_mod(coeffs: &[u64], x: u64, m: u64) -> u64 {
    let mut acc: u128 = 0;
    for &c in coeffs.iter().rev() {
        acc = (acc * x as u128 + c as u128) % m as u128;
    }
    acc as u64
}

/// rho(g; q) = #{nu mod q : g(nu) = 0 mod q} for q >= 1.
pub fn rho(g: &IntPoly, q: u64) -> crate::Result<u64> {
    if q == 0 {
        return Err(crate::Error::Usage("the modulus is at least 1".into()));
    }
    if q == 1 {
        // The empty congruence has the single solution nu = 0.
        return Ok(1);
    }
    let mut count = 1u64;
    for (p, k) in factor_u64(q)? {
        count *= rho_prime_power(g, p, k)?;
    }
    Ok(count)
}

/// rho at one prime power p^k (p^k must fit in u64).
pub fn rho_prime_power(g: &IntPoly, p: u64, k: u32) -> crate::Result<u64> {
    let pk = p
        .checked_pow(k)
        .ok_or_else(|| crate::Error::Usage("prime power exceeds u64".into()))?;
    if g.is_zero() {
        return Ok(pk);
    }
    // Strip the p-part of the content: g = p^m g1 with g1 not identically
    // zero mod p, and g = 0 mod p^k iff g1 = 0 mod p^(k-m). Each residue
    // class mod p^(k-m) splits into p^m classes mod p^k.
    let mut m = 0u32;
    let mut g1 = g.clone();
    let pb = BigInt::from(p);
    while m < k && g1.coeffs().iter().all(|c| c.mod_floor(&pb).is_zero()) {
        m += 1;
        g1 = IntPoly::from_bigints(g1.coeffs().iter().map(|c| c / &pb).collect());
    }
    if m >= k {
        return Ok(pk);
    }
    Ok(p.pow(m) * rho_primitive(&g1, p, k - m)?)
}

/// rho for g with content coprime to p.
fn rho_primitive(g: &IntPoly, p: u64, k: u32) -> crate::Result<u64> {
    if p > ENUM_BOUND {
        return Err(crate::Error::Budget(format!(
            "root enumeration modulo p = {p} exceeds the desk-scale budget"
        )));
    }
    let gp = reduce_coeffs(g, p);
    let dp = reduce_coeffs(&g.derivative(), p);
    let mut simple = 0u64;
    let mut branching: Vec<u64> = Vec::new();
    for nu in 0..p {
        if eval_mod(&gp, nu, p) == 0 {
            if k == 1 || eval_mod(&dp, nu, p) != 0 {
                // A simple root lifts to exactly one root at every level.
                simple += 1;
            } else {
                branching.push(nu);
            }
        }
    }
    if branching.is_empty() || k == 1 {
        return Ok(simple + branching.len() as u64);
    }
    // Ramified roots: lift level by level, testing all p continuations.
    let pk = p.pow(k);
    let gk = reduce_coeffs(g, pk);
    let mut level = 1u32;
    while level < k {
        let step = p.pow(level);
        let modulus = step * p;
        if branching.len() as u64 * p > BRANCH_BUDGET {
            return Err(crate::Error::Budget(format!(
                "lifting mod {p}^{k} branches beyond the work budget"
            )));
        }
        let mut next = Vec::new();
        for &nu in &branching {
            for t in 0..p {
                let cand = nu + t * step;
                if eval_mod(&gk, cand, modulus) == 0 {
                    next.push(cand);
                }
            }
        }
        branching = next;
        level += 1;
    }
    Ok(simple + branching.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct enumeration oracle.
    fn rho_brute(g: &IntPoly, q: u64) -> u64 {
        let red = reduce_coeffs(g, q);
        (0..q).filter(|&nu| eval_mod(&red, nu, q) == 0).count() as u64
    }

    #[test]
    fn quadratic_root_counts_match_enumeration() {
        let g = IntPoly::new(&[1, 0, 1]); // x^2 + 1
        assert_eq!(rho(&g, 5).unwrap(), 2); // roots 2, 3
        assert_eq!(rho(&g, 4).unwrap(), 0); // 2 | disc, no roots mod 4
        assert_eq!(rho(&g, 1).unwrap(), 1);
        assert_eq!(rho(&g, 2).unwrap(), 1); // nu = 1
        for q in 1..200u64 {
            assert_eq!(rho(&g, q).unwrap(), rho_brute(&g, q), "q={q}");
        }
    }

    #[test]
    fn hensel_keeps_unramified_counts_constant() {
        // disc(x^2 + 1) = -4, so every odd prime is unramified.
        let g = IntPoly::new(&[1, 0, 1]);
        for p in [3u64, 5, 7, 11, 13] {
            let base = rho(&g, p).unwrap();
            for k in 2..=4u32 {
                let pk = p.pow(k);
                assert_eq!(rho(&g, pk).unwrap(), base, "p={p} k={k}");
                assert_eq!(rho_brute(&g, pk), base, "brute p={p} k={k}");
            }
        }
    }

    #[test]
    fn ramified_lifts_match_enumeration() {
        // x^2: rho(p^k) alternates between p^floor(k/2) lifts.
        let sq = IntPoly::new(&[0, 0, 1]);
        for q in [2u64, 4, 8, 16, 9, 27, 81, 25, 125] {
            assert_eq!(rho(&sq, q).unwrap(), rho_brute(&sq, q), "q={q}");
        }
        // Content divisible by p: 3x + 3 mod 9.
        let c = IntPoly::new(&[3, 3]);
        for q in [3u64, 9, 27] {
            assert_eq!(rho(&c, q).unwrap(), rho_brute(&c, q), "q={q}");
        }
        // (x-1)^2 (x+2) at the ramified prime 3.
        let g = IntPoly::new(&[0, 1]).mul(&IntPoly::new(&[-1, 1])).mul(&IntPoly::new(&[-1, 1]));
        for q in [3u64, 9, 27, 81] {
            assert_eq!(rho(&g, q).unwrap(), rho_brute(&g, q), "q={q}");
        }
    }

    #[test]
    fn multiplicative_over_coprime_moduli() {
        let g = IntPoly::new(&[2, -1, 0, 1]); // x^3 - x + 2
        for (a, b) in [(4u64, 9u64), (5, 8), (7, 27), (25, 9), (16, 15)] {
            assert_eq!(
                rho(&g, a * b).unwrap(),
                rho(&g, a).unwrap() * rho(&g, b).unwrap(),
                "a={a} b={b}"
            );
            assert_eq!(rho(&g, a * b).unwrap(), rho_brute(&g, a * b));
        }
    }

    #[test]
    fn degree_bounds_the_count_at_unramified_primes() {
        let g = IntPoly::new(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        for p in [5u64, 7, 11, 13, 17] {
            assert!(rho(&g, p).unwrap() <= 3);
        }
        assert_eq!(rho(&g, 7).unwrap(), 3);
        // The zero polynomial vanishes everywhere.
        assert_eq!(rho(&IntPoly::new(&[]), 12).unwrap(), 12);
        // A constant vanishes mod q iff q divides it.
        assert_eq!(rho(&IntPoly::new(&[6]), 3).unwrap(), 3);
        assert_eq!(rho(&IntPoly::new(&[6]), 4).unwrap(), 0);
    }
}
