//! Exact number theory for the polynomial systems the sieve bounds: root
//! counts modulo prime powers, the discriminant-resultant constant, fixed
//! prime divisors, singular series partial products, and a brute-force
//! census of square-free almost-prime values.

mod arith;
mod census;
mod intpoly;
mod rho;

pub use census::{census, CensusReport};
pub use intpoly::IntPoly;
pub use rho::{rho, rho_prime_power};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::interval::{Dyadic, Interval, Round};
use arith::{factor_u64, primes_below};

/// A product H = H_1 ... H_kappa of pairwise coprime integer polynomials.
/// Linear, quadratic and cubic factors are verified irreducible over the
/// rationals at construction; higher degrees are accepted on the caller's
/// assertion (the almost-prime table depends only on the factor count and
/// the total degree).
#[derive(Clone, Debug)]
pub struct PolySystem {
    factors: Vec<IntPoly>,
    product: IntPoly,
    h: u32,
    delta: BigInt,
    content: BigInt,
}

impl PolySystem {
    pub fn new(factors: Vec<IntPoly>) -> crate::Result<PolySystem> {
        if factors.is_empty() {
            return Err(crate::Error::Usage("at least one factor".into()));
        }
        for f in &factors {
            if f.is_zero() || f.degree() == 0 {
                return Err(crate::Error::InvalidSystem(
                    "factors must be non-constant".into(),
                ));
            }
            if (2..=3).contains(&f.degree()) && has_rational_root(f)? {
                return Err(crate::Error::InvalidSystem(format!(
                    "factor {:?} is reducible: it has a rational root",
                    f.coeffs()
                )));
            }
        }
        // Delta = 6 prod |disc(H_i)| prod_{i != j} |Res(H_i, H_j)|; the
        // resultant factor appears once per ordered pair, hence squared.
        let mut delta = BigInt::from(6);
        for f in &factors {
            let d = f.discriminant();
            if d.is_zero() {
                return Err(crate::Error::InvalidSystem(
                    "a factor has a repeated root".into(),
                ));
            }
            delta *= d.abs();
        }
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                let res = factors[i].resultant(&factors[j]);
                if res.is_zero() {
                    return Err(crate::Error::InvalidSystem(
                        "two factors share a root".into(),
                    ));
                }
                delta *= &res * &res;
            }
        }
        let mut product = IntPoly::new(&[1]);
        for f in &factors {
            product = product.mul(f);
        }
        let h = product.degree() as u32;
        let content = product.content();
        Ok(PolySystem {
            factors,
            product,
            h,
            delta,
            content,
        })
    }

    /// Number of factors (the sieve dimension kappa).
    pub fn kappa(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Total degree.
    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn factors(&self) -> &[IntPoly] {
        &self.factors
    }

    pub fn product(&self) -> &IntPoly {
        &self.product
    }

    /// The exact constant 6 prod |disc(H_i)| prod |Res(H_i, H_j)|; primes
    /// not dividing it behave generically.
    pub fn delta(&self) -> &BigInt {
        &self.delta
    }

    pub fn content(&self) -> &BigInt {
        &self.content
    }

    /// Root count of the product modulo q.
    pub fn rho(&self, q: u64) -> crate::Result<u64> {
        rho(&self.product, q)
    }

    /// The least prime dividing H(n) for every integer n, if any; such a
    /// prime has rho(p) = p. Only p <= h and primes dividing the content
    /// can qualify: elsewhere the nonzero reduction has at most h < p
    /// roots.
    pub fn fixed_prime_divisor(&self) -> crate::Result<Option<u64>> {
        for p in primes_below(self.h as u64 + 1) {
            if rho_prime_power(&self.product, p, 1)? == p {
                return Ok(Some(p));
            }
        }
        if self.content.abs() > BigInt::one() {
            let c = self.content.abs().to_u64().ok_or_else(|| {
                crate::Error::Budget("content too large to factor at desk scale".into())
            })?;
            // Content primes at most h were already caught above.
            let least = factor_u64(c)?[0].0;
            debug_assert!(least > self.h as u64);
            return Ok(Some(least));
        }
        Ok(None)
    }

    /// Enclosure of prod_{p <= pbound} (1 - rho(p^2)/p^2): each factor is
    /// an exact rational rounded outward. A factor <= 0 names a prime
    /// whose square divides every value.
    pub fn singular_product(&self, pbound: u64, prec: u32) -> crate::Result<Interval> {
        if pbound > 1_000_000 {
            return Err(crate::Error::Budget(
                "singular products are truncated at p <= 10^6".into(),
            ));
        }
        let mut acc = Interval::one();
        for p in primes_below(pbound + 1) {
            let rho2 = rho_prime_power(&self.product, p, 2)?;
            let p2 = p * p;
            if rho2 >= p2 {
                return Err(crate::Error::InvalidSystem(format!(
                    "p = {p} fixes a square divisor: rho(p^2) = {rho2}"
                )));
            }
            if !(&self.delta % BigInt::from(p)).is_zero() {
                // Unramified primes keep a bounded root count.
                assert!(rho2 <= 2 * self.h as u64, "rho(p^2) bound at p = {p}");
            }
            let num = Dyadic::from_u64(p2 - rho2);
            let den = Dyadic::from_u64(p2);
            let fac = Interval::new(
                num.div_round(&den, prec, Round::Down),
                num.div_round(&den, prec, Round::Up),
            );
            acc = acc.mul(&fac, prec);
        }
        Ok(acc)
    }
}

/// Whether the polynomial has a rational root, by exact enumeration of
/// candidates p/q with p dividing the constant and q the leading term of
/// the primitive part.
fn has_rational_root(f: &IntPoly) -> crate::Result<bool> {
    let content = f.content();
    let prim: Vec<BigInt> = f.coeffs().iter().map(|c| c / &content).collect();
    if prim[0].is_zero() {
        return Ok(true); // root at 0
    }
    let d = prim.len() - 1;
    let to_u64 = |v: &BigInt| {
        v.abs()
            .to_u64()
            .ok_or_else(|| crate::Error::Budget("coefficient too large for root search".into()))
    };
    let nums = divisors(to_u64(&prim[0])?)?;
    let dens = divisors(to_u64(&prim[d])?)?;
    for &p in &nums {
        for &q in &dens {
            // Homogenized evaluation: sum c_i p^i q^(d-i), zero iff
            // plus-or-minus p/q is a root.
            for neg in [false, true] {
                let mut pp = BigInt::from(p);
                if neg {
                    pp = -pp;
                }
                let qq = BigInt::from(q);
                let mut val = BigInt::zero();
                let mut ppow = BigInt::one();
                for (i, c) in prim.iter().enumerate() {
                    let qpow = qq.pow((d - i) as u32);
                    val += c * &ppow * qpow;
                    ppow *= &pp;
                }
                if val.is_zero() {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// All positive divisors, from the prime factorization.
fn divisors(n: u64) -> crate::Result<Vec<u64>> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n)? {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe = pe.saturating_mul(p);
            out.extend(prev.iter().map(|&d| d.saturating_mul(pe)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(factors: &[&[i64]]) -> crate::Result<PolySystem> {
        PolySystem::new(factors.iter().map(|c| IntPoly::new(c)).collect())
    }

    fn euclid() -> PolySystem {
        sys(&[&[1, 1, 1], &[1, 0, 1], &[1, 2, 1, 1]]).unwrap()
    }

    #[test]
    fn delta_of_reference_systems() {
        // 6 |disc(x^2 + 1)| = 6 * 4.
        assert_eq!(*sys(&[&[1, 0, 1]]).unwrap().delta(), BigInt::from(24));
        // x and x + 1: discs 1, resultant 1.
        assert_eq!(*sys(&[&[0, 1], &[1, 1]]).unwrap().delta(), BigInt::from(6));
        // discs -3, -4, -23; all cross-resultants are units.
        assert_eq!(*euclid().delta(), BigInt::from(6 * 3 * 4 * 23));
    }

    #[test]
    fn degenerate_systems_are_rejected() {
        assert!(matches!(
            sys(&[&[0, 1], &[0, 1]]),
            Err(crate::Error::InvalidSystem(_))
        ));
        assert!(matches!(
            sys(&[&[0, 1], &[0, 2]]),
            Err(crate::Error::InvalidSystem(_))
        ));
        assert!(matches!(sys(&[&[7]]), Err(crate::Error::InvalidSystem(_))));
        // Reducible quadratics and cubics are caught by the root search.
        assert!(matches!(
            sys(&[&[0, 0, 1]]),
            Err(crate::Error::InvalidSystem(_))
        ));
        assert!(matches!(
            sys(&[&[-1, 0, 1]]),
            Err(crate::Error::InvalidSystem(_))
        ));
        assert!(matches!(
            sys(&[&[6, 11, 6, 1]]), // (x+1)(x+2)(x+3)
            Err(crate::Error::InvalidSystem(_))
        ));
        // Non-monic irreducible quadratics pass: 2x^2 + 3x + 4.
        assert!(sys(&[&[4, 3, 2]]).is_ok());
    }

    #[test]
    fn fixed_prime_divisors_of_reference_polynomials() {
        // n^2 + n + 2 is always even.
        assert_eq!(
            sys(&[&[2, 1, 1]]).unwrap().fixed_prime_divisor().unwrap(),
            Some(2)
        );
        assert_eq!(sys(&[&[1, 0, 1]]).unwrap().fixed_prime_divisor().unwrap(), None);
        assert_eq!(euclid().fixed_prime_divisor().unwrap(), None);
        // Content prime above h: 5x + 5.
        assert_eq!(
            sys(&[&[5, 5]]).unwrap().fixed_prime_divisor().unwrap(),
            Some(5)
        );
        // Content prime at most h is still the least one reported.
        assert_eq!(
            sys(&[&[2, 0, 2]]).unwrap().fixed_prime_divisor().unwrap(),
            Some(2)
        );
    }

    #[test]
    fn euclid_shape_is_as_published() {
        let e = euclid();
        assert_eq!(e.kappa(), 3);
        assert_eq!(e.h(), 7);
        assert_eq!(*e.content(), BigInt::one());
        assert_eq!(e.rho(1).unwrap(), 1);
    }

    #[test]
    fn singular_product_matches_exact_rationals() {
        // For H = x, rho(p^2) = 1: product over p <= 10 of (1 - 1/p^2)
        // equals (3/4)(8/9)(24/25)(48/49) = 768/1225.
        let s = sys(&[&[0, 1]]).unwrap().singular_product(10, 64).unwrap();
        let expect = 768.0 / 1225.0;
        assert!(s.lo().to_f64() <= expect && expect <= s.hi().to_f64());
        assert!(s.width_f64() < 1e-15);
        // Empty product below the least prime.
        let empty = sys(&[&[0, 1]]).unwrap().singular_product(1, 64).unwrap();
        assert_eq!(empty.to_f64(), 1.0);
        // Extending the prime range can only shrink the product.
        let s100 = sys(&[&[0, 1]]).unwrap().singular_product(100, 64).unwrap();
        assert!(s100.hi().to_f64() <= s.hi().to_f64());
        // A fixed square divisor is reported: (x^2+x+2)(x^2+x+4) is
        // divisible by 4 for every n.
        let bad = sys(&[&[2, 1, 1], &[4, 1, 1]]).unwrap();
        assert!(matches!(
            bad.singular_product(10, 64),
            Err(crate::Error::InvalidSystem(_))
        ));
    }
}
