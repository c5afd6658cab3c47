//! The polynomial q and its greatest root rho, in exact arithmetic.
//!
//! q is the monic polynomial of degree 2 kappa - 1 satisfying
//! `(u q(u))' = kappa (q(u) + q(u+1))`. Matching coefficients gives the
//! triangular system solved by [`compute_q`]; everything here stays in
//! exact rationals so the only approximation in rho is the final outward
//! rounding of a bisection bracket with exact sign evaluations.

use crate::interval::{Dyadic, Interval, Round};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense polynomial with exact rational coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    pub coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact Taylor shift: coefficients of p(x0 + z) as a polynomial in z.
    pub fn shift(&self, x0: &BigRational) -> RationalPoly {
        let mut out = vec![BigRational::zero(); self.coeffs.len()];
        for c in self.coeffs.iter().rev() {
            for k in (1..out.len()).rev() {
                let t = &out[k] * x0 + &out[k - 1];
                out[k] = t;
            }
            out[0] = &out[0] * x0 + c;
        }
        RationalPoly { coeffs: out }
    }

    /// Derivative.
    pub fn derivative(&self) -> RationalPoly {
        if self.coeffs.len() == 1 {
            return RationalPoly {
                coeffs: vec![BigRational::zero()],
            };
        }
        RationalPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c * BigRational::from_integer(BigInt::from(n)))
                .collect(),
        }
    }

    /// Interval coefficients at the given precision.
    pub fn to_interval_coeffs(&self, prec: u32) -> Vec<Interval> {
        self.coeffs.iter().map(|c| rat_to_interval(c, prec)).collect()
    }
}

/// Outward-rounded dyadic enclosure of an exact rational.
pub fn rat_to_interval(x: &BigRational, prec: u32) -> Interval {
    let neg = x.is_negative();
    let num = Dyadic::from_biguint(x.numer().abs().to_biguint().unwrap());
    let den = Dyadic::from_biguint(x.denom().abs().to_biguint().unwrap());
    let lo = num.div_round(&den, prec, Round::Down);
    let hi = num.div_round(&den, prec, Round::Up);
    if neg {
        Interval::new(hi.neg(), lo.neg())
    } else {
        Interval::new(lo, hi)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn r_quarter() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(4))
}

/// The monic degree 2 kappa - 1 polynomial with
/// (u q(u))' = kappa (q(u) + q(u+1)), solved coefficient by coefficient
/// from the top: a_r = -kappa/(2 kappa - 1 - r) sum_(n>r) C(n, r) a_n.
pub fn compute_q(kappa: u32) -> RationalPoly {
    let d = 2 * kappa as usize - 1;
    let mut a = vec![BigRational::zero(); d + 1];
    a[d] = BigRational::one();
    // Binomial table rows up to degree d.
    let mut binom = vec![vec![BigUint::zero(); d + 1]; d + 1];
    for n in 0..=d {
        binom[n][0] = BigUint::one();
        for r in 1..=n {
            let t = &binom[n - 1][r - 1] + &binom[n - 1][r];
            binom[n][r] = t;
        }
    }
    for r in (0..d).rev() {
        let mut s = BigRational::zero();
        for n in (r + 1)..=d {
            s += &a[n] * BigRational::from_integer(BigInt::from(binom[n][r].clone()));
        }
        a[r] = -s * rat(kappa as i64) / rat((d - r) as i64);
    }
    RationalPoly { coeffs: a }
}

fn sign_i32(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Rational coefficients scaled to a primitive integer vector: trailing
/// zeros trimmed, denominators cleared, positive content divided out.
fn primitive_int(coeffs: &[BigRational]) -> Vec<BigInt> {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].is_zero() {
        end -= 1;
    }
    let c = &coeffs[..end];
    if c.is_empty() {
        return Vec::new();
    }
    let mut l = BigInt::one();
    for x in c {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = c.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Exact sign of an integer polynomial at a rational point, via the
/// integer den^deg * p(num/den).
fn eval_sign(p: &[BigInt], x: &BigRational) -> i32 {
    let deg = p.len() - 1;
    let mut dpow = vec![BigInt::one()];
    for _ in 0..deg {
        let t = dpow.last().unwrap() * x.denom();
        dpow.push(t);
    }
    let mut acc = p[deg].clone();
    for i in (0..deg).rev() {
        acc = acc * x.numer() + &p[i] * &dpow[deg - i];
    }
    sign_i32(&acc)
}

/// Remainder of exact polynomial division of a by b, trailing zeros trimmed.
fn poly_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigRational> {
    let db = b.len() - 1;
    let lcb = BigRational::from_integer(b[db].clone());
    let mut r: Vec<BigRational> = a
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    while r.len() > db {
        let dr = r.len() - 1;
        let f = &r[dr] / &lcb;
        if !f.is_zero() {
            for j in 0..db {
                let t = &r[dr - db + j] - &f * BigRational::from_integer(b[j].clone());
                r[dr - db + j] = t;
            }
        }
        r.pop();
    }
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    r
}

/// Sturm chain of q as primitive integer polynomials. Factors of u at the
/// origin are stripped first so that sign variation counts at 0 are valid;
/// that cannot move the greatest positive root.
fn sturm_chain(q: &RationalPoly) -> crate::Result<Vec<Vec<BigInt>>> {
    let mut s0 = primitive_int(&q.coeffs);
    if s0.len() < 2 {
        return Err(crate::Error::Domain("q must be nonconstant".into()));
    }
    let zeros = s0.iter().position(|c| !c.is_zero()).unwrap();
    s0.drain(..zeros);
    if s0.len() < 2 {
        return Err(crate::Error::Domain("q vanishes only at the origin".into()));
    }
    let deriv: Vec<BigRational> = s0
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| BigRational::from_integer(c * BigInt::from(n)))
        .collect();
    let mut chain = vec![s0, primitive_int(&deriv)];
    loop {
        let n = chain.len();
        if chain[n - 1].len() < 2 {
            break;
        }
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        let negated: Vec<BigRational> = r.iter().map(|c| -c).collect();
        chain.push(primitive_int(&negated));
    }
    Ok(chain)
}

/// Sign variations along the chain at x, zeros skipped. For a < b with
/// neither endpoint a root, V(a) - V(b) counts distinct roots in (a, b).
fn variations(chain: &[Vec<BigInt>], x: &BigRational) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in chain {
        let s = eval_sign(p, x);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Power-of-two bound above every real root: |z| <= 2 max |c_i/c_d|^(1/(d-i)).
fn root_bound(p: &[BigInt]) -> BigRational {
    let d = p.len() - 1;
    let top_bits = p[d].magnitude().bits() as i64;
    let mut e = 1i64;
    for (i, c) in p.iter().enumerate().take(d) {
        if c.is_zero() {
            continue;
        }
        let excess = c.magnitude().bits() as i64 - top_bits + 1;
        if excess > 0 {
            let gap = (d - i) as i64;
            e = e.max((excess + gap - 1) / gap);
        }
    }
    BigRational::from_integer(BigInt::from(2).pow(1 + e as u32))
}

/// Certified enclosure of rho, the greatest real root of q.
///
/// Bisects on exact Sturm counts, keeping the topmost root: the left end
/// moves up exactly when the chain reports a root above the midpoint.
/// Once the bracket isolates a single sign-changing root the loop drops
/// to plain sign bisection. The result is a width 2^-64 enclosure; q is
/// then checked positive on a sampled grid above it and the root checked
/// against the floor 2 kappa - 1. Both hold for the weighted-sieve q but
/// neither is assumed anywhere in the search.
pub fn find_rho(q: &RationalPoly, kappa: u32) -> crate::Result<Interval> {
    let chain = sturm_chain(q)?;
    let p0: &[BigInt] = &chain[0];
    let mut b = root_bound(p0);
    let mut sb = eval_sign(p0, &b);
    let mut guard = 0;
    while sb == 0 {
        b = &b * rat(2);
        sb = eval_sign(p0, &b);
        guard += 1;
        if guard > 64 {
            return Err(crate::Error::Compute("root bound search stuck".into()));
        }
    }
    let mut a = BigRational::zero();
    let mut sa = eval_sign(p0, &a);
    let mut va = variations(&chain, &a);
    let mut vb = variations(&chain, &b);
    if va <= vb {
        return Err(crate::Error::Compute("q has no positive real root".into()));
    }
    // Invariant: no root above b, at least one root in (a, b), and
    // neither endpoint is a root.
    let width_target = BigRational::new(BigInt::one(), BigInt::from(2u64).pow(64));
    let mut isolated = false;
    while &b - &a > width_target {
        let mut mid = (&a + &b) / rat(2);
        let mut sm = eval_sign(p0, &mid);
        if isolated {
            if sm == 0 {
                // Exactly one root in the bracket, and mid hit it.
                return certify_above(q, kappa, &mid, &mid);
            }
            if sm == sa {
                a = mid;
            } else {
                b = mid;
            }
            continue;
        }
        // Nudge the midpoint off any exact root before counting.
        let mut off = (&b - &a) / rat(4);
        let mut tries = 0;
        while sm == 0 {
            mid = &mid + &off;
            off = &off / rat(2);
            sm = eval_sign(p0, &mid);
            tries += 1;
            if tries > 64 {
                return Err(crate::Error::Compute(
                    "no root-free bisection point found".into(),
                ));
            }
        }
        let vm = variations(&chain, &mid);
        if vm > vb {
            a = mid;
            sa = sm;
            va = vm;
        } else {
            b = mid;
            sb = sm;
            vb = vm;
        }
        if va == vb + 1 && sa * sb < 0 {
            isolated = true;
        }
    }
    certify_above(q, kappa, &a, &b)
}

/// Checks q > 0 on a quarter-step grid above the bracket and the floor
/// rho >= 2 kappa - 1, then rounds the exact bracket outward.
fn certify_above(
    q: &RationalPoly,
    kappa: u32,
    a: &BigRational,
    b: &BigRational,
) -> crate::Result<Interval> {
    if *b < rat(2 * kappa as i64 - 1) {
        return Err(crate::Error::Compute(
            "greatest root of q sits below 2 kappa - 1".into(),
        ));
    }
    let mut t = b.floor() + BigRational::one();
    let top = &t + rat(2 * kappa as i64);
    while t <= top {
        if q.eval(&t) <= BigRational::zero() {
            return Err(crate::Error::Compute(format!(
                "q not positive at sample point {t} above the root bracket"
            )));
        }
        t += r_quarter();
    }
    Ok(rat_to_interval(a, 128).hull(&rat_to_interval(b, 128)))
}
