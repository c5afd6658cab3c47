//! Closed intervals with outward-rounded endpoint arithmetic.

use super::dyadic::{Dyadic, Round};
use std::cmp::Ordering;
use std::fmt;

/// Closed interval `[lo, hi]` of dyadic numbers, `lo <= hi`.
///
/// Every arithmetic method takes the working precision in bits and rounds
/// the lower endpoint down and the upper endpoint up, so the result always
/// contains the exact image of the operand intervals.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Interval {
        assert!(lo <= hi, "inverted interval: lo={lo:?} hi={hi:?}");
        Interval { lo, hi }
    }

    /// Degenerate interval `[d, d]`.
    pub fn point(d: Dyadic) -> Interval {
        Interval {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn zero() -> Interval {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Interval {
        Interval::point(Dyadic::one())
    }

    pub fn from_i64(v: i64) -> Interval {
        Interval::point(Dyadic::from_i64(v))
    }

    /// Enclosure of the rational `num/den`, `den != 0`.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Interval {
        let n = Dyadic::from_i64(num);
        let d = Dyadic::from_i64(den);
        let (n, d) = if den < 0 { (n.neg(), d.neg()) } else { (n, d) };
        Interval {
            lo: n.div_round(&d, prec, Round::Down),
            hi: n.div_round(&d, prec, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, other: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.add_round(&other.lo, prec, Round::Down),
            hi: self.hi.add_round(&other.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, other: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.sub_round(&other.hi, prec, Round::Down),
            hi: self.hi.sub_round(&other.lo, prec, Round::Up),
        }
    }

    pub fn mul(&self, other: &Interval, prec: u32) -> Interval {
        let zero = Dyadic::zero();
        let (al, ah, bl, bh) = (&self.lo, &self.hi, &other.lo, &other.hi);
        let (lo, hi) = if *al >= zero {
            if *bl >= zero {
                (al.mul_exact(bl), ah.mul_exact(bh))
            } else if *bh <= zero {
                (ah.mul_exact(bl), al.mul_exact(bh))
            } else {
                (ah.mul_exact(bl), ah.mul_exact(bh))
            }
        } else if *ah <= zero {
            if *bl >= zero {
                (al.mul_exact(bh), ah.mul_exact(bl))
            } else if *bh <= zero {
                (ah.mul_exact(bh), al.mul_exact(bl))
            } else {
                (al.mul_exact(bh), al.mul_exact(bl))
            }
        } else if *bl >= zero {
            (al.mul_exact(bh), ah.mul_exact(bh))
        } else if *bh <= zero {
            (ah.mul_exact(bl), al.mul_exact(bl))
        } else {
            let c1 = al.mul_exact(bh);
            let c2 = ah.mul_exact(bl);
            let c3 = al.mul_exact(bl);
            let c4 = ah.mul_exact(bh);
            (c1.min(c2), c3.max(c4))
        };
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
        }
    }

    /// Reciprocal; panics if the interval contains zero.
    pub fn recip(&self, prec: u32) -> Interval {
        assert!(
            !self.contains_zero(),
            "reciprocal of interval containing zero: {self:?}"
        );
        let one = Dyadic::one();
        Interval {
            lo: one.div_round(&self.hi, prec, Round::Down),
            hi: one.div_round(&self.lo, prec, Round::Up),
        }
    }

    /// Quotient; panics if `other` contains zero.
    pub fn div(&self, other: &Interval, prec: u32) -> Interval {
        self.mul(&other.recip(prec + 4), prec)
    }

    /// Square root; panics if the lower endpoint is negative.
    pub fn sqrt(&self, prec: u32) -> Interval {
        Interval {
            lo: self.lo.sqrt_round(prec, Round::Down),
            hi: self.hi.sqrt_round(prec, Round::Up),
        }
    }

    /// Integer power by binary exponentiation (tight for sign-definite
    /// bases). Negative exponents require a zero-free interval.
    pub fn pow_i(&self, k: i64, prec: u32) -> Interval {
        if k < 0 {
            return self.recip(prec + 4).pow_i(-k, prec);
        }
        let mut result = Interval::one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base, prec);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, prec);
            }
        }
        result
    }

    /// Scale by a single dyadic factor (cheaper than a full interval mul).
    pub fn mul_dyadic(&self, d: &Dyadic, prec: u32) -> Interval {
        if d.is_negative() {
            Interval {
                lo: self.hi.mul_exact(d).round(prec, Round::Down),
                hi: self.lo.mul_exact(d).round(prec, Round::Up),
            }
        } else {
            Interval {
                lo: self.lo.mul_exact(d).round(prec, Round::Down),
                hi: self.hi.mul_exact(d).round(prec, Round::Up),
            }
        }
    }

    /// Divide by a single nonzero dyadic.
    pub fn div_dyadic(&self, d: &Dyadic, prec: u32) -> Interval {
        assert!(!d.is_zero(), "division by zero dyadic");
        if d.is_negative() {
            Interval {
                lo: self.hi.div_round(d, prec, Round::Down),
                hi: self.lo.div_round(d, prec, Round::Up),
            }
        } else {
            Interval {
                lo: self.lo.div_round(d, prec, Round::Down),
                hi: self.hi.div_round(d, prec, Round::Up),
            }
        }
    }

    /// Enclosure of a signed decimal string such as `-12.375e-2`.
    pub fn from_decimal_str(s: &str, prec: u32) -> Option<Interval> {
        use num_bigint::BigUint;
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (mant_str, exp10) = match rest.find(['e', 'E']) {
            Some(i) => (&rest[..i], rest[i + 1..].parse::<i64>().ok()?),
            None => (rest, 0),
        };
        let (int_part, frac_part) = match mant_str.find('.') {
            Some(i) => (&mant_str[..i], &mant_str[i + 1..]),
            None => (mant_str, ""),
        };
        let digits: String = format!("{int_part}{frac_part}");
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num = BigUint::parse_bytes(digits.as_bytes(), 10)?;
        let shift = exp10 - frac_part.len() as i64;
        let (num, den) = if shift >= 0 {
            (num * BigUint::from(10u32).pow(shift as u32), BigUint::from(1u32))
        } else {
            (num, BigUint::from(10u32).pow((-shift) as u32))
        };
        let n = Dyadic::from_biguint(num);
        let d = Dyadic::from_biguint(den);
        let lo = n.div_round(&d, prec, Round::Down);
        let hi = n.div_round(&d, prec, Round::Up);
        Some(if neg {
            Interval {
                lo: hi.neg(),
                hi: lo.neg(),
            }
        } else {
            Interval { lo, hi }
        })
    }

    /// Exact scaling by 2^k.
    pub fn mul_pow2(&self, k: i64) -> Interval {
        Interval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Smallest interval containing the operand and zero.
    pub fn hull0(&self) -> Interval {
        let zero = Dyadic::zero();
        Interval {
            lo: self.lo.clone().min(zero.clone()),
            hi: self.hi.clone().max(zero),
        }
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        self.lo <= *d && *d <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        let z = Dyadic::zero();
        self.lo <= z && z <= self.hi
    }

    /// `Some(Greater)` if certainly positive, `Some(Less)` if certainly
    /// negative, `Some(Equal)` if identically zero, `None` if the sign is
    /// not determined.
    pub fn sign(&self) -> Option<Ordering> {
        let z = Dyadic::zero();
        if self.lo > z {
            Some(Ordering::Greater)
        } else if self.hi < z {
            Some(Ordering::Less)
        } else if self.lo == z && self.hi == z {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// True when every point of `self` is below every point of `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    /// Upper bound on the diameter.
    pub fn width(&self) -> Dyadic {
        self.hi.sub_round(&self.lo, 64, Round::Up)
    }

    /// Approximate midpoint (not an enclosure; use for split points only).
    pub fn midpoint(&self, prec: u32) -> Dyadic {
        self.lo
            .add_round(&self.hi, prec, Round::Down)
            .mul_pow2(-1)
    }

    /// Magnitude bound: max of |lo|, |hi|.
    pub fn mag_bound(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    /// Intersect with `[bound, +inf)`; panics if that empties the interval.
    /// Use when the enclosed quantity is known to respect the bound.
    pub fn clamp_lo(&self, bound: &Dyadic) -> Interval {
        assert!(self.hi >= *bound, "clamp_lo would empty {self:?}");
        Interval {
            lo: self.lo.clone().max(bound.clone()),
            hi: self.hi.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    /// Decimal rendering of both endpoints, for reports.
    pub fn to_decimal(&self, frac_digits: usize) -> String {
        format!(
            "[{}, {}]",
            self.lo.to_decimal(frac_digits),
            self.hi.to_decimal(frac_digits)
        )
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:e} .. {:e}] (w~{:e})",
            self.lo.to_f64(),
            self.hi.to_f64(),
            self.width_f64()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(Dyadic::from_i64(lo), Dyadic::from_i64(hi))
    }

    const P: u32 = 64;

    #[test]
    fn arithmetic_contains_exact_images() {
        let a = iv(2, 3);
        let b = iv(-1, 4);
        let s = a.add(&b, P);
        assert_eq!(s, iv(1, 7));
        let d = a.sub(&b, P);
        assert_eq!(d, iv(-2, 4));
        let m = a.mul(&b, P);
        assert_eq!(m, iv(-3, 12));
    }

    #[test]
    fn mul_sign_cases() {
        assert_eq!(iv(-3, -2).mul(&iv(4, 5), P), iv(-15, -8));
        assert_eq!(iv(-3, -2).mul(&iv(-5, -4), P), iv(8, 15));
        assert_eq!(iv(-2, 3).mul(&iv(-5, 4), P), iv(-15, 12));
        assert_eq!(iv(-2, 3).mul(&iv(4, 5), P), iv(-10, 15));
        assert_eq!(iv(2, 3).mul(&iv(-5, -4), P), iv(-15, -8));
        assert_eq!(iv(0, 0).mul(&iv(-5, 7), P), iv(0, 0));
    }

    #[test]
    fn division_encloses_rationals() {
        let third = Interval::one().div(&iv(3, 3), P);
        assert!(third.contains_interval(&Interval::from_ratio(1, 3, 2 * P)));
        assert!(third.width() <= Dyadic::pow2(-60));
        let q = iv(-6, 6).div(&iv(2, 3), P);
        assert!(q.contains_interval(&iv(-3, 3)));
        assert!(q.lo() >= &Dyadic::from_i64(-4));
    }

    #[test]
    #[should_panic(expected = "reciprocal")]
    fn recip_rejects_zero_straddle() {
        iv(-1, 1).recip(P);
    }

    #[test]
    fn powers_are_tight_for_positive_bases() {
        let x = iv(2, 3);
        assert_eq!(x.pow_i(4, P), iv(16, 81));
        let inv = x.pow_i(-2, P);
        assert!(inv.contains_interval(&Interval::from_ratio(1, 8, P)));
        assert!(inv.lo().to_f64() > 1.0 / 9.0 - 1e-15);
        assert!(inv.hi().to_f64() < 0.25 + 1e-15);
        assert_eq!(iv(-2, 3).pow_i(0, P), Interval::one());
    }

    #[test]
    fn set_operations() {
        let a = iv(1, 5);
        let b = iv(3, 9);
        assert_eq!(a.hull(&b), iv(1, 9));
        assert_eq!(a.intersect(&b).unwrap(), iv(3, 5));
        assert!(iv(1, 2).intersect(&iv(3, 4)).is_none());
        assert_eq!(iv(2, 3).hull0(), iv(0, 3));
        assert_eq!(iv(-3, -2).hull0(), iv(-3, 0));
    }

    #[test]
    fn sign_queries() {
        assert_eq!(iv(1, 2).sign(), Some(Ordering::Greater));
        assert_eq!(iv(-2, -1).sign(), Some(Ordering::Less));
        assert_eq!(Interval::zero().sign(), Some(Ordering::Equal));
        assert_eq!(iv(-1, 1).sign(), None);
        assert!(iv(0, 1).sign().is_none());
        assert!(iv(1, 2).certainly_lt(&iv(3, 4)));
        assert!(!iv(1, 3).certainly_lt(&iv(3, 4)));
    }

    #[test]
    fn scalar_scaling() {
        let x = iv(-2, 3);
        assert_eq!(x.mul_dyadic(&Dyadic::from_i64(2), P), iv(-4, 6));
        assert_eq!(x.mul_dyadic(&Dyadic::from_i64(-2), P), iv(-6, 4));
        assert_eq!(iv(4, 8).div_dyadic(&Dyadic::from_i64(-4), P), iv(-2, -1));
    }

    #[test]
    fn decimal_parsing() {
        let x = Interval::from_decimal_str("0.5", P).unwrap();
        assert_eq!(x, Interval::point(Dyadic::from_i64_exp(1, -1)));
        let y = Interval::from_decimal_str("-12.375e-2", P).unwrap();
        assert!(y.intersect(&Interval::from_ratio(-99, 800, 2 * P)).is_some());
        assert!(y.width() <= Dyadic::pow2(-60));
        let t = Interval::from_decimal_str("0.1", P).unwrap();
        assert!(!t.is_point());
        assert!(t.width() <= Dyadic::pow2(-60));
        assert!(Interval::from_decimal_str("abc", P).is_none());
        assert_eq!(
            Interval::from_decimal_str("25e2", P).unwrap(),
            Interval::from_i64(2500)
        );
    }

    #[test]
    fn width_midpoint_clamp() {
        let x = iv(1, 3);
        assert_eq!(x.width(), Dyadic::from_i64(2));
        assert_eq!(x.midpoint(P), Dyadic::from_i64(2));
        let y = Interval::new(Dyadic::from_i64(-1), Dyadic::from_i64(5));
        assert_eq!(y.clamp_lo(&Dyadic::zero()), iv(0, 5));
    }
}
