//! Arbitrary-precision dyadic floating point with directed rounding.
//!
//! A [`Dyadic`] is `(-1)^neg * mant * 2^exp` with an arbitrary-size natural
//! mantissa. Addition, subtraction and multiplication are exact; rounding
//! happens only when a result is explicitly rounded to a working precision,
//! and then always in a caller-chosen direction. Interval endpoints round
//! outward, so enclosures built on this type never silently shrink.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction for endpoint arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity (lower endpoints).
    Down,
    /// Toward positive infinity (upper endpoints).
    Up,
}

impl Round {
    /// The opposite direction.
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }

    /// True if rounding in this direction moves a number with the given
    /// sign away from zero.
    fn away_from_zero(self, neg: bool) -> bool {
        match self {
            Round::Up => !neg,
            Round::Down => neg,
        }
    }
}

/// Exact binary floating-point number `(-1)^neg * mant * 2^exp`.
///
/// Canonical form: the mantissa is odd unless the value is zero, and zero
/// is stored as `(neg: false, mant: 0, exp: 0)`. All constructors normalize,
/// so derived equality coincides with numerical equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    neg: bool,
    mant: BigUint,
    exp: i64,
}

impl Dyadic {
    fn norm(neg: bool, mant: BigUint, exp: i64) -> Dyadic {
        if mant.is_zero() {
            return Dyadic {
                neg: false,
                mant,
                exp: 0,
            };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic {
                neg,
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        } else {
            Dyadic { neg, mant, exp }
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic {
            neg: false,
            mant: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Dyadic {
        Dyadic {
            neg: false,
            mant: BigUint::one(),
            exp: 0,
        }
    }

    /// 2^k.
    pub fn pow2(k: i64) -> Dyadic {
        Dyadic {
            neg: false,
            mant: BigUint::one(),
            exp: k,
        }
    }

    pub fn from_i64(v: i64) -> Dyadic {
        let neg = v < 0;
        Dyadic::norm(neg, BigUint::from(v.unsigned_abs()), 0)
    }

    pub fn from_u64(v: u64) -> Dyadic {
        Dyadic::norm(false, BigUint::from(v), 0)
    }

    pub fn from_biguint(v: BigUint) -> Dyadic {
        Dyadic::norm(false, v, 0)
    }

    /// Exact value `m * 2^e` for small m.
    pub fn from_i64_exp(m: i64, e: i64) -> Dyadic {
        let neg = m < 0;
        Dyadic::norm(neg, BigUint::from(m.unsigned_abs()), e)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    /// Number of significant bits in the mantissa (0 for zero).
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Exponent of the most significant bit plus one: the magnitude lies in
    /// `[2^(mag-1), 2^mag)`. Meaningless for zero.
    pub fn mag(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub fn neg(&self) -> Dyadic {
        if self.is_zero() {
            self.clone()
        } else {
            Dyadic {
                neg: !self.neg,
                mant: self.mant.clone(),
                exp: self.exp,
            }
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            neg: false,
            mant: self.mant.clone(),
            exp: self.exp,
        }
    }

    /// Exact multiplication by 2^k.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            self.clone()
        } else {
            Dyadic {
                neg: self.neg,
                mant: self.mant.clone(),
                exp: self.exp + k,
            }
        }
    }

    fn cmp_abs(&self, other: &Dyadic) -> Ordering {
        if self.is_zero() || other.is_zero() {
            return self.mant.bits().cmp(&other.mant.bits());
        }
        match self.mag().cmp(&other.mag()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same leading-bit position: align to the smaller exponent.
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.mant.cmp(&other.mant),
            Ordering::Less => self.mant.cmp(&(&other.mant << (other.exp - self.exp) as u64)),
            Ordering::Greater => (&self.mant << (self.exp - other.exp) as u64).cmp(&other.mant),
        }
    }

    /// Round to at most `prec` mantissa bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let drop = bits - prec as u64;
        let dropped_nonzero = self.mant.trailing_zeros().unwrap_or(0) < drop;
        let mut q = &self.mant >> drop;
        if dropped_nonzero && dir.away_from_zero(self.neg) {
            q += 1u32;
        }
        Dyadic::norm(self.neg, q, self.exp + drop as i64)
    }

    /// Exact sum. Cost grows with the exponent gap; use [`Dyadic::add_round`]
    /// in accumulation loops.
    pub fn add_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let ma = &self.mant << (self.exp - e) as u64;
        let mb = &other.mant << (other.exp - e) as u64;
        if self.neg == other.neg {
            Dyadic::norm(self.neg, ma + mb, e)
        } else {
            match ma.cmp(&mb) {
                Ordering::Equal => Dyadic::zero(),
                Ordering::Greater => Dyadic::norm(self.neg, ma - mb, e),
                Ordering::Less => Dyadic::norm(other.neg, mb - ma, e),
            }
        }
    }

    /// Directed sum rounded to `prec` bits. When the operands' scales are
    /// too far apart to combine exactly at reasonable cost, the smaller one
    /// is replaced by a one-ulp nudge in the safe direction.
    pub fn add_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.mag() >= other.mag() {
            (self, other)
        } else {
            (other, self)
        };
        let gap = big.mag() - small.mag();
        let budget = prec as i64 + 8;
        if gap <= budget {
            return big.add_exact(small).round(prec, dir);
        }
        // |small| < 2^t where t = big.mag() - budget > small.mag().
        let t = big.mag() - budget;
        let shift = (big.exp - t) as u64; // big has `budget` bits above t
        let m = &big.mant << shift;
        // If small pushes in the rounding direction, shift big by one unit
        // at scale t (which exceeds |small|); otherwise big alone bounds
        // the sum in that direction.
        let small_pushes = match dir {
            Round::Up => !small.neg,
            Round::Down => small.neg,
        };
        let sum = if small_pushes {
            if dir.away_from_zero(big.neg) {
                Dyadic::norm(big.neg, m + 1u32, t)
            } else {
                Dyadic::norm(big.neg, m - 1u32, t)
            }
        } else {
            Dyadic::norm(big.neg, m, t)
        };
        sum.round(prec, dir)
    }

    pub fn sub_exact(&self, other: &Dyadic) -> Dyadic {
        self.add_exact(&other.neg())
    }

    pub fn sub_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.add_round(&other.neg(), prec, dir)
    }

    /// Exact product.
    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::norm(
            self.neg != other.neg,
            &self.mant * &other.mant,
            self.exp + other.exp,
        )
    }

    pub fn mul_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.mul_exact(other).round(prec, dir)
    }

    /// Directed quotient to `prec` bits. Caller must ensure `other != 0`.
    pub fn div_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let neg = self.neg != other.neg;
        // Shift the numerator so the integer quotient carries prec+2 bits.
        let want = prec as i64 + 2;
        let s = (want + other.mant.bits() as i64 - self.mant.bits() as i64).max(0) as u64;
        let num = &self.mant << s;
        let (q, r) = num.div_rem(&other.mant);
        let q = if !r.is_zero() && dir.away_from_zero(neg) {
            q + 1u32
        } else {
            q
        };
        Dyadic::norm(neg, q, self.exp - other.exp - s as i64).round(prec, dir)
    }

    /// Directed square root to `prec` bits. Caller must ensure `self >= 0`.
    pub fn sqrt_round(&self, prec: u32, dir: Round) -> Dyadic {
        assert!(!self.neg, "square root of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Shift so the root carries prec+2 bits and the exponent stays even.
        let want = 2 * (prec as i64 + 2);
        let mut s = (want - self.mant.bits() as i64).max(0);
        if (self.exp - s) % 2 != 0 {
            s += 1;
        }
        let m = &self.mant << s as u64;
        let r = num_integer::Roots::sqrt(&m);
        let exact = (&r * &r) == m;
        let r = if !exact && dir == Round::Up { r + 1u32 } else { r };
        Dyadic::norm(false, r, (self.exp - s) / 2).round(prec, dir)
    }

    /// Closest f64, for heuristics and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (top, e) = if bits > 53 {
            ((&self.mant >> (bits - 53)).to_u64().unwrap(), self.exp + (bits - 53) as i64)
        } else {
            (self.mant.to_u64().unwrap(), self.exp)
        };
        let mut x = top as f64;
        let mut e = e;
        // Apply the exponent in safe chunks to avoid premature overflow.
        while e > 512 {
            x *= f64::powi(2.0, 512);
            e -= 512;
            if x.is_infinite() {
                break;
            }
        }
        while e < -512 {
            x *= f64::powi(2.0, -512);
            e += 512;
            if x == 0.0 {
                break;
            }
        }
        x *= f64::powi(2.0, e as i32);
        if self.neg {
            -x
        } else {
            x
        }
    }

    /// Hexadecimal literal `[-]0x<mant>p<exp>`, exact round trip.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0x0p0".to_string();
        }
        format!(
            "{}0x{:x}p{}",
            if self.neg { "-" } else { "" },
            self.mant,
            self.exp
        )
    }

    /// Parse the format produced by [`Dyadic::to_hex`].
    pub fn from_hex(s: &str) -> Option<Dyadic> {
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let rest = rest.strip_prefix("0x")?;
        let p = rest.find('p')?;
        let mant = BigUint::parse_bytes(rest[..p].as_bytes(), 16)?;
        let exp: i64 = rest[p + 1..].parse().ok()?;
        Some(Dyadic::norm(neg, mant, exp))
    }

    /// Decimal string with `frac_digits` digits after the point, rounded to
    /// nearest (ties away from zero). For human-readable output only.
    pub fn to_decimal(&self, frac_digits: usize) -> String {
        use num_bigint::BigInt;
        if self.is_zero() {
            return if frac_digits == 0 {
                "0".to_string()
            } else {
                format!("0.{}", "0".repeat(frac_digits))
            };
        }
        // scaled = round(|x| * 10^d * 2) as an odd/even decider
        let pow10 = BigUint::from(10u32).pow(frac_digits as u32);
        let num = &self.mant * &pow10;
        let twice = if self.exp >= 0 {
            (num << self.exp as u64) << 1u32
        } else {
            (num << 1u32) >> (-self.exp) as u64
        };
        let scaled = (&twice + BigUint::one()) >> 1u32; // round half away from zero
        let s = BigInt::from(scaled).to_string();
        let (int_part, frac_part) = if s.len() > frac_digits {
            let cut = s.len() - frac_digits;
            (s[..cut].to_string(), s[cut..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", s, width = frac_digits))
        };
        let sign = if self.neg { "-" } else { "" };
        if frac_digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => {
                if other.neg {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (false, true) => {
                if self.neg {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (false, false) => match (self.neg, other.neg) {
                (false, true) => Ordering::Greater,
                (true, false) => Ordering::Less,
                (false, false) => self.cmp_abs(other),
                (true, true) => other.cmp_abs(self),
            },
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({} ~ {:e})", self.to_hex(), self.to_f64())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}
