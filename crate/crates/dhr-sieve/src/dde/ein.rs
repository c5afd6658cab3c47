//! Unit-interval expansions of the entire exponential integral
//!
//! ```text
//! Ein(x) = sum_(n>=1) (-1)^(n-1) x^n / (n n!),
//! ```
//!
//! anchored at integers: Ein(m + z) as a generalized polynomial in
//! z in [0, 1]. At m = 0 the defining series is used directly; at m >= 1
//! the Taylor coefficients come from the closed form
//!
//! ```text
//! Ein^(k)(x) = (-1)^(k-1) (k-1)! x^-k (1 - e^-x sum_(n<k) x^n/n!),
//! ```
//!
//! and in both cases the remainder sits in the slot through the uniform
//! bound |Ein^(k)(x) / k!| <= 1 / (k k!) valid for every x >= 0.

use crate::gpoly::GPoly;
use crate::interval::{ein_integer, exp_interval, Dyadic, Interval};

/// Ein(m + z) on z in [0, 1] to the given cap.
pub fn ein_expansion(m: u64, cap: usize, prec: u32) -> GPoly {
    let wp = prec + 32;
    let mut g = GPoly::zero(cap);
    if m == 0 {
        // Exact series coefficients (-1)^(n-1) / (n n!).
        let mut fact = Dyadic::one();
        for n in 1..cap as u64 {
            fact = fact.mul_exact(&Dyadic::from_i64(n as i64));
            let c = Interval::one()
                .div_dyadic(&fact.mul_exact(&Dyadic::from_i64(n as i64)), wp);
            g.set_coeff(n as usize, if n % 2 == 1 { c } else { c.neg() });
        }
    } else {
        g.set_coeff(0, ein_integer(m, wp));
        let md = Dyadic::from_i64(m as i64);
        let emx = exp_interval(&Interval::point(md.neg()), wp);
        let inv_m = Interval::one().div_dyadic(&md, wp);
        // Running m^-k, sum_(n<k) m^n/n!, and m^k/k!.
        let mut mpow_inv = Interval::one();
        let mut partial = Interval::zero();
        let mut term = Interval::one();
        for k in 1..cap as u64 {
            mpow_inv = mpow_inv.mul(&inv_m, wp);
            partial = partial.add(&term, wp);
            term = term.mul_dyadic(&md, wp).div_dyadic(&Dyadic::from_i64(k as i64), wp);
            // Ein^(k)(m)/k! = (-1)^(k-1) (1/k) m^-k (1 - e^-m partial).
            let c = Interval::one()
                .sub(&emx.mul(&partial, wp), wp)
                .mul(&mpow_inv, wp)
                .div_dyadic(&Dyadic::from_i64(k as i64), wp);
            g.set_coeff(k as usize, if k % 2 == 1 { c } else { c.neg() });
        }
    }
    // Slot: the cap-th Taylor coefficient at any point of [m, m+1] is
    // bounded by 1/(cap cap!) in magnitude.
    let mut fact = Dyadic::one();
    for n in 2..=cap as u64 {
        fact = fact.mul_exact(&Dyadic::from_i64(n as i64));
    }
    let b = Interval::one().div_dyadic(&fact.mul_exact(&Dyadic::from_i64(cap as i64)), wp);
    g.set_coeff(cap, b.neg().hull(&b));
    g
}
