//! Exponential moments I_n(u0) = integral_0^1 z^n e^(-u0 z) dz.
//!
//! These are the building blocks for expanding e^(-u0 z) factors against
//! polynomial enclosures: I_n = M(n+1, n+2, -u0) / (n+1) in confluent
//! hypergeometric terms. Integration by parts gives
//! u0 I_n = n I_(n-1) - e^(-u0), which is stable run forward while n <= u0
//! (error shrinks by n/u0) and stable run backward while n > u0 (error
//! shrinks by u0/n), so each index is computed on its stable side.

use super::dyadic::Dyadic;
use super::elem::exp_interval;
use super::interval::Interval;

const GUARD: u32 = 32;

/// Enclosures of I_0(u0), ..., I_nmax(u0) for a positive dyadic u0.
pub fn exp_moment_table(nmax: usize, u0: &Dyadic, prec: u32) -> Vec<Interval> {
    assert!(!u0.is_negative() && !u0.is_zero(), "u0 must be positive");
    let wp = prec + GUARD;
    let emu = exp_interval(&Interval::point(u0.neg()), wp);
    let mut table = vec![Interval::zero(); nmax + 1];

    // Forward sweep from I_0 = (1 - e^-u0) / u0 while n <= u0.
    let n_switch = (u0.to_f64().floor() as usize).min(nmax);
    let mut cur = Interval::one().sub(&emu, wp).div_dyadic(u0, wp);
    table[0] = cur.clone();
    for n in 1..=n_switch {
        // I_n = (n I_(n-1) - e^-u0) / u0
        cur = cur
            .mul_dyadic(&Dyadic::from_i64(n as i64), wp)
            .sub(&emu, wp)
            .div_dyadic(u0, wp);
        table[n] = cur.clone();
    }

    if n_switch < nmax {
        // Backward sweep: start from the a priori bracket
        // I_j in [e^-u0, 1] / (j+1) far enough out that the contraction
        // factor u0/j halves the width at least wp+8 times.
        let start = 2 * (u0.to_f64().ceil() as usize).max(1);
        let j_top = nmax.max(start) + wp as usize + 8;
        let top = Interval::new(emu.lo().clone(), Dyadic::one())
            .div_dyadic(&Dyadic::from_i64(j_top as i64 + 1), wp);
        let mut cur = top;
        for j in (n_switch + 1..=j_top).rev() {
            // I_(j-1) = (u0 I_j + e^-u0) / j
            let prev = cur
                .mul_dyadic(u0, wp)
                .add(&emu, wp)
                .div_dyadic(&Dyadic::from_i64(j as i64), wp);
            if j <= nmax {
                table[j] = cur.clone();
            }
            cur = prev;
        }
    }
    table
}

/// Single moment I_n(u0).
pub fn exp_moment(n: usize, u0: &Dyadic, prec: u32) -> Interval {
    exp_moment_table(n, u0, prec).pop().unwrap()
}
