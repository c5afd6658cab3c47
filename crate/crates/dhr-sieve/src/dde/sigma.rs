//! The sieve density function sigma and its reciprocal, piece by piece.
//!
//! On (0, 2] sigma is the exact monomial u^kappa / A with
//! A = kappa! (2 e^gamma)^kappa; above 2 it continues through
//!
//! ```text
//! sigma(u0 + u) = (1 + u/u0)^kappa [ sigma(u0)
//!                 - (kappa/u0) int_0^u (1 + t/u0)^(-kappa-1) sigma(u0-2+t) dt ]
//! ```
//!
//! so each unit interval [m, m+1] carries one generalized polynomial fed by
//! the piece two steps down.
//!
//! The reciprocal pieces demand care: a series reciprocal amplifies
//! enclosure widths at a geometric rate tied to how fast sigma varies
//! across the piece, which is catastrophic for 2 <= u <~ kappa. There
//! 1/sigma is built from the ratio s(u) = A sigma(u) / u^kappa instead:
//! s deviates from 1 only like the slowly accumulating delay correction
//! (sigma continues u^kappa/A with kappa matching derivatives at 2), so
//! reciprocating s is well conditioned exactly where sigma is not, and
//! 1/sigma = A u^(-kappa) / s(u) with the power series of u^(-kappa)
//! summed directly. On [1, 2] the monomial form is exact but a direct
//! expansion has radius 1, so the series is rebased from the far end.
//! Past u = kappa the plain reciprocal of the sigma piece is fine; both
//! finishing paths verify the resulting width and fall back to the other.
//!
//! The piece on [2, 3] needs one more twist: the analytic continuation
//! of sigma's restriction there has zeros near distance 1 below the
//! anchor, so any unit expansion of 1/sigma stalls at z = 1 and for
//! kappa >= 5 diverges outright. That reciprocal is therefore carried as
//! two half-scale pieces g_i(z) = 1/sigma(2 + (i+z)/2), which keep the
//! zeros at twice the piece scale.

use crate::dde::SieveContext;
use crate::gpoly::{gp_binom_neg, gp_pow_finite, rebase_one_minus_u, GPoly};
use crate::interval::{Dyadic, Interval};
use num_bigint::BigUint;
use num_traits::One;

/// Piecewise model of sigma and 1/sigma on unit intervals [m, m+1],
/// extended on demand.
pub struct SigmaFn {
    kappa: u32,
    prec: u32,
    cap: usize,
    big_a: Interval,
    pieces: Vec<GPoly>,
    inv_pieces: Vec<Option<GPoly>>,
    inv_two_halves: Option<(GPoly, GPoly)>,
}

impl SigmaFn {
    pub fn new(ctx: &SieveContext) -> SigmaFn {
        SigmaFn {
            kappa: ctx.kappa,
            prec: ctx.prec,
            cap: ctx.cap,
            big_a: ctx.big_a.clone(),
            pieces: Vec::new(),
            inv_pieces: Vec::new(),
            inv_two_halves: None,
        }
    }

    /// The normalization A = kappa! (2 e^gamma)^kappa.
    pub fn big_a(&self) -> &Interval {
        &self.big_a
    }

    /// sigma on [m, m+1] in the local variable z = u - m.
    pub fn piece(&mut self, m: usize) -> &GPoly {
        while self.pieces.len() <= m {
            let g = self.build_sigma(self.pieces.len());
            self.pieces.push(g);
        }
        &self.pieces[m]
    }

    /// 1/sigma on [m, m+1] for m = 1 or m >= 3; the origin piece is
    /// singular (closed forms cover it at the call sites) and [2, 3] is
    /// only available through `inv_halves_on_two_three`.
    pub fn inv_piece(&mut self, m: usize) -> crate::Result<&GPoly> {
        assert!(
            m == 1 || m >= 3,
            "1/sigma piece at {m} is not a unit piece"
        );
        while self.inv_pieces.len() <= m {
            self.inv_pieces.push(None);
        }
        if self.inv_pieces[m].is_none() {
            let g = self.build_inv(m)?;
            self.inv_pieces[m] = Some(g);
        }
        Ok(self.inv_pieces[m].as_ref().unwrap())
    }

    /// 1/sigma on [2, 3] as the half-scale pair g_i(z) = 1/sigma(2 + (i+z)/2).
    pub fn inv_halves_on_two_three(&mut self) -> crate::Result<&(GPoly, GPoly)> {
        if self.inv_two_halves.is_none() {
            let lo = self.build_inv_half(0)?;
            let hi = self.build_inv_half(1)?;
            self.inv_two_halves = Some((lo, hi));
        }
        Ok(self.inv_two_halves.as_ref().unwrap())
    }

    /// sigma at u >= 0; an argument straddling grid points hulls the
    /// adjacent piece values (sound by continuity).
    pub fn eval_sigma(&mut self, u: &Interval, prec: u32) -> Interval {
        self.eval_on(u, prec, false).expect("sigma eval is total")
    }

    /// 1/sigma at u >= 1.
    pub fn eval_inv(&mut self, u: &Interval, prec: u32) -> crate::Result<Interval> {
        self.eval_on(u, prec, true)
    }

    fn eval_on(&mut self, u: &Interval, prec: u32, inv: bool) -> crate::Result<Interval> {
        assert!(!u.lo().is_negative(), "sigma evaluated below 0");
        let mlo = floor_int(u.lo());
        let mhi = floor_int(u.hi());
        if inv && mlo < 1 {
            return Err(crate::Error::Domain(
                "1/sigma evaluated below u = 1".into(),
            ));
        }
        let mut out: Option<Interval> = None;
        for m in mlo..=mhi {
            let mm = Dyadic::from_i64(m);
            let lo = if *u.lo() > mm {
                u.lo().sub_exact(&mm)
            } else {
                Dyadic::zero()
            };
            let hi_raw = u.hi().sub_exact(&mm);
            let hi = if hi_raw > Dyadic::one() {
                Dyadic::one()
            } else {
                hi_raw
            };
            let local = Interval::new(lo, hi);
            let v = if inv && m == 2 {
                self.eval_inv_on_two_three(&local, prec)?
            } else if inv {
                self.inv_piece(m as usize)?.eval(&local, prec)
            } else {
                self.piece(m as usize).eval(&local, prec)
            };
            out = Some(match out {
                None => v,
                Some(o) => o.hull(&v),
            });
        }
        Ok(out.expect("nonempty piece range"))
    }

    /// Evaluates 1/sigma at 2 + local through the half-scale pair,
    /// hulling across the midpoint when the argument straddles it.
    fn eval_inv_on_two_three(&mut self, local: &Interval, prec: u32) -> crate::Result<Interval> {
        let half = Dyadic::one().mul_pow2(-1);
        let mut out: Option<Interval> = None;
        if *local.lo() < half || *local.hi() <= half {
            let hi = if *local.hi() < half {
                local.hi().mul_pow2(1)
            } else {
                Dyadic::one()
            };
            let z = Interval::new(local.lo().mul_pow2(1), hi);
            out = Some(self.inv_halves_on_two_three()?.0.eval(&z, prec));
        }
        if *local.hi() > half {
            let lo = if *local.lo() > half {
                local.lo().mul_pow2(1).sub_exact(&Dyadic::one())
            } else {
                Dyadic::zero()
            };
            let z = Interval::new(lo, local.hi().mul_pow2(1).sub_exact(&Dyadic::one()));
            let v = self.inv_halves_on_two_three()?.1.eval(&z, prec);
            out = Some(match out {
                None => v,
                Some(o) => o.hull(&v),
            });
        }
        Ok(out.expect("nonempty local range"))
    }

    fn build_sigma(&mut self, m: usize) -> GPoly {
        let prec = self.prec;
        let cap = self.cap;
        let k = self.kappa as usize;
        if m == 0 {
            // z^kappa / A.
            let mut g = GPoly::zero(cap);
            g.set_coeff(k, Interval::one().div(&self.big_a, prec));
            return g;
        }
        if m == 1 {
            // (1 + z)^kappa / A, exact binomials.
            let inv_a = Interval::one().div(&self.big_a, prec);
            let mut g = GPoly::zero(cap);
            let mut b = BigUint::one();
            for n in 0..=k {
                g.set_coeff(n, inv_a.mul_dyadic(&Dyadic::from_biguint(b.clone()), prec));
                if n < k {
                    b = b * (k - n) as u64 / (n as u64 + 1);
                }
            }
            return g;
        }
        // The delay step: feed the piece two intervals down through the
        // kernel (1 + t/m)^(-kappa-1) and wrap in (1 + z/m)^kappa.
        let u0 = Dyadic::from_i64(m as i64);
        let prev = self.piece(m - 2).clone();
        let sigma_m = self.piece(m - 1).eval(&Interval::one(), prec);
        let neg_pow = gp_binom_neg(self.kappa as u64 + 1, &u0, cap, prec);
        let integral = neg_pow.mul(&prev, prec).integrate(prec);
        let mut bracket = integral.scale(
            &Interval::from_ratio(-(self.kappa as i64), m as i64, prec),
            prec,
        );
        bracket.add_to_coeff(0, &sigma_m, prec);
        gp_pow_finite(self.kappa as u64, &u0, cap, prec).mul(&bracket, prec)
    }

    fn build_inv(&mut self, m: usize) -> crate::Result<GPoly> {
        if m == 1 {
            return Ok(self.inv_on_one_two());
        }
        assert!(m >= 3, "unit reciprocal pieces start at 3");
        let ratio_first = m <= self.kappa.max(2) as usize;
        let mut last: Option<crate::Error> = None;
        for use_ratio in [ratio_first, !ratio_first] {
            let built = if use_ratio {
                self.inv_via_ratio(m)
            } else {
                self.inv_direct(m)
            };
            match built {
                Ok(g) => {
                    let mid = Interval::from_ratio(1, 2, self.prec);
                    if self.rel_width_ok(&g.eval(&mid, self.prec)) {
                        return Ok(g);
                    }
                    last = Some(crate::Error::Precision(format!(
                        "1/sigma piece {m} enclosure too wide"
                    )));
                }
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("both reciprocal paths attempted"))
    }

    /// Width acceptance for reciprocal pieces, relative to the value
    /// scale: 1/sigma near 2 is of order A 2^-kappa, far too large for an
    /// absolute test to mean anything.
    fn rel_width_ok(&self, v: &Interval) -> bool {
        let tol = Dyadic::pow2(-((self.prec / 2) as i64 + 16));
        let mut mag = v.mag_bound();
        if mag < Dyadic::one() {
            mag = Dyadic::one();
        }
        v.width() <= tol.mul_exact(&mag)
    }

    /// Plain series reciprocal of the sigma piece; sound everywhere but
    /// only tight once sigma is flat across the piece.
    fn inv_direct(&mut self, m: usize) -> crate::Result<GPoly> {
        let prec = self.prec;
        let piece = self.piece(m).clone();
        // sigma is increasing, so its range is the hull of the endpoints.
        let lo = piece.eval(&Interval::zero(), prec);
        let hi = piece.eval(&Interval::one(), prec);
        piece.recip(Some(&lo.hull(&hi)), prec)
    }

    /// One half of 1/sigma on [2, 3], through the same ratio trick at
    /// half scale: u = u_i + z/2 with u_i = 2 + i/2.
    fn build_inv_half(&mut self, i: usize) -> crate::Result<GPoly> {
        let wp = self.prec + 64;
        let cap = self.cap;
        let k = self.kappa;
        let unit = self.piece(2).clone();
        let based = if i == 0 {
            unit
        } else {
            unit.shift_anchor(&Interval::from_ratio(1, 2, wp), wp)
        };
        let sigma_half = based.scale_arg_pow2(-1);
        let neg_pow = gp_binom_neg(k as u64, &Dyadic::from_i64(4 + i as i64), cap, wp);
        let ui = Interval::from_ratio(4 + i as i64, 2, wp);
        let scale = self.big_a.mul(&ui.pow_i(-(k as i64), wp), wp);
        let s = sigma_half.mul(&neg_pow, wp).scale(&scale, wp);
        let lo = s.eval(&Interval::one(), wp);
        let hi = s.eval(&Interval::zero(), wp);
        let inv_s = s.recip(Some(&lo.hull(&hi)), wp)?;
        let g = inv_s.mul(&neg_pow, wp).scale(&scale, wp);
        if !self.rel_width_ok(&g.eval(&Interval::one(), wp)) {
            return Err(crate::Error::Precision(
                "1/sigma half piece on [2, 3] too wide".into(),
            ));
        }
        Ok(g)
    }

    /// 1/sigma through the ratio s(u) = A sigma(u) / u^kappa, for m >= 3.
    fn inv_via_ratio(&mut self, m: usize) -> crate::Result<GPoly> {
        let wp = self.prec + 64;
        let cap = self.cap;
        let k = self.kappa;
        let u0 = Dyadic::from_i64(m as i64);
        let sigma = self.piece(m).clone();
        let neg_pow = gp_binom_neg(k as u64, &u0, cap, wp);
        let scale = self
            .big_a
            .mul(&Interval::from_i64(m as i64).pow_i(-(k as i64), wp), wp);
        let s = sigma.mul(&neg_pow, wp).scale(&scale, wp);
        // s is positive and decreasing: s' = -(kappa/u) s sigma(u-2)/sigma(u).
        let lo = s.eval(&Interval::one(), wp);
        let hi = s.eval(&Interval::zero(), wp);
        let inv_s = s.recip(Some(&lo.hull(&hi)), wp)?;
        Ok(inv_s.mul(&neg_pow, wp).scale(&scale, wp))
    }

    /// A (1 + z)^(-kappa) on [1, 2]. A direct expansion in z has radius
    /// exactly 1, so expand around z = 1 instead: in v = 1 - z the series
    /// A 2^(-kappa) sum C(kappa+n-1, n) (v/2)^n has positive terms and
    /// ratio at most (cap+kappa)/(2 cap + 2) < 1, whose tail is folded
    /// into the constant coefficient after rebasing back to z.
    fn inv_on_one_two(&self) -> GPoly {
        let wp = self.prec + 64;
        let cap = self.cap;
        let k = self.kappa as u64;
        let mut coeffs = vec![Interval::zero(); cap + 1];
        let mut binom = BigUint::one();
        for n in 0..cap as u64 {
            let c = Dyadic::from_biguint(binom.clone()).mul_pow2(-((k + n) as i64));
            coeffs[n as usize] = Interval::point(c);
            binom = binom * (k + n) / (n + 1);
        }
        let c_cap =
            Interval::point(Dyadic::from_biguint(binom).mul_pow2(-((k + cap as u64) as i64)));
        let r = Interval::from_ratio(cap as i64 + k as i64, 2 * (cap as i64 + 1), wp);
        let tail = c_cap.div(&Interval::one().sub(&r, wp), wp);
        let mut out = rebase_one_minus_u(&coeffs, wp);
        out[0] = out[0].add(&Interval::new(Dyadic::zero(), tail.hi().clone()), wp);
        GPoly::from_coeffs(out).scale(&self.big_a, wp)
    }
}

/// Largest integer at most d, by exact comparison around an f64 guess.
pub(crate) fn floor_int(d: &Dyadic) -> i64 {
    let mut g = d.to_f64().floor() as i64;
    while Dyadic::from_i64(g + 1) <= *d {
        g += 1;
    }
    while Dyadic::from_i64(g) > *d {
        g -= 1;
    }
    g
}
