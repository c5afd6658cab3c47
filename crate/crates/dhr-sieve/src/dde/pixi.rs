//! Pointwise evaluation of the boundary functionals
//!
//! ```text
//! Pi(u) = u p(u)/sigma(u) + kappa int_(u-2)^u p(t+1)/sigma(t) dt,
//! Xi(u) = u q(u)/sigma(u) - kappa int_(u-2)^u q(t+1)/sigma(t) dt,
//! ```
//!
//! together with the companion integral
//! J = kappa int t^(kappa-1)/sigma(t-1) dt used to locate the lower
//! crossover. All integrands factor through the sigma grid: on [m, m+1]
//! the shifted numerator lines up with the reciprocal piece in the same
//! local variable, so each unit (or half-scale) segment carries one
//! cached antiderivative and an integral is a telescoping walk. The
//! integrands are nonnegative on the domains used here (arguments stay
//! right of the largest zero of q), so integrals over interval bounds
//! are bracketed by the inner and outer dyadic-bound integrals.
//!
//! Everything here requires dimension kappa >= 2: the walks assume the
//! integration range stays right of u = 2, which holds because bisection
//! arguments exceed rho - 1 > 2 kappa - 2.

use std::collections::BTreeMap;

use crate::dde::pfn::PFn;
use crate::dde::qpoly::{compute_q, RationalPoly};
use crate::dde::sigma::{floor_int, SigmaFn};
use crate::dde::SieveContext;
use crate::gpoly::{gp_pow_finite, GPoly};
use crate::interval::{Dyadic, Interval};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    /// p(t+1) against 1/sigma(t).
    P,
    /// q(t+1) against 1/sigma(t).
    Q,
    /// (s+1)^(kappa-1) against 1/sigma(s).
    Pow,
}

/// Evaluator for Pi, Xi and the crossover integral, with per-segment
/// antiderivative caches.
pub struct PiXi {
    kappa: u32,
    prec: u32,
    cap: usize,
    q_iv: Vec<Interval>,
    q: RationalPoly,
    anti: BTreeMap<(Kind, usize), GPoly>,
    half_anti: BTreeMap<(Kind, usize), GPoly>,
}

impl PiXi {
    pub fn new(ctx: &SieveContext) -> crate::Result<PiXi> {
        if ctx.kappa < 2 {
            return Err(crate::Error::Domain(
                "boundary functionals need dimension at least 2".into(),
            ));
        }
        let q = compute_q(ctx.kappa);
        Ok(PiXi {
            kappa: ctx.kappa,
            prec: ctx.prec,
            cap: ctx.cap,
            q_iv: q.to_interval_coeffs(ctx.prec),
            q,
            anti: BTreeMap::new(),
            half_anti: BTreeMap::new(),
        })
    }

    /// q at an interval argument.
    pub fn q_eval(&self, x: &Interval, prec: u32) -> Interval {
        let mut acc = Interval::zero();
        for c in self.q_iv.iter().rev() {
            acc = acc.mul(x, prec).add(c, prec);
        }
        acc
    }

    /// Pi(u); u must sit inside (2, grid reach) with u - 2 >= 2.
    pub fn pi_tilde(
        &mut self,
        u: &Interval,
        sf: &mut SigmaFn,
        pf: &mut PFn,
        prec: u32,
    ) -> crate::Result<Interval> {
        let direct = u
            .mul(&pf.eval_p(u, prec), prec)
            .mul(&sf.eval_inv(u, prec)?, prec);
        let a = u.sub(&Interval::from_i64(2), prec);
        let int = self.int_enclosure(Kind::P, &a, u, sf, pf, prec)?;
        Ok(direct.add(&int.mul_dyadic(&Dyadic::from_i64(self.kappa as i64), prec), prec))
    }

    /// Xi(u) under the same domain conditions.
    pub fn xi_tilde(
        &mut self,
        u: &Interval,
        sf: &mut SigmaFn,
        pf: &mut PFn,
        prec: u32,
    ) -> crate::Result<Interval> {
        let direct = u
            .mul(&self.q_eval(u, prec), prec)
            .mul(&sf.eval_inv(u, prec)?, prec);
        let a = u.sub(&Interval::from_i64(2), prec);
        let int = self.int_enclosure(Kind::Q, &a, u, sf, pf, prec)?;
        Ok(direct.sub(&int.mul_dyadic(&Dyadic::from_i64(self.kappa as i64), prec), prec))
    }

    /// kappa int_b^c t^(kappa-1)/sigma(t-1) dt for 2 kappa < b <= c.
    pub fn j_between(
        &mut self,
        b: &Interval,
        c: &Interval,
        sf: &mut SigmaFn,
        pf: &mut PFn,
        prec: u32,
    ) -> crate::Result<Interval> {
        let one = Interval::one();
        let s_lo = b.sub(&one, prec);
        let s_hi = c.sub(&one, prec);
        let int = self.int_enclosure(Kind::Pow, &s_lo, &s_hi, sf, pf, prec)?;
        Ok(int.mul_dyadic(&Dyadic::from_i64(self.kappa as i64), prec))
    }

    /// Bracket of int_a^b over interval bounds via the nonnegative
    /// integrand: the inner dyadic integral gives the lower end, the
    /// outer one the upper end.
    fn int_enclosure(
        &mut self,
        kind: Kind,
        a: &Interval,
        b: &Interval,
        sf: &mut SigmaFn,
        pf: &mut PFn,
        prec: u32,
    ) -> crate::Result<Interval> {
        assert!(a.hi() <= b.lo(), "integral bounds overlap");
        let inner = self.int_dyadic(kind, a.hi(), b.lo(), sf, pf, prec)?;
        let outer = self.int_dyadic(kind, a.lo(), b.hi(), sf, pf, prec)?;
        Ok(Interval::new(inner.lo().clone(), outer.hi().clone()))
    }

    /// Telescoping walk over grid segments with dyadic endpoints.
    fn int_dyadic(
        &mut self,
        kind: Kind,
        lo: &Dyadic,
        hi: &Dyadic,
        sf: &mut SigmaFn,
        pf: &mut PFn,
        prec: u32,
    ) -> crate::Result<Interval> {
        assert!(*lo >= Dyadic::from_i64(2), "walk starts below 2");
        let mut total = Interval::zero();
        let mut cursor = lo.clone();
        while cursor < *hi {
            let m = floor_int(&cursor);
            let (end, contrib) = if m == 2 {
                let half = Dyadic::from_i64(5).mul_pow2(-1);
                let (i, seg_end) = if cursor < half {
                    (0usize, if *hi < half { hi.clone() } else { half })
                } else {
                    let three = Dyadic::from_i64(3);
                    (1, if *hi < three { hi.clone() } else { three })
                };
                // Local coordinate z = 2(t - 2) - i.
                let base = Dyadic::from_i64(4 + i as i64);
                let z_lo = cursor.mul_pow2(1).sub_exact(&base);
                let z_hi = seg_end.mul_pow2(1).sub_exact(&base);
                let anti = self.half_anti(kind, i, sf, pf)?;
                let v = anti
                    .eval(&Interval::point(z_hi), prec)
                    .sub(&anti.eval(&Interval::point(z_lo), prec), prec);
                (seg_end, v)
            } else {
                let md = Dyadic::from_i64(m);
                let next = Dyadic::from_i64(m + 1);
                let seg_end = if *hi < next { hi.clone() } else { next };
                let z_lo = cursor.sub_exact(&md);
                let z_hi = seg_end.sub_exact(&md);
                let anti = self.anti(kind, m as usize, sf, pf)?;
                let v = anti
                    .eval(&Interval::point(z_hi), prec)
                    .sub(&anti.eval(&Interval::point(z_lo), prec), prec);
                (seg_end, v)
            };
            total = total.add(&contrib, prec);
            cursor = end;
        }
        Ok(total)
    }

    /// Antiderivative of the kind's integrand on [m, m+1], local z.
    fn anti(
        &mut self,
        kind: Kind,
        m: usize,
        sf: &mut SigmaFn,
        pf: &mut PFn,
    ) -> crate::Result<&GPoly> {
        let prec = self.prec;
        if !self.anti.contains_key(&(kind, m)) {
            let w = match kind {
                Kind::P => pf.piece(m + 1).clone(),
                Kind::Q => self.q_shifted(BigRational::from_integer(BigInt::from(m as i64 + 1))),
                Kind::Pow => gp_pow_finite(
                    self.kappa as u64 - 1,
                    &Dyadic::from_i64(m as i64 + 1),
                    self.cap,
                    prec,
                )
                .scale(
                    &Interval::from_i64(m as i64 + 1).pow_i(self.kappa as i64 - 1, prec),
                    prec,
                ),
            };
            let g = w.mul(sf.inv_piece(m)?, prec).integrate(prec);
            self.anti.insert((kind, m), g);
        }
        Ok(&self.anti[&(kind, m)])
    }

    /// Antiderivative over the half-scale [2, 3] segments, including the
    /// dt = dz/2 factor.
    fn half_anti(
        &mut self,
        kind: Kind,
        i: usize,
        sf: &mut SigmaFn,
        pf: &mut PFn,
    ) -> crate::Result<&GPoly> {
        let prec = self.prec;
        if !self.half_anti.contains_key(&(kind, i)) {
            let w = match kind {
                Kind::P => {
                    let p3 = pf.piece(3).clone();
                    let based = if i == 0 {
                        p3
                    } else {
                        p3.shift_anchor(&Interval::from_ratio(1, 2, prec), prec)
                    };
                    based.scale_arg_pow2(-1)
                }
                Kind::Q => {
                    // q(t+1) with t = 2 + (i+z)/2: shift to 3 + i/2, then
                    // halve the argument exactly in the rationals.
                    let x0 = BigRational::new(BigInt::from(6 + i as i64), BigInt::from(2));
                    let mut sh = self.q.shift(&x0);
                    let two = BigRational::from_integer(BigInt::from(2));
                    let mut scale = BigRational::from_integer(BigInt::from(1));
                    for c in sh.coeffs.iter_mut() {
                        *c = &*c * &scale;
                        scale = scale / &two;
                    }
                    self.pad_to_cap(sh.to_interval_coeffs(prec))
                }
                Kind::Pow => unreachable!("crossover walks stay right of 3"),
            };
            let halves = sf.inv_halves_on_two_three()?;
            let inv = if i == 0 {
                halves.0.clone()
            } else {
                halves.1.clone()
            };
            let g = w
                .mul(&inv, prec)
                .integrate(prec)
                .scale_dyadic(&Dyadic::one().mul_pow2(-1), prec);
            self.half_anti.insert((kind, i), g);
        }
        Ok(&self.half_anti[&(kind, i)])
    }

    /// q(x0 + z) as a generalized polynomial (exact coefficients).
    fn q_shifted(&self, x0: BigRational) -> GPoly {
        self.pad_to_cap(self.q.shift(&x0).to_interval_coeffs(self.prec))
    }

    fn pad_to_cap(&self, mut coeffs: Vec<Interval>) -> GPoly {
        assert!(coeffs.len() <= self.cap, "degree exceeds the cap");
        coeffs.resize(self.cap + 1, Interval::zero());
        GPoly::from_coeffs(coeffs)
    }
}
