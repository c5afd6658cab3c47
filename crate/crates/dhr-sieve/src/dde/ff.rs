//! The sifting functions F and f.
//!
//! F equals 1/sigma up to the upper limit alpha and f vanishes up to the
//! lower limit beta; beyond their limits the pair obeys the adjoint
//! system
//!
//! ```text
//! (u^kappa F(u))' = kappa u^(kappa-1) f(u-1),
//! (u^kappa f(u))' = kappa u^(kappa-1) F(u-1),
//! ```
//!
//! whose solved form over one analytic stretch anchored at u0 reads
//!
//! ```text
//! F(u0+t) = (1+t/u0)^(-kappa) [F(u0) + (kappa/u0) int_0^t (1+s/u0)^(kappa-1) f(u0-1+s) ds]
//! ```
//!
//! (roles swapped for f). Every breakpoint of either function lies on the
//! grid {n} u {alpha+n} u {beta+n}: the switch points alpha and beta seed
//! two offset families and each convolution pass moves a kink up by one,
//! while 1/sigma contributes the integer family below alpha. The grid
//! repeats with period one, three points per unit, so the delayed
//! argument u-1 maps segment i exactly onto segment i-3 and the solved
//! form turns into polynomial algebra on aligned segments: each segment
//! stores a generalized polynomial in the local variable z with
//! u = left + width z.
//!
//! Segments extend lazily as evaluations and integrals reach further
//! right, with a hard ceiling to keep runaway callers honest.

use crate::alphabeta::CriticalPair;
use crate::dde::sigma::{floor_int, SigmaFn};
use crate::dde::SieveContext;
use crate::gpoly::{gp_binom_ratio, gp_pow_ratio, GPoly};
use crate::interval::{Dyadic, Interval};

/// Hard ceiling on grid segments (three per unit interval).
const MAX_SEGS: usize = 640;

/// One analytic stretch of F or f: value = g(z), u = left + width z.
#[derive(Clone)]
pub struct Seg {
    pub left: Interval,
    pub width: Interval,
    pub g: GPoly,
}

impl Seg {
    /// Evaluates at u, clamping into the segment's own domain; sound for
    /// arguments that genuinely meet the segment.
    pub fn eval_at(&self, u: &Interval, prec: u32) -> Interval {
        let z = u.sub(&self.left, prec).div(&self.width, prec);
        let z = z
            .intersect(&Interval::new(Dyadic::zero(), Dyadic::one()))
            .expect("argument outside the segment");
        self.g.eval(&z, prec)
    }
}

/// Lazily grown segment tables for the pair (F, f) of one dimension.
pub struct FF {
    kappa: u32,
    prec: u32,
    cap: usize,
    alpha: Interval,
    /// Unit offsets of the grid: 0, then the fractional parts of alpha
    /// and beta in sorted order.
    offs: [Interval; 3],
    /// Grid index 0 sits at this integer.
    base: i64,
    /// Segment index whose left endpoint is exactly alpha / beta.
    i_alpha: usize,
    i_beta: usize,
    big_f: Vec<Seg>,
    little_f: Vec<Seg>,
}

/// Floor of a tight interval, or None when it straddles an integer.
fn certain_floor(x: &Interval) -> Option<i64> {
    let lo = floor_int(x.lo());
    if lo == floor_int(x.hi()) {
        Some(lo)
    } else {
        None
    }
}

impl FF {
    pub fn new(ctx: &SieveContext, pair: &CriticalPair) -> crate::Result<FF> {
        if ctx.kappa < 2 {
            return Err(crate::Error::Domain(
                "the sifting pair is only iterated for dimension at least 2".into(),
            ));
        }
        let prec = ctx.prec;
        let ambiguous =
            || crate::Error::AmbiguousBoundary("sifting limits sit on a grid collision".into());
        let fl_a = certain_floor(&pair.alpha).ok_or_else(ambiguous)?;
        let fl_b = certain_floor(&pair.beta).ok_or_else(ambiguous)?;
        let frac_a = pair
            .alpha
            .sub(&Interval::from_i64(fl_a), prec)
            .intersect(&Interval::new(Dyadic::zero(), Dyadic::one()))
            .ok_or_else(ambiguous)?;
        let frac_b = pair
            .beta
            .sub(&Interval::from_i64(fl_b), prec)
            .intersect(&Interval::new(Dyadic::zero(), Dyadic::one()))
            .ok_or_else(ambiguous)?;
        let zero = Interval::zero();
        for frac in [&frac_a, &frac_b] {
            if !zero.certainly_lt(frac) || !frac.certainly_lt(&Interval::one()) {
                return Err(ambiguous());
            }
        }
        let (offs, pos_a, pos_b) = if frac_a.certainly_lt(&frac_b) {
            ([zero, frac_a, frac_b], 1, 2)
        } else if frac_b.certainly_lt(&frac_a) {
            ([zero, frac_b, frac_a], 2, 1)
        } else {
            return Err(ambiguous());
        };
        let base = 3i64;
        let i_alpha = (3 * (fl_a - base)) as usize + pos_a;
        let i_beta = (3 * (fl_b - base)) as usize + pos_b;
        assert!(i_beta >= 3 && i_beta < i_alpha, "limits out of order");
        Ok(FF {
            kappa: ctx.kappa,
            prec,
            cap: ctx.cap,
            alpha: pair.alpha.clone(),
            offs,
            base,
            i_alpha,
            i_beta,
            big_f: Vec::new(),
            little_f: Vec::new(),
        })
    }

    /// Grid point i (three per unit from `base` upward).
    pub fn grid(&self, i: usize) -> Interval {
        let unit = Interval::from_i64(self.base + (i / 3) as i64);
        unit.add(&self.offs[i % 3], self.prec)
    }

    fn width(&self, i: usize) -> Interval {
        match i % 3 {
            2 => Interval::one().sub(&self.offs[2], self.prec),
            k => self.offs[k + 1].sub(&self.offs[k], self.prec),
        }
    }

    pub fn index_alpha(&self) -> usize {
        self.i_alpha
    }

    pub fn index_beta(&self) -> usize {
        self.i_beta
    }

    /// One solved-form step: the segment at (left, width) driven by the
    /// partner's aligned segment one unit down, starting from value c.
    fn dde_step(&self, c: &Interval, left: &Interval, width: &Interval, src: &GPoly) -> GPoly {
        let prec = self.prec;
        let r = width.div(left, prec);
        let pre = gp_binom_ratio(self.kappa as u64, &r, self.cap, prec);
        let ker = gp_pow_ratio(self.kappa as u64 - 1, &r, self.cap, prec);
        let factor = r.mul_dyadic(&Dyadic::from_i64(self.kappa as i64), prec);
        let mut inner = ker.mul(src, prec).integrate(prec).scale(&factor, prec);
        inner.add_to_coeff(0, c, prec);
        pre.mul(&inner, prec)
    }

    /// Extends both tables through segment index i.
    fn ensure(&mut self, i: usize, sf: &mut SigmaFn) -> crate::Result<()> {
        if i >= MAX_SEGS {
            return Err(crate::Error::Budget(
                "sifting function grid exhausted".into(),
            ));
        }
        while self.big_f.len() <= i {
            let j = self.big_f.len();
            let left = self.grid(j);
            let width = self.width(j);
            let g = if j < self.i_alpha {
                // Still on F = 1/sigma: re-anchor the matching piece.
                let m = (self.base + (j / 3) as i64) as usize;
                sf.inv_piece(m)?
                    .shift_anchor(&self.offs[j % 3], self.prec)
                    .scale_arg(&width, self.prec)
            } else {
                let c = if j == self.i_alpha {
                    sf.eval_inv(&self.alpha, self.prec)?
                } else {
                    self.big_f[j - 1].g.eval(&Interval::one(), self.prec)
                };
                self.dde_step(&c, &left, &width, &self.little_f[j - 3].g)
            };
            self.big_f.push(Seg {
                left: left.clone(),
                width: width.clone(),
                g,
            });
            let g = if j < self.i_beta {
                GPoly::zero(self.cap)
            } else {
                let c = if j == self.i_beta {
                    Interval::zero()
                } else {
                    self.little_f[j - 1].g.eval(&Interval::one(), self.prec)
                };
                self.dde_step(&c, &left, &width, &self.big_f[j - 3].g)
            };
            self.little_f.push(Seg { left, width, g });
        }
        Ok(())
    }

    pub fn big_f_seg(&mut self, i: usize, sf: &mut SigmaFn) -> crate::Result<&Seg> {
        self.ensure(i, sf)?;
        Ok(&self.big_f[i])
    }

    pub fn little_f_seg(&mut self, i: usize, sf: &mut SigmaFn) -> crate::Result<&Seg> {
        self.ensure(i, sf)?;
        Ok(&self.little_f[i])
    }

    /// Indices of every segment whose domain can meet u (u >= base).
    pub fn seg_window(&self, u: &Interval) -> (usize, usize) {
        let lo_unit = floor_int(u.lo()).max(self.base);
        let hi_unit = floor_int(u.hi()).max(self.base);
        let lo = (3 * (lo_unit - self.base)) as usize;
        let hi = (3 * (hi_unit - self.base)) as usize + 3;
        (lo.saturating_sub(1), hi)
    }

    fn eval_on(&mut self, u: &Interval, big: bool, sf: &mut SigmaFn, prec: u32) -> crate::Result<Interval> {
        let (jlo, jhi) = self.seg_window(u);
        self.ensure(jhi, sf)?;
        let table = if big { &self.big_f } else { &self.little_f };
        let mut out: Option<Interval> = None;
        for seg in &table[jlo..=jhi] {
            let right = seg.left.add(&seg.width, prec);
            let dom = Interval::new(seg.left.lo().clone(), right.hi().clone());
            if let Some(part) = dom.intersect(u) {
                let v = seg.eval_at(&part, prec);
                out = Some(match out {
                    None => v,
                    Some(acc) => acc.hull(&v),
                });
            }
        }
        out.ok_or_else(|| crate::Error::Compute("argument misses every segment".into()))
    }

    /// F(u) for u >= base + 1 (lower arguments go through 1/sigma
    /// directly).
    pub fn eval_big_f(&mut self, u: &Interval, sf: &mut SigmaFn, prec: u32) -> crate::Result<Interval> {
        self.eval_on(u, true, sf, prec)
    }

    /// f(u); zero below beta, via segments above.
    pub fn eval_little_f(
        &mut self,
        u: &Interval,
        sf: &mut SigmaFn,
        prec: u32,
    ) -> crate::Result<Interval> {
        self.eval_on(u, false, sf, prec)
    }
}
