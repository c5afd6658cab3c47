//! The kernel transform p(u) = integral_0^infty exp(-kappa Ein(x) - u x) dx.
//!
//! Pieces of p on [m0, m0+1] come from cutting the x-axis at integers:
//! on each cell x = m + z the factor e^(-kappa Ein(m+z)) is a generalized
//! polynomial (the exponential of the Ein expansion), e^(-m0 z) correlates
//! against it through exponential moments, and the two u-dependent
//! factors e^(-u m) and e^(-u z) are expanded with Lagrange remainders:
//!
//! ```text
//! p(m0 + u) = sum_m e^(-m m0) sum_r b_r [sum_n a_(m,n) I_(n+r)(m0)] u^r e^(-m u)
//!             + tail,   b_r = (-1)^r / r!,
//! ```
//!
//! where e^(-m u) = sum_(j < N-r) (-m)^j u^j / j!
//! + Theta([0,1]) (-m)^(N-r) u^(N-r) / (N-r)! pushes every overflow into
//! the slot at u^N, and the x > M tail lands in the constant coefficient
//! through 0 <= integral_M^infty <= e^(-kappa Ein(M) - M m0) / m0. The
//! cutoff M = ceil(prec ln 2 / m0) makes that bound smaller than 2^-prec.

use crate::dde::ein::ein_expansion;
use crate::dde::SieveContext;
use crate::gpoly::GPoly;
use crate::interval::{ein_integer, exp_interval, exp_moment_table, Dyadic, Interval};

/// Piecewise model of p on unit intervals [m0, m0+1], m0 >= 1, with the
/// x-cell expansions e^(-kappa Ein(m+z)) cached across pieces.
pub struct PFn {
    kappa: u32,
    prec: u32,
    cap: usize,
    cells: Vec<Option<GPoly>>,
    pieces: Vec<Option<GPoly>>,
}

impl PFn {
    pub fn new(ctx: &SieveContext) -> PFn {
        PFn {
            kappa: ctx.kappa,
            prec: ctx.prec,
            cap: ctx.cap,
            cells: Vec::new(),
            pieces: Vec::new(),
        }
    }

    /// p on [m0, m0+1] in the local variable u = arg - m0.
    pub fn piece(&mut self, m0: usize) -> &GPoly {
        assert!(m0 >= 1, "p pieces start at 1");
        while self.pieces.len() <= m0 {
            self.pieces.push(None);
        }
        if self.pieces[m0].is_none() {
            let g = self.build_piece(m0);
            self.pieces[m0] = Some(g);
        }
        self.pieces[m0].as_ref().unwrap()
    }

    /// p at u >= 1, hulling across straddled grid points.
    pub fn eval_p(&mut self, u: &Interval, prec: u32) -> Interval {
        let mlo = super::sigma::floor_int(u.lo());
        let mhi = super::sigma::floor_int(u.hi());
        assert!(mlo >= 1, "p evaluated below 1");
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
            let v = self.piece(m as usize).eval(&local, prec);
            out = Some(match out {
                None => v,
                Some(o) => o.hull(&v),
            });
        }
        out.expect("nonempty piece range")
    }

    /// e^(-kappa Ein(m+z)) on z in [0, 1].
    fn cell(&mut self, m: usize) -> &GPoly {
        while self.cells.len() <= m {
            let at = self.cells.len() as u64;
            let e = ein_expansion(at, self.cap, self.prec)
                .scale(&Interval::from_i64(-(self.kappa as i64)), self.prec);
            self.cells.push(Some(e.exp(self.prec)));
        }
        self.cells[m].as_ref().unwrap()
    }

    fn build_piece(&mut self, m0: usize) -> GPoly {
        let prec = self.prec;
        let wp = prec + 32;
        let cap = self.cap;
        let u0 = Dyadic::from_i64(m0 as i64);
        let big_m = (prec as f64 * std::f64::consts::LN_2 / m0 as f64).ceil() as usize;
        let moments = exp_moment_table(2 * cap, &u0, wp);
        let mut out = GPoly::zero(cap);
        let emu0 = exp_interval(&Interval::point(u0.neg()), wp);
        let mut emu0_pow = Interval::one();
        for m in 0..big_m {
            let cell = self.cell(m).clone();
            // c_r = e^(-m m0) sum_n a_(m,n) I_(n+r); the slot index uses
            // its zero-hull since gamma(z) z^cap sits inside it on [0,1].
            let md = Dyadic::from_i64(m as i64);
            let mut b_r = Interval::one();
            for r in 0..=cap {
                let mut c_r = Interval::zero();
                for n in 0..=cap {
                    let a = if n == cap {
                        cell.coeff(n).hull0()
                    } else {
                        cell.coeff(n).clone()
                    };
                    if a.lo().is_zero() && a.hi().is_zero() {
                        continue;
                    }
                    c_r = c_r.add(&a.mul(&moments[n + r], wp), wp);
                }
                c_r = c_r.mul(&emu0_pow, wp).mul(&b_r, wp);
                if r == cap {
                    // b_cap and e^(-m u) both live in [0, 1] scaled slots.
                    out.add_to_coeff(cap, &c_r.hull0(), wp);
                } else {
                    // Expand e^(-m u): powers j < cap - r exactly, the
                    // Lagrange remainder Theta([0,1]) (-m)^(cap-r)/(cap-r)!
                    // at u^cap.
                    let mut t = Interval::one();
                    for j in 0..cap - r {
                        if m == 0 && j > 0 {
                            break;
                        }
                        out.add_to_coeff(r + j, &c_r.mul(&t, wp), wp);
                        t = t
                            .mul_dyadic(&md, wp)
                            .div_dyadic(&Dyadic::from_i64(-(j as i64) - 1), wp);
                    }
                    if m > 0 {
                        out.add_to_coeff(cap, &c_r.mul(&t, wp).hull0(), wp);
                    }
                }
                b_r = b_r.div_dyadic(&Dyadic::from_i64(-(r as i64) - 1), wp);
            }
            emu0_pow = emu0_pow.mul(&emu0, wp);
        }
        // Tail of the x-integral past M, nonnegative and at most
        // e^(-kappa Ein(M) - M m0)/m0 uniformly in u.
        let log_tail = ein_integer(big_m as u64, wp)
            .mul_dyadic(&Dyadic::from_i64(self.kappa as i64), wp)
            .add(
                &Interval::point(u0.mul_exact(&Dyadic::from_i64(big_m as i64))),
                wp,
            )
            .neg();
        let bound = exp_interval(&log_tail, wp).div_dyadic(&u0, wp);
        out.add_to_coeff(0, &Interval::new(Dyadic::zero(), bound.hi().clone()), wp);
        out
    }
}
