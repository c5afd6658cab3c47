//! Evaluation and minimisation of the weighted-sieve cost R(v, w).
//!
//! For a fixed dimension the cost of sifting a degree-h polynomial down to
//! almost-primes is
//!
//! ```text
//! R(v, w) = hv/(v-w) + (kappa/f(v)) \int_w^{v-1} F(u) (1/(v-u) - 1/(v-w)) du,
//! ```
//!
//! minimised over v > w + 1.  At the stationary w(v) the cost collapses to
//! `(kappa/f(v)) \int F(u)/(v-u) du`, and every floor `\lfloor R \rfloor` at
//! any admissible point is a valid almost-prime count, so optimisation
//! accuracy affects only sharpness, never soundness.
//!
//! Both integrals are assembled piecewise: by the closed form
//! `F = A u^{-kappa}` below 2, by the half-unit reciprocal pieces on [2, 3],
//! and by the lazily grown segment table above 3.  The 1/(v-u) factor is
//! expanded geometrically about each piece's left end; the expansion ratio
//! never exceeds 1/2 because every piece ends at least one unit below v.

use crate::alphabeta::{critical_pair, CriticalPair};
use crate::dde::ff::FF;
use crate::dde::pfn::PFn;
use crate::dde::pixi::PiXi;
use crate::dde::sigma::{floor_int, SigmaFn};
use crate::dde::SieveContext;
use crate::gpoly::GPoly;
use crate::interval::{ln_interval, Dyadic, Interval};

/// Default search bound for v; validated for dimensions up to 50.
const VMAX_DEFAULT: f64 = 200.0;
/// Keep walk endpoints at least this far from interior grid offsets.
const NUDGE_TOL: f64 = 1.0 / 65_536.0;
const NUDGE_STEP: f64 = 1.0 / 32_768.0;

/// A located sieve optimum for one (kappa, h) cell.
#[derive(Clone, Debug)]
pub struct OptimResult {
    pub kappa: u32,
    pub h: u32,
    pub v_opt: Interval,
    pub w_opt: Interval,
    pub r_min: Interval,
    /// Certified floor of `r_min`: sifting to r almost-prime factors works.
    pub r: u32,
}

/// One integration piece with its lazily extended moment table.
struct PieceCache {
    left: Interval,
    width: Interval,
    g: GPoly,
    /// Antiderivative of g with value 0 at z = 0.
    anti: GPoly,
    /// width * \int_0^1 g(z) dz.
    full: Interval,
    /// mu[n] = \int_0^1 z^n g(z) dz.
    mu: Vec<Interval>,
}

impl PieceCache {
    fn new(left: Interval, width: Interval, g: GPoly, prec: u32) -> PieceCache {
        let anti = g.integrate(prec);
        let full = anti.eval(&Interval::one(), prec).mul(&width, prec);
        PieceCache {
            left,
            width,
            g,
            anti,
            full,
            mu: Vec::new(),
        }
    }

    /// Extends the moment table through index n.  The top coefficient is a
    /// slot value, but the mean-value argument gives the same arithmetic:
    /// the weight z^{n+m} is nonnegative with mass 1/(n+m+1).
    fn mu_upto(&mut self, n: usize, prec: u32) {
        while self.mu.len() <= n {
            let k = self.mu.len();
            let mut acc = Interval::zero();
            for (m, c) in self.g.coeffs().iter().enumerate() {
                if c.lo().is_zero() && c.hi().is_zero() {
                    continue;
                }
                let den = Interval::from_i64((k + m + 1) as i64);
                acc = acc.add(&c.div(&den, prec), prec);
            }
            self.mu.push(acc);
        }
    }
}

/// Piecewise evaluator for the two sieve integrals of one dimension.
pub struct RSolver {
    kappa: u32,
    prec: u32,
    cap: usize,
    big_a: Interval,
    beta: Interval,
    alpha_f: f64,
    beta_f: f64,
    off1_f: f64,
    off2_f: f64,
    vmax: f64,
    /// The [2, 2.5] and [2.5, 3] reciprocal pieces.
    halves: Vec<PieceCache>,
    /// F segments aligned with the segment table above 3.
    segs: Vec<PieceCache>,
    /// prefix[i] = \int F over the first i segments.
    prefix: Vec<Interval>,
}

/// Exact dyadic from a float on the 2^-40 grid; ample for probe points.
fn dyadic_q40(x: f64) -> Dyadic {
    let scaled = (x * (1u64 << 40) as f64).round();
    Dyadic::from_i64_exp(scaled as i64, -40)
}

fn is_integer(d: &Dyadic) -> bool {
    Dyadic::from_i64(floor_int(d)) == *d
}

impl RSolver {
    pub fn new(
        ctx: &SieveContext,
        pair: &CriticalPair,
        ff: &FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<RSolver> {
        if ctx.kappa < 2 {
            return Err(crate::Error::Domain(
                "the sieve cost is only optimised for dimension at least 2".into(),
            ));
        }
        let prec = ctx.prec;
        let (h0, h1) = sf.inv_halves_on_two_three()?.clone();
        let half_w = Interval::point(Dyadic::one().mul_pow2(-1));
        let halves = vec![
            PieceCache::new(Interval::from_i64(2), half_w.clone(), h0, prec),
            PieceCache::new(
                Interval::point(Dyadic::from_i64_exp(5, -1)),
                half_w,
                h1,
                prec,
            ),
        ];
        Ok(RSolver {
            kappa: ctx.kappa,
            prec,
            cap: ctx.cap,
            big_a: ctx.big_a.clone(),
            beta: pair.beta.clone(),
            alpha_f: pair.alpha.to_f64(),
            beta_f: pair.beta.to_f64(),
            off1_f: ff.grid(1).to_f64() - 3.0,
            off2_f: ff.grid(2).to_f64() - 3.0,
            vmax: VMAX_DEFAULT,
            halves,
            segs: Vec::new(),
            prefix: vec![Interval::zero()],
        })
    }

    /// Overrides the v search bound (validated only up to dimension 50).
    pub fn set_vmax(&mut self, vmax: f64) {
        self.vmax = vmax;
    }

    fn ensure_seg(&mut self, i: usize, ff: &mut FF, sf: &mut SigmaFn) -> crate::Result<()> {
        while self.segs.len() <= i {
            let k = self.segs.len();
            let seg = ff.big_f_seg(k, sf)?.clone();
            let pc = PieceCache::new(seg.left, seg.width, seg.g, self.prec);
            let total = self.prefix[k].add(&pc.full, self.prec);
            self.prefix.push(total);
            self.segs.push(pc);
        }
        Ok(())
    }

    /// Index of the segment containing x (float view of the grid).
    fn seg_index_of(&self, xf: f64) -> usize {
        let m = xf.floor() as i64;
        let fr = xf - m as f64;
        let pos = if fr < self.off1_f {
            0
        } else if fr < self.off2_f {
            1
        } else {
            2
        };
        (3 * (m - 3)) as usize + pos
    }

    /// Local coordinate of the point x inside segment k; errors unless it
    /// lies strictly inside, so callers must keep endpoints off the grid.
    fn zcoord(&self, k: usize, x: &Dyadic) -> crate::Result<Interval> {
        let pc = &self.segs[k];
        let raw = Interval::point(x.clone())
            .sub(&pc.left, self.prec)
            .div(&pc.width, self.prec);
        if Interval::zero().certainly_lt(&raw) && raw.certainly_lt(&Interval::one()) {
            Ok(raw)
        } else {
            Err(crate::Error::AmbiguousBoundary(
                "integration endpoint sits on a segment boundary".into(),
            ))
        }
    }

    /// Pushes a walk endpoint off the segment grid; exact integers are kept
    /// (they are handled exactly), interior offsets are stepped over.
    fn nudge_point(&self, xf: f64) -> f64 {
        if xf < 3.0 {
            return xf;
        }
        let m = xf.floor();
        let fr = xf - m;
        if fr < NUDGE_TOL {
            return m;
        }
        if fr > 1.0 - NUDGE_TOL {
            return m + 1.0;
        }
        for o in [self.off1_f, self.off2_f] {
            if (fr - o).abs() < NUDGE_TOL {
                return if fr >= o {
                    m + o + NUDGE_STEP
                } else {
                    m + o - NUDGE_STEP
                };
            }
        }
        xf
    }

    /// F below the first sifting limit: A u^{-kappa} up to 2, 1/sigma above.
    fn eval_f_low(&self, u: &Interval, sf: &mut SigmaFn, prec: u32) -> crate::Result<Interval> {
        let two = Dyadic::from_i64(2);
        let k = -(self.kappa as i64);
        if *u.hi() <= two {
            Ok(self.big_a.mul(&u.pow_i(k, prec), prec))
        } else if *u.lo() >= two {
            sf.eval_inv(u, prec)
        } else {
            let below = Interval::new(u.lo().clone(), two.clone());
            let above = Interval::new(two, u.hi().clone());
            let lo = self.big_a.mul(&below.pow_i(k, prec), prec);
            Ok(lo.hull(&sf.eval_inv(&above, prec)?))
        }
    }

    /// A (a^{1-kappa} - b^{1-kappa}) / (kappa - 1) for 0 < a <= b <= 2.
    fn below2_f(&self, a: &Dyadic, b: &Dyadic) -> Interval {
        let prec = self.prec;
        let e = 1 - self.kappa as i64;
        let pa = Interval::point(a.clone()).pow_i(e, prec);
        let pb = Interval::point(b.clone()).pow_i(e, prec);
        self.big_a
            .mul(&pa.sub(&pb, prec), prec)
            .div(&Interval::from_i64(self.kappa as i64 - 1), prec)
    }

    /// A \int_a^b u^{-kappa}/(v-u) du by partial fractions.
    fn below2_kernel(&self, v: &Interval, a: &Dyadic, b: &Dyadic) -> Interval {
        let prec = self.prec;
        let kappa = self.kappa as i64;
        let eval_e = |u: &Dyadic| {
            let upt = Interval::point(u.clone());
            let vmu = v.sub(&upt, prec);
            let mut e = ln_interval(&upt.div(&vmu, prec), prec).mul(&v.pow_i(-kappa, prec), prec);
            for n in 1..kappa {
                let t = v
                    .pow_i(n - kappa, prec)
                    .mul(&upt.pow_i(-n, prec), prec)
                    .div(&Interval::from_i64(n), prec);
                e = e.sub(&t, prec);
            }
            e
        };
        self.big_a.mul(&eval_e(b).sub(&eval_e(a), prec), prec)
    }

    /// Both integrals over one piece restricted to [zlo, zhi]; `full` marks
    /// the whole-piece case served from the caches.
    fn patch_piece(
        pc: &mut PieceCache,
        zlo: &Interval,
        zhi: &Interval,
        full: bool,
        v: Option<&Interval>,
        prec: u32,
        cap: usize,
    ) -> crate::Result<(Interval, Interval)> {
        let intf = if full {
            pc.full.clone()
        } else {
            pc.anti
                .eval(zhi, prec)
                .sub(&pc.anti.eval(zlo, prec), prec)
                .mul(&pc.width, prec)
        };
        let ker = match v {
            None => Interval::zero(),
            Some(v) => {
                let d = v.sub(&pc.left, prec);
                let q = pc.width.div(&d, prec);
                if !q.certainly_lt(&Interval::one()) {
                    return Err(crate::Error::Compute(
                        "kernel expansion ratio reaches 1".into(),
                    ));
                }
                if full {
                    kernel_dot(pc, &q, prec, cap)
                } else {
                    let part = kernel_poly(&q, cap, prec).mul(&pc.g, prec).integrate(prec);
                    part.eval(zhi, prec).sub(&part.eval(zlo, prec), prec)
                }
            }
        };
        Ok((intf, ker))
    }

    /// Walks [a, b] accumulating (int F du, int F/(v-u) du); the kernel
    /// part is skipped when v is None.  Endpoints above 3 must be either
    /// exact integers or safely interior to a segment.
    fn walk(
        &mut self,
        a: &Dyadic,
        b: &Dyadic,
        v: Option<&Interval>,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<(Interval, Interval)> {
        if a.is_zero() || a.is_negative() {
            return Err(crate::Error::Domain(
                "the sieve integrand blows up at 0".into(),
            ));
        }
        if *b < *a {
            return Err(crate::Error::Usage("integration bounds out of order".into()));
        }
        let prec = self.prec;
        let cap = self.cap;
        let two = Dyadic::from_i64(2);
        let three = Dyadic::from_i64(3);
        let mut intf = Interval::zero();
        let mut ker = Interval::zero();

        if *a < two {
            let b2 = if *b < two { b.clone() } else { two.clone() };
            intf = intf.add(&self.below2_f(a, &b2), prec);
            if let Some(v) = v {
                ker = ker.add(&self.below2_kernel(v, a, &b2), prec);
            }
        }

        if *b > two && *a < three {
            for i in 0..2usize {
                let hl = Dyadic::from_i64_exp(4 + i as i64, -1);
                let hr = Dyadic::from_i64_exp(5 + i as i64, -1);
                let lo = if *a > hl { a.clone() } else { hl.clone() };
                let hi = if *b < hr { b.clone() } else { hr.clone() };
                if hi <= lo {
                    continue;
                }
                // Exact local coordinates: the half grid is dyadic.
                let zl = lo.sub_exact(&hl).mul_pow2(1);
                let zh = hi.sub_exact(&hl).mul_pow2(1);
                let full = zl.is_zero() && zh == Dyadic::one();
                let (pf, pk) = Self::patch_piece(
                    &mut self.halves[i],
                    &Interval::point(zl),
                    &Interval::point(zh),
                    full,
                    v,
                    prec,
                    cap,
                )?;
                intf = intf.add(&pf, prec);
                ker = ker.add(&pk, prec);
            }
        }

        if *b > three {
            let lower_exact = *a <= three;
            let (k_lo, zlo) = if lower_exact {
                (0usize, Interval::zero())
            } else {
                let k = self.seg_index_of(a.to_f64());
                self.ensure_seg(k, ff, sf)?;
                (k, self.zcoord(k, a)?)
            };
            let (k_hi, z_hi) = if is_integer(b) {
                let m = floor_int(b);
                ((3 * (m - 3) - 1) as usize, None)
            } else {
                let k = self.seg_index_of(b.to_f64());
                self.ensure_seg(k, ff, sf)?;
                (k, Some(self.zcoord(k, b)?))
            };
            self.ensure_seg(k_hi, ff, sf)?;
            if k_hi < k_lo {
                return Err(crate::Error::Compute(
                    "integration bounds collapse inside one segment step".into(),
                ));
            }
            let zero = Interval::zero();
            let one = Interval::one();
            for k in k_lo..=k_hi {
                let zl = if k == k_lo { &zlo } else { &zero };
                let zh = match (&z_hi, k == k_hi) {
                    (Some(z), true) => z,
                    _ => &one,
                };
                let full =
                    (k != k_lo || lower_exact) && (k != k_hi || z_hi.is_none());
                if full && v.is_none() {
                    // Interior full spans of the plain integral come from
                    // the prefix sums in one subtraction.
                    continue;
                }
                let (pf, pk) =
                    Self::patch_piece(&mut self.segs[k], zl, zh, full, v, prec, cap)?;
                intf = intf.add(&pf, prec);
                ker = ker.add(&pk, prec);
            }
            if v.is_none() {
                // Add the skipped full spans via the prefix table.
                let lo_edge = if lower_exact { k_lo } else { k_lo + 1 };
                let hi_edge = if z_hi.is_none() { k_hi + 1 } else { k_hi };
                if hi_edge > lo_edge {
                    let span = self.prefix[hi_edge].sub(&self.prefix[lo_edge], prec);
                    intf = intf.add(&span, prec);
                }
            }
        }
        Ok((intf, ker))
    }

    /// \int_a^b F(u) du for exact dyadic endpoints 0 < a <= b.
    pub fn int_f(
        &mut self,
        a: &Dyadic,
        b: &Dyadic,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<Interval> {
        if a == b {
            return Ok(Interval::zero());
        }
        Ok(self.walk(a, b, None, ff, sf)?.0)
    }

    /// The stationary w(v) together with f(v); w is certified by the sign
    /// change of hvf(v) - kappa \int_w^{v-1} F across the returned interval.
    fn w_and_fv(
        &mut self,
        v: &Dyadic,
        h: u32,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<(Interval, Interval)> {
        let prec = self.prec;
        let vf = v.to_f64();
        if vf <= self.beta_f {
            return Err(crate::Error::Domain(
                "the sieve cost is defined only above the sifting limit".into(),
            ));
        }
        let vi = Interval::point(v.clone());
        let fv = ff.eval_little_f(&vi, sf, prec)?;
        if fv.sign() != Some(std::cmp::Ordering::Greater) {
            return Err(crate::Error::Precision(
                "the sifting density is not certainly positive here".into(),
            ));
        }
        let two = Dyadic::from_i64(2);
        let vm1 = v.sub_exact(&Dyadic::one());
        let hv = Interval::from_i64(h as i64).mul(&vi, prec);
        let kap = Interval::from_i64(self.kappa as i64);
        // c(v) = hvf(v) - kappa \int_2^{v-1} F du decides the branch.
        let tail = self.int_f(&two, &vm1, ff, sf)?;
        let c = hv.mul(&fv, prec).sub(&kap.mul(&tail, prec), prec);

        let w = match c.sign() {
            Some(std::cmp::Ordering::Greater) | Some(std::cmp::Ordering::Equal) => {
                self.w_closed(&c)
            }
            Some(std::cmp::Ordering::Less) => self.bisect_w(&c, &vm1, ff, sf)?,
            None => {
                let w1 = self.w_closed(&c);
                let w2 = self.bisect_w(&c, &vm1, ff, sf)?;
                w1.hull(&w2)
            }
        };
        if !w.certainly_lt(&Interval::point(vm1)) {
            return Err(crate::Error::Domain(
                "stationary point collides with the upper integration bound".into(),
            ));
        }
        Ok((w, fv))
    }

    /// Public wrapper: the stationary w alone.
    pub fn w_of_v(
        &mut self,
        v: &Dyadic,
        h: u32,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<Interval> {
        Ok(self.w_and_fv(v, h, ff, sf)?.0)
    }

    /// Solves c = A kappa (w^{1-k} - 2^{1-k})/(k-1) for w <= 2 directly.
    fn w_closed(&self, c: &Interval) -> Interval {
        let prec = self.prec;
        let kap = Interval::from_i64(self.kappa as i64);
        let km1 = Interval::from_i64(self.kappa as i64 - 1);
        let scale = self.big_a.mul(&kap, prec).div(&km1, prec);
        let two_pow = Interval::point(Dyadic::one().mul_pow2(1 - self.kappa as i64));
        let x = c.div(&scale, prec).add(&two_pow, prec);
        // True c >= 0 keeps x >= 2^{1-k}; the clamp defends the straddle case.
        let x = x.clamp_lo(two_pow.lo());
        let e = ln_interval(&x, prec).div(&km1.neg(), prec);
        crate::interval::exp_interval(&e, prec)
    }

    /// Bisects g(w) = c + kappa \int_2^w F on (2, beta - 1); g(2) = c < 0.
    fn bisect_w(
        &mut self,
        c: &Interval,
        vm1: &Dyadic,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<Interval> {
        let prec = self.prec;
        let two = Dyadic::from_i64(2);
        let kap = Interval::from_i64(self.kappa as i64);
        let mut sign_at = |slf: &mut Self, x: &Dyadic| -> crate::Result<Option<std::cmp::Ordering>> {
            let g = c.add(&kap.mul(&slf.int_f(&two, x, ff, sf)?, prec), prec);
            Ok(g.sign())
        };
        let mut lo = two.clone();
        let hi_f = self.nudge_point(self.beta_f - 1.0 - 1e-6);
        let mut hi = dyadic_q40(hi_f.min(vm1.to_f64() - 1e-4));
        match sign_at(self, &hi)? {
            Some(std::cmp::Ordering::Greater) => {}
            _ => {
                return Err(crate::Error::Precision(
                    "no certified sign change for the stationary point".into(),
                ))
            }
        }
        let tol = Dyadic::one().mul_pow2(-45);
        for _ in 0..200 {
            if hi.sub_exact(&lo) <= tol {
                break;
            }
            let mid_f = self.nudge_point((lo.to_f64() + hi.to_f64()) / 2.0);
            let mid = dyadic_q40(mid_f);
            if mid <= lo || mid >= hi {
                break;
            }
            match sign_at(self, &mid)? {
                Some(std::cmp::Ordering::Greater) => hi = mid,
                Some(std::cmp::Ordering::Less) => lo = mid,
                _ => break,
            }
        }
        Ok(Interval::new(lo, hi))
    }

    /// R at the stationary point of v: (kappa/f(v)) \int_w^{v-1} F/(v-u) du.
    fn r_stationary(
        &mut self,
        v: &Dyadic,
        w: &Interval,
        fv: &Interval,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<Interval> {
        let prec = self.prec;
        let vi = Interval::point(v.clone());
        let vm1 = v.sub_exact(&Dyadic::one());
        let whi = w.hi().clone();
        let (_, ker) = self.walk(&whi, &vm1, Some(&vi), ff, sf)?;
        // The lower endpoint is only enclosed; pad by the worst sliver.
        let delta = w.hi().sub_exact(w.lo());
        let ker = if delta.is_zero() {
            ker
        } else {
            let fw = self.eval_f_low(w, sf, prec)?;
            let dist = vi.sub(w, prec).recip(prec);
            let pad = fw.mul(&dist, prec).mag_bound().mul_exact(&delta);
            ker.add(&Interval::new(Dyadic::zero(), pad), prec)
        };
        Ok(Interval::from_i64(self.kappa as i64)
            .mul(&ker, prec)
            .div(fv, prec))
    }

    /// The single-variable cost R(v) = R(v, w(v)).
    pub fn r_of_v(
        &mut self,
        v: &Dyadic,
        h: u32,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<Interval> {
        let (w, fv) = self.w_and_fv(v, h, ff, sf)?;
        self.r_stationary(v, &w, &fv, ff, sf)
    }

    /// Direct two-argument evaluation of R(v, w); sound at any w < v - 1.
    pub fn r_direct(
        &mut self,
        v: &Dyadic,
        w: &Dyadic,
        h: u32,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<Interval> {
        let prec = self.prec;
        let vm1 = v.sub_exact(&Dyadic::one());
        if !(*w < vm1) {
            return Err(crate::Error::Domain("the cost needs v > w + 1".into()));
        }
        let vi = Interval::point(v.clone());
        let fv = ff.eval_little_f(&vi, sf, prec)?;
        if fv.sign() != Some(std::cmp::Ordering::Greater) {
            return Err(crate::Error::Precision(
                "the sifting density is not certainly positive here".into(),
            ));
        }
        let (i2, i1) = self.walk(w, &vm1, Some(&vi), ff, sf)?;
        let vmw = vi.sub(&Interval::point(w.clone()), prec);
        let head = Interval::from_i64(h as i64).mul(&vi, prec).div(&vmw, prec);
        let tail = i1.sub(&i2.div(&vmw, prec), prec);
        Ok(head.add(
            &Interval::from_i64(self.kappa as i64)
                .div(&fv, prec)
                .mul(&tail, prec),
            prec,
        ))
    }

    fn probe(
        &mut self,
        vf: f64,
        h: u32,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<Probe> {
        let vf = self.nudge_point(vf - 1.0) + 1.0;
        let vd = dyadic_q40(vf);
        let (w, fv) = self.w_and_fv(&vd, h, ff, sf)?;
        let r = self.r_stationary(&vd, &w, &fv, ff, sf)?;
        Ok(Probe {
            rf: r.to_f64(),
            vd,
            w,
            r,
        })
    }

    /// Minimises R(v) for degree h: an integer scan from ceil(alpha) + 1
    /// up to the first interior lattice minimum, then golden-section
    /// refinement on certified comparisons, stopping at the first tie.
    pub fn minimize_r(
        &mut self,
        h: u32,
        ff: &mut FF,
        sf: &mut SigmaFn,
    ) -> crate::Result<OptimResult> {
        if h < self.kappa {
            return Err(crate::Error::Usage(
                "the polynomial degree is at least the number of factors".into(),
            ));
        }
        let v0 = self.alpha_f.ceil() as i64;
        let mut probes: Vec<Probe> = Vec::new();
        for n in 0..3 {
            probes.push(self.probe((v0 + n) as f64, h, ff, sf)?);
        }
        let mut at = 1usize;
        loop {
            if probes[at].rf < probes[at - 1].rf && probes[at].rf < probes[at + 1].rf {
                break;
            }
            at += 1;
            let next = v0 + at as i64 + 1;
            if (next as f64) > self.vmax {
                return Err(crate::Error::Compute(
                    "no interior minimum below the v search bound".into(),
                ));
            }
            probes.push(self.probe(next as f64, h, ff, sf)?);
        }
        let center = (v0 + at as i64) as f64;

        const IGR: f64 = 0.618_033_988_749_894_9;
        let (mut a, mut b) = (center - 1.0, center + 1.0);
        let mut x1 = b - IGR * (b - a);
        let mut x2 = a + IGR * (b - a);
        let mut p1 = self.probe(x1, h, ff, sf)?;
        let mut p2 = self.probe(x2, h, ff, sf)?;
        for _ in 0..120 {
            if b - a < 1.0 / 8192.0 {
                break;
            }
            if p1.r.certainly_lt(&p2.r) {
                b = x2;
                x2 = x1;
                x1 = b - IGR * (b - a);
                p2 = std::mem::replace(&mut p1, self.probe(x1, h, ff, sf)?);
            } else if p2.r.certainly_lt(&p1.r) {
                a = x1;
                x1 = x2;
                x2 = a + IGR * (b - a);
                p1 = std::mem::replace(&mut p2, self.probe(x2, h, ff, sf)?);
            } else {
                // Enclosures tie: the bracket is at resolution already.
                break;
            }
        }
        probes.push(p1);
        probes.push(p2);

        let best = probes
            .into_iter()
            .min_by(|x, y| x.r.hi().cmp(y.r.hi()))
            .expect("probe list is nonempty");
        let vf = best.vd.to_f64();
        if vf <= self.alpha_f + 3.0 {
            return Err(crate::Error::Compute(
                "optimal v unexpectedly close to the sifting limit".into(),
            ));
        }
        let bm1 = self.beta.sub(&Interval::one(), self.prec);
        if !best.w.certainly_lt(&bm1) || !Interval::zero().certainly_lt(&best.w) {
            return Err(crate::Error::Compute(
                "stationary point escaped its window".into(),
            ));
        }
        let rlo = floor_int(best.r.lo());
        let rhi = floor_int(best.r.hi());
        if rlo != rhi || rlo < 1 {
            return Err(crate::Error::Precision(
                "the sieve cost enclosure straddles an integer".into(),
            ));
        }
        Ok(OptimResult {
            kappa: self.kappa,
            h,
            v_opt: Interval::point(best.vd),
            w_opt: best.w,
            r_min: best.r,
            r: rlo as u32,
        })
    }
}

struct Probe {
    rf: f64,
    vd: Dyadic,
    w: Interval,
    r: Interval,
}

/// Full-piece kernel integral by moment dot product, truncated adaptively.
fn kernel_dot(pc: &mut PieceCache, q: &Interval, prec: u32, cap: usize) -> Interval {
    let qhi_f = q.hi().to_f64();
    let thr = 2f64.powi(-((prec + 16) as i32));
    let mut acc = Interval::zero();
    let mut qp = q.clone();
    let mut n = 0usize;
    loop {
        pc.mu_upto(n, prec);
        acc = acc.add(&qp.mul(&pc.mu[n], prec), prec);
        let mu_hi = pc.mu[n].hi().to_f64().max(0.0);
        let rem_est = mu_hi * qhi_f.powi(2) * qhi_f.powi(n as i32) / (1.0 - qhi_f);
        if n + 1 > cap || rem_est < thr * acc.to_f64().abs().max(1e-3) {
            // Moments of the nonnegative integrand decrease, so the tail
            // is geometric under mu[n].
            let geo = qp
                .mul(q, prec)
                .mul(&Interval::one().sub(q, prec).recip(prec), prec);
            let pad = Interval::point(pc.mu[n].hi().clone()).mul(&geo, prec);
            let hi = if pad.hi().is_negative() {
                Dyadic::zero()
            } else {
                pad.hi().clone()
            };
            acc = acc.add(&Interval::new(Dyadic::zero(), hi), prec);
            break;
        }
        qp = qp.mul(q, prec);
        n += 1;
    }
    acc
}

/// Geometric kernel sum_n q^{n+1} z^n as a slot polynomial.
fn kernel_poly(q: &Interval, cap: usize, prec: u32) -> GPoly {
    let mut g = GPoly::zero(cap);
    let mut qp = q.clone();
    for n in 0..cap {
        g.set_coeff(n, qp.clone());
        qp = qp.mul(q, prec);
    }
    // Remaining terms: z^cap q^{cap+1} / (1 - qz) on [0, 1].
    let rest = qp.mul(&Interval::one().sub(q, prec).recip(prec), prec);
    let hi = if rest.hi().is_negative() {
        Dyadic::zero()
    } else {
        rest.hi().clone()
    };
    g.set_coeff(cap, Interval::new(Dyadic::zero(), hi));
    g
}

/// The minimal certified almost-prime count for one (kappa, h) cell,
/// built from scratch with doubling precision escalation.
pub fn admissible_r(kappa: u32, h: u32) -> crate::Result<u32> {
    if kappa == 0 {
        return Err(crate::Error::Domain("the dimension is at least 1".into()));
    }
    if h < kappa {
        return Err(crate::Error::Usage(
            "a polynomial has at least as many degrees as irreducible factors".into(),
        ));
    }
    if kappa == 1 {
        // Linear sieves are classical: r = h for h <= 2, else h + 1.
        return Ok(if h <= 2 { h } else { h + 1 });
    }
    let mut prec = (12 * (kappa + 10)).max(53);
    let mut last = crate::Error::Precision("unreached".into());
    for _ in 0..=4 {
        match solve_once(kappa, h, prec) {
            Ok(res) => return Ok(res.r),
            Err(crate::Error::Precision(e)) => {
                last = crate::Error::Precision(e);
                prec *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// One full pipeline pass at a fixed working precision.
pub fn solve_once(kappa: u32, h: u32, prec: u32) -> crate::Result<OptimResult> {
    let ctx = SieveContext::with_prec(kappa, prec)?;
    let mut sf = SigmaFn::new(&ctx);
    let mut pf = PFn::new(&ctx);
    let mut px = PiXi::new(&ctx)?;
    let pair = critical_pair(&ctx, &mut sf, &mut pf, &mut px)?;
    let mut ff = FF::new(&ctx, &pair)?;
    let mut rs = RSolver::new(&ctx, &pair, &ff, &mut sf)?;
    rs.minimize_r(h, &mut ff, &mut sf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(kappa: u32) -> (SieveContext, SigmaFn, FF, RSolver) {
        let ctx = SieveContext::new(kappa).unwrap();
        let mut sf = SigmaFn::new(&ctx);
        let mut pf = PFn::new(&ctx);
        let mut px = PiXi::new(&ctx).unwrap();
        let pair = critical_pair(&ctx, &mut sf, &mut pf, &mut px).unwrap();
        let ff = FF::new(&ctx, &pair).unwrap();
        let rs = RSolver::new(&ctx, &pair, &ff, &mut sf).unwrap();
        (ctx, sf, ff, rs)
    }

    fn dy(num: i64, exp: i64) -> Dyadic {
        Dyadic::from_i64_exp(num, exp)
    }

    #[test]
    fn closed_form_and_additive_integrals() {
        let (ctx, mut sf, mut ff, mut rs) = setup(2);
        let prec = ctx.prec;
        let one = Dyadic::one();
        assert!(rs.int_f(&one, &one, &mut ff, &mut sf).unwrap().to_f64() == 0.0);

        // int_1^2 A u^{-2} du = A/2 exactly.
        let got = rs.int_f(&one, &Dyadic::from_i64(2), &mut ff, &mut sf).unwrap();
        let want = ctx.big_a.mul_pow2(-1);
        assert!(got.intersect(&want).is_some());
        assert!(got.width_f64() < 1e-30);

        // Splitting the range can only widen the enclosure.
        let a = dy(3, -1);
        let m = dy(9, -2);
        let b = dy(9, -1);
        let whole = rs.int_f(&a, &b, &mut ff, &mut sf).unwrap();
        let left = rs.int_f(&a, &m, &mut ff, &mut sf).unwrap();
        let right = rs.int_f(&m, &b, &mut ff, &mut sf).unwrap();
        let sum = left.add(&right, prec);
        assert!(whole.intersect(&sum).is_some());
        assert!((whole.to_f64() - sum.to_f64()).abs() < 1e-25);
    }

    #[test]
    fn plain_integral_matches_quadrature() {
        let (ctx, mut sf, mut ff, mut rs) = setup(2);
        let prec = ctx.prec;
        let a = dy(3, -1);
        let b = dy(9, -1);
        let got = rs.int_f(&a, &b, &mut ff, &mut sf).unwrap();

        let cells = 600;
        let mut acc = Interval::zero();
        let lo_f = 1.5;
        let step = 3.0 / cells as f64;
        for i in 0..cells {
            let cl = dyadic_q40(lo_f + i as f64 * step);
            let cr = if i + 1 == cells {
                b.clone()
            } else {
                dyadic_q40(lo_f + (i + 1) as f64 * step)
            };
            let cell = Interval::new(cl.clone(), cr.clone());
            let fval = if cell.hi().to_f64() <= 2.0 {
                ctx.big_a.mul(&cell.pow_i(-2, prec), prec)
            } else if cell.lo().to_f64() >= 3.0 {
                ff.eval_big_f(&cell, &mut sf, prec).unwrap()
            } else {
                sf.eval_inv(&cell, prec).unwrap()
            };
            let width = Interval::point(cr.sub_exact(&cl));
            acc = acc.add(&fval.mul(&width, prec), prec);
        }
        assert!(
            got.intersect(&acc).is_some(),
            "walk {} vs quadrature {}",
            got.to_f64(),
            acc.to_f64()
        );
        assert!(got.width_f64() < 1e-12, "walk too wide: {}", got.width_f64());
    }

    #[test]
    fn kernel_below_two_matches_quadrature() {
        let (ctx, mut sf, mut ff, mut rs) = setup(2);
        let prec = ctx.prec;
        let v = Interval::from_i64(8);
        let a = dy(1, -2);
        let b = Dyadic::from_i64(2);
        let (_, got) = rs.walk(&a, &b, Some(&v), &mut ff, &mut sf).unwrap();

        let cells = 4000;
        let mut acc = Interval::zero();
        let step = 1.75 / cells as f64;
        for i in 0..cells {
            let cl = dyadic_q40(0.25 + i as f64 * step);
            let cr = if i + 1 == cells {
                b.clone()
            } else {
                dyadic_q40(0.25 + (i + 1) as f64 * step)
            };
            let cell = Interval::new(cl.clone(), cr.clone());
            let f = ctx.big_a.mul(&cell.pow_i(-2, prec), prec);
            let ker = f.mul(&v.sub(&cell, prec).recip(prec), prec);
            acc = acc.add(&ker.mul(&Interval::point(cr.sub_exact(&cl)), prec), prec);
        }
        assert!(
            got.intersect(&acc).is_some(),
            "closed form {} vs quadrature {}",
            got.to_f64(),
            acc.to_f64()
        );
        assert!(got.width_f64() < 1e-25);
    }

    #[test]
    fn kernel_walk_matches_quadrature() {
        let (ctx, mut sf, mut ff, mut rs) = setup(2);
        let prec = ctx.prec;
        let v = Interval::from_i64(8);
        let a = dy(9, -2);
        let b = Dyadic::from_i64(7);
        let (_, got) = rs.walk(&a, &b, Some(&v), &mut ff, &mut sf).unwrap();

        let cells = 1500;
        let mut acc = Interval::zero();
        let step = (7.0 - 2.25) / cells as f64;
        for i in 0..cells {
            let cl = dyadic_q40(2.25 + i as f64 * step);
            let cr = if i + 1 == cells {
                b.clone()
            } else {
                dyadic_q40(2.25 + (i + 1) as f64 * step)
            };
            let cell = Interval::new(cl.clone(), cr.clone());
            let f = if cell.hi().to_f64() <= 3.0 {
                sf.eval_inv(&cell, prec).unwrap()
            } else if cell.lo().to_f64() >= 3.0 {
                ff.eval_big_f(&cell, &mut sf, prec).unwrap()
            } else {
                sf.eval_inv(&Interval::new(cell.lo().clone(), Dyadic::from_i64(3)), prec)
                    .unwrap()
                    .hull(
                        &ff.eval_big_f(
                            &Interval::new(Dyadic::from_i64(3), cell.hi().clone()),
                            &mut sf,
                            prec,
                        )
                        .unwrap(),
                    )
            };
            let ker = f.mul(&v.sub(&cell, prec).recip(prec), prec);
            acc = acc.add(&ker.mul(&Interval::point(cr.sub_exact(&cl)), prec), prec);
        }
        assert!(
            got.intersect(&acc).is_some(),
            "walk {} vs quadrature {}",
            got.to_f64(),
            acc.to_f64()
        );
        assert!(got.width_f64() < 1e-12, "kernel walk too wide: {}", got.width_f64());

        // A non-integer upper endpoint takes the partial-segment path.
        let v2 = Interval::point(dy(129, -4));
        let b2 = dy(113, -4);
        let (_, part) = rs.walk(&a, &b2, Some(&v2), &mut ff, &mut sf).unwrap();
        assert!(part.to_f64() > got.to_f64() * 0.9);
        assert!(part.width_f64() < 1e-12);
    }

    #[test]
    fn stationary_point_balances_the_derivative() {
        let (ctx, mut sf, mut ff, mut rs) = setup(2);
        let prec = ctx.prec;
        let h = 2u32;
        let v = Dyadic::from_i64(10);
        let (w, fv) = rs.w_and_fv(&v, h, &mut ff, &mut sf).unwrap();
        assert!(w.lo().to_f64() > 0.0 && w.hi().to_f64() < rs.beta_f - 1.0);

        // The derivative numerator changes sign across the w enclosure.
        let vm1 = v.sub_exact(&Dyadic::one());
        let hvf = Interval::from_i64(h as i64)
            .mul(&Interval::point(v.clone()), prec)
            .mul(&fv, prec);
        let kap = Interval::from_i64(2);
        let g_at = |rs: &mut RSolver, sf: &mut SigmaFn, ff: &mut FF, x: &Dyadic| {
            let t = rs.int_f(x, &vm1, ff, sf).unwrap();
            hvf.sub(&kap.mul(&t, prec), prec)
        };
        let g_lo = g_at(&mut rs, &mut sf, &mut ff, w.lo());
        let g_hi = g_at(&mut rs, &mut sf, &mut ff, w.hi());
        let numerator = g_lo.hull(&g_hi);
        assert!(numerator.contains(&Dyadic::zero()), "no sign change across w");

        // Stationary value is a minimum in w, matches the direct form, and
        // the cost always exceeds the degree.
        let r_stat = rs.r_stationary(&v, &w, &fv, &mut ff, &mut sf).unwrap();
        let r_at = rs.r_direct(&v, w.hi(), h, &mut ff, &mut sf).unwrap();
        assert!(
            r_stat.lo().to_f64() <= r_at.hi().to_f64() + 1e-12
                && r_at.lo().to_f64() <= r_stat.hi().to_f64() + 1e-12,
            "direct {} vs stationary {}",
            r_at.to_f64(),
            r_stat.to_f64()
        );
        for shift in [-0.125f64, 0.125] {
            let wpt = dyadic_q40(w.hi().to_f64() + shift);
            let r_off = rs.r_direct(&v, &wpt, h, &mut ff, &mut sf).unwrap();
            assert!(
                r_stat.certainly_lt(&r_off),
                "perturbed w did not raise the cost"
            );
        }
        assert!(r_stat.lo().to_f64() > h as f64);
    }

    #[test]
    fn minimizer_reproduces_the_quadratic_cell() {
        let (_ctx, mut sf, mut ff, mut rs) = setup(2);
        let res = rs.minimize_r(2, &mut ff, &mut sf).unwrap();
        assert_eq!(res.r, 5, "R_min = {}", res.r_min.to_f64());
        assert!(res.v_opt.to_f64() > rs.alpha_f + 3.0);

        // Local minimality around the optimum.
        let h = 2;
        for shift in [-0.25f64, 0.25] {
            let vpt = dyadic_q40(rs.nudge_point(res.v_opt.to_f64() + shift - 1.0) + 1.0);
            let r_off = rs.r_of_v(&vpt, h, &mut ff, &mut sf).unwrap();
            assert!(res.r_min.lo().to_f64() < r_off.hi().to_f64());
        }
    }

    #[test]
    fn minimizer_reproduces_the_septic_cell() {
        let (_ctx, mut sf, mut ff, mut rs) = setup(3);
        let res = rs.minimize_r(7, &mut ff, &mut sf).unwrap();
        assert_eq!(res.r, 13, "R_min = {}", res.r_min.to_f64());
    }

    #[test]
    fn linear_dimension_is_classical() {
        assert_eq!(admissible_r(1, 1).unwrap(), 1);
        assert_eq!(admissible_r(1, 2).unwrap(), 2);
        assert_eq!(admissible_r(1, 3).unwrap(), 4);
        assert_eq!(admissible_r(1, 6).unwrap(), 7);
        assert!(matches!(
            admissible_r(2, 1),
            Err(crate::Error::Usage(_))
        ));
        assert!(matches!(admissible_r(0, 3), Err(crate::Error::Domain(_))));
    }
}
