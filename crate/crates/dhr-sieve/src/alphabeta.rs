//! Critical sifting limits alpha and beta.
//!
//! For dimension kappa >= 2 the pair (alpha, beta) solves the coupled
//! system
//!
//! ```text
//! Pi(a) + kappa (a-1)^(1-kappa) p(a-1) int_b^(a-1) t^(kappa-1)/sigma(t-1) dt = 2,
//! Xi(a) - kappa (a-1)^(1-kappa) q(a-1) int_b^(a-1) t^(kappa-1)/sigma(t-1) dt = 0.
//! ```
//!
//! Eliminating the common integral shows alpha is a zero of
//! `l(u) = (Pi(u) - 2) q(u-1) + Xi(u) p(u-1)`, which changes sign on
//! (rho+1, rho+2) where rho is the largest zero of q. Once alpha is
//! pinned, beta is the unique zero of the strictly decreasing map
//! `b -> kappa int_b^(alpha-1) t^(kappa-1)/sigma(t-1) dt - RHS` with
//! `RHS = (alpha-1)^(kappa-1) Xi(alpha)/q(alpha-1)`, located inside
//! (2 kappa, alpha - 1). Both roots are found by certified-sign interval
//! bisection; the returned enclosures are validated by substituting them
//! back into the system and checking that the residuals straddle zero.

use crate::dde::pfn::PFn;
use crate::dde::pixi::PiXi;
use crate::dde::qpoly::{compute_q, find_rho};
use crate::dde::sigma::SigmaFn;
use crate::dde::SieveContext;
use crate::interval::{Dyadic, Interval};
use std::cmp::Ordering;

/// Certified enclosures for the sifting limits of one dimension.
#[derive(Clone, Debug)]
pub struct CriticalPair {
    /// Largest zero of the kernel polynomial q.
    pub rho: Interval,
    /// Upper sifting limit: zero of the coupling function l.
    pub alpha: Interval,
    /// Lower sifting limit, inside (2 kappa, alpha - 1).
    pub beta: Interval,
}

/// The coupling function l(u) = (Pi(u) - 2) q(u-1) + Xi(u) p(u-1).
fn ell(
    u: &Interval,
    px: &mut PiXi,
    sf: &mut SigmaFn,
    pf: &mut PFn,
    prec: u32,
) -> crate::Result<Interval> {
    let um1 = u.sub(&Interval::one(), prec);
    let pi = px.pi_tilde(u, sf, pf, prec)?;
    let xi = px.xi_tilde(u, sf, pf, prec)?;
    Ok(pi
        .sub(&Interval::from_i64(2), prec)
        .mul(&px.q_eval(&um1, prec), prec)
        .add(&xi.mul(&pf.eval_p(&um1, prec), prec), prec))
}

/// Bisects for a sign change of `f` on dyadic brackets. Halving stops at
/// width `tol`, or earlier if a midpoint sign cannot be certified (the
/// endpoint signs stay certain, so the bracket remains a proof); the
/// result must still come in under `ceil` or the whole root is rejected.
fn bisect<F>(
    mut lo: Dyadic,
    mut hi: Dyadic,
    tol: &Dyadic,
    ceil: &Dyadic,
    mut f: F,
) -> crate::Result<Interval>
where
    F: FnMut(&Dyadic) -> crate::Result<Interval>,
{
    let sign_at = |v: &Interval, which: &str| -> crate::Result<Ordering> {
        v.sign().ok_or_else(|| {
            crate::Error::Precision(format!("ambiguous sign at the {which} of a root bracket"))
        })
    };
    let s_lo = sign_at(&f(&lo)?, "left end")?;
    let s_hi = sign_at(&f(&hi)?, "right end")?;
    if s_lo == s_hi {
        return Err(crate::Error::Compute(
            "no sign change over the root bracket".into(),
        ));
    }
    while hi.sub_round(&lo, 64, crate::interval::Round::Up) > *tol {
        let midbits = (lo.bits().max(hi.bits()) + 4) as u32;
        let mid = lo
            .add_round(&hi, midbits, crate::interval::Round::Down)
            .mul_pow2(-1);
        match f(&mid)?.sign() {
            Some(s) if s == s_lo => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }
    if hi.sub_round(&lo, 64, crate::interval::Round::Up) > *ceil {
        return Err(crate::Error::Precision(
            "root bracket stalled before reaching the required width".into(),
        ));
    }
    Ok(Interval::new(lo, hi))
}

/// Solves the boundary system for one dimension (kappa >= 2).
pub fn critical_pair(
    ctx: &SieveContext,
    sf: &mut SigmaFn,
    pf: &mut PFn,
    px: &mut PiXi,
) -> crate::Result<CriticalPair> {
    if ctx.kappa < 2 {
        return Err(crate::Error::Domain(
            "the boundary system degenerates below dimension 2".into(),
        ));
    }
    let prec = ctx.prec;
    let kappa = ctx.kappa;
    let q = compute_q(kappa);
    let rho = find_rho(&q, kappa)?;

    // Alpha: zero of l on (rho+1, rho+2), inset to keep q(u-1) bounded
    // away from its own zero.
    let inset = Dyadic::one().mul_pow2(-16);
    let lo0 = rho
        .hi()
        .add_round(&Dyadic::from_i64(1), prec, crate::interval::Round::Up)
        .add_round(&inset, prec, crate::interval::Round::Up);
    let hi0 = rho
        .lo()
        .add_round(&Dyadic::from_i64(2), prec, crate::interval::Round::Down)
        .sub_round(&inset, prec, crate::interval::Round::Down);
    let tol = Dyadic::one().mul_pow2(-((prec / 2) as i64));
    let ceil = Dyadic::one().mul_pow2(-((prec / 4) as i64));
    let alpha = bisect(lo0, hi0, &tol, &ceil, |u| {
        ell(&Interval::point(u.clone()), px, sf, pf, prec)
    })?;
    let limit = Dyadic::from_i64(15 * kappa as i64).mul_pow2(-2);
    if !(*alpha.hi() < limit) {
        return Err(crate::Error::Compute(format!(
            "alpha enclosure {} crosses the 3.75 kappa ceiling",
            alpha.to_decimal(8)
        )));
    }

    // Beta: zero of the decreasing crossover gap on (2 kappa, alpha - 1).
    let one = Interval::one();
    let am1 = alpha.sub(&one, prec);
    let rhs = px
        .xi_tilde(&alpha, sf, pf, prec)?
        .mul(&am1.pow_i(kappa as i64 - 1, prec), prec)
        .div(&px.q_eval(&am1, prec), prec);
    let b_lo = Dyadic::from_i64(2 * kappa as i64).add_round(
        &inset,
        prec,
        crate::interval::Round::Up,
    );
    let b_hi = alpha
        .lo()
        .sub_round(&Dyadic::from_i64(1), prec, crate::interval::Round::Down)
        .sub_round(&inset, prec, crate::interval::Round::Down);
    let beta = bisect(b_lo, b_hi, &tol, &ceil, |b| {
        let j = px.j_between(&Interval::point(b.clone()), &am1, sf, pf, prec)?;
        Ok(j.sub(&rhs, prec))
    })?;

    // Substitute the enclosures back into the defining system; both
    // residuals must straddle zero or the enclosures are wrong.
    let jraw = px
        .j_between(&beta, &am1, sf, pf, prec)?
        .div_dyadic(&Dyadic::from_i64(kappa as i64), prec);
    let scale = am1
        .pow_i(1 - kappa as i64, prec)
        .mul_dyadic(&Dyadic::from_i64(kappa as i64), prec)
        .mul(&jraw, prec);
    let res1 = px
        .pi_tilde(&alpha, sf, pf, prec)?
        .add(&scale.mul(&pf.eval_p(&am1, prec), prec), prec)
        .sub(&Interval::from_i64(2), prec);
    let res2 = px
        .xi_tilde(&alpha, sf, pf, prec)?
        .sub(&scale.mul(&px.q_eval(&am1, prec), prec), prec);
    for (name, res) in [("first", &res1), ("second", &res2)] {
        if !res.contains_zero() {
            return Err(crate::Error::Compute(format!(
                "{name} boundary residual {} misses zero",
                res.to_decimal(8)
            )));
        }
    }

    Ok(CriticalPair { rho, alpha, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(kappa: u32) -> (SieveContext, CriticalPair) {
        let ctx = SieveContext::new(kappa).unwrap();
        let mut sf = SigmaFn::new(&ctx);
        let mut pf = PFn::new(&ctx);
        let mut px = PiXi::new(&ctx).unwrap();
        let pair = critical_pair(&ctx, &mut sf, &mut pf, &mut px).unwrap();
        (ctx, pair)
    }

    #[test]
    fn pair_sits_in_the_stated_windows() {
        for kappa in [2u32, 3] {
            let (ctx, pair) = solve(kappa);
            let one = Interval::one();
            let lo = pair.rho.add(&one, ctx.prec);
            let hi = pair.rho.add(&Interval::from_i64(2), ctx.prec);
            assert!(lo.certainly_lt(&pair.alpha), "kappa={kappa} alpha low");
            assert!(pair.alpha.certainly_lt(&hi), "kappa={kappa} alpha high");
            let am1 = pair.alpha.sub(&one, ctx.prec);
            let floor = Interval::from_i64(2 * kappa as i64);
            assert!(floor.certainly_lt(&pair.beta), "kappa={kappa} beta low");
            assert!(pair.beta.certainly_lt(&am1), "kappa={kappa} beta high");
            let target = 2f64.powi(-((ctx.prec / 4) as i32));
            assert!(pair.alpha.width_f64() <= target, "kappa={kappa} alpha width");
            assert!(pair.beta.width_f64() <= target, "kappa={kappa} beta width");
        }
    }

    /// Standalone double-precision resolve of the dimension-2 system:
    /// sigma through its integral recursion, p through its Laplace
    /// integral, q from its closed cubic, everything on trapezoid grids
    /// with no code shared with the interval pipeline.
    mod float_oracle {
        pub const H: f64 = 1.0 / 2048.0;
        const GAMMA: f64 = 0.5772156649015329;
        const KAPPA: f64 = 2.0;

        pub struct Grids {
            sigma: Vec<f64>, // u = i H on [0, 8]
            p: Vec<f64>,     // u = 3 + i H on [3, 8]
        }

        fn q(u: f64) -> f64 {
            u * u * u - 6.0 * u * u + 9.0 * u - 8.0 / 3.0
        }

        impl Grids {
            pub fn build() -> Grids {
                let a = 2.0 * (2.0 * GAMMA.exp()).powi(2);
                let n8 = (8.0 / H) as usize;
                let mut sigma = vec![0.0f64; n8 + 1];
                for (i, s) in sigma.iter_mut().enumerate() {
                    let u = i as f64 * H;
                    if u <= 2.0 {
                        *s = u * u / a;
                    }
                }
                // Piecewise integral recursion from each anchor m:
                // sigma(m+t) = (1+t/m)^k [sigma(m) - (k/m) S(t)],
                // S(t) = int_0^t (1+s/m)^(-k-1) sigma(m-2+s) ds.
                for m in 2..8usize {
                    let base = m as f64;
                    let i0 = (base / H) as usize;
                    let mut run = 0.0f64;
                    let mut prev = sigma[i0 - (2.0 / H) as usize];
                    for j in 1..=(1.0 / H) as usize {
                        let t = j as f64 * H;
                        let g = (1.0 + t / base).powf(-KAPPA - 1.0)
                            * sigma[i0 - (2.0 / H) as usize + j];
                        run += 0.5 * H * (prev + g);
                        prev = g;
                        sigma[i0 + j] = (1.0 + t / base).powf(KAPPA)
                            * (sigma[i0] - KAPPA / base * run);
                    }
                }
                // exp(-kappa Ein(x)) on an x grid, then p as a Laplace
                // transform with geometric e^(-u x) updates.
                let hx = 1.0 / 1024.0;
                let nx = (30.0 / hx) as usize;
                let mut damp = vec![0.0f64; nx + 1];
                let mut ein = 0.0f64;
                let mut prev = 1.0f64; // (1 - e^-x)/x -> 1 at x = 0
                damp[0] = 1.0;
                for (i, d) in damp.iter_mut().enumerate().skip(1) {
                    let x = i as f64 * hx;
                    let g = (1.0 - (-x).exp()) / x;
                    ein += 0.5 * hx * (prev + g);
                    prev = g;
                    *d = (-KAPPA * ein).exp();
                }
                let np = (5.0 / H) as usize;
                let mut p = vec![0.0f64; np + 1];
                for (i, pv) in p.iter_mut().enumerate() {
                    let u = 3.0 + i as f64 * H;
                    let r = (-u * hx).exp();
                    let mut w = 1.0f64;
                    let mut acc = -0.5 * (damp[0] + damp[nx] * r.powi(nx as i32));
                    for d in damp.iter() {
                        acc += *d * w;
                        w *= r;
                    }
                    *pv = acc * hx;
                }
                Grids { sigma, p }
            }

            pub fn sig(&self, u: f64) -> f64 {
                let x = u / H;
                let i = x as usize;
                self.sigma[i] + (x - i as f64) * (self.sigma[i + 1] - self.sigma[i])
            }

            pub fn p(&self, u: f64) -> f64 {
                let x = (u - 3.0) / H;
                let i = x as usize;
                self.p[i] + (x - i as f64) * (self.p[i + 1] - self.p[i])
            }

            /// Trapezoid of f over [lo, hi] with partial end cells.
            fn integ<F: Fn(&Grids, f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
                let n = ((hi - lo) / H) as usize;
                let mut acc = 0.0;
                let mut prev = f(self, lo);
                for j in 1..=n {
                    let t = lo + j as f64 * H;
                    let g = f(self, t);
                    acc += 0.5 * H * (prev + g);
                    prev = g;
                }
                let t_last = lo + n as f64 * H;
                if hi > t_last {
                    acc += 0.5 * (hi - t_last) * (prev + f(self, hi));
                }
                acc
            }

            pub fn ell(&self, u: f64) -> f64 {
                let ti = self.integ(u - 2.0, u, |g, t| g.p(t + 1.0) / g.sig(t));
                let xi_i = self.integ(u - 2.0, u, |g, t| q(t + 1.0) / g.sig(t));
                let pi = u * self.p(u) / self.sig(u) + KAPPA * ti;
                let xi = u * q(u) / self.sig(u) - KAPPA * xi_i;
                (pi - 2.0) * q(u - 1.0) + xi * self.p(u - 1.0)
            }

            pub fn solve(&self) -> (f64, f64) {
                let (mut lo, mut hi) = (4.84f64, 5.82);
                let s0 = self.ell(lo).signum();
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    if self.ell(mid).signum() == s0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let alpha = 0.5 * (lo + hi);
                let am1 = alpha - 1.0;
                let xi_i = self.integ(alpha - 2.0, alpha, |g, t| q(t + 1.0) / g.sig(t));
                let xi = alpha * q(alpha) / self.sig(alpha) - KAPPA * xi_i;
                let rhs = am1 * xi / q(am1);
                let jgap = |b: f64| {
                    KAPPA * self.integ(b, am1, |g, t| t / g.sig(t - 1.0)) - rhs
                };
                let (mut lo, mut hi) = (4.0f64 + 1e-6, am1 - 1e-6);
                let s0 = jgap(lo).signum();
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    if jgap(mid).signum() == s0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (alpha, 0.5 * (lo + hi))
            }
        }
    }

    #[test]
    fn dimension_two_matches_a_float_resolve() {
        let (_, pair) = solve(2);
        let grids = float_oracle::Grids::build();
        let (a, b) = grids.solve();
        assert!(
            (pair.alpha.to_f64() - a).abs() < 1e-3,
            "alpha {} vs float {a}",
            pair.alpha.to_decimal(12)
        );
        assert!(
            (pair.beta.to_f64() - b).abs() < 1e-3,
            "beta {} vs float {b}",
            pair.beta.to_decimal(12)
        );
    }

    #[test]
    fn rejects_dimension_one() {
        let ctx = SieveContext::new(1).unwrap();
        let mut sf = SigmaFn::new(&ctx);
        let mut pf = PFn::new(&ctx);
        // PiXi itself refuses dimension 1, so drive critical_pair with a
        // dimension-2 evaluator and a dimension-1 context.
        let ctx2 = SieveContext::new(2).unwrap();
        let mut px = PiXi::new(&ctx2).unwrap();
        assert!(critical_pair(&ctx, &mut sf, &mut pf, &mut px).is_err());
    }
}
