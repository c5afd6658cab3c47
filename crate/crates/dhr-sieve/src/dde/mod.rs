//! The delay differential equations of the weighted sieve.
//!
//! For sieve dimension kappa this module builds rigorous piecewise
//! polynomial enclosures of the functions that drive everything else:
//!
//! - `sigma`: the continuous solution of
//!   `(u^-kappa sigma(u))' = -kappa u^-(kappa+1) sigma(u-2)` with
//!   `sigma(u) = u^kappa / A` near 0, `A = kappa! (2 e^gamma)^kappa`;
//! - `q`: the unique monic degree 2kappa-1 polynomial with
//!   `(u q(u))' = kappa (q(u) + q(u+1))`, whose greatest root is rho;
//! - `p(u) = integral_0^infty exp(-kappa Ein(x) - u x) dx`;
//! - the boundary functionals Pi(u), Xi(u) built from p, q, sigma;
//! - the sieve pair `F` (upper) and `f` (lower), defined by
//!   `F = 1/sigma` up to alpha, `f = 0` up to beta, and the coupled
//!   equations `(u^kappa F(u))' = kappa u^(kappa-1) f(u-1)`,
//!   `(u^kappa f(u))' = kappa u^(kappa-1) F(u-1)` beyond.
//!
//! All pieces live on a translation-invariant grid (integers, refined by
//! the fractional offset of alpha once it is known) so that the delayed
//! argument u-1 of one piece always lands inside a single piece of the
//! partner function.

pub mod ein;
pub mod ff;
pub mod pfn;
pub mod pixi;
pub mod qpoly;
pub mod sigma;

use crate::interval::{euler_gamma, exp_interval, interval_ln2, Dyadic, Interval};

/// Per-dimension working context: precision policy and shared constants.
#[derive(Clone, Debug)]
pub struct SieveContext {
    /// Sieve dimension.
    pub kappa: u32,
    /// Working precision in bits.
    pub prec: u32,
    /// Polynomial cap for piece enclosures.
    pub cap: usize,
    /// Euler's constant.
    pub gamma: Interval,
    /// ln 2.
    pub ln2: Interval,
    /// A = kappa! (2 e^gamma)^kappa, the normalization in sigma.
    pub big_a: Interval,
}

impl SieveContext {
    /// Standard context: precision grows linearly with the dimension.
    pub fn new(kappa: u32) -> crate::Result<SieveContext> {
        if kappa == 0 {
            return Err(crate::Error::Domain("kappa must be at least 1".into()));
        }
        SieveContext::with_prec(kappa, 12 * (kappa + 10))
    }

    /// Context with an explicit precision (at least 53 bits).
    pub fn with_prec(kappa: u32, prec: u32) -> crate::Result<SieveContext> {
        if kappa == 0 {
            return Err(crate::Error::Domain("kappa must be at least 1".into()));
        }
        let prec = prec.max(53);
        let gamma = euler_gamma(prec);
        let ln2 = interval_ln2(prec);
        let mut fact = Dyadic::one();
        for i in 2..=kappa as i64 {
            fact = fact.mul_exact(&Dyadic::from_i64(i));
        }
        let base = exp_interval(&gamma, prec).mul_pow2(1); // 2 e^gamma
        let big_a = base.pow_i(kappa as i64, prec).mul_dyadic(&fact, prec);
        Ok(SieveContext {
            kappa,
            prec,
            cap: prec as usize,
            gamma,
            ln2,
            big_a,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_constants() {
        let cx = SieveContext::new(2).unwrap();
        assert_eq!(cx.prec, 144);
        assert_eq!(cx.cap, 144);
        // A = 2 (2 e^gamma)^2 = 8 e^(2 gamma); e^gamma ~ 1.78107.
        let approx = cx.big_a.to_f64();
        assert!((approx - 8.0 * (2.0f64 * 0.5772156649015329).exp()).abs() < 1e-9);
        assert!(cx.big_a.width() <= Dyadic::pow2(-120));
    }

    #[test]
    fn precision_floor_applies() {
        let cx = SieveContext::with_prec(1, 10).unwrap();
        assert_eq!(cx.prec, 53);
        assert!(SieveContext::new(0).is_err());
    }
}
