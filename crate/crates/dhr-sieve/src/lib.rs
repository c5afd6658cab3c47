//! Validated numerics for the Diamond-Halberstam-Richert weighted sieve
//! applied to polynomials, plus exact congruence machinery for the
//! polynomial systems the sieve bounds.
//!
//! The library computes, for a polynomial of degree `h` splitting into
//! `kappa` irreducible factors, the least `r` such that the weighted sieve
//! proves infinitely many square-free values with at most `r` prime
//! factors. Everything on the analytic side runs in arbitrary-precision
//! interval arithmetic with outward rounding, so every reported digit and
//! every floor `r = floor(R)` is certified, not just estimated.
//!
//! Module map:
//! - [`interval`]: dyadic floats, intervals, elementary enclosures.
//! - [`gpoly`]: degree-capped polynomial enclosures of analytic functions.
//! - [`dde`]: the sieve's delay differential equations (sigma, F, f, p, q,
//!   and the boundary functionals built from them).
//! - [`alphabeta`]: the sieving-limit pair (alpha, beta).
//! - [`optimize`]: the main-term functional R(v, w) and its minimization.
//! - [`polyverify`]: exact root counting, discriminants, admissibility.
//! - [`pipeline`]: one-call orchestration per sieve dimension.

pub mod alphabeta;
pub mod dde;
pub mod error;
pub mod gpoly;
pub mod interval;
pub mod optimize;
pub mod par;
pub mod pipeline;
pub mod polyverify;

pub use error::{Error, Result};
