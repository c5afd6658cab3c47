//! Arbitrary-precision interval arithmetic with outward rounding.
//!
//! The kernel of the whole analytic side: [`Dyadic`] exact binary floats,
//! [`Interval`] endpoint pairs whose operations round outward, and
//! enclosures of the elementary functions and integrals the sieve needs.

mod dyadic;
mod elem;
mod interval;
mod moments;

pub use dyadic::{Dyadic, Round};
pub use elem::{
    ein_chain, ein_integer, euler_gamma, exp_interval, interval_e, interval_ln2, ln_interval,
    pow_interval,
};
pub use interval::Interval;
pub use moments::{exp_moment, exp_moment_table};
