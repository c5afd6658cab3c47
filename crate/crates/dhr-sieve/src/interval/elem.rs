//! Enclosures of elementary functions and the classical constants the
//! sieve analysis needs: exp, log, powers, ln 2, e, Euler's gamma, and the
//! entire function Ein(x) = integral of (1 - e^-t)/t from 0 to x.

use super::dyadic::{Dyadic, Round};
use super::interval::Interval;
use num_bigint::BigUint;
use num_traits::One;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

/// Extra working bits all routines carry internally.
const GUARD: u32 = 32;

static LN2_CACHE: Lazy<Mutex<HashMap<u32, Interval>>> = Lazy::new(|| Mutex::new(HashMap::new()));
static E_CACHE: Lazy<Mutex<HashMap<u32, Interval>>> = Lazy::new(|| Mutex::new(HashMap::new()));
static GAMMA_CACHE: Lazy<Mutex<HashMap<u32, Interval>>> = Lazy::new(|| Mutex::new(HashMap::new()));
static EIN_CACHE: Lazy<Mutex<HashMap<u32, Vec<Interval>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn big_ratio(num: &BigUint, den: &BigUint, prec: u32) -> Interval {
    let n = Dyadic::from_biguint(num.clone());
    let d = Dyadic::from_biguint(den.clone());
    Interval::new(
        n.div_round(&d, prec, Round::Down),
        n.div_round(&d, prec, Round::Up),
    )
}

/// Symmetric error interval [-2^k, 2^k].
fn theta_pm_pow2(k: i64) -> Interval {
    Interval::new(Dyadic::pow2(k).neg(), Dyadic::pow2(k))
}

/// Enclosure of ln 2 via 2 atanh(1/3) = sum of 2 / ((2k+1) 9^k 3).
pub fn interval_ln2(prec: u32) -> Interval {
    if let Some(v) = LN2_CACHE.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let wp = prec + GUARD;
    let mut sum = Interval::zero();
    let mut pow3 = BigUint::from(3u32); // 3^(2k+1)
    let mut k = 0u64;
    loop {
        let den = &pow3 * BigUint::from(2 * k + 1);
        let term = big_ratio(&BigUint::from(2u32), &den, wp);
        sum = sum.add(&term, wp);
        // Remaining terms are dominated by a geometric series of ratio 1/9,
        // so the tail past term k stays below term_k / 8.
        if den.bits() > (wp + 4) as u64 {
            sum = sum.add(&Interval::new(Dyadic::zero(), term.hi().mul_pow2(-3)), wp);
            break;
        }
        pow3 *= BigUint::from(9u32);
        k += 1;
    }
    let v = sum;
    LN2_CACHE.lock().unwrap().insert(prec, v.clone());
    v
}

/// Enclosure of e via the factorial series.
pub fn interval_e(prec: u32) -> Interval {
    if let Some(v) = E_CACHE.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let wp = prec + GUARD;
    let mut sum = Interval::from_i64(2); // n = 0, 1
    let mut fact = BigUint::one();
    let mut n = 1u64;
    loop {
        n += 1;
        fact *= BigUint::from(n);
        let term = big_ratio(&BigUint::one(), &fact, wp);
        sum = sum.add(&term, wp);
        if fact.bits() > (wp + 4) as u64 {
            // Tail < 2 / (n+1)! < 2 * current term.
            sum = sum.add(&Interval::new(Dyadic::zero(), term.hi().mul_pow2(1)), wp);
            break;
        }
    }
    E_CACHE.lock().unwrap().insert(prec, sum.clone());
    sum
}

/// Enclosure of e^x for a dyadic x via ln 2 range reduction and Taylor
/// series with a rigorous tail.
fn exp_dyadic(x: &Dyadic, prec: u32) -> Interval {
    let wp = prec + GUARD;
    if x.is_zero() {
        return Interval::one();
    }
    let ln2 = interval_ln2(wp);
    let k = (x.to_f64() / std::f64::consts::LN_2).round();
    assert!(k.abs() < 9e15, "exp argument out of supported range");
    let k = k as i64;
    let r = Interval::point(x.clone()).sub(&ln2.mul_dyadic(&Dyadic::from_i64(k), wp), wp);
    // |r| <= 0.7 by construction (<= 1.4 even with f64 slop in k).
    let mut sum = Interval::one();
    let mut term = Interval::one();
    let mut n = 1i64;
    loop {
        term = term.mul(&r, wp).div_dyadic(&Dyadic::from_i64(n), wp);
        sum = sum.add(&term, wp);
        if n >= 4 && term.mag_bound() < Dyadic::pow2(-(wp as i64)) {
            // Remaining terms decay faster than a geometric ratio 1/2.
            sum = sum.add(&theta_pm_pow2(-(wp as i64) + 1), wp);
            break;
        }
        n += 1;
    }
    sum.mul_pow2(k)
}

/// Enclosure of e^x over an interval (monotone in the endpoints).
pub fn exp_interval(x: &Interval, prec: u32) -> Interval {
    if x.is_point() {
        return exp_dyadic(x.lo(), prec);
    }
    let lo = exp_dyadic(x.lo(), prec);
    let hi = exp_dyadic(x.hi(), prec);
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Enclosure of ln x for a positive dyadic x: reduce the mantissa into
/// (2/3, 4/3], then 2 atanh((m-1)/(m+1)).
fn ln_dyadic(x: &Dyadic, prec: u32) -> Interval {
    assert!(!x.is_negative() && !x.is_zero(), "ln of nonpositive value");
    let wp = prec + GUARD;
    let mut e = x.mag() - 1;
    let mut m = x.mul_pow2(-e); // in [1, 2)
    if m.mul_exact(&Dyadic::from_i64(3)) > Dyadic::from_i64(4) {
        m = m.mul_pow2(-1);
        e += 1;
    }
    let one = Interval::one();
    let mi = Interval::point(m);
    let t = mi.sub(&one, wp).div(&mi.add(&one, wp), wp);
    let tsq = t.mul(&t, wp);
    let mut term = t.clone();
    let mut sum = t;
    let mut k = 0i64;
    loop {
        k += 1;
        term = term.mul(&tsq, wp);
        let add = term.div_dyadic(&Dyadic::from_i64(2 * k + 1), wp);
        sum = sum.add(&add, wp);
        if add.mag_bound() < Dyadic::pow2(-(wp as i64)) {
            // |t| <= 1/5, so the tail is below twice the last term.
            sum = sum.add(&theta_pm_pow2(-(wp as i64) + 1), wp);
            break;
        }
    }
    let ln_m = sum.mul_pow2(1);
    interval_ln2(wp)
        .mul_dyadic(&Dyadic::from_i64(e), wp)
        .add(&ln_m, wp)
}

/// Enclosure of ln over an interval with positive lower endpoint.
pub fn ln_interval(x: &Interval, prec: u32) -> Interval {
    if x.is_point() {
        return ln_dyadic(x.lo(), prec);
    }
    let lo = ln_dyadic(x.lo(), prec);
    let hi = ln_dyadic(x.hi(), prec);
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

/// Enclosure of x^nu = exp(nu ln x) for positive x.
pub fn pow_interval(x: &Interval, nu: &Interval, prec: u32) -> Interval {
    if nu.is_point() {
        if let Some(k) = dyadic_as_i64(nu.lo()) {
            return x.pow_i(k, prec);
        }
    }
    exp_interval(&ln_interval(x, prec).mul(nu, prec), prec)
}

fn dyadic_as_i64(d: &Dyadic) -> Option<i64> {
    if d.is_zero() {
        return Some(0);
    }
    if d.mag() > 62 {
        return None;
    }
    let f = d.to_f64();
    if f == f.trunc() && Dyadic::from_i64(f as i64) == *d {
        Some(f as i64)
    } else {
        None
    }
}

/// Ein(1) by its alternating series sum (-1)^(n-1) / (n n!).
fn ein_one(wp: u32) -> Interval {
    let mut sum = Interval::zero();
    let mut fact = BigUint::one();
    let mut n = 0u64;
    loop {
        n += 1;
        fact *= BigUint::from(n);
        let den = &fact * BigUint::from(n);
        let term = big_ratio(&BigUint::one(), &den, wp);
        if den.bits() > (wp + 4) as u64 {
            // Alternating with decreasing terms: tail within [0, term].
            let bracket = Interval::new(Dyadic::zero(), term.hi().clone());
            let signed = if n % 2 == 1 { bracket } else { bracket.neg() };
            sum = sum.add(&signed, wp);
            break;
        }
        sum = if n % 2 == 1 {
            sum.add(&term, wp)
        } else {
            sum.sub(&term, wp)
        };
    }
    sum
}

/// One unit Taylor step: Ein(m+1) from Ein(m) using the closed form of the
/// derivatives, Ein^(k)(m)/k! = (-1)^(k-1) m^-k / k * (1 - e^-m P_k(m))
/// with P_k the degree-(k-1) Taylor polynomial of e^m. Every term is
/// bounded by 1/(k k!) uniformly in m, which gives the truncation bound.
fn ein_step(ein_m: &Interval, e_neg_m: &Interval, m: u64, wp: u32) -> Interval {
    debug_assert!(m >= 1);
    let m_iv = Interval::from_i64(m as i64);
    let m_inv = m_iv.recip(wp);
    let mut sum = ein_m.clone();
    let mut minv_pow = m_inv.clone(); // m^-k
    let mut p = Interval::one(); // P_k = sum_{n<k} m^n / n!
    let mut mpow = m_iv.clone(); // m^k / k!
    let mut inv_fact = Dyadic::one(); // 1/k! upper bound tracker
    let mut k = 1i64;
    loop {
        let factor = Interval::one().sub(&e_neg_m.mul(&p, wp), wp);
        let dk = minv_pow
            .div_dyadic(&Dyadic::from_i64(k), wp)
            .mul(&factor, wp);
        sum = if k % 2 == 1 {
            sum.add(&dk, wp)
        } else {
            sum.sub(&dk, wp)
        };
        // Truncation: remaining terms sum to at most 2/((k+1) (k+1)!).
        inv_fact = inv_fact.div_round(&Dyadic::from_i64(k + 1), wp, Round::Up);
        let tail = inv_fact
            .div_round(&Dyadic::from_i64(k + 1), wp, Round::Up)
            .mul_pow2(1);
        if tail < Dyadic::pow2(-(wp as i64)) {
            sum = sum.add(&Interval::new(tail.neg(), tail), wp);
            break;
        }
        p = p.add(&mpow, wp);
        mpow = mpow.mul(&m_iv, wp).div_dyadic(&Dyadic::from_i64(k + 1), wp);
        minv_pow = minv_pow.mul(&m_inv, wp);
        k += 1;
    }
    sum
}

/// Enclosures of Ein(0), Ein(1), ..., Ein(mmax), extending a per-precision
/// cache as needed.
pub fn ein_chain(mmax: u64, prec: u32) -> Vec<Interval> {
    let wp = prec + GUARD;
    let mut cache = EIN_CACHE.lock().unwrap();
    let chain = cache.entry(prec).or_default();
    if chain.is_empty() {
        chain.push(Interval::zero());
        chain.push(ein_one(wp));
    }
    if (chain.len() as u64) <= mmax {
        let e_inv = interval_e(wp).recip(wp);
        let mut e_neg_m = e_inv.pow_i(chain.len() as i64 - 1, wp);
        while (chain.len() as u64) <= mmax {
            let m = chain.len() as u64 - 1;
            let next = ein_step(&chain[m as usize], &e_neg_m, m, wp);
            chain.push(next);
            e_neg_m = e_neg_m.mul(&e_inv, wp);
        }
    }
    chain[..=mmax as usize].to_vec()
}

/// Enclosure of Ein at a nonnegative integer.
pub fn ein_integer(m: u64, prec: u32) -> Interval {
    ein_chain(m, prec).pop().unwrap()
}

/// Enclosure of Euler's constant from gamma = Ein(M) - ln M - E1(M) with
/// 0 < E1(M) < e^-M / M.
pub fn euler_gamma(prec: u32) -> Interval {
    if let Some(v) = GAMMA_CACHE.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let wp = prec + GUARD;
    let m = ((wp as f64 + 8.0) * std::f64::consts::LN_2).ceil() as u64;
    let ein_m = ein_integer(m, prec);
    let ln_m = ln_dyadic(&Dyadic::from_i64(m as i64), wp);
    // e^-M < 2^-(wp+8), so E1(M) sits inside [0, 2^-(wp+8)].
    let e1 = Interval::new(Dyadic::zero(), Dyadic::pow2(-(wp as i64) - 8));
    let v = ein_m.sub(&ln_m, wp).sub(&e1, wp);
    GAMMA_CACHE.lock().unwrap().insert(prec, v.clone());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 192;

    /// Fifty decimal digits as an interval with one-digit slack.
    fn lit(s: &str) -> Interval {
        let x = Interval::from_decimal_str(s, 256).unwrap();
        let slack = Interval::from_decimal_str("1e-49", 256).unwrap().hull0();
        x.add(&slack.hull(&slack.neg()), 256)
    }

    #[test]
    fn ln2_matches_published_digits() {
        let l = lit("0.69314718055994530941723212145817656807550013436026");
        let v = interval_ln2(P);
        assert!(l.contains_interval(&v), "{v:?}");
        assert!(v.width() <= Dyadic::pow2(-(P as i64)));
    }

    #[test]
    fn e_matches_published_digits() {
        let l = lit("2.71828182845904523536028747135266249775724709369995");
        let v = interval_e(P);
        assert!(l.contains_interval(&v), "{v:?}");
        assert!(v.width() <= Dyadic::pow2(-(P as i64)));
    }

    #[test]
    fn gamma_matches_published_digits() {
        let l = lit("0.57721566490153286060651209008240243104215933593992");
        let v = euler_gamma(P);
        assert!(l.contains_interval(&v), "{v:?}");
        assert!(v.width() <= Dyadic::pow2(-(P as i64) + 24));
    }

    #[test]
    fn ein_one_matches_gamma_plus_e1_literal() {
        // Ein(1) = gamma + E1(1).
        let l = lit("0.79659959929705313428367586554252408007320662934683");
        let v = ein_integer(1, P);
        assert!(l.contains_interval(&v), "{v:?}");
    }

    #[test]
    fn ein_two_matches_interval_quadrature() {
        // Independent check of the Taylor-step chain: enclose
        // integral_0^2 (1-e^-t)/t dt by Riemann sums with interval images.
        // The integrand is decreasing, so each cell is bracketed by its
        // endpoint values.
        let prec = 64;
        let n = 1600u32;
        let h = Interval::from_ratio(2, n as i64, prec);
        let mut lo_sum = Interval::zero();
        let mut hi_sum = Interval::zero();
        let g = |t: &Interval| -> Interval {
            Interval::one()
                .sub(&exp_interval(&t.neg(), prec), prec)
                .div(t, prec)
        };
        for i in 0..n {
            let t1 = h.mul_dyadic(&Dyadic::from_i64(i as i64), prec);
            let t2 = h.mul_dyadic(&Dyadic::from_i64(i as i64 + 1), prec);
            let upper = if i == 0 { Interval::one() } else { g(&t1) };
            let lower = g(&t2);
            lo_sum = lo_sum.add(&lower.mul(&h, prec), prec);
            hi_sum = hi_sum.add(&upper.mul(&h, prec), prec);
        }
        let quad = Interval::new(lo_sum.lo().clone(), hi_sum.hi().clone());
        let v = ein_integer(2, P);
        assert!(
            quad.contains_interval(&v),
            "chain {v:?} outside quadrature {quad:?}"
        );
        assert!(quad.width_f64() < 2e-3);
    }

    #[test]
    fn ein_asymptotics_tie_chain_ln_gamma_together() {
        // Ein(m) - ln m - gamma = E1(m) must land in (0, e^-m/m).
        let m = 50u64;
        let diff = ein_integer(m, P)
            .sub(&ln_interval(&Interval::from_i64(m as i64), P), P)
            .sub(&euler_gamma(P), P);
        let bound = Interval::new(
            Dyadic::zero(),
            // e^-50/50 < 2^-77
            Dyadic::pow2(-77),
        );
        assert!(
            bound.contains_interval(&diff),
            "E1(50) enclosure {diff:?} escaped {bound:?}"
        );
    }

    #[test]
    fn exp_basics() {
        let e1 = exp_interval(&Interval::one(), P);
        assert!(e1.intersect(&interval_e(P + 32)).is_some());
        assert!(e1.width() <= Dyadic::pow2(-(P as i64) + 8));
        let e0 = exp_interval(&Interval::zero(), P);
        assert!(e0.contains(&Dyadic::one()));
        // exp(ln2 * k) contains 2^k.
        let ln2 = interval_ln2(P);
        for k in [-3i64, 1, 10] {
            let v = exp_interval(&ln2.mul_dyadic(&Dyadic::from_i64(k), P), P);
            assert!(v.contains(&Dyadic::pow2(k)), "k={k} v={v:?}");
        }
    }

    #[test]
    fn exp_agrees_with_f64_at_scattered_points() {
        for x in [-30.0f64, -7.25, -0.5, 0.125, 3.0, 22.625, 80.0] {
            let d = Dyadic::from_i64_exp((x * 8.0) as i64, -3); // exact eighths
            let v = exp_dyadic(&d, 96);
            let approx = d.to_f64().exp();
            let mid = v.to_f64();
            assert!(
                ((mid - approx) / approx).abs() < 1e-12,
                "x={x} mid={mid} f64={approx}"
            );
        }
    }

    #[test]
    fn ln_inverts_exp() {
        for x in [-10.25f64, -1.0, 0.5, 3.0, 77.125] {
            let d = Dyadic::from_i64_exp((x * 8.0) as i64, -3);
            let y = exp_dyadic(&d, P);
            let back = ln_interval(&y, P);
            assert!(back.contains(&d), "x={x} back={back:?}");
            assert!(back.width() <= Dyadic::pow2(-(P as i64) + 16));
        }
    }

    #[test]
    fn ln_of_two_matches_constant() {
        let v = ln_interval(&Interval::from_i64(2), P);
        assert!(v.intersect(&interval_ln2(P)).is_some());
        assert!(v.width() <= Dyadic::pow2(-(P as i64) + 8));
    }

    #[test]
    fn pow_handles_integer_and_real_exponents() {
        let four = Interval::from_i64(4);
        let half = Interval::point(Dyadic::from_i64_exp(1, -1));
        let v = pow_interval(&four, &half, P);
        assert!(v.contains(&Dyadic::from_i64(2)));
        assert!(v.width() <= Dyadic::pow2(-(P as i64) + 16));
        let cube = pow_interval(&Interval::from_i64(3), &Interval::from_i64(3), P);
        assert_eq!(cube, Interval::from_i64(27));
        let inv = pow_interval(&Interval::from_i64(2), &Interval::from_i64(-2), P);
        assert!(inv.contains_interval(&Interval::from_ratio(1, 4, P)));
    }
}
