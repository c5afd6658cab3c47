//! Generalized polynomials: rigorous degree-capped function enclosures.
//!
//! A [`GPoly`] with cap N represents the class of functions on [0, 1]
//!
//! ```text
//!   g(u) = c_0 + c_1 u + ... + c_(N-1) u^(N-1) + gamma(u) u^N
//! ```
//!
//! where each coefficient below the cap is an unknown constant inside its
//! interval and the cap slot holds an unknown *function* gamma with values
//! inside its interval. The slot is where every truncation error lands:
//! whenever an operation produces content of degree N or higher, the excess
//! powers of u are absorbed as u^(N+k) = u^N * u^k with u^k in [0, 1].
//! Operations on the class therefore yield enclosures of the corresponding
//! operations on its members, uniformly on [0, 1].

use crate::interval::{exp_interval, Dyadic, Interval};

fn iv_is_zero(x: &Interval) -> bool {
    x.is_point() && x.lo().is_zero()
}

/// Degree-capped polynomial enclosure on [0, 1]; see the module docs.
#[derive(Clone, Debug)]
pub struct GPoly {
    coeffs: Vec<Interval>, // len cap + 1; last entry is the remainder slot
}

impl GPoly {
    pub fn zero(cap: usize) -> GPoly {
        assert!(cap >= 1);
        GPoly {
            coeffs: vec![Interval::zero(); cap + 1],
        }
    }

    pub fn one(cap: usize) -> GPoly {
        let mut g = GPoly::zero(cap);
        g.coeffs[0] = Interval::one();
        g
    }

    /// Wrap explicit coefficients; the last entry is the remainder slot.
    pub fn from_coeffs(coeffs: Vec<Interval>) -> GPoly {
        assert!(coeffs.len() >= 2);
        GPoly { coeffs }
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Interval {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn slot(&self) -> &Interval {
        self.coeffs.last().unwrap()
    }

    pub fn set_coeff(&mut self, n: usize, c: Interval) {
        self.coeffs[n] = c;
    }

    /// Add `c` into coefficient `n`.
    pub fn add_to_coeff(&mut self, n: usize, c: &Interval, prec: u32) {
        self.coeffs[n] = self.coeffs[n].add(c, prec);
    }

    /// Enclosure of g(u) for u inside [0, 1] (Horner).
    pub fn eval(&self, u: &Interval, prec: u32) -> Interval {
        debug_assert!(
            !u.lo().is_negative() && *u.hi() <= Dyadic::one(),
            "gpoly evaluated outside [0,1]: {u:?}"
        );
        let mut acc = self.coeffs[self.cap()].clone();
        for n in (0..self.cap()).rev() {
            acc = acc.mul(u, prec).add(&self.coeffs[n], prec);
        }
        acc
    }

    /// Enclosure of g over the whole of [0, 1].
    pub fn eval01(&self, prec: u32) -> Interval {
        self.eval(&Interval::new(Dyadic::zero(), Dyadic::one()), prec)
    }

    pub fn neg(&self) -> GPoly {
        GPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn add(&self, other: &GPoly, prec: u32) -> GPoly {
        assert_eq!(self.cap(), other.cap());
        GPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b, prec))
                .collect(),
        }
    }

    pub fn sub(&self, other: &GPoly, prec: u32) -> GPoly {
        self.add(&other.neg(), prec)
    }

    /// Multiply by a constant whose value lies in `c`.
    pub fn scale(&self, c: &Interval, prec: u32) -> GPoly {
        GPoly {
            coeffs: self.coeffs.iter().map(|x| x.mul(c, prec)).collect(),
        }
    }

    pub fn scale_dyadic(&self, d: &Dyadic, prec: u32) -> GPoly {
        GPoly {
            coeffs: self.coeffs.iter().map(|x| x.mul_dyadic(d, prec)).collect(),
        }
    }

    /// Re-anchors at offset `omega` in [0, 1): returns h with
    /// h(z) = g(omega + z), sound while omega + z stays in [0, 1] (the
    /// caller must not evaluate past z = 1 - omega). The old slot term
    /// g_cap(u) u^cap ranges inside hull0(slot) on [0, 1], so it folds
    /// into the constant coefficient; the returned slot is zero.
    pub fn shift_anchor(&self, omega: &Interval, prec: u32) -> GPoly {
        let cap = self.cap();
        let mut out = vec![Interval::zero(); cap + 1];
        for n in (0..cap).rev() {
            for k in (1..cap).rev() {
                if iv_is_zero(&out[k]) && iv_is_zero(&out[k - 1]) {
                    continue;
                }
                let t = out[k].mul(omega, prec).add(&out[k - 1], prec);
                out[k] = t;
            }
            let t = out[0].mul(omega, prec).add(&self.coeffs[n], prec);
            out[0] = t;
        }
        out[0] = out[0].add(&self.coeffs[cap].hull0(), prec);
        GPoly { coeffs: out }
    }

    /// Substitutes u -> u 2^e with e <= 0, giving h(z) = g(z 2^e). The
    /// dilated argument stays inside [0, 1], the scaling of each power is
    /// exact, and the slot factor gamma(z 2^e) still ranges in the slot
    /// hull, so the slot coefficient just picks up 2^(e cap).
    pub fn scale_arg_pow2(&self, e: i64) -> GPoly {
        assert!(e <= 0, "argument dilation must shrink the domain");
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.mul_pow2(e * n as i64))
            .collect();
        GPoly { coeffs }
    }

    /// General argument dilation h(z) = g(w z) for 0 <= w <= 1. Power n
    /// picks up w^n; the slot survives as a slot exactly as in
    /// [`GPoly::scale_arg_pow2`]. When this follows a
    /// [`GPoly::shift_anchor`] by omega, soundness needs w <= 1 - omega,
    /// which is the caller's responsibility.
    pub fn scale_arg(&self, w: &Interval, prec: u32) -> GPoly {
        assert!(
            !w.lo().is_negative() && *w.hi() <= Dyadic::one(),
            "argument dilation must map [0, 1] into itself"
        );
        let mut pw = Interval::one();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n > 0 {
                    pw = pw.mul(w, prec);
                }
                c.mul(&pw, prec)
            })
            .collect();
        GPoly { coeffs }
    }

    /// Full product. Degree overflow folds into the slot with the [0, 1]
    /// power absorption described in the module docs.
    pub fn mul(&self, other: &GPoly, prec: u32) -> GPoly {
        let cap = self.cap();
        assert_eq!(cap, other.cap());
        let mut out = vec![Interval::zero(); cap + 1];
        for i in 0..=cap {
            if iv_is_zero(&self.coeffs[i]) {
                continue;
            }
            for j in 0..=cap {
                if iv_is_zero(&other.coeffs[j]) {
                    continue;
                }
                let p = self.coeffs[i].mul(&other.coeffs[j], prec);
                let m = i + j;
                if m <= cap {
                    out[m] = out[m].add(&p, prec);
                } else {
                    out[cap] = out[cap].add(&p.hull0(), prec);
                }
            }
        }
        GPoly { coeffs: out }
    }

    /// Multiply by a sparse factor sum of `c_e u^e` terms plus an optional
    /// pure slot term `R u^cap` whose coefficient is a function ranging in
    /// `R` (used by [`GPoly::exp`]).
    pub fn mul_sparse(
        &self,
        terms: &[(usize, Interval)],
        slot_term: Option<&Interval>,
        prec: u32,
    ) -> GPoly {
        let cap = self.cap();
        let mut out = vec![Interval::zero(); cap + 1];
        for (e, c) in terms {
            if iv_is_zero(c) {
                continue;
            }
            for i in 0..=cap {
                if iv_is_zero(&self.coeffs[i]) {
                    continue;
                }
                let m = i + e;
                let p = self.coeffs[i].mul(c, prec);
                if m <= cap {
                    out[m] = out[m].add(&p, prec);
                } else {
                    out[cap] = out[cap].add(&p.hull0(), prec);
                }
            }
        }
        if let Some(r) = slot_term {
            // (sum_i c_i u^i) * R(u) u^cap: the slot picks up g(u) * R(u).
            let bound = self.eval01(prec);
            out[cap] = out[cap].add(&bound.mul(r, prec), prec);
        }
        GPoly { coeffs: out }
    }

    /// Antiderivative with value 0 at u = 0. The old slot integrates to
    /// something bounded by slot/(cap+1) through each point of [0, 1].
    pub fn integrate(&self, prec: u32) -> GPoly {
        let cap = self.cap();
        let mut out = vec![Interval::zero(); cap + 1];
        for n in 1..=cap {
            out[n] = self.coeffs[n - 1].div_dyadic(&Dyadic::from_i64(n as i64), prec);
        }
        let tail = self.coeffs[cap]
            .div_dyadic(&Dyadic::from_i64(cap as i64 + 1), prec)
            .hull0();
        out[cap] = out[cap].add(&tail, prec);
        GPoly { coeffs: out }
    }

    /// Reciprocal 1/g. `gbound` must enclose g over all of [0, 1] and stay
    /// away from zero; when absent it is derived by interval evaluation.
    pub fn recip(&self, gbound: Option<&Interval>, prec: u32) -> crate::Result<GPoly> {
        let cap = self.cap();
        let f0 = &self.coeffs[0];
        if f0.contains_zero() {
            return Err(crate::Error::Precision(
                "reciprocal: constant coefficient straddles zero".into(),
            ));
        }
        let owned;
        let gb = match gbound {
            Some(b) => b,
            None => {
                owned = self.eval01(prec);
                &owned
            }
        };
        if gb.contains_zero() {
            return Err(crate::Error::Precision(
                "reciprocal: range bound straddles zero".into(),
            ));
        }
        let k0 = f0.recip(prec);
        let mut k = vec![Interval::zero(); cap + 1];
        k[0] = k0.clone();
        for n in 1..cap {
            let mut s = Interval::zero();
            for i in 1..=n {
                if iv_is_zero(&self.coeffs[i]) {
                    continue;
                }
                s = s.add(&self.coeffs[i].mul(&k[n - i], prec), prec);
            }
            k[n] = s.neg().mul(&k0, prec);
        }
        // Slot: 0 = k_cap(u) g(u) + sum_(i+j>=cap, j<cap) f_i k_j u^(i+j-cap).
        let mut s = Interval::zero();
        for i in 1..=cap {
            if iv_is_zero(&self.coeffs[i]) {
                continue;
            }
            let j_lo = cap.saturating_sub(i);
            for j in j_lo..cap {
                let p = self.coeffs[i].mul(&k[j], prec);
                s = if i + j == cap {
                    s.add(&p, prec)
                } else {
                    s.add(&p.hull0(), prec)
                };
            }
        }
        k[cap] = s.neg().div(gb, prec);
        Ok(GPoly { coeffs: k })
    }

    /// Exponential e^g via the factorization over monomials:
    /// e^g = e^(c_0) prod_n e^(c_n u^n), each factor expanded to the cap
    /// with a rigorous tail, and the slot factor e^(gamma(u) u^cap)
    /// contributing 1 + (something in hull0(slot) e^hull0(slot)) u^cap.
    pub fn exp(&self, prec: u32) -> GPoly {
        let cap = self.cap();
        let mut result = GPoly::one(cap);
        for n in 1..=cap {
            let cn = &self.coeffs[n];
            if iv_is_zero(cn) {
                continue;
            }
            let egrow = exp_interval(&cn.hull0(), prec);
            if n == cap {
                // e^(gamma(u) u^cap) = 1 + mu(u) u^cap with
                // |mu| <= |gamma| e^|gamma|: mu in hull0(slot * e^hull0(slot)).
                let r = cn.mul(&egrow, prec).hull0();
                result = result.mul_sparse(&[(0, Interval::one())], Some(&r), prec);
                continue;
            }
            // e^(c u^n) = sum_(j < jmax) c^j u^(nj) / j! + R u^cap,
            // jmax = ceil(cap / n), R = Theta([0,1]) c^jmax/jmax! e^hull0(c).
            let jmax = cap.div_ceil(n);
            let mut terms = Vec::with_capacity(jmax);
            terms.push((0, Interval::one()));
            let mut pow = Interval::one();
            let mut fact = Dyadic::one();
            for j in 1..jmax {
                pow = pow.mul(cn, prec);
                fact = fact.mul_exact(&Dyadic::from_i64(j as i64));
                terms.push((n * j, pow.div_dyadic(&fact, prec)));
            }
            pow = pow.mul(cn, prec);
            fact = fact.mul_exact(&Dyadic::from_i64(jmax as i64));
            let r = pow.div_dyadic(&fact, prec).mul(&egrow, prec).hull0();
            result = result.mul_sparse(&terms, Some(&r), prec);
        }
        result.scale(&exp_interval(&self.coeffs[0], prec), prec)
    }
}

/// (1 + u/u0)^(-nu) for integer nu >= 1 as a GPoly in u on [0, 1]:
/// alternating binomial series with a Lagrange tail valid for all u >= 0.
pub fn gp_binom_neg(nu: u64, u0: &Dyadic, cap: usize, prec: u32) -> GPoly {
    assert!(nu >= 1 && !u0.is_negative() && !u0.is_zero());
    // The slot bound uses the alternating-series remainder, which needs
    // the term magnitudes to decrease from index cap on: u0 (cap+1) >= cap+nu.
    assert!(
        u0.mul_exact(&Dyadic::from_i64(cap as i64 + 1)) >= Dyadic::from_u64(cap as u64 + nu),
        "anchor too small for the truncation bound"
    );
    let u0_inv = Interval::point(u0.clone()).recip(prec);
    let mut coeffs = Vec::with_capacity(cap + 1);
    let mut binom = num_bigint::BigUint::from(1u32); // C(n+nu-1, n)
    let mut pw = Interval::one(); // u0^-n
    for n in 0..=cap {
        let c = pw.mul_dyadic(&Dyadic::from_biguint(binom.clone()), prec);
        let signed = if n % 2 == 0 { c } else { c.neg() };
        if n == cap {
            coeffs.push(signed.hull0());
        } else {
            coeffs.push(signed);
            binom = binom * (n as u64 + nu) / (n as u64 + 1);
            pw = pw.mul(&u0_inv, prec);
        }
    }
    GPoly::from_coeffs(coeffs)
}

/// (1 + r u)^(-nu) for an interval ratio with |r| <= 1/2. The terms
/// C(-nu, n) r^n decay at worst like q^n with q = |r| (nu+cap)/(cap+1),
/// so the tail from `cap` on is bounded by the cap-th term over 1 - q and
/// lands in a sign-symmetric slot.
pub fn gp_binom_ratio(nu: u64, r: &Interval, cap: usize, prec: u32) -> GPoly {
    let rmag = r.mag_bound();
    assert!(
        nu >= 1 && (nu as usize) <= cap && rmag <= Dyadic::one().mul_pow2(-1),
        "binomial ratio out of range"
    );
    let mut coeffs = Vec::with_capacity(cap + 1);
    let mut c = Interval::one();
    for n in 0..cap {
        coeffs.push(c.clone());
        let step = Interval::from_ratio(nu as i64 + n as i64, n as i64 + 1, prec);
        c = c.mul(&r.neg(), prec).mul(&step, prec);
    }
    let q = Interval::point(rmag).mul(
        &Interval::from_ratio(nu as i64 + cap as i64, cap as i64 + 1, prec),
        prec,
    );
    let denom = Interval::one().sub(&q, prec);
    assert!(
        denom.sign() == Some(std::cmp::Ordering::Greater),
        "tail ratio must contract"
    );
    let s = Interval::point(c.mag_bound()).div(&denom, prec).mag_bound();
    coeffs.push(Interval::new(s.neg(), s));
    GPoly::from_coeffs(coeffs)
}

/// (1 + r u)^k for integer k >= 0 and an interval ratio: finite and exact
/// up to coefficient rounding (k < cap).
pub fn gp_pow_ratio(k: u64, r: &Interval, cap: usize, prec: u32) -> GPoly {
    assert!((k as usize) < cap, "finite power must fit under the cap");
    let mut g = GPoly::zero(cap);
    let mut c = Interval::one();
    for n in 0..=k {
        g.set_coeff(n as usize, c.clone());
        if n < k {
            let step = Interval::from_ratio(k as i64 - n as i64, n as i64 + 1, prec);
            c = c.mul(r, prec).mul(&step, prec);
        }
    }
    g
}

/// (1 + u/u0)^k for integer k >= 0: a finite, exact expansion (k < cap).
pub fn gp_pow_finite(k: u64, u0: &Dyadic, cap: usize, prec: u32) -> GPoly {
    assert!((k as usize) < cap && !u0.is_negative() && !u0.is_zero());
    let u0_inv = Interval::point(u0.clone()).recip(prec);
    let mut g = GPoly::zero(cap);
    let mut binom = num_bigint::BigUint::from(1u32); // C(k, n)
    let mut pw = Interval::one();
    for n in 0..=k {
        g.set_coeff(
            n as usize,
            pw.mul_dyadic(&Dyadic::from_biguint(binom.clone()), prec),
        );
        if n < k {
            binom = binom * (k - n) / (n + 1);
            pw = pw.mul(&u0_inv, prec);
        }
    }
    g
}

/// Rewrite sum c_n (1-u)^n in powers of u by Horner multiplication with
/// (1-u). Exact polynomial identity; the output has the input's length.
pub fn rebase_one_minus_u(coeffs: &[Interval], prec: u32) -> Vec<Interval> {
    let mut out = vec![Interval::zero(); coeffs.len()];
    for c in coeffs.iter().rev() {
        for k in (1..out.len()).rev() {
            let t = out[k].sub(&out[k - 1], prec);
            out[k] = t;
        }
        out[0] = out[0].add(c, prec);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::interval_e;

    const P: u32 = 128;

    fn iv(v: i64) -> Interval {
        Interval::from_i64(v)
    }

    fn ratio(n: i64, d: i64) -> Interval {
        Interval::from_ratio(n, d, P)
    }

    /// Exact small polynomial as a GPoly with point coefficients.
    fn poly(cs: &[(i64, i64)], cap: usize) -> GPoly {
        let mut g = GPoly::zero(cap);
        for (n, &(num, den)) in cs.iter().enumerate() {
            g.set_coeff(n, Interval::from_ratio(num, den, 2 * P));
        }
        g
    }

    fn pt(num: i64, den: i64) -> Interval {
        Interval::from_ratio(num, den, 2 * P)
    }

    #[test]
    fn eval_horner_is_containing() {
        // g(u) = 2 - u + u^2/2 at u = 3/4: 2 - 3/4 + 9/32 = 49/32.
        let g = poly(&[(2, 1), (-1, 1), (1, 2)], 8);
        let v = g.eval(&pt(3, 4), P);
        assert!(v.intersect(&ratio(49, 32)).is_some());
        assert!(v.width() <= Dyadic::pow2(-100));
    }

    #[test]
    fn mul_contains_member_products() {
        let f = poly(&[(1, 1), (2, 3), (-1, 4)], 10);
        let g = poly(&[(3, 2), (0, 1), (5, 7)], 10);
        let h = f.mul(&g, P);
        for k in 0..=8 {
            let u = pt(k, 8);
            let want = f.eval(&u, 2 * P).mul(&g.eval(&u, 2 * P), 2 * P);
            let got = h.eval(&u, P);
            assert!(
                got.intersect(&want).is_some(),
                "u={k}/8 {got:?} vs {want:?}"
            );
        }
    }

    #[test]
    fn mul_folds_overflow_into_slot() {
        // cap 2: (1 + u + u^2 theta) squared; degree-3 and -4 content must
        // land in the slot as hull0.
        let mut f = GPoly::zero(2);
        f.set_coeff(0, iv(1));
        f.set_coeff(1, iv(1));
        f.set_coeff(2, Interval::new(Dyadic::zero(), Dyadic::one()));
        let h = f.mul(&f, P);
        // h = 1 + 2u + slot; slot covers u^2(1 + 2 theta + ...) range [1, 5]:
        // members (1+u+t(u)u^2)^2 with t in [0,1]: at u=1 value in [4, 9].
        let at1 = h.eval(&Interval::one(), P);
        assert!(at1.contains(&Dyadic::from_i64(4)));
        assert!(at1.contains(&Dyadic::from_i64(9)));
        // and h's regular coefficients are exact.
        assert!(h.coeff(0).is_point());
        assert!(h.coeff(1).is_point());
    }

    #[test]
    fn integrate_matches_symbolic_antiderivative() {
        // f = 3 - 2u + 6u^2 -> F = 3u - u^2 + 2u^3.
        let f = poly(&[(3, 1), (-2, 1), (6, 1)], 12);
        let big = f.integrate(P);
        for k in [0i64, 3, 8] {
            let u = pt(k, 8);
            let exact = {
                let u2 = u.mul(&u, 2 * P);
                let u3 = u2.mul(&u, 2 * P);
                u.mul_dyadic(&Dyadic::from_i64(3), 2 * P)
                    .sub(&u2, 2 * P)
                    .add(&u3.mul_dyadic(&Dyadic::from_i64(2), 2 * P), 2 * P)
            };
            assert!(big.eval(&u, P).intersect(&exact).is_some(), "u={k}/8");
        }
        // Slot content integrates into the slot, scaled down and hulled.
        let mut g = GPoly::zero(4);
        g.set_coeff(4, Interval::new(Dyadic::from_i64(-2), Dyadic::from_i64(3)));
        let gi = g.integrate(P);
        assert!(gi.slot().contains(&Dyadic::zero()));
        assert!(gi.slot().contains_interval(&Interval::from_ratio(-2, 5, P)));
    }

    #[test]
    fn recip_of_one_plus_u() {
        let mut f = GPoly::zero(8);
        f.set_coeff(0, iv(1));
        f.set_coeff(1, iv(1));
        let k = f.recip(None, P).unwrap();
        for n in 0..8 {
            let want = if n % 2 == 0 { 1 } else { -1 };
            assert!(
                k.coeff(n).contains(&Dyadic::from_i64(want)),
                "coeff {n}: {:?}",
                k.coeff(n)
            );
            assert!(k.coeff(n).width() <= Dyadic::pow2(-100));
        }
        // Pointwise: k(u) * f(u) must contain 1.
        for d in [0i64, 5, 8] {
            let u = pt(d, 8);
            let v = k.eval(&u, P).mul(&f.eval(&u, P), P);
            assert!(v.contains(&Dyadic::one()), "u={d}/8: {v:?}");
        }
    }

    #[test]
    fn recip_rejects_zero_crossing() {
        let mut f = GPoly::zero(4);
        f.set_coeff(0, iv(1));
        f.set_coeff(1, iv(-2)); // f(1) = -1 < 0 < f(0)
        assert!(f.recip(None, P).is_err());
    }

    #[test]
    fn exp_of_linear_matches_factorials() {
        let mut f = GPoly::zero(12);
        f.set_coeff(1, iv(1));
        let e = f.exp(P);
        let mut fact = Dyadic::one();
        for n in 1..12 {
            fact = fact.mul_exact(&Dyadic::from_i64(n as i64));
            let want = Interval::one().div_dyadic(&fact, 2 * P);
            assert!(
                e.coeff(n).intersect(&want).is_some(),
                "coeff {n}: {:?} vs {want:?}",
                e.coeff(n)
            );
        }
        let at1 = e.eval(&Interval::one(), P);
        assert!(at1.intersect(&interval_e(P)).is_some(), "{at1:?}");
    }

    #[test]
    fn exp_respects_constant_and_sign() {
        // f = 1 - 2u + u^2/3: compare e^f(u) pointwise. The cap must be
        // generous enough that the 2^cap/cap! slot tail drops below the
        // width tolerance.
        let f = poly(&[(1, 1), (-2, 1), (1, 3)], 48);
        let e = f.exp(P);
        for k in 0..=6 {
            let u = pt(k, 6);
            let want = crate::interval::exp_interval(&f.eval(&u, 2 * P), 2 * P);
            let got = e.eval(&u, P);
            assert!(
                got.intersect(&want).is_some(),
                "u={k}/6: {got:?} vs {want:?}"
            );
            assert!(got.width() <= Dyadic::pow2(-64), "u={k}/6 width {got:?}");
        }
    }

    #[test]
    fn exp_slot_input_is_absorbed() {
        // f = u^cap * theta([-1/2, 1/2]): e^f(u) in [e^-1/2, e^1/2] at u=1.
        let mut f = GPoly::zero(6);
        f.set_coeff(
            6,
            Interval::new(Dyadic::from_i64_exp(-1, -1), Dyadic::from_i64_exp(1, -1)),
        );
        let e = f.exp(P);
        let at1 = e.eval(&Interval::one(), P);
        let want = crate::interval::exp_interval(
            &Interval::new(Dyadic::from_i64_exp(-1, -1), Dyadic::from_i64_exp(1, -1)),
            P,
        );
        assert!(at1.contains_interval(&want), "{at1:?} vs {want:?}");
    }

    #[test]
    fn binom_neg_matches_direct_powers() {
        let u0 = Dyadic::from_i64(4);
        let g = gp_binom_neg(3, &u0, 28, P);
        for k in 0..=4 {
            let u = pt(k, 4);
            let base = Interval::one().add(&u.div_dyadic(&u0, 2 * P), 2 * P);
            let want = base.pow_i(-3, 2 * P);
            let got = g.eval(&u, P);
            assert!(
                got.intersect(&want).is_some(),
                "u={k}/4: {got:?} vs {want:?}"
            );
            assert!(got.width() <= Dyadic::pow2(-40));
        }
    }

    #[test]
    fn pow_finite_is_exact() {
        let u0 = Dyadic::from_i64(2);
        let g = gp_pow_finite(2, &u0, 8, P);
        // (1 + u/2)^2 = 1 + u + u^2/4.
        assert!(g.coeff(0).contains(&Dyadic::one()));
        assert!(g.coeff(1).contains(&Dyadic::one()));
        assert!(g.coeff(2).contains(&Dyadic::from_i64_exp(1, -2)));
        assert!(iv_is_zero(g.coeff(3)));
        assert!(iv_is_zero(g.slot()));
    }

    #[test]
    fn rebase_one_minus_u_small_case() {
        // 1 + 2(1-u) + 3(1-u)^2 = 6 - 8u + 3u^2.
        let cs = vec![pt(1, 1), pt(2, 1), pt(3, 1)];
        let out = rebase_one_minus_u(&cs, P);
        assert!(out[0].contains(&Dyadic::from_i64(6)));
        assert!(out[1].contains(&Dyadic::from_i64(-8)));
        assert!(out[2].contains(&Dyadic::from_i64(3)));
        for c in &out {
            assert!(c.width() <= Dyadic::pow2(-100));
        }
    }

    #[test]
    fn exp_then_recip_round_trip() {
        // 1/e^f and e^(-f) agree pointwise.
        let f = poly(&[(0, 1), (1, 2), (-1, 5)], 14);
        let a = f.exp(P).recip(None, P).unwrap();
        let b = f.neg().exp(P);
        for k in [0i64, 4, 7] {
            let u = pt(k, 7);
            assert!(
                a.eval(&u, P).intersect(&b.eval(&u, P)).is_some(),
                "u={k}/7"
            );
        }
    }

    #[test]
    fn shift_anchor_encloses_shifted_values() {
        let mut g = poly(&[(1, 1), (-2, 3), (1, 4), (2, 7)], 9);
        g.set_coeff(9, Interval::new(Dyadic::from_i64(-1), Dyadic::from_i64(2)));
        let omega = pt(1, 4);
        let h = g.shift_anchor(&omega, P);
        for k in [0i64, 1, 2, 3] {
            // z = k/4 keeps omega + z inside [0, 1].
            let z = pt(k, 4);
            let want = g.eval(&omega.add(&z, P), P);
            let got = h.eval(&z, P);
            assert!(
                got.contains_interval(&want),
                "z={k}/4: {got:?} must contain {want:?}"
            );
        }
        // With a zero slot the shift is tight up to rounding.
        let tight = poly(&[(1, 1), (-2, 3), (1, 4), (2, 7)], 9).shift_anchor(&omega, P);
        let w = tight.eval(&pt(1, 2), P);
        assert!(w.width() <= Dyadic::pow2(-100));
    }

    #[test]
    fn scale_arg_pow2_encloses_dilated_values() {
        let mut g = poly(&[(3, 1), (-1, 2), (5, 6)], 8);
        g.set_coeff(8, Interval::new(Dyadic::from_i64(-1), Dyadic::from_i64(1)));
        let h = g.scale_arg_pow2(-2);
        for k in [0i64, 1, 2, 3, 4] {
            let z = pt(k, 4);
            let want = g.eval(&z.mul_pow2(-2), P);
            let got = h.eval(&z, P);
            assert!(
                got.contains_interval(&want),
                "z={k}/4: {got:?} must contain {want:?}"
            );
        }
    }

    #[test]
    fn scale_arg_with_interval_ratio_encloses_dilated_values() {
        let mut g = poly(&[(3, 1), (-1, 2), (5, 6)], 8);
        g.set_coeff(8, Interval::new(Dyadic::from_i64(-1), Dyadic::from_i64(1)));
        let w = Interval::from_ratio(5, 7, P);
        let h = g.scale_arg(&w, P);
        for k in [0i64, 2, 4] {
            let z = pt(k, 4);
            let want = g.eval(&z.mul(&w, P), P);
            let got = h.eval(&z, P);
            assert!(
                got.contains_interval(&want),
                "z={k}/4: {got:?} must contain {want:?}"
            );
        }
    }

    #[test]
    fn binom_ratio_matches_pointwise_powers() {
        let r = Interval::from_ratio(3, 10, P);
        let g = gp_binom_ratio(3, &r, 64, P);
        for k in [0i64, 1, 2, 3, 4] {
            let z = pt(k, 4);
            let base = Interval::one().add(&r.mul(&z, P), P);
            let want = base.pow_i(-3, P);
            let got = g.eval(&z, P);
            assert!(
                got.intersect(&want).is_some(),
                "z={k}/4: {got:?} vs {want:?}"
            );
            assert!(got.width_f64() < 1e-18, "z={k}/4 width {}", got.width_f64());
        }
    }

    #[test]
    fn pow_ratio_is_exact_for_small_powers() {
        let r = Interval::from_ratio(-2, 5, P);
        let g = gp_pow_ratio(4, &r, 16, P);
        for k in [0i64, 1, 3, 4] {
            let z = pt(k, 4);
            let base = Interval::one().add(&r.mul(&z, P), P);
            let want = base.pow_i(4, P);
            let got = g.eval(&z, P);
            assert!(
                got.intersect(&want).is_some(),
                "z={k}/4: {got:?} vs {want:?}"
            );
        }
    }
}
