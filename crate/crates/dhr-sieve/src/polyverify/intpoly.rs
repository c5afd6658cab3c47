//! Integer polynomials with exact big-integer resultants and
//! discriminants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

/// A polynomial with integer coefficients, stored low-to-high with no
/// trailing zero; the zero polynomial is the empty list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_bigints(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_bigints(coeffs: Vec<BigInt>) -> IntPoly {
        let mut p = IntPoly { coeffs };
        while p.coeffs.last().is_some_and(|c| c.is_zero()) {
            p.coeffs.pop();
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for constants. Panics on the zero polynomial.
    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.coeffs.len() - 1
    }

    /// Coefficients low-to-high.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Leading coefficient. Panics on the zero polynomial.
    pub fn lc(&self) -> &BigInt {
        self.coeffs.last().expect("leading coefficient of zero")
    }

    /// gcd of the coefficient magnitudes; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    pub fn eval_big(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly { coeffs: Vec::new() };
        }
        IntPoly::from_bigints(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i as u64 + 1))
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly { coeffs: Vec::new() };
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_bigints(out)
    }

    /// Exact resultant via the Sylvester matrix. Zero iff the polynomials
    /// share a root (over the algebraic closure).
    pub fn resultant(&self, other: &IntPoly) -> BigInt {
        if self.is_zero() || other.is_zero() {
            return BigInt::zero();
        }
        let m = self.degree();
        let n = other.degree();
        if m == 0 {
            // Res(c, g) = c^deg(g).
            return self.coeffs[0].pow(n as u32);
        }
        if n == 0 {
            return other.coeffs[0].pow(m as u32);
        }
        let size = m + n;
        let mut mat = vec![vec![BigInt::zero(); size]; size];
        for row in 0..n {
            for (k, c) in self.coeffs.iter().rev().enumerate() {
                mat[row][row + k] = c.clone();
            }
        }
        for row in 0..m {
            for (k, c) in other.coeffs.iter().rev().enumerate() {
                mat[n + row][row + k] = c.clone();
            }
        }
        bareiss_det(mat)
    }

    /// Exact discriminant: (-1)^(d(d-1)/2) Res(f, f') / lc(f). The linear
    /// discriminant is 1 by the empty-product convention. Panics on
    /// constants and zero.
    pub fn discriminant(&self) -> BigInt {
        let d = self.degree();
        assert!(d >= 1, "discriminant needs degree at least 1");
        if d == 1 {
            return BigInt::from(1);
        }
        let res = self.resultant(&self.derivative());
        let (q, rem) = res.div_rem(self.lc());
        debug_assert!(rem.is_zero(), "lc divides Res(f, f')");
        if (d * (d - 1) / 2) % 2 == 1 {
            -q
        } else {
            q
        }
    }
}

/// Fraction-free Gaussian elimination; exact integer determinant.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division is exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    if sign < 0 {
        -m[n - 1][n - 1].clone()
    } else {
        m[n - 1][n - 1].clone()
    }
}
