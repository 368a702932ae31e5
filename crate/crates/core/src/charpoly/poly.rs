use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// Dense polynomial in `lambda` with complex coefficients in ascending powers.
///
/// Exactly-zero trailing coefficients are dropped on construction, so the
/// leading coefficient is nonzero unless the polynomial is zero (empty).
/// [`Poly::trimmed`] applies a relative threshold on request.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `lambda + c`.
    pub fn linear(c: C64) -> Self {
        Self::new(vec![c, C64::new(1.0, 0.0)])
    }

    /// `prod (lambda - r)` over the roots, repeated per multiplicity.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a C64>) -> Self {
        roots.into_iter().fold(Self::one(), |acc, r| &acc * &Self::linear(-r))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, power: usize) -> C64 {
        self.coeffs.get(power).copied().unwrap_or_default()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    /// Drops trailing coefficients below `rel_tol · max|coeff|`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.max_abs();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `max|self - other| / max|reference|`, coefficient-wise.
    pub fn rel_distance(&self, other: &Poly, reference: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let diff = (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max);
        let denom = reference.max_abs();
        if denom == 0.0 {
            diff
        } else {
            diff / denom
        }
    }
}

pub fn poly_add(p: &Poly, q: &Poly) -> Poly {
    p + q
}

pub fn poly_sub(p: &Poly, q: &Poly) -> Poly {
    p - q
}

pub fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    p * q
}

pub fn poly_scale(p: &Poly, s: C64) -> Poly {
    p.scale(s)
}

pub fn poly_eval(p: &Poly, x: C64) -> C64 {
    p.eval(x)
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})λ"),
                _ => format!("({c})λ^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basic_arithmetic() {
        let p = Poly::linear(c(1.0, 0.0));
        let q = Poly::linear(c(-1.0, 0.0));
        let prod = poly_mul(&p, &q);
        assert_eq!(prod.coeffs(), &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(poly_eval(&prod, c(0.0, 1.0)), c(-2.0, 0.0));
        assert!(poly_sub(&prod, &prod).is_zero());
        assert_eq!(poly_sub(&prod, &prod).degree(), None);
        assert_eq!(poly_add(&p, &q).coeffs(), &[c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(poly_scale(&p, c(0.0, 2.0)).coeffs(), &[c(0.0, 2.0), c(0.0, 2.0)]);
    }

    #[test]
    fn from_roots_matches_expansion() {
        let p = Poly::from_roots(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(p.coeffs(), &[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn trimming() {
        let p = Poly::new(vec![c(1.0, 0.0), c(1e-20, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.trimmed(1e-14).degree(), Some(0));
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..6)
            .prop_map(|v| Poly::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn product_evaluates_pointwise(p in arb_poly(), q in arb_poly(), x in -2.0..2.0f64, y in -2.0..2.0f64) {
            let z = C64::new(x, y);
            let lhs = (&p * &q).eval(z);
            let rhs = p.eval(z) * q.eval(z);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
            let sum = (&p + &q).eval(z);
            prop_assert!((sum - p.eval(z) - q.eval(z)).norm() <= 1e-10 * (1.0 + sum.norm()));
        }
    }
}
