//! Dense univariate polynomials over GF(p).

use crate::field::{FieldElement, PrimeModulus};

/// Coefficients in ascending degree. The zero polynomial has no coefficients
/// and no other value carries a trailing zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePoly {
    p: PrimeModulus,
    coeffs: Vec<FieldElement>,
}

impl DensePoly {
    pub fn new(p: PrimeModulus, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { p, coeffs }
    }

    pub fn zero(p: PrimeModulus) -> Self {
        DensePoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: PrimeModulus) -> Self {
        DensePoly { p, coeffs: vec![p.one()] }
    }

    /// Monic product `prod (t - r)` over the given roots.
    pub fn from_roots(p: PrimeModulus, roots: &[FieldElement]) -> Self {
        let mut coeffs = Vec::with_capacity(roots.len() + 1);
        coeffs.push(p.one());
        for &r in roots {
            // multiply in place by (t - r)
            coeffs.push(p.zero());
            for d in (1..coeffs.len()).rev() {
                coeffs[d] = p.sub(coeffs[d - 1], p.mul(r, coeffs[d]));
            }
            coeffs[0] = p.neg(p.mul(r, coeffs[0]));
        }
        DensePoly::new(p, coeffs)
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, n: usize) -> FieldElement {
        self.coeffs.get(n).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let p = self.p;
        self.coeffs.iter().rev().fold(p.zero(), |acc, &c| p.add(p.mul(acc, x), c))
    }

    pub fn mul(&self, other: &DensePoly) -> DensePoly {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero(p);
        }
        let mut out = vec![p.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = p.add(out[i + j], p.mul(a, b));
            }
        }
        DensePoly::new(p, out)
    }

    pub fn square(&self) -> DensePoly {
        self.mul(self)
    }

    pub fn add(&self, other: &DensePoly) -> DensePoly {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        DensePoly::new(p, (0..n).map(|i| p.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, s: FieldElement) -> DensePoly {
        let p = self.p;
        DensePoly::new(p, self.coeffs.iter().map(|&c| p.mul(c, s)).collect())
    }

    /// Formal derivative.
    pub fn derivative(&self) -> DensePoly {
        let p = self.p;
        DensePoly::new(p, self.coeffs.iter().enumerate().skip(1).map(|(d, &c)| p.mul(p.elem(d as u64), c)).collect())
    }
}
