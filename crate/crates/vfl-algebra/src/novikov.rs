//! Truncated Novikov scalars: finite sums Σ aᵢ T^{λᵢ} with exact rational
//! coefficients and real exponents, all arithmetic valid up to an energy
//! cutoff E.
//!
//! Exponents are `f64` (this is what the wire format carries); exponents
//! closer than [`EXP_MERGE_TOL`] are merged. Coefficients are `BigRational`,
//! so every equality below the cutoff is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Tolerance for identifying two exponents as the same energy level.
pub const EXP_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NovikovError {
    #[error("scalar is not unipotent: leading term must be 1·T^0, got {0}")]
    NotUnipotent(String),
    #[error("scalar is not a unit (it is zero up to cutoff)")]
    NotUnit,
    #[error("incompatible cutoffs: {0} vs {1}")]
    CutoffMismatch(f64, f64),
}

/// A truncated element of the universal Novikov ring.
///
/// Invariants: exponents strictly increasing (separated by more than
/// [`EXP_MERGE_TOL`]), no zero coefficients, all exponents `< cutoff`.
#[derive(Debug, Clone)]
pub struct NovikovScalar {
    terms: Vec<(f64, BigRational)>,
    cutoff: f64,
}

impl NovikovScalar {
    pub fn zero(cutoff: f64) -> Self {
        NovikovScalar { terms: Vec::new(), cutoff }
    }

    pub fn one(cutoff: f64) -> Self {
        Self::monomial(0.0, BigRational::one(), cutoff)
    }

    pub fn monomial(exponent: f64, coeff: BigRational, cutoff: f64) -> Self {
        let mut s = NovikovScalar { terms: vec![(exponent, coeff)], cutoff };
        s.normalize();
        s
    }

    pub fn monomial_int(exponent: f64, num: i64, den: i64, cutoff: f64) -> Self {
        Self::monomial(
            exponent,
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            cutoff,
        )
    }

    /// Build from raw (exponent, coefficient) pairs; merges and truncates.
    pub fn from_terms(terms: Vec<(f64, BigRational)>, cutoff: f64) -> Self {
        let mut s = NovikovScalar { terms, cutoff };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.terms
            .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-finite exponent"));
        let mut merged: Vec<(f64, BigRational)> = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms.drain(..) {
            if e >= self.cutoff {
                continue;
            }
            match merged.last_mut() {
                Some(last) if (e - last.0).abs() <= EXP_MERGE_TOL => last.1 += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.terms = merged;
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn terms(&self) -> &[(f64, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimal exponent, or `None` for the (truncated) zero.
    pub fn valuation(&self) -> Option<f64> {
        self.terms.first().map(|t| t.0)
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.first().map(|t| &t.1)
    }

    /// Retruncate to a (lower or higher) cutoff.
    pub fn with_cutoff(&self, cutoff: f64) -> Self {
        let mut s = self.clone();
        s.cutoff = cutoff;
        s.normalize();
        s
    }

    pub fn neg(&self) -> Self {
        NovikovScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(terms, cutoff)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Convolution product, truncated at the smaller cutoff.
    pub fn mul(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if e < cutoff {
                    terms.push((e, c1 * c2));
                }
            }
        }
        Self::from_terms(terms, cutoff)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.cutoff);
        }
        NovikovScalar {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
            cutoff: self.cutoff,
        }
    }

    /// Invert `1 + n` with `val(n) > 0` by the geometric series Σ (−n)^k.
    pub fn invert_unipotent(&self) -> Result<Self, NovikovError> {
        let lead_ok = match self.terms.first() {
            Some((e, c)) => e.abs() <= EXP_MERGE_TOL && c.is_one(),
            None => false,
        };
        if !lead_ok {
            return Err(NovikovError::NotUnipotent(format!("{self}")));
        }
        let one = Self::one(self.cutoff);
        let n = self.sub(&one);
        if n.is_zero() {
            return Ok(one);
        }
        let mut inv = one.clone();
        let mut pow = one;
        loop {
            pow = pow.mul(&n.neg());
            if pow.is_zero() {
                break;
            }
            inv = inv.add(&pow);
        }
        Ok(inv)
    }

    /// Invert any unit a·T^λ·(1 + n). The result has valuation −λ, so callers
    /// must keep the cutoff bookkeeping in mind.
    pub fn invert_unit(&self) -> Result<Self, NovikovError> {
        let (lam, lead) = match self.terms.first() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(NovikovError::NotUnit),
        };
        // self = lead·T^lam · u with u unipotent
        let shift = Self::monomial(-lam, BigRational::one() / lead, self.cutoff);
        let unipotent = self.mul(&shift);
        let inv_u = unipotent.invert_unipotent()?;
        Ok(inv_u.mul(&shift))
    }

    /// Equality with `other` of all terms below `bound`.
    pub fn eq_below(&self, other: &Self, bound: f64) -> bool {
        self.sub(other)
            .valuation()
            .map_or(true, |v| v >= bound - EXP_MERGE_TOL)
    }
}

impl PartialEq for NovikovScalar {
    fn eq(&self, other: &Self) -> bool {
        let bound = self.cutoff.min(other.cutoff);
        self.eq_below(other, bound)
    }
}

impl std::fmt::Display for NovikovScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *e == 0.0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·T^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nov(pairs: &[(f64, i64, i64)], cutoff: f64) -> NovikovScalar {
        NovikovScalar::from_terms(
            pairs
                .iter()
                .map(|&(e, n, d)| (e, BigRational::new(BigInt::from(n), BigInt::from(d))))
                .collect(),
            cutoff,
        )
    }

    #[test]
    fn unit_multiplication() {
        let one = NovikovScalar::one(32.0);
        let x = nov(&[(0.5, 1, 1), (1.0, 1, 1)], 32.0);
        assert_eq!(one.mul(&x), x);
    }

    #[test]
    fn monomial_shift() {
        let x = nov(&[(0.5, 1, 1), (1.0, 1, 1)], 32.0);
        let y = nov(&[(0.25, 1, 1)], 32.0);
        let expect = nov(&[(0.75, 1, 1), (1.25, 1, 1)], 32.0);
        assert_eq!(x.mul(&y), expect);
    }

    #[test]
    fn geometric_series_mod_cutoff() {
        // (1 - T)·(1 + T + T² + T³ + T⁴) = 1 - T⁵ ≡ 1 below 5
        let e = 5.0;
        let one_minus_t = nov(&[(0.0, 1, 1), (1.0, -1, 1)], e);
        let geo = nov(&[(0.0, 1, 1), (1.0, 1, 1), (2.0, 1, 1), (3.0, 1, 1), (4.0, 1, 1)], e);
        let prod = one_minus_t.mul(&geo);
        assert!(prod.eq_below(&NovikovScalar::one(e), 5.0));
    }

    #[test]
    fn invert_one_is_one() {
        let one = NovikovScalar::one(32.0);
        assert_eq!(one.invert_unipotent().unwrap(), one);
    }

    #[test]
    fn invert_one_plus_t() {
        let x = nov(&[(0.0, 1, 1), (1.0, 1, 1)], 4.0);
        let inv = x.invert_unipotent().unwrap();
        let expect = nov(&[(0.0, 1, 1), (1.0, -1, 1), (2.0, 1, 1), (3.0, -1, 1)], 4.0);
        assert_eq!(inv, expect);
        assert_eq!(x.mul(&inv), NovikovScalar::one(4.0));
    }

    #[test]
    fn invert_with_real_exponents() {
        let x = nov(&[(0.0, 1, 1), (0.3, 2, 1), (0.7, -1, 1)], 10.0);
        let inv = x.invert_unipotent().unwrap();
        assert_eq!(x.mul(&inv), NovikovScalar::one(10.0));
    }

    #[test]
    fn invert_rejects_non_unipotent() {
        let x = nov(&[(0.5, 1, 1)], 10.0);
        assert!(matches!(x.invert_unipotent(), Err(NovikovError::NotUnipotent(_))));
        let y = nov(&[(0.0, 2, 1)], 10.0);
        assert!(y.invert_unipotent().is_err());
        // but a general unit inverse exists
        let inv = y.invert_unit().unwrap();
        assert_eq!(y.mul(&inv), NovikovScalar::one(10.0));
    }

    #[test]
    fn valuation_additivity() {
        let x = nov(&[(0.5, 3, 2), (2.0, 1, 1)], 32.0);
        let y = nov(&[(1.25, -2, 7)], 32.0);
        let xy = x.mul(&y);
        assert!((xy.valuation().unwrap() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn exponent_merge() {
        let x = nov(&[(1.0, 1, 1), (1.0 + 1e-12, -1, 1)], 32.0);
        assert!(x.is_zero());
    }
}
