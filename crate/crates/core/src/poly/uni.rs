use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ff::{FieldElement, FiniteField, Fq};
use crate::ring::Ring;

/// Dense univariate polynomial; `coeffs[i]` is the coefficient of `λ^i`.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients. Values are built and combined through a [`PolyRing`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<E> {
    coeffs: Vec<E>,
}

impl<E> UniPoly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }
}

/// The polynomial ring `R[λ]` over a base ring `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing<R: Ring> {
    base: R,
}

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        PolyRing { base }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn from_coeffs(&self, mut coeffs: Vec<R::Elem>) -> UniPoly<R::Elem> {
        while coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64s(&self, coeffs: &[i64]) -> UniPoly<R::Elem> {
        self.from_coeffs(coeffs.iter().map(|&c| self.base.from_i64(c)).collect())
    }

    pub fn constant(&self, c: R::Elem) -> UniPoly<R::Elem> {
        self.from_coeffs(vec![c])
    }

    /// `c λ^k`
    pub fn monomial(&self, c: R::Elem, k: usize) -> UniPoly<R::Elem> {
        let mut coeffs = vec![self.base.zero(); k + 1];
        coeffs[k] = c;
        self.from_coeffs(coeffs)
    }

    /// The indeterminate `λ`.
    pub fn var(&self) -> UniPoly<R::Elem> {
        self.monomial(self.base.one(), 1)
    }

    pub fn coeff(&self, f: &UniPoly<R::Elem>, i: usize) -> R::Elem {
        f.coeffs.get(i).cloned().unwrap_or_else(|| self.base.zero())
    }

    /// Horner evaluation.
    pub fn eval(&self, f: &UniPoly<R::Elem>, a: &R::Elem) -> R::Elem {
        f.coeffs.iter().rev().fold(self.base.zero(), |acc, c| {
            self.base.add(&self.base.mul(&acc, a), c)
        })
    }

    pub fn scale(&self, f: &UniPoly<R::Elem>, c: &R::Elem) -> UniPoly<R::Elem> {
        self.from_coeffs(f.coeffs.iter().map(|x| self.base.mul(x, c)).collect())
    }

    /// Formal derivative.
    pub fn derivative(&self, f: &UniPoly<R::Elem>) -> UniPoly<R::Elem> {
        let coeffs = f
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.base.mul(c, &self.base.from_i64(i as i64)))
            .collect();
        self.from_coeffs(coeffs)
    }

    /// Formal antiderivative with constant coefficient 0.
    ///
    /// Fails with `NonInvertibleIndex(i + 1)` when the coefficient of `λ^i`
    /// would have to be divided by a non-unit.
    pub fn antiderivative(&self, f: &UniPoly<R::Elem>) -> Result<UniPoly<R::Elem>> {
        let mut coeffs = Vec::with_capacity(f.coeffs.len() + 1);
        coeffs.push(self.base.zero());
        for (i, c) in f.coeffs.iter().enumerate() {
            let idx = i as u64 + 1;
            let inv = self
                .base
                .inv(&self.base.from_bigint(&BigInt::from(idx)))
                .ok_or(Error::NonInvertibleIndex(idx))?;
            coeffs.push(self.base.mul(c, &inv));
        }
        Ok(self.from_coeffs(coeffs))
    }

    /// Division with remainder by a divisor whose leading coefficient is a
    /// unit.
    pub fn div_rem(
        &self,
        f: &UniPoly<R::Elem>,
        g: &UniPoly<R::Elem>,
    ) -> Result<(UniPoly<R::Elem>, UniPoly<R::Elem>)> {
        let Some(dg) = g.degree() else {
            return Err(Error::DivisionByZero);
        };
        let lead_inv = self
            .base
            .inv(g.leading().expect("nonzero"))
            .ok_or(Error::RingNotField)?;
        let mut rem = f.coeffs.clone();
        let Some(df) = f.degree().filter(|&d| d >= dg) else {
            return Ok((self.zero(), f.clone()));
        };
        let mut quot = vec![self.base.zero(); df - dg + 1];
        for i in (0..=df - dg).rev() {
            let c = self.base.mul(&rem[i + dg], &lead_inv);
            if self.base.is_zero(&c) {
                continue;
            }
            for (j, gj) in g.coeffs.iter().enumerate() {
                rem[i + j] = self.base.sub(&rem[i + j], &self.base.mul(&c, gj));
            }
            quot[i] = c;
        }
        Ok((self.from_coeffs(quot), self.from_coeffs(rem)))
    }

    /// Scales to leading coefficient 1; the zero polynomial stays zero.
    pub fn monic(&self, f: &UniPoly<R::Elem>) -> Result<UniPoly<R::Elem>> {
        match f.leading() {
            None => Ok(self.zero()),
            Some(lead) => {
                let inv = self.base.inv(lead).ok_or(Error::RingNotField)?;
                Ok(self.scale(f, &inv))
            }
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, f: &UniPoly<R::Elem>, g: &UniPoly<R::Elem>) -> Result<UniPoly<R::Elem>> {
        if !self.base.is_field() {
            return Err(Error::RingNotField);
        }
        let (mut a, mut b) = (f.clone(), g.clone());
        while !b.is_zero() {
            let (_, r) = self.div_rem(&a, &b)?;
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Product skipping zero coefficients, so sparse inputs stay cheap.
    fn mul_dense(&self, f: &UniPoly<R::Elem>, g: &UniPoly<R::Elem>) -> UniPoly<R::Elem> {
        if f.is_zero() || g.is_zero() {
            return self.zero();
        }
        let mut out = vec![self.base.zero(); f.coeffs.len() + g.coeffs.len() - 1];
        let g_nz: Vec<(usize, &R::Elem)> = g
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.base.is_zero(c))
            .collect();
        for (i, a) in f.coeffs.iter().enumerate() {
            if self.base.is_zero(a) {
                continue;
            }
            for &(j, b) in &g_nz {
                self.base.mul_add_assign(&mut out[i + j], a, b);
            }
        }
        self.from_coeffs(out)
    }

    /// `f(λ^k)`
    pub fn inflate(&self, f: &UniPoly<R::Elem>, k: usize) -> UniPoly<R::Elem> {
        if f.is_zero() || k == 1 {
            return f.clone();
        }
        let mut coeffs = vec![self.base.zero(); (f.coeffs.len() - 1) * k + 1];
        for (i, c) in f.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        self.from_coeffs(coeffs)
    }
}

impl PolyRing<FiniteField> {
    /// Evaluates at an element of the base field or of an extension of it.
    pub fn eval_element(&self, f: &UniPoly<Fq>, a: &FieldElement) -> Result<FieldElement> {
        let target = *a.field();
        if target.p() != self.base.p() || target.degree() < self.base.degree() {
            return Err(Error::RingMismatch);
        }
        let value = f.coeffs.iter().rev().fold(Fq::ZERO, |acc, c| {
            target.add(&target.mul(&acc, &a.value()), c)
        });
        Ok(target.wrap(value))
    }

    /// All roots in `field` (which must contain the coefficient field),
    /// with multiplicities, ordered as `field.enumerate` orders them.
    pub fn roots_exhaustive(
        &self,
        f: &UniPoly<Fq>,
        field: &FiniteField,
        cap: u64,
    ) -> Result<Vec<(FieldElement, usize)>> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if field.p() != self.base.p() || field.degree() < self.base.degree() {
            return Err(Error::RingMismatch);
        }
        // coefficients of F_p embed unchanged into F_{p^2}
        let ext = PolyRing::new(*field);
        let lifted = ext.from_coeffs(f.coeffs.clone());
        let mut roots = BTreeMap::new();
        for r in field.enumerate(cap)? {
            if !field.is_zero(&ext.eval(&lifted, &r.value())) {
                continue;
            }
            let linear = ext.from_coeffs(vec![field.neg(&r.value()), Fq::ONE]);
            let mut rest = lifted.clone();
            let mut mult = 0;
            loop {
                let (q, rem) = ext.div_rem(&rest, &linear)?;
                if !rem.is_zero() {
                    break;
                }
                mult += 1;
                rest = q;
            }
            roots.insert(r.value(), (r, mult));
        }
        Ok(roots.into_values().collect())
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = UniPoly<R::Elem>;

    fn zero(&self) -> Self::Elem {
        UniPoly { coeffs: Vec::new() }
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            self.base.add_assign(c, s);
        }
        self.from_coeffs(coeffs)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        UniPoly {
            coeffs: a.coeffs.iter().map(|c| self.base.neg(c)).collect(),
        }
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul_dense(a, b)
    }
    fn from_bigint(&self, n: &BigInt) -> Self::Elem {
        self.constant(self.base.from_bigint(n))
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_i64(n))
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn is_field(&self) -> bool {
        false
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        match a.degree() {
            Some(0) => self.base.inv(&a.coeffs[0]).map(|c| self.constant(c)),
            _ => None,
        }
    }
    fn add_assign(&self, acc: &mut Self::Elem, b: &Self::Elem) {
        if acc.coeffs.len() < b.coeffs.len() {
            acc.coeffs.resize(b.coeffs.len(), self.base.zero());
        }
        for (c, s) in acc.coeffs.iter_mut().zip(&b.coeffs) {
            self.base.add_assign(c, s);
        }
        while acc.coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
            acc.coeffs.pop();
        }
    }
}
