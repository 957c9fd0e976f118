//! Legendre-form cubics `y^2 z - x(x - z)(x - a z)`, their supersingularity
//! test, and the coefficient of `x^{2m} y^{2n} z^{n+m}` in their powers.

use std::fmt;

use num_bigint::BigInt;

use crate::deuring::{deuring_poly, n1};
use crate::error::{Error, Result};
use crate::ff::{FieldElement, FiniteField, Fq};
use crate::lucas;
use crate::poly::{Exponent, MultiPoly, PolyRing, UniPoly};
use crate::ring::Ring;

/// `y^2 z - x^3 + (1 + a) x^2 z - a x z^2` over any ring.
///
/// In characteristic 2 this coincides with `y^2 z + x(x + z)(x + a z)`.
pub fn legendre_poly<R: Ring>(ring: &R, a: &R::Elem) -> MultiPoly<R::Elem> {
    MultiPoly::from_terms(
        ring,
        [
            ([0, 2, 1], ring.one()),
            ([3, 0, 0], ring.neg(&ring.one())),
            ([2, 0, 1], ring.add(&ring.one(), a)),
            ([1, 0, 2], ring.neg(a)),
        ],
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendreCurve {
    a: FieldElement,
    f: MultiPoly<Fq>,
}

impl LegendreCurve {
    pub fn new(a: FieldElement) -> Result<Self> {
        if a.is_zero() || a.is_one() {
            return Err(Error::DegenerateParameter);
        }
        let f = legendre_poly(a.field(), &a.value());
        Ok(LegendreCurve { a, f })
    }

    pub fn field(&self) -> &FiniteField {
        self.a.field()
    }

    pub fn p(&self) -> u64 {
        self.field().p()
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn poly(&self) -> &MultiPoly<Fq> {
        &self.f
    }
}

pub fn make_curve(a: FieldElement) -> Result<LegendreCurve> {
    LegendreCurve::new(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    Ordinary,
    Supersingular,
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reduction::Ordinary => "ordinary",
            Reduction::Supersingular => "supersingular",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub tag: Reduction,
    /// `H{n_1}(a)`
    pub hasse_value: FieldElement,
}

/// Supersingular iff `a` is a root of `H{(p-1)/2}`.
pub fn classify(curve: &LegendreCurve) -> Result<Classification> {
    let p = curve.p();
    if p == 2 {
        return Err(Error::CharTwoUnsupported);
    }
    let base = curve.field().prime_subfield();
    let hasse = deuring_poly(n1(p), &base);
    let hasse_value = PolyRing::new(base).eval_element(&hasse, curve.a())?;
    let tag = if hasse_value.is_zero() {
        Reduction::Supersingular
    } else {
        Reduction::Ordinary
    };
    Ok(Classification { tag, hasse_value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchField {
    Prime,
    Quadratic,
}

/// Every `a ∉ {0, 1}` in the chosen field with `H{n_1}(a) = 0`, in
/// enumeration order.
pub fn supersingular_values(p: u64, search: SearchField, cap: u64) -> Result<Vec<FieldElement>> {
    let base = FiniteField::prime(p)?;
    if p == 2 {
        return Err(Error::CharTwoUnsupported);
    }
    let field = match search {
        SearchField::Prime => base,
        SearchField::Quadratic => FiniteField::quadratic(p)?,
    };
    let ring = PolyRing::new(base);
    let hasse = deuring_poly(n1(p), &base);
    let mut out = Vec::new();
    for a in field.enumerate(cap)? {
        if a.is_zero() || a.is_one() {
            continue;
        }
        if ring.eval_element(&hasse, &a)?.is_zero() {
            out.push(a);
        }
    }
    Ok(out)
}

/// `C(N, n) · H{m}(a)`, the coefficient of `x^{2m} y^{2n} z^{n+m}` in
/// `f_a^N` for `N = n + m`.
pub fn critical_coefficient(total: u64, n: u64, m: u64, a: &FieldElement) -> Result<FieldElement> {
    if n + m != total {
        return Err(Error::BadPartition { sum: n + m, total });
    }
    let field = *a.field();
    let p = field.p();
    let binom = field.from_u64(lucas::binomial_mod_p(total, n, p));
    let base = field.prime_subfield();
    let h = PolyRing::new(base).eval_element(&deuring_poly(m, &base), a)?;
    Ok(binom * h)
}

/// The exponent `[2m, 2n, n + m]` whose coefficient `critical_coefficient`
/// predicts.
pub fn critical_exponent(n: u64, m: u64) -> Exponent {
    [(2 * m) as u32, (2 * n) as u32, (n + m) as u32]
}

/// Outcome of [`verify_technical_lemma`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TechnicalLemmaReport {
    pub p: u64,
    pub n_max: u64,
    pub checked: usize,
    /// Splits `(N, n, m)` where the coefficient differs from `C(N, n) H{m}(λ)`.
    pub mismatches: Vec<(u64, u64, u64)>,
}

impl TechnicalLemmaReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Expands `f_λ^N` with coefficients in `F_p[λ]` for every `N ≤ n_max` and
/// compares the coefficient of `x^{2m} y^{2n} z^{n+m}` with
/// `C(N, n) H{m}(λ)` for every split `N = n + m`.
///
/// The two sign factors `(-1)^m` arising in the expansion cancel, so the
/// comparison is an exact equality, not one up to sign.
pub fn verify_technical_lemma(p: u64, n_max: u64) -> Result<TechnicalLemmaReport> {
    let field = FiniteField::prime(p)?;
    let ring = PolyRing::new(field);
    let f = legendre_poly(&ring, &ring.var());
    let mut power = MultiPoly::one(&ring);
    let mut report = TechnicalLemmaReport {
        p,
        n_max,
        checked: 0,
        mismatches: Vec::new(),
    };
    for total in 1..=n_max {
        power = power.mul(&ring, &f);
        for n in 0..=total {
            let m = total - n;
            let got = power.coefficient_of(&ring, &critical_exponent(n, m));
            let binom = ring.from_bigint(&BigInt::from(lucas::binomial(total, n as i64)));
            let expected: UniPoly<Fq> = ring.mul(&binom, &deuring_poly(m, &field));
            report.checked += 1;
            if got != expected {
                report.mismatches.push((total, n, m));
            }
        }
    }
    Ok(report)
}
