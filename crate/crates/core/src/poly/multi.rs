use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{FiniteField, Fq};
use crate::ring::Ring;

/// Exponent vector `[k_x, k_y, k_z]`.
pub type Exponent = [u32; 3];

/// Above this many `(k_x, k_y)` slots the dense accumulator is not used.
const DENSE_SLOT_LIMIT: u64 = 1 << 22;

/// The Frobenius power `m^[p^e] = (x^{p^e}, y^{p^e}, z^{p^e})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrobeniusIdeal {
    p: u64,
    e: u32,
    bound: u32,
}

impl FrobeniusIdeal {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if e == 0 {
            return Err(Error::InvalidLevel(e));
        }
        let bound = p
            .checked_pow(e)
            .filter(|&b| b < u32::MAX as u64 / 4)
            .ok_or(Error::InvalidLevel(e))?;
        Ok(FrobeniusIdeal {
            p,
            e,
            bound: bound as u32,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.e
    }

    /// `p^e`
    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Number of `(k_x, k_y)` slots a reduced homogeneous polynomial can use.
    pub fn slots(&self) -> u128 {
        (self.bound as u128).pow(2)
    }

    /// A monomial lies in the ideal iff one of its exponents reaches `p^e`.
    #[inline]
    pub fn contains(&self, k: &Exponent) -> bool {
        k.iter().any(|&x| x >= self.bound)
    }
}

/// Outcome of a Frobenius-power membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// Lexicographically smallest surviving exponent when not a member.
    pub witness: Option<Exponent>,
}

/// Sparse polynomial in `x, y, z`; terms sorted lexicographically by
/// exponent, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly<E> {
    terms: Vec<(Exponent, E)>,
}

impl<E: Clone> MultiPoly<E> {
    pub fn zero() -> Self {
        MultiPoly { terms: Vec::new() }
    }

    pub fn one<R: Ring<Elem = E>>(ring: &R) -> Self {
        MultiPoly {
            terms: vec![([0, 0, 0], ring.one())],
        }
    }

    /// Collects terms, merging repeated exponents and dropping zeros.
    pub fn from_terms<R, I>(ring: &R, terms: I) -> Self
    where
        R: Ring<Elem = E>,
        I: IntoIterator<Item = (Exponent, E)>,
    {
        let mut map: HashMap<Exponent, E> = HashMap::new();
        for (k, c) in terms {
            match map.get_mut(&k) {
                Some(acc) => ring.add_assign(acc, &c),
                None => {
                    map.insert(k, c);
                }
            }
        }
        Self::from_map(ring, map)
    }

    fn from_map<R: Ring<Elem = E>>(ring: &R, map: HashMap<Exponent, E>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect();
        terms.sort_unstable_by_key(|t| t.0);
        MultiPoly { terms }
    }

    pub fn terms(&self) -> &[(Exponent, E)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common total degree of all terms; `None` for zero or inhomogeneous
    /// polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.iter().map(|(k, _)| k.iter().sum::<u32>());
        let d = degrees.next()?;
        degrees.all(|x| x == d).then_some(d)
    }

    pub fn coefficient_of<R: Ring<Elem = E>>(&self, ring: &R, k: &Exponent) -> E {
        match self.terms.binary_search_by(|t| t.0.cmp(k)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => ring.zero(),
        }
    }

    pub fn map_coeffs<R: Ring<Elem = E>, F: Fn(&E) -> E>(&self, ring: &R, f: F) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, f(c)))
                .filter(|(_, c)| !ring.is_zero(c))
                .collect(),
        }
    }

    pub fn add<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        Self::from_terms(ring, self.terms.iter().chain(&other.terms).cloned())
    }

    /// Drops every term lying in the ideal.
    pub fn reduce(&self, ideal: &FrobeniusIdeal) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| !ideal.contains(k))
                .cloned()
                .collect(),
        }
    }

    /// Full product.
    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        self.mul_sparse(ring, other, None)
    }

    /// Product reduced modulo `m^[p^e]`: terms with an exponent `≥ p^e` are
    /// never formed. Inputs need not be reduced.
    pub fn mul_truncated<R: Ring<Elem = E>>(
        &self,
        ring: &R,
        other: &Self,
        ideal: &FrobeniusIdeal,
    ) -> Self {
        let a = self.reduce(ideal);
        let b = other.reduce(ideal);
        if a.is_zero() || b.is_zero() {
            return Self::zero();
        }
        match (a.homogeneous_degree(), b.homogeneous_degree()) {
            (Some(da), Some(db)) if ideal.slots() <= DENSE_SLOT_LIMIT as u128 => {
                // iterate over the factor with fewer terms
                if a.len() <= b.len() {
                    a.mul_dense(ring, da, &b, db, ideal.bound())
                } else {
                    b.mul_dense(ring, db, &a, da, ideal.bound())
                }
            }
            _ => a.mul_sparse(ring, &b, Some(ideal.bound())),
        }
    }

    fn mul_sparse<R: Ring<Elem = E>>(&self, ring: &R, other: &Self, bound: Option<u32>) -> Self {
        let bound = bound.unwrap_or(u32::MAX);
        let mut acc: HashMap<Exponent, E> = HashMap::new();
        for (ka, ca) in &self.terms {
            // other.terms is sorted by k_x first
            for (kb, cb) in &other.terms {
                if ka[0] + kb[0] >= bound {
                    break;
                }
                let k = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
                if k[1] >= bound || k[2] >= bound {
                    continue;
                }
                match acc.get_mut(&k) {
                    Some(c) => ring.mul_add_assign(c, ca, cb),
                    None => {
                        acc.insert(k, ring.mul(ca, cb));
                    }
                }
            }
        }
        Self::from_map(ring, acc)
    }

    /// Truncated product of two homogeneous polynomials, both reduced.
    ///
    /// The output and `other` are indexed by `(k_x, k_y)` on a `q × q` grid;
    /// for each term of `self` only the grid cells of `other` whose product
    /// stays below `q` in all three coordinates are visited.
    fn mul_dense<R: Ring<Elem = E>>(
        &self,
        ring: &R,
        deg_self: u32,
        other: &Self,
        deg_other: u32,
        q: u32,
    ) -> Self {
        let qs = q as usize;
        let deg_out = deg_self + deg_other;
        let mut grid = vec![u32::MAX; qs * qs];
        for (i, (k, _)) in other.terms.iter().enumerate() {
            grid[k[0] as usize * qs + k[1] as usize] = i as u32;
        }
        let mut out: Vec<Option<E>> = vec![None; qs * qs];
        let db = deg_other as i64;
        for (ka, ca) in &self.terms {
            let x_end = (q - ka[0]).min(deg_other + 1);
            for bx in 0..x_end {
                // k_z of the product: ka[2] + db - bx - by < q
                let lo = (db + ka[2] as i64 + 1 - q as i64 - bx as i64).max(0) as u32;
                let hi = (q - ka[1]).min(deg_other - bx + 1);
                let row = bx as usize * qs;
                let out_row = (ka[0] + bx) as usize * qs + ka[1] as usize;
                for by in lo..hi {
                    let idx = grid[row + by as usize];
                    if idx == u32::MAX {
                        continue;
                    }
                    let cb = &other.terms[idx as usize].1;
                    let slot = &mut out[out_row + by as usize];
                    match slot {
                        Some(c) => ring.mul_add_assign(c, ca, cb),
                        None => *slot = Some(ring.mul(ca, cb)),
                    }
                }
            }
        }
        let terms = out
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| {
                let c = c.filter(|c| !ring.is_zero(c))?;
                let (kx, ky) = ((i / qs) as u32, (i % qs) as u32);
                Some(([kx, ky, deg_out - kx - ky], c))
            })
            .collect();
        MultiPoly { terms }
    }

    /// Full power by repeated squaring.
    pub fn pow<R: Ring<Elem = E>>(&self, ring: &R, n: u64) -> Self {
        self.pow_with(ring, n, |a, b| a.mul(ring, b))
    }

    /// `f^n mod m^[p^e]` by left-to-right square-and-multiply, reducing after
    /// every product.
    pub fn pow_truncated<R: Ring<Elem = E>>(
        &self,
        ring: &R,
        n: u64,
        ideal: &FrobeniusIdeal,
    ) -> Self {
        let base = self.reduce(ideal);
        Self::one(ring)
            .reduce(ideal)
            .pow_from(&base, n, |a, b| a.mul_truncated(ring, b, ideal))
    }

    fn pow_with<R: Ring<Elem = E>, M: Fn(&Self, &Self) -> Self>(
        &self,
        ring: &R,
        n: u64,
        mul: M,
    ) -> Self {
        Self::one(ring).pow_from(self, n, mul)
    }

    fn pow_from<M: Fn(&Self, &Self) -> Self>(self, base: &Self, n: u64, mul: M) -> Self {
        let mut acc = self;
        if n == 0 {
            return acc;
        }
        for bit in (0..u64::BITS - n.leading_zeros()).rev() {
            acc = mul(&acc, &acc);
            if (n >> bit) & 1 == 1 {
                acc = mul(&acc, base);
            }
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Membership in `m^[p^e]`, which for a monomial ideal is decided term
    /// by term.
    pub fn is_in_frobenius_power(&self, ideal: &FrobeniusIdeal) -> Membership {
        let witness = self
            .terms
            .iter()
            .find(|(k, _)| !ideal.contains(k))
            .map(|(k, _)| *k);
        Membership {
            member: witness.is_none(),
            witness,
        }
    }
}

impl MultiPoly<Fq> {
    /// `Σ c^p x^{p k}`, which equals `f^p` in characteristic `p`.
    pub fn frobenius(&self, field: &FiniteField) -> Self {
        let p = field.p() as u32;
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| ([k[0] * p, k[1] * p, k[2] * p], field.frobenius(*c)))
                .collect(),
        }
    }

    /// Sorted array of `{"k": [kx, ky, kz], "c": element}`.
    pub fn to_json(&self, field: &FiniteField) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| json!({ "k": k, "c": field.wrap(*c).to_json() }))
                .collect(),
        )
    }
}

pub fn multi_mul_truncated<R: Ring>(
    ring: &R,
    f: &MultiPoly<R::Elem>,
    g: &MultiPoly<R::Elem>,
    ideal: &FrobeniusIdeal,
) -> MultiPoly<R::Elem> {
    f.mul_truncated(ring, g, ideal)
}

pub fn multi_pow_truncated<R: Ring>(
    ring: &R,
    f: &MultiPoly<R::Elem>,
    n: u64,
    ideal: &FrobeniusIdeal,
) -> MultiPoly<R::Elem> {
    f.pow_truncated(ring, n, ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    /// `y^2 z - x(x - z)(x - a z)` written out by hand.
    fn legendre(field: &FiniteField, a: i64) -> MultiPoly<Fq> {
        MultiPoly::from_terms(
            field,
            [
                ([0, 2, 1], field.from_i64(1)),
                ([3, 0, 0], field.from_i64(-1)),
                ([2, 0, 1], field.from_i64(1 + a)),
                ([1, 0, 2], field.from_i64(-a)),
            ],
        )
    }

    #[test]
    fn ideal_construction() {
        assert_eq!(FrobeniusIdeal::new(3, 0), Err(Error::InvalidLevel(0)));
        let i = FrobeniusIdeal::new(7, 2).unwrap();
        assert_eq!(i.bound(), 49);
        assert!(i.contains(&[49, 0, 0]));
        assert!(!i.contains(&[48, 48, 48]));
    }

    #[test]
    fn coefficients_of_legendre_form() {
        let field = f(7);
        let fa = legendre(&field, 6);
        assert_eq!(fa.coefficient_of(&field, &[0, 2, 1]), Fq::ONE);
        assert_eq!(fa.coefficient_of(&field, &[3, 0, 0]), field.from_i64(-1));
        assert_eq!(fa.coefficient_of(&field, &[2, 1, 0]), Fq::ZERO);
        // 1 + a = 7 vanishes mod 7
        assert_eq!(fa.coefficient_of(&field, &[2, 0, 1]), Fq::ZERO);
        assert_eq!(fa.len(), 3);
        assert_eq!(fa.homogeneous_degree(), Some(3));
    }

    #[test]
    fn truncation_drops_boundary_terms() {
        let field = f(5);
        let ideal = FrobeniusIdeal::new(5, 1).unwrap();
        let x4 = MultiPoly::from_terms(&field, [([4, 0, 0], Fq::ONE)]);
        let x = MultiPoly::from_terms(&field, [([1, 0, 0], Fq::ONE)]);
        assert!(x4.mul_truncated(&field, &x, &ideal).is_zero());
        let fa = legendre(&field, 2);
        let one = MultiPoly::one(&field);
        assert_eq!(fa.mul_truncated(&field, &one, &ideal), fa.reduce(&ideal));
    }

    #[test]
    fn supersingular_square_vanishes_mod_three() {
        let field = f(3);
        let ideal = FrobeniusIdeal::new(3, 1).unwrap();
        let fa = legendre(&field, 2);
        assert!(fa.mul_truncated(&field, &fa, &ideal).is_zero());
        assert!(fa.pow_truncated(&field, 2, &ideal).is_zero());
        // the full square is nonzero; only truncation kills it
        let full = fa.mul(&field, &fa);
        assert!(!full.is_zero());
        assert_eq!(full.coefficient_of(&field, &[2, 2, 2]), Fq::ZERO);
    }

    #[test]
    fn powers_mod_seven() {
        let field = f(7);
        let ideal = FrobeniusIdeal::new(7, 1).unwrap();
        let fa = legendre(&field, 6);
        assert_eq!(fa.pow_truncated(&field, 0, &ideal), MultiPoly::one(&field));
        let f5 = fa.pow_truncated(&field, 5, &ideal);
        let m = f5.is_in_frobenius_power(&ideal);
        assert!(!m.member);
        let w = m.witness.unwrap();
        assert!(w.iter().all(|&x| x < 7));
        assert!(fa.pow_truncated(&field, 6, &ideal).is_zero());

        // brute force: expand fully, then filter
        let full = fa.pow(&field, 5).reduce(&ideal);
        assert_eq!(full, f5);
        assert!(fa.pow(&field, 6).reduce(&ideal).is_zero());
    }

    #[test]
    fn membership() {
        let field = f(5);
        let ideal = FrobeniusIdeal::new(5, 1).unwrap();
        assert!(MultiPoly::<Fq>::zero().is_in_frobenius_power(&ideal).member);
        let t = MultiPoly::from_terms(&field, [([5, 1, 0], Fq::ONE), ([0, 7, 3], Fq::ONE)]);
        assert_eq!(
            t.is_in_frobenius_power(&ideal),
            Membership {
                member: true,
                witness: None
            }
        );
        let t = MultiPoly::from_terms(
            &field,
            [
                ([5, 1, 0], Fq::ONE),
                ([2, 1, 0], Fq::ONE),
                ([1, 2, 0], Fq::ONE),
            ],
        );
        assert_eq!(t.is_in_frobenius_power(&ideal).witness, Some([1, 2, 0]));
    }

    #[test]
    fn frobenius_is_pth_power() {
        let field = FiniteField::quadratic(3).unwrap();
        let t = Fq::new(0, 1);
        let g = MultiPoly::from_terms(
            &field,
            [
                ([1, 0, 0], t),
                ([0, 1, 0], Fq::ONE),
                ([0, 0, 1], Fq::new(1, 1)),
            ],
        );
        assert_eq!(g.frobenius(&field), g.pow(&field, 3));
    }

    #[test]
    fn json_is_sorted() {
        let field = f(5);
        let g = MultiPoly::from_terms(
            &field,
            [([0, 2, 1], Fq::ONE), ([3, 0, 0], field.from_i64(-1))],
        );
        assert_eq!(
            g.to_json(&field).to_string(),
            r#"[{"c":{"c":[1],"deg":1,"p":5},"k":[0,2,1]},{"c":{"c":[4],"deg":1,"p":5},"k":[3,0,0]}]"#
        );
    }

    fn homogeneous(p: u64, deg: u32) -> impl Strategy<Value = Vec<(Exponent, i64)>> {
        prop::collection::vec(((0..=deg), (0..=deg), 0..p as i64), 0..10).prop_map(move |v| {
            v.into_iter()
                .filter(|(x, y, _)| x + y <= deg)
                .map(|(x, y, c)| ([x, y, deg - x - y], c))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn homogeneity_is_preserved(a in homogeneous(5, 4), b in homogeneous(5, 7), e in 1u32..3) {
            let field = f(5);
            let ideal = FrobeniusIdeal::new(5, e).unwrap();
            let to_poly = |v: &Vec<(Exponent, i64)>| {
                MultiPoly::from_terms(&field, v.iter().map(|(k, c)| (*k, field.from_i64(*c))))
            };
            let prod = to_poly(&a).mul_truncated(&field, &to_poly(&b), &ideal);
            prop_assert!(prod.terms().iter().all(|(k, _)| k.iter().sum::<u32>() == 11));
            prop_assert!(prod.terms().iter().all(|(k, _)| !ideal.contains(k)));
        }

        #[test]
        fn frobenius_compatibility(a in homogeneous(3, 3), n in 1u64..6) {
            // (g mod m^[p^e]) = 0  ⇒  (g^p mod m^[p^{e+1}]) = 0
            let field = f(3);
            let g = MultiPoly::from_terms(&field, a.iter().map(|(k, c)| (*k, field.from_i64(*c))));
            let i1 = FrobeniusIdeal::new(3, 1).unwrap();
            let i2 = FrobeniusIdeal::new(3, 2).unwrap();
            let gn = g.pow_truncated(&field, n, &i1);
            if gn.is_zero() {
                prop_assert!(g.pow_truncated(&field, 3 * n, &i2).is_zero());
            }
            prop_assert_eq!(gn.frobenius(&field), g.pow_truncated(&field, 3 * n, &i2));
        }
    }
}
