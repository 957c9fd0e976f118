//! Prime fields `F_p` and their quadratic extensions `F_{p^2}`.
//!
//! Moduli are restricted to `p < 2^32` so that a product of two reduced
//! residues always fits in a `u64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Default cap on the number of elements `enumerate` will produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 32;

const MAX_MODULUS: u64 = 1 << 32;

fn mul_mod_u128(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u128(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n % w == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod_u128(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime field `F_p`. Elements are canonical residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&p) {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::CompositeModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn pow(&self, a: u64, exp: u64) -> u64 {
        pow_mod_u128(a, exp, self.p)
    }

    /// Least quadratic non-residue modulo an odd prime.
    pub fn least_nonresidue(&self) -> Option<u64> {
        if self.p == 2 {
            return None;
        }
        (2..self.p).find(|&d| self.pow(d, (self.p - 1) / 2) == self.p - 1)
    }
}

pub fn make_prime_field(p: u64) -> Result<PrimeField> {
    PrimeField::new(p)
}

/// `F_{p^2} = F_p[t] / (t^2 - s1 t - s0)`.
///
/// For odd `p` the modulus is `t^2 - d` with `d` the least non-residue, for
/// `p = 2` it is `t^2 + t + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExtField {
    base: PrimeField,
    /// `t^2 = sq[0] + sq[1] t`
    sq: [u64; 2],
    /// `t^p`, cached for the Frobenius map.
    t_to_p: [u64; 2],
}

impl QuadExtField {
    /// Quadratic extension of `F_p` for odd `p`.
    pub fn new(p: u64) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if p == 2 {
            return Err(Error::UnsupportedCharacteristic(2));
        }
        let d = base
            .least_nonresidue()
            .expect("odd prime has a non-residue");
        Ok(Self::with_square(base, [d, 0]))
    }

    /// `F_4 = F_2[t] / (t^2 + t + 1)`.
    pub fn char_two() -> Self {
        Self::with_square(PrimeField { p: 2 }, [1, 1])
    }

    fn with_square(base: PrimeField, sq: [u64; 2]) -> Self {
        let mut field = QuadExtField {
            base,
            sq,
            t_to_p: [0, 1],
        };
        let t = Fq { c0: 0, c1: 1 };
        let tp = field.pow(t, base.p);
        field.t_to_p = [tp.c0, tp.c1];
        field
    }

    pub fn p(&self) -> u64 {
        self.base.p
    }

    /// Coefficients `[m0, m1, 1]` of the monic modulus `m0 + m1 t + t^2`.
    pub fn modulus(&self) -> [u64; 3] {
        let f = &self.base;
        [f.sub(0, self.sq[0]), f.sub(0, self.sq[1]), 1]
    }

    #[inline]
    fn mul(&self, a: Fq, b: Fq) -> Fq {
        let f = &self.base;
        let hi = f.mul(a.c1, b.c1);
        let c0 = f.add(f.mul(a.c0, b.c0), f.mul(hi, self.sq[0]));
        let c1 = f.add(
            f.add(f.mul(a.c0, b.c1), f.mul(a.c1, b.c0)),
            f.mul(hi, self.sq[1]),
        );
        Fq { c0, c1 }
    }

    fn pow(&self, a: Fq, mut exp: u64) -> Fq {
        let mut base = a;
        let mut acc = Fq { c0: 1, c1: 0 };
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

pub fn make_quadratic_extension(p: u64) -> Result<QuadExtField> {
    QuadExtField::new(p)
}

/// Bare coordinates `c0 + c1 t` of an element of `F_p` (with `c1 = 0`) or
/// `F_{p^2}`. Only meaningful relative to a [`FiniteField`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq {
    pub c0: u64,
    pub c1: u64,
}

impl Fq {
    pub const ZERO: Fq = Fq { c0: 0, c1: 0 };
    pub const ONE: Fq = Fq { c0: 1, c1: 0 };

    pub fn new(c0: u64, c1: u64) -> Self {
        Fq { c0, c1 }
    }
}

/// Either a prime field or a quadratic extension; the coefficient ring for
/// every curve computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiniteField {
    Prime(PrimeField),
    Quad(QuadExtField),
}

impl From<PrimeField> for FiniteField {
    fn from(f: PrimeField) -> Self {
        FiniteField::Prime(f)
    }
}

impl From<QuadExtField> for FiniteField {
    fn from(f: QuadExtField) -> Self {
        FiniteField::Quad(f)
    }
}

impl FiniteField {
    pub fn prime(p: u64) -> Result<Self> {
        PrimeField::new(p).map(Into::into)
    }

    /// `F_{p^2}` for any prime, including `F_4`.
    pub fn quadratic(p: u64) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if base.p == 2 {
            Ok(QuadExtField::char_two().into())
        } else {
            QuadExtField::new(p).map(Into::into)
        }
    }

    pub fn with_degree(p: u64, degree: u32) -> Result<Self> {
        match degree {
            1 => Self::prime(p),
            2 => Self::quadratic(p),
            d => Err(Error::ParseElement(format!(
                "unsupported extension degree {d}"
            ))),
        }
    }

    pub fn p(&self) -> u64 {
        self.base().p
    }

    pub fn base(&self) -> PrimeField {
        match self {
            FiniteField::Prime(f) => *f,
            FiniteField::Quad(q) => q.base,
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            FiniteField::Prime(_) => 1,
            FiniteField::Quad(_) => 2,
        }
    }

    pub fn size(&self) -> u128 {
        (self.p() as u128).pow(self.degree())
    }

    pub fn prime_subfield(&self) -> FiniteField {
        FiniteField::Prime(self.base())
    }

    /// Wraps raw coordinates after a range check.
    pub fn element(&self, c0: u64, c1: u64) -> Result<FieldElement> {
        let p = self.p();
        if c0 >= p || c1 >= p || (self.degree() == 1 && c1 != 0) {
            return Err(Error::ParseElement(format!(
                "({c0}, {c1}) is not a canonical element of a field of size {}",
                self.size()
            )));
        }
        Ok(FieldElement {
            field: *self,
            value: Fq { c0, c1 },
        })
    }

    pub fn from_u64(&self, n: u64) -> FieldElement {
        FieldElement {
            field: *self,
            value: Fq::new(n % self.p(), 0),
        }
    }

    pub fn wrap(&self, value: Fq) -> FieldElement {
        debug_assert!(value.c0 < self.p() && value.c1 < self.p());
        FieldElement {
            field: *self,
            value,
        }
    }

    /// The generator `t` of a quadratic extension.
    pub fn generator(&self) -> Option<FieldElement> {
        match self {
            FiniteField::Prime(_) => None,
            FiniteField::Quad(_) => Some(self.wrap(Fq::new(0, 1))),
        }
    }

    /// `x ↦ x^p`.
    #[inline]
    pub fn frobenius(&self, a: Fq) -> Fq {
        match self {
            FiniteField::Prime(_) => a,
            FiniteField::Quad(q) => {
                let f = &q.base;
                let c0 = f.add(a.c0, f.mul(a.c1, q.t_to_p[0]));
                let c1 = f.mul(a.c1, q.t_to_p[1]);
                Fq { c0, c1 }
            }
        }
    }

    /// Maps an element of `from` into `self`. Only the inclusions
    /// `F_p ⊆ F_p` and `F_p ⊆ F_{p^2}` are supported.
    pub fn embed(&self, x: &FieldElement) -> Result<Fq> {
        if x.field == *self {
            return Ok(x.value);
        }
        if x.field.p() == self.p() && x.field.degree() == 1 {
            return Ok(x.value);
        }
        Err(Error::FieldMismatch)
    }

    /// All elements, each once, ordered lexicographically on `(c0, c1)`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<FieldElement>> {
        let size = self.size();
        if size > cap as u128 {
            return Err(Error::FieldTooLarge { size, cap });
        }
        let p = self.p();
        let out = match self.degree() {
            1 => (0..p).map(|c0| self.wrap(Fq::new(c0, 0))).collect(),
            _ => (0..p)
                .flat_map(|c0| (0..p).map(move |c1| Fq::new(c0, c1)))
                .map(|v| self.wrap(v))
                .collect(),
        };
        Ok(out)
    }

    /// Parses `c0`, `c0+c1t`, `c1t` or `t`.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let bad = || Error::ParseElement(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let num = |t: &str| -> Result<u64> { t.parse::<u64>().map_err(|_| bad()) };
        let (c0, c1) = match compact.strip_suffix('t') {
            None => (num(&compact)?, 0),
            Some(rest) => match rest.rsplit_once('+') {
                Some((a, b)) => (num(a)?, if b.is_empty() { 1 } else { num(b)? }),
                None => (0, if rest.is_empty() { 1 } else { num(rest)? }),
            },
        };
        self.element(c0, c1).map_err(|_| bad())
    }
}

impl Ring for FiniteField {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq::ZERO
    }
    fn one(&self) -> Fq {
        Fq::ONE
    }
    #[inline]
    fn is_zero(&self, a: &Fq) -> bool {
        a.c0 == 0 && a.c1 == 0
    }
    #[inline]
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        let f = self.base();
        Fq {
            c0: f.add(a.c0, b.c0),
            c1: f.add(a.c1, b.c1),
        }
    }
    #[inline]
    fn neg(&self, a: &Fq) -> Fq {
        let f = self.base();
        Fq {
            c0: f.sub(0, a.c0),
            c1: f.sub(0, a.c1),
        }
    }
    #[inline]
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        let f = self.base();
        Fq {
            c0: f.sub(a.c0, b.c0),
            c1: f.sub(a.c1, b.c1),
        }
    }
    #[inline]
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        match self {
            FiniteField::Prime(f) => Fq {
                c0: f.mul(a.c0, b.c0),
                c1: 0,
            },
            FiniteField::Quad(q) => q.mul(*a, *b),
        }
    }
    #[inline]
    fn add_assign(&self, acc: &mut Fq, b: &Fq) {
        *acc = self.add(acc, b);
    }
    fn from_bigint(&self, n: &BigInt) -> Fq {
        let r = n.mod_floor(&BigInt::from(self.p()));
        Fq::new(r.to_u64().expect("reduced residue fits u64"), 0)
    }
    fn from_i64(&self, n: i64) -> Fq {
        Fq::new(self.base().reduce_i64(n), 0)
    }
    fn characteristic(&self) -> u64 {
        self.p()
    }
    fn is_field(&self) -> bool {
        true
    }
    fn inv(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            return None;
        }
        let q = self.size() as u64;
        Some(self.pow(a, q - 2))
    }
    fn pow(&self, a: &Fq, exp: u64) -> Fq {
        match self {
            FiniteField::Prime(f) => Fq::new(f.pow(a.c0, exp), 0),
            FiniteField::Quad(q) => q.pow(*a, exp),
        }
    }
}

/// An element together with its parent field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FiniteField,
    value: Fq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn value(&self) -> Fq {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.value)
    }

    pub fn is_one(&self) -> bool {
        self.value == Fq::ONE
    }

    /// True when the element lies in the prime subfield.
    pub fn is_prime_subfield(&self) -> bool {
        self.value.c1 == 0
    }

    pub fn arith(&self, op: ArithOp, rhs: &FieldElement) -> Result<FieldElement> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        let f = &self.field;
        let (a, b) = (&self.value, &rhs.value);
        let value = match op {
            ArithOp::Add => f.add(a, b),
            ArithOp::Sub => f.sub(a, b),
            ArithOp::Mul => f.mul(a, b),
            ArithOp::Div => {
                let inv = f.inv(b).ok_or(Error::DivisionByZero)?;
                f.mul(a, &inv)
            }
        };
        Ok(self.field.wrap(value))
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<FieldElement> {
        self.arith(ArithOp::Div, rhs)
    }

    pub fn inv(&self) -> Result<FieldElement> {
        self.field
            .inv(&self.value)
            .map(|v| self.field.wrap(v))
            .ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        self.field.wrap(self.field.pow(&self.value, exp))
    }

    pub fn frobenius(&self) -> FieldElement {
        self.field.wrap(self.field.frobenius(self.value))
    }

    /// `{"p": p, "deg": 1|2, "c": [c0] | [c0, c1]}`
    pub fn to_json(&self) -> Value {
        let c = match self.field.degree() {
            1 => json!([self.value.c0]),
            _ => json!([self.value.c0, self.value.c1]),
        };
        json!({ "p": self.field.p(), "deg": self.field.degree(), "c": c })
    }

    pub fn from_json(v: &Value) -> Result<FieldElement> {
        let bad = || Error::ParseElement(v.to_string());
        let p = v.get("p").and_then(Value::as_u64).ok_or_else(bad)?;
        let deg = v.get("deg").and_then(Value::as_u64).ok_or_else(bad)?;
        let c = v.get("c").and_then(Value::as_array).ok_or_else(bad)?;
        if c.len() as u64 != deg {
            return Err(bad());
        }
        let coord = |i: usize| c.get(i).map_or(Some(0), Value::as_u64).ok_or_else(bad);
        let field = FiniteField::with_degree(p, deg as u32)?;
        field.element(coord(0)?, coord(1)?)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field.degree() {
            1 => write!(f, "{}", self.value.c0),
            _ => write!(f, "{}+{}t", self.value.c0, self.value.c1),
        }
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait for FieldElement {
            type Output = FieldElement;

            /// Panics if the operands belong to different fields.
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.arith($op, &rhs).expect("field mismatch")
            }
        }
    };
}

panicking_op!(Add, add, ArithOp::Add);
panicking_op!(Sub, sub, ArithOp::Sub);
panicking_op!(Mul, mul, ArithOp::Mul);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        self.field.wrap(self.field.neg(&self.value))
    }
}
