//! F-pure thresholds: the sequence `ν(p^e)`, the closed form for Legendre
//! cubics, and the cross-check between the two.
//!
//! `ν(p^e)` is the largest `N` with `f^N ∉ m^[p^e]`. Levels are computed in
//! order. Level `e + 1` starts from `f^{p ν(p^e)} mod m^[p^{e+1}]`, which is
//! the Frobenius image of `f^{ν(p^e)} mod m^[p^e]`, and then multiplies by
//! `f` until the product vanishes. The answer always lies in
//! `[p ν(p^e), p ν(p^e) + p - 1]`, so each level costs at most `p`
//! multiplications by a four-term polynomial.

use std::fmt::{self, Write as _};

use num_rational::Ratio;

use crate::deuring::n1;
use crate::elliptic::{
    classify, critical_coefficient, critical_exponent, LegendreCurve, Reduction,
};
use crate::error::{Error, Result};
use crate::ff::{FieldElement, FiniteField, Fq};
use crate::poly::{Exponent, FrobeniusIdeal, MultiPoly};

pub const DEFAULT_TERM_BUDGET: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NuOptions {
    /// Largest number of `(k_x, k_y)` slots a level may need, i.e. `p^{2e}`.
    pub term_budget: u64,
    /// Recompute `f^ν` and `f^{ν+1}` by square-and-multiply and compare.
    pub independent_check: bool,
}

impl Default for NuOptions {
    fn default() -> Self {
        NuOptions {
            term_budget: DEFAULT_TERM_BUDGET,
            independent_check: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuRecord {
    pub e: u32,
    pub nu: u64,
    /// Lexicographically smallest exponent surviving in `f^ν mod m^[p^e]`;
    /// `None` when `ν = 0`.
    pub witness: Option<Exponent>,
    /// `ν = p^e - 1`, the largest value possible for `f ∈ m`.
    pub saturated: bool,
    pub p_to_e: u64,
}

impl NuRecord {
    /// `ν / p^e`
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.nu, self.p_to_e)
    }

    /// `(ν + 1) / p^e`
    pub fn upper_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.nu + 1, self.p_to_e)
    }
}

/// A level's record together with `f^ν mod m^[p^e]`.
#[derive(Clone, Debug)]
pub struct NuLevel {
    pub record: NuRecord,
    pub power: MultiPoly<Fq>,
}

fn mismatch(msg: String) -> Error {
    Error::MismatchDetected(msg)
}

/// `ν(p^e)` for `e = 1..=e_max` of any polynomial without constant term.
pub fn nu_levels(
    field: &FiniteField,
    f: &MultiPoly<Fq>,
    e_max: u32,
    opts: &NuOptions,
) -> Result<Vec<NuLevel>> {
    if f.is_zero() || f.terms().iter().any(|(k, _)| k.iter().all(|&x| x == 0)) {
        return Err(mismatch(
            "ν is only defined for nonzero f in the maximal ideal".into(),
        ));
    }
    let p = field.p();
    let mut levels: Vec<NuLevel> = Vec::with_capacity(e_max as usize);
    for e in 1..=e_max {
        let ideal = FrobeniusIdeal::new(p, e)?;
        if ideal.slots() > opts.term_budget as u128 {
            return Err(Error::ResourceCap {
                needed: ideal.slots(),
                budget: opts.term_budget,
            });
        }
        let q = ideal.bound() as u64;
        let (start_n, start) = match levels.last() {
            None => (0, MultiPoly::one(field)),
            Some(prev) => (p * prev.record.nu, prev.power.frobenius(field)),
        };
        if start.is_zero() {
            return Err(mismatch(format!("f^{start_n} vanishes mod m^[{p}^{e}]")));
        }
        let mut n = start_n;
        let mut power = start;
        loop {
            let next = power.mul_truncated(field, f, &ideal);
            if next.is_zero() {
                break;
            }
            n += 1;
            power = next;
            if n >= start_n + p || n >= q {
                return Err(mismatch(format!(
                    "f^{n} survives mod m^[{p}^{e}], outside the bracket [{start_n}, {}]",
                    start_n + p - 1
                )));
            }
        }
        if opts.independent_check {
            if f.pow_truncated(field, n, &ideal) != power {
                return Err(mismatch(format!(
                    "square-and-multiply disagrees with the Frobenius lift for f^{n} mod m^[{p}^{e}]"
                )));
            }
            if !f.pow_truncated(field, n + 1, &ideal).is_zero() {
                return Err(mismatch(format!(
                    "square-and-multiply finds f^{} outside m^[{p}^{e}]",
                    n + 1
                )));
            }
        }
        let witness = if n == 0 {
            None
        } else {
            power.is_in_frobenius_power(&ideal).witness
        };
        let record = NuRecord {
            e,
            nu: n,
            witness,
            saturated: n == q - 1,
            p_to_e: q,
        };
        levels.push(NuLevel { record, power });
    }
    Ok(levels)
}

/// `ν(p^e)` for a Legendre curve.
pub fn nu(curve: &LegendreCurve, e: u32, opts: &NuOptions) -> Result<NuRecord> {
    if e == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let mut levels = nu_levels(curve.field(), curve.poly(), e, opts)?;
    Ok(levels.pop().expect("e ≥ 1 levels").record)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FtClass {
    Ordinary,
    Supersingular,
    Char2,
}

impl From<Reduction> for FtClass {
    fn from(r: Reduction) -> Self {
        match r {
            Reduction::Ordinary => FtClass::Ordinary,
            Reduction::Supersingular => FtClass::Supersingular,
        }
    }
}

impl fmt::Display for FtClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FtClass::Ordinary => "ordinary",
            FtClass::Supersingular => "supersingular",
            FtClass::Char2 => "char2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    BruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::BruteForce => "brute-force",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FtResult {
    /// Exact value for the closed form; `ν(p^e_max) / p^e_max` for brute force.
    pub ft: Ratio<u64>,
    pub classification: FtClass,
    pub table: Vec<NuRecord>,
    pub method: Method,
    /// Brute force only: `ft` is a strict lower bound and this is an upper
    /// bound, `(ν + 1) / p^e_max`.
    pub upper: Option<Ratio<u64>>,
}

impl FtResult {
    pub fn is_lower_bound(&self) -> bool {
        self.method == Method::BruteForce
    }
}

fn curve_class(curve: &LegendreCurve) -> Result<FtClass> {
    if curve.p() == 2 {
        Ok(FtClass::Char2)
    } else {
        Ok(classify(curve)?.tag.into())
    }
}

/// `1` for ordinary curves, `1 - 1/p` for supersingular ones, `1/2` in
/// characteristic 2.
pub fn ft_closed_form(curve: &LegendreCurve) -> Result<FtResult> {
    let p = curve.p();
    let classification = curve_class(curve)?;
    let ft = match classification {
        FtClass::Ordinary => Ratio::from_integer(1),
        FtClass::Supersingular => Ratio::new(p - 1, p),
        FtClass::Char2 => Ratio::new(1, 2),
    };
    Ok(FtResult {
        ft,
        classification,
        table: Vec::new(),
        method: Method::ClosedForm,
        upper: None,
    })
}

/// True when `p ν(p^e) ≤ ν(p^{e+1}) ≤ p ν(p^e) + p - 1` along the table.
pub fn bracketing_holds(table: &[NuRecord], p: u64) -> bool {
    table
        .windows(2)
        .all(|w| p * w[0].nu <= w[1].nu && w[1].nu <= p * w[0].nu + p - 1)
}

fn estimate_from_levels(curve: &LegendreCurve, levels: &[NuLevel]) -> Result<FtResult> {
    let table: Vec<NuRecord> = levels.iter().map(|l| l.record.clone()).collect();
    if table.windows(2).any(|w| w[1].ratio() < w[0].ratio()) {
        return Err(mismatch(format!("ν(p^e)/p^e decreases along {table:?}")));
    }
    let last = table.last().expect("at least one level");
    Ok(FtResult {
        ft: last.ratio(),
        classification: curve_class(curve)?,
        upper: Some(last.upper_ratio()),
        method: Method::BruteForce,
        table,
    })
}

/// `ν(p^e) / p^e` for `e = 1..=e_max`, converging to the threshold from
/// below.
pub fn ft_estimate(curve: &LegendreCurve, e_max: u32, opts: &NuOptions) -> Result<FtResult> {
    if e_max == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let levels = nu_levels(curve.field(), curve.poly(), e_max, opts)?;
    estimate_from_levels(curve, &levels)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckRow {
    pub record: NuRecord,
    pub expected_nu: u64,
    /// `ν / p^e < FT ≤ (ν + 1) / p^e` for the closed-form `FT`.
    pub bounds_hold: bool,
    /// The explicit surviving monomial used in the lower-bound argument.
    pub certificate: Option<Exponent>,
    /// Its coefficient in the computed `f^ν mod m^[p^e]`.
    pub witness_coefficient: Option<FieldElement>,
    /// `C(N, n) H{m}(a)` for the same monomial.
    pub predicted_coefficient: Option<FieldElement>,
}

impl CrossCheckRow {
    pub fn passed(&self) -> bool {
        let witness_ok = match (self.witness_coefficient, self.predicted_coefficient) {
            (Some(got), Some(pred)) => !got.is_zero() && got == pred,
            (None, None) => self.certificate.is_none(),
            _ => false,
        };
        self.record.nu == self.expected_nu && self.bounds_hold && witness_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub a: FieldElement,
    pub closed: FtResult,
    pub estimate: FtResult,
    pub rows: Vec<CrossCheckRow>,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CrossCheckRow::passed)
            && bracketing_holds(&self.estimate.table, self.a.field().p())
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        let p = self.a.field().p();
        let _ = writeln!(
            s,
            "p={p} a={} class={} closed FT={}",
            self.a, self.closed.classification, self.closed.ft
        );
        for r in &self.rows {
            let kind = if r.passed() {
                "ok"
            } else if !r.bounds_hold {
                "bounds violated"
            } else if r.record.nu != r.expected_nu {
                "bounds hold but ν differs"
            } else {
                "witness coefficient mismatch"
            };
            let _ = writeln!(
                s,
                "  e={} ν={} expected={} witness={:?} certificate={:?} coeff={:?} predicted={:?}: {kind}",
                r.record.e,
                r.record.nu,
                r.expected_nu,
                r.record.witness,
                r.certificate,
                r.witness_coefficient.map(|c| c.to_string()),
                r.predicted_coefficient.map(|c| c.to_string()),
            );
        }
        s
    }
}

/// The split `N = n + m` and monomial `x^{2m} y^{2n} z^{n+m}` that certify
/// `f^ν ∉ m^[p^e]` at the expected `ν`.
fn certificate_split(class: FtClass, p: u64, e: u32) -> Option<(u64, u64, u64)> {
    let q = p.pow(e);
    match class {
        FtClass::Ordinary => {
            let ne = (q - 1) / 2;
            Some((q - 1, ne, ne))
        }
        FtClass::Supersingular => {
            let pe1 = p.pow(e - 1);
            let n = n1(p) * pe1;
            let m = (n1(p) - 1) * pe1 + pe1 - 1;
            Some((n + m, n, m))
        }
        FtClass::Char2 if e >= 2 => {
            let n = 1u64 << (e - 2);
            Some((2 * n - 1, n, n - 1))
        }
        FtClass::Char2 => None,
    }
}

fn expected_nu(class: FtClass, p: u64, e: u32) -> u64 {
    let q = p.pow(e);
    match class {
        FtClass::Ordinary => q - 1,
        FtClass::Supersingular => q - q / p - 1,
        FtClass::Char2 => q / 2 - 1,
    }
}

/// Compares the brute-force `ν(p^e)` with the values forced by the closed
/// form, and checks the explicit witness monomial at every level.
pub fn cross_check(
    curve: &LegendreCurve,
    e_max: u32,
    opts: &NuOptions,
) -> Result<CrossCheckReport> {
    if e_max == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let closed = ft_closed_form(curve)?;
    let levels = nu_levels(curve.field(), curve.poly(), e_max, opts)?;
    let estimate = estimate_from_levels(curve, &levels)?;
    let field = *curve.field();
    let p = field.p();
    let rows = levels
        .iter()
        .map(|level| {
            let rec = &level.record;
            let split = certificate_split(closed.classification, p, rec.e);
            let certificate = split.map(|(_, n, m)| critical_exponent(n, m));
            let (witness_coefficient, predicted_coefficient) = match split {
                Some((total, n, m)) if total == rec.nu => {
                    let k = critical_exponent(n, m);
                    let got = field.wrap(level.power.coefficient_of(&field, &k));
                    (
                        Some(got),
                        Some(critical_coefficient(total, n, m, curve.a())?),
                    )
                }
                _ => (None, None),
            };
            Ok(CrossCheckRow {
                record: rec.clone(),
                expected_nu: expected_nu(closed.classification, p, rec.e),
                bounds_hold: rec.ratio() < closed.ft && closed.ft <= rec.upper_ratio(),
                certificate,
                witness_coefficient,
                predicted_coefficient,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = CrossCheckReport {
        a: *curve.a(),
        closed,
        estimate,
        rows,
    };
    if !report.passed() {
        return Err(mismatch(report.dump()));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundPredicates {
    /// Some term has every exponent below `p^e`: `N / p^e < FT`.
    pub lower_bound_holds: bool,
    /// Every term has an exponent `≥ p^e`: `FT ≤ N / p^e`.
    pub upper_bound_holds: bool,
    /// Every term has `max k ≥ N`, with equality only at `[N, N, N]`.
    pub homogeneous_floor_holds: bool,
}

/// Reads off the threshold bounds certified by a computed power `f^N` of a
/// homogeneous cubic, reduced or not. `N` is recovered as the degree / 3.
pub fn bound_predicates(f_power: &MultiPoly<Fq>, p: u64, e: u32) -> Result<BoundPredicates> {
    let ideal = FrobeniusIdeal::new(p, e)?;
    let membership = f_power.is_in_frobenius_power(&ideal);
    let homogeneous_floor_holds = match f_power.homogeneous_degree() {
        None => f_power.is_zero(),
        Some(d) if d % 3 != 0 => false,
        Some(d) => {
            let n = d / 3;
            f_power.terms().iter().all(|(k, _)| {
                let max = *k.iter().max().expect("three exponents");
                max > n || (max == n && *k == [n, n, n])
            })
        }
    };
    Ok(BoundPredicates {
        lower_bound_holds: !membership.member,
        upper_bound_holds: membership.member,
        homogeneous_floor_holds,
    })
}
