//! Deuring polynomials `H{n}(λ) = Σ C(n, i)^2 λ^i` and symbolic checks of
//! their identities over `Q` and `F_p`.
//!
//! Every check compares polynomials coefficient by coefficient.

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::ff::{FiniteField, Fq};
use crate::lucas;
use crate::poly::{PolyRing, UniPoly};
use crate::ring::{Rationals, Ring};

/// `n_1 = (p - 1) / 2`
pub fn n1(p: u64) -> u64 {
    (p - 1) / 2
}

/// `n_e = (p^e - 1) / 2`
pub fn n_e(p: u64, e: u32) -> u64 {
    (p.pow(e) - 1) / 2
}

/// `N_e = p^e - 1`
pub fn big_n_e(p: u64, e: u32) -> u64 {
    p.pow(e) - 1
}

fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::from(1u32);
    row.push(c.clone());
    for i in 0..n {
        c = c * (n - i) / (i + 1);
        row.push(c.clone());
    }
    row
}

/// `H{n}` over any ring, from exact integer binomials.
pub fn deuring_poly<R: Ring>(n: u64, ring: &R) -> UniPoly<R::Elem> {
    let coeffs = binomial_row(n)
        .into_iter()
        .map(|c| ring.from_bigint(&BigInt::from(&c * &c)))
        .collect();
    PolyRing::new(ring.clone()).from_coeffs(coeffs)
}

/// One factor `H{digit}^{exponent}` of the Lucas factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LucasFactor {
    pub digit: u64,
    /// `p^j` for digit position `j`.
    pub exponent: u64,
}

fn odd_prime_field(p: u64) -> Result<FiniteField> {
    let field = FiniteField::prime(p)?;
    if p == 2 {
        return Err(Error::UnsupportedCharacteristic(2));
    }
    Ok(field)
}

/// `Π H{b_j}^{p^j}` over `F_p`. The `p^j`-th power is taken as
/// `H{b_j}(λ^{p^j})`, which is the same polynomial because the
/// coefficients lie in `F_p`.
pub fn lucas_product(factors: &[LucasFactor], field: &FiniteField) -> UniPoly<Fq> {
    let ring = PolyRing::new(*field);
    factors.iter().fold(ring.one(), |acc, f| {
        let h = deuring_poly(f.digit, field);
        ring.mul(&acc, &ring.inflate(&h, f.exponent as usize))
    })
}

/// Writes `H{n} = H{b_0} H{b_1}^p ⋯ H{b_e}^{p^e}` over `F_p` from the
/// base-`p` digits of `n`, and checks the product against the direct
/// construction before returning.
pub fn deuring_lucas_factorization(n: u64, p: u64) -> Result<Vec<LucasFactor>> {
    let field = FiniteField::prime(p)?;
    let mut exponent = 1u64;
    let factors: Vec<LucasFactor> = lucas::digits(n, p)
        .digits()
        .iter()
        .map(|&digit| {
            let f = LucasFactor { digit, exponent };
            exponent = exponent.saturating_mul(p);
            f
        })
        .collect();
    if lucas_product(&factors, &field) != deuring_poly(n, &field) {
        return Err(Error::FactorizationMismatch { n, p });
    }
    Ok(factors)
}

/// `H{p-1} ≡ (λ - 1)^{p-1}` over `F_p`.
pub fn check_p_minus_one(p: u64) -> Result<bool> {
    let field = FiniteField::prime(p)?;
    let ring = PolyRing::new(field);
    let lhs = deuring_poly(p - 1, &field);
    let rhs = ring.pow(&ring.from_i64s(&[-1, 1]), p - 1);
    Ok(lhs == rhs)
}

/// `(1 - λ) H{n-1} + 2n F = H{n}` over `Q`, with `F` the antiderivative of
/// `H{n-1}` vanishing at 0. Returns false for `n = 0`.
pub fn check_pascal_connection(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let ring = PolyRing::new(Rationals);
    let prev = deuring_poly(n - 1, &Rationals);
    let f = ring
        .antiderivative(&prev)
        .expect("every index is invertible over Q");
    let lhs = ring.add(
        &ring.mul(&ring.from_i64s(&[1, -1]), &prev),
        &ring.scale(&f, &Rationals.from_i64(2 * n as i64)),
    );
    lhs == deuring_poly(n, &Rationals)
}

/// Antiderivative of `H{n_1 - 1}` over `F_p`; its degree `n_1 ≤ p - 2` keeps
/// every index invertible.
fn hasse_antiderivative(ring: &PolyRing<FiniteField>, p: u64) -> UniPoly<Fq> {
    let prev = deuring_poly(n1(p) - 1, ring.base());
    ring.antiderivative(&prev)
        .expect("degree n_1 - 1 < p - 1 keeps indices invertible")
}

/// `4λ(λ - 1) F'' + 8λ F' + F = 0` over `F_p` for `F` the antiderivative of
/// `H{n_1 - 1}`.
pub fn check_ode(p: u64) -> Result<bool> {
    let field = odd_prime_field(p)?;
    let ring = PolyRing::new(field);
    let f = hasse_antiderivative(&ring, p);
    let f1 = ring.derivative(&f);
    let f2 = ring.derivative(&f1);
    let lhs = [
        ring.mul(&ring.from_i64s(&[0, -4, 4]), &f2),
        ring.mul(&ring.from_i64s(&[0, 8]), &f1),
        f,
    ]
    .iter()
    .fold(ring.zero(), |acc, t| ring.add(&acc, t));
    Ok(lhs.is_zero())
}

/// Outcome of [`check_no_repeated_roots`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RepeatedRootReport {
    /// `gcd(F, F') = 1`
    pub antiderivative_squarefree: bool,
    /// `gcd(H{n_1}, H{n_1}') = 1`
    pub hasse_squarefree: bool,
    /// `H{n_1}(0) = 1`, `H{n_1}(1) = C(2n_1, n_1) ≠ 0` and
    /// `H{n_1 - 1}(1) = C(p - 3, n_1 - 1) ≠ 0`.
    pub endpoints: bool,
    /// `4λ(1 - λ) H'' + 4(1 - 2λ) H' - H = 0` for `H = H{n_1}`.
    pub picard_fuchs: bool,
}

impl RepeatedRootReport {
    pub fn flags(&self) -> (bool, bool) {
        (self.antiderivative_squarefree, self.hasse_squarefree)
    }

    pub fn all(&self) -> bool {
        self.antiderivative_squarefree
            && self.hasse_squarefree
            && self.endpoints
            && self.picard_fuchs
    }
}

pub fn check_no_repeated_roots(p: u64) -> Result<RepeatedRootReport> {
    let field = odd_prime_field(p)?;
    let ring = PolyRing::new(field);
    let m = n1(p);
    let one = ring.one();

    let f = hasse_antiderivative(&ring, p);
    let antiderivative_squarefree = ring.gcd(&f, &ring.derivative(&f))? == one;

    let h = deuring_poly(m, &field);
    let h1 = ring.derivative(&h);
    let h2 = ring.derivative(&h1);
    let hasse_squarefree = ring.gcd(&h, &h1)? == one;

    let at = |g: &UniPoly<Fq>, x: u64| ring.eval(g, &Fq::new(x, 0));
    let binom = |n: u64, k: u64| Fq::new(lucas::binomial_mod_p(n, k, p), 0);
    let prev = deuring_poly(m - 1, &field);
    let h_at_1 = at(&h, 1);
    let prev_at_1 = at(&prev, 1);
    let endpoints = at(&h, 0) == Fq::ONE
        && h_at_1 == binom(2 * m, m)
        && !field.is_zero(&h_at_1)
        && prev_at_1 == binom(p - 3, m - 1)
        && !field.is_zero(&prev_at_1);

    let pf = [
        ring.mul(&ring.from_i64s(&[0, 4, -4]), &h2),
        ring.mul(&ring.from_i64s(&[4, -8]), &h1),
        ring.neg(&h),
    ]
    .iter()
    .fold(ring.zero(), |acc, t| ring.add(&acc, t));

    Ok(RepeatedRootReport {
        antiderivative_squarefree,
        hasse_squarefree,
        endpoints,
        picard_fuchs: pf.is_zero(),
    })
}

/// `gcd(H{n_1}, H{n_1 - 1}) = 1` over `F_p`, cross-checked against
/// `gcd(F, F')`: both generate the same ideal.
pub fn check_shared_roots(p: u64) -> Result<bool> {
    let field = odd_prime_field(p)?;
    let ring = PolyRing::new(field);
    let m = n1(p);
    let direct = ring.gcd(&deuring_poly(m, &field), &deuring_poly(m - 1, &field))?;
    let f = hasse_antiderivative(&ring, p);
    let via_antiderivative = ring.gcd(&f, &ring.derivative(&f))?;
    Ok(direct == ring.one() && direct == via_antiderivative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Integers;

    fn fp(p: u64) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    #[test]
    fn small_deuring_polynomials() {
        let z = PolyRing::new(Integers);
        assert_eq!(deuring_poly(2, &Integers), z.from_i64s(&[1, 4, 1]));
        assert_eq!(deuring_poly(0, &Integers), z.one());
        let r3 = PolyRing::new(fp(3));
        assert_eq!(deuring_poly(4, &fp(3)), r3.from_i64s(&[1, 1, 0, 1, 1]));
    }

    #[test]
    fn degree_and_palindrome() {
        for n in 0..40u64 {
            let h = deuring_poly(n, &Integers);
            assert_eq!(h.degree(), Some(n as usize));
            let c = h.coeffs();
            assert!((0..=n as usize).all(|i| c[i] == c[n as usize - i]));
        }
        for p in [3u64, 5, 7, 11, 13, 101] {
            assert_eq!(deuring_poly(n1(p), &fp(p)).degree(), Some(n1(p) as usize));
        }
    }

    #[test]
    fn lucas_factorization_examples() {
        assert_eq!(
            deuring_lucas_factorization(4, 3).unwrap(),
            vec![
                LucasFactor {
                    digit: 1,
                    exponent: 1
                },
                LucasFactor {
                    digit: 1,
                    exponent: 3
                }
            ]
        );
        assert_eq!(
            deuring_lucas_factorization(5, 7).unwrap(),
            vec![LucasFactor {
                digit: 5,
                exponent: 1
            }]
        );
        for p in [3u64, 5, 7] {
            for e in 1..4 {
                let factors = deuring_lucas_factorization(n_e(p, e), p).unwrap();
                assert!(factors.iter().all(|f| f.digit == n1(p)));
                assert_eq!(factors.len(), e as usize);
            }
        }
    }

    #[test]
    fn inflation_agrees_with_true_powers() {
        // H{b}^{p^j} computed by repeated multiplication, not by Frobenius
        for p in [3u64, 5] {
            let field = fp(p);
            let ring = PolyRing::new(field);
            for b in 0..p {
                let h = deuring_poly(b, &field);
                for j in 0..3u32 {
                    let pj = p.pow(j);
                    assert_eq!(ring.pow(&h, pj), ring.inflate(&h, pj as usize));
                }
            }
        }
    }

    #[test]
    fn lucas_factorization_matches_direct_construction() {
        for p in [3u64, 5, 7, 11, 13] {
            for n in 0..=500 {
                deuring_lucas_factorization(n, p).unwrap();
            }
        }
    }

    #[test]
    fn p_minus_one() {
        assert!(check_p_minus_one(2).unwrap());
        assert!(check_p_minus_one(3).unwrap());
        assert!(check_p_minus_one(5).unwrap());
        let r5 = PolyRing::new(fp(5));
        assert_eq!(deuring_poly(4, &fp(5)), r5.from_i64s(&[1, 1, 1, 1, 1]));
        assert!(check_p_minus_one(4).is_err());
    }

    #[test]
    fn pascal_connection() {
        assert!(check_pascal_connection(1));
        assert!(check_pascal_connection(2));
        assert!((1..=60).all(check_pascal_connection));
        assert!(!check_pascal_connection(0));
    }

    #[test]
    fn ode_and_roots() {
        for p in [3u64, 5, 7, 11, 13, 199] {
            assert!(check_ode(p).unwrap(), "p={p}");
            let r = check_no_repeated_roots(p).unwrap();
            assert!(r.all(), "p={p}: {r:?}");
            assert_eq!(r.flags(), (true, true));
            assert!(check_shared_roots(p).unwrap(), "p={p}");
        }
        assert_eq!(check_ode(2), Err(Error::UnsupportedCharacteristic(2)));
    }

    #[test]
    fn ode_fails_for_a_wrong_polynomial() {
        // the ODE singles out H{n_1 - 1}: the antiderivative of H{n_1} fails it
        let field = fp(11);
        let ring = PolyRing::new(field);
        let f = ring.antiderivative(&deuring_poly(n1(11), &field)).unwrap();
        let f1 = ring.derivative(&f);
        let lhs = ring.add(
            &ring.add(
                &ring.mul(&ring.from_i64s(&[0, -4, 4]), &ring.derivative(&f1)),
                &ring.mul(&ring.from_i64s(&[0, 8]), &f1),
            ),
            &f,
        );
        assert!(!lhs.is_zero());
    }

    #[test]
    fn hasse_roots_split_over_quadratic_extension() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let field = fp(p);
            let ring = PolyRing::new(field);
            let ext = FiniteField::quadratic(p).unwrap();
            let roots = ring
                .roots_exhaustive(&deuring_poly(n1(p), &field), &ext, 1 << 20)
                .unwrap();
            assert_eq!(roots.len() as u64, n1(p), "p={p}");
            assert!(roots.iter().all(|(_, m)| *m == 1));
        }
    }

    #[test]
    fn shared_roots_by_exhaustive_comparison() {
        for p in [3u64, 5, 7, 11, 13] {
            let field = fp(p);
            let ring = PolyRing::new(field);
            let ext = FiniteField::quadratic(p).unwrap();
            let h = deuring_poly(n1(p), &field);
            let prev = deuring_poly(n1(p) - 1, &field);
            let shared = ext
                .enumerate(1 << 20)
                .unwrap()
                .into_iter()
                .filter(|x| {
                    ring.eval_element(&h, x).unwrap().is_zero()
                        && ring.eval_element(&prev, x).unwrap().is_zero()
                })
                .count();
            assert_eq!(shared, 0);
            assert_eq!(ring.gcd(&h, &prev).unwrap(), ring.one());
        }
    }
}
