//! Base-`p` digits and Lucas's theorem for binomial and multinomial
//! coefficients modulo a prime, plus exact big-integer counterparts.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Base-`p` expansion, least significant digit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePDigits {
    p: u64,
    digits: Vec<u64>,
}

impl BasePDigits {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Digit at position `j`, zero beyond the leading digit.
    pub fn digit(&self, j: usize) -> u64 {
        self.digits.get(j).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Reassembles `Σ a_j p^j`.
    pub fn value(&self) -> u128 {
        self.digits
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * self.p as u128 + d as u128)
    }
}

/// Unique base-`p` expansion of `n`; `digits(0, p) = [0]`.
pub fn digits(mut n: u64, p: u64) -> BasePDigits {
    debug_assert!(p >= 2);
    let mut digits = Vec::new();
    loop {
        digits.push(n % p);
        n /= p;
        if n == 0 {
            break;
        }
    }
    BasePDigits { p, digits }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn factorial_mod(n: u64, p: u64) -> u64 {
    (2..=n).fold(1 % p, |acc, i| acc * (i % p) % p)
}

/// `b! / (a_1! ⋯ a_n!)` for a single digit row with `Σ a_i = b < p`.
fn digit_multinomial(b: u64, row: &[u64], p: u64) -> u64 {
    let den = row
        .iter()
        .fold(1 % p, |acc, &a| acc * factorial_mod(a, p) % p);
    factorial_mod(b, p) * pow_mod(den, p - 2, p) % p
}

/// `N! / (k_1! ⋯ k_n!) mod p` via Lucas: the product of per-digit
/// multinomials, zero as soon as some digit column carries.
pub fn multinomial_mod_p(n: u64, parts: &[u64], p: u64) -> Result<u64> {
    let sum: u64 = parts.iter().sum();
    if sum != n {
        return Err(Error::BadPartition { sum, total: n });
    }
    let nd = digits(n, p);
    let pd: Vec<BasePDigits> = parts.iter().map(|&k| digits(k, p)).collect();
    let mut acc = 1 % p;
    let mut row = Vec::with_capacity(parts.len());
    for j in 0..nd.len() {
        row.clear();
        row.extend(pd.iter().map(|d| d.digit(j)));
        if row.iter().sum::<u64>() != nd.digit(j) {
            return Ok(0);
        }
        acc = acc * digit_multinomial(nd.digit(j), &row, p) % p;
        if acc == 0 {
            break;
        }
    }
    Ok(acc)
}

/// `C(n, k) mod p`, zero for `k > n`.
pub fn binomial_mod_p(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    multinomial_mod_p(n, &[k, n - k], p).expect("parts sum to n")
}

/// True iff adding the base-`p` expansions of `parts` produces no carry.
pub fn no_carry(parts: &[u64], p: u64) -> bool {
    let expansions: Vec<BasePDigits> = parts.iter().map(|&k| digits(k, p)).collect();
    let width = expansions.iter().map(BasePDigits::len).max().unwrap_or(0);
    (0..width).all(|j| expansions.iter().map(|d| d.digit(j)).sum::<u64>() < p)
}

/// Exact `C(n, k)`, with `C(n, k) = 0` for `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact multinomial `(Σ k_i)! / Π k_i!`.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let mut total = 0u64;
    let mut acc = BigUint::one();
    for &k in parts {
        total += k;
        acc *= binomial(total, k as i64);
    }
    acc
}
