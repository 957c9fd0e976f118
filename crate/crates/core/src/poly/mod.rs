//! Univariate polynomials over any [`Ring`](crate::ring::Ring) and sparse
//! trivariate polynomials with arithmetic modulo Frobenius powers of the
//! maximal ideal.

mod multi;
mod uni;

pub use multi::{
    multi_mul_truncated, multi_pow_truncated, Exponent, FrobeniusIdeal, Membership, MultiPoly,
};
pub use uni::{PolyRing, UniPoly};
