//! Exact computation of F-pure thresholds of Legendre-form plane cubics over
//! finite fields, together with symbolic checks of the Deuring-polynomial
//! identities those computations rest on.

pub mod cli;
pub mod deuring;
pub mod elliptic;
pub mod error;
pub mod ff;
pub mod fpt;
pub mod lucas;
pub mod poly;
pub mod ring;

pub use error::{Error, Result};
