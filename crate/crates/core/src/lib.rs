//! 2-rank of the class group of the real cyclic quartic fields
//! `K = Q(sqrt(n eps0 sqrt(ell)))`, `ell = 5 (mod 8)` prime.

pub mod classify;
pub mod error;
pub mod ntheory;
pub mod quad;
pub mod quartic;
pub mod rank;
pub mod scan;

pub use error::{Error, Result};
