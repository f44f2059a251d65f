//! Evaluation of the modified Bessel function sum
//!
//! ```text
//! S_{nu,p}(a) = sum_{n >= 1} (a n^p / 2)^{-nu} K_nu(a n^p),   0 <= nu < 1, p >= 2, a > 0
//! ```
//!
//! by brute-force summation and by its exponentially improved small-`a`
//! expansion, together with predictions for the exponentially small
//! remainders left after optimal truncation.

pub mod direct;
pub mod error;
pub mod expansion;
pub mod harness;
pub mod quad;
pub mod remainder;
pub mod special;
pub mod terminant;

pub use direct::{direct_sum, euler_jacobi_closed_form, OracleResult, SumParams};
pub use error::{Error, Result};
