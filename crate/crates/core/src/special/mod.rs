//! Real and complex special-function kernels.

mod bessel;
mod erf;
mod gamma;
mod scaled;
mod sum;
mod zeta;

pub use bessel::bessel_k_scaled;
pub use erf::{erfc_complex, erfcx_complex, faddeeva_w};
pub use gamma::{cos_pi, digamma_real, gamma_real, log_gamma_complex, log_gamma_real, sin_pi};
pub use scaled::ScaledReal;
pub use sum::{compensated_sum, ComplexSum, NeumaierSum};
pub use zeta::{hurwitz_tail, hurwitz_tail_scaled, zeta_real};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
