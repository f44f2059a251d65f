//! Gamma, log-gamma and digamma.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `sin(pi x)`, exact at integers and half integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    // r in [-1, 1]
    let (s, r) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    let v = if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else {
        (PI * (1.0 - r)).sin()
    };
    s * v
}

/// `cos(pi x)`, exact at integers and half integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Gamma function of a real argument.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("gamma_real", format!("non-finite argument {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { func: "gamma_real", at: x });
    }
    if x < 0.5 {
        let g = gamma_positive(1.0 - x);
        return Ok(PI / (sin_pi(x) * g));
    }
    Ok(gamma_positive(x))
}

// Gamma(x) for x >= 0.5: upward shift to x >= 10, then Stirling.
fn gamma_positive(x: f64) -> f64 {
    let mut w = x;
    let mut den = 1.0;
    while w < 10.0 {
        den *= w;
        w += 1.0;
    }
    // w^{w-1/2} e^{-w}, split so neither factor overflows before x ~ 171.6
    let half = 0.5 * (w - 0.5);
    let pw = w.powf(half);
    let g = (2.0 * PI).sqrt() * pw * (pw * (-w).exp()) * stirling_tail(w).exp();
    g / den
}

/// Natural log as an unevaluated sum `hi + lo` with `hi` exact.
fn ln_split(x: f64) -> (f64, f64) {
    let bits = x.to_bits();
    let mut e = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    if m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        e += 1;
    }
    let ef = e as f64;
    (ef * LN2_HI, ef * LN2_LO + m.ln())
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    let mut acc = 0.0;
    for &c in STIRLING.iter().rev() {
        acc = acc * r2 + c;
    }
    acc * r
}

// x >= 10, normal range.
fn ln_gamma_large(x: f64) -> f64 {
    let (a, b) = ln_split(x);
    let hx = x - 0.5;
    let p1 = hx * a;
    let e1 = hx.mul_add(a, -p1);
    let p2 = hx * b;
    let (s, es) = two_sum(p1, -x);
    let rest = ((e1 + es) + p2) + (HALF_LN_2PI + stirling_tail(x));
    s + rest
}

/// `ln Gamma(x)` for `x > 0`.
pub fn log_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma_real", format!("requires x > 0, got {x}")));
    }
    if x >= 10.0 {
        return Ok(ln_gamma_large(x));
    }
    let n = (10.0 - x).ceil() as usize;
    let mut prod = 1.0;
    for k in 0..n {
        prod *= x + k as f64;
    }
    Ok(ln_gamma_large(x + n as f64) - prod.ln())
}

/// Continuous-branch `ln Gamma(z)` for `Re z > 0`.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::domain("log_gamma_complex", format!("requires Re z > 0, got {z}")));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let r = w.inv();
    let r2 = r * r;
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in STIRLING.iter().rev() {
        acc = acc * r2 + c;
    }
    let main = (w - 0.5) * w.ln() - w + HALF_LN_2PI + acc * r;
    Ok(main - shift)
}

/// Digamma function for `x > 0`.
pub fn digamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("digamma_real", format!("requires x > 0, got {x}")));
    }
    let mut w = x;
    let mut shift = 0.0;
    while w < 10.0 {
        shift += 1.0 / w;
        w += 1.0;
    }
    let r2 = 1.0 / (w * w);
    // B_{2k}/(2k), k = 1..7
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut acc = 0.0;
    for &c in C.iter().rev() {
        acc = acc * r2 + c;
    }
    Ok(w.ln() - 0.5 / w - acc * r2 - shift)
}
