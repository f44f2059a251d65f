//! Complex complementary error function via the Faddeeva function.
//!
//! `w(z) = e^{-z^2} erfc(-iz)` is evaluated with Weideman's rational
//! approximation in the upper half plane.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

const WEIDEMAN_N: usize = 40;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

struct Weideman {
    l: f64,
    coef: [f64; WEIDEMAN_N],
}

fn weideman() -> &'static Weideman {
    static W: OnceLock<Weideman> = OnceLock::new();
    W.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let l = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        let mut coef = [0.0; WEIDEMAN_N];
        for (j, c) in coef.iter_mut().enumerate() {
            let nn = (j + 1) as f64;
            let mut s = 0.0;
            for k in -(m as i64) + 1..m as i64 {
                let th = k as f64 * std::f64::consts::PI / m as f64;
                let t = l * (0.5 * th).tan();
                s += (-t * t).exp() * (l * l + t * t) * (nn * th).cos();
            }
            *c = s / (2 * m) as f64;
        }
        Weideman { l, coef }
    })
}

fn w_upper(z: Complex64) -> Complex64 {
    let wd = weideman();
    let i = Complex64::i();
    let lz = wd.l - i * z;
    let zz = (wd.l + i * z) / lz;
    let mut p = Complex64::new(0.0, 0.0);
    for &c in wd.coef.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (lz * lz) + FRAC_1_SQRT_PI / lz
}

fn exp_checked(u: Complex64, func: &'static str) -> Result<Complex64> {
    if u.re > 709.0 {
        return Err(Error::Overflow {
            func,
            detail: format!("exp({u}) overflows; use the scaled form erfcx_complex"),
        });
    }
    Ok(u.exp())
}

/// Faddeeva function `w(z) = e^{-z^2} erfc(-iz)`.
pub fn faddeeva_w(z: Complex64) -> Result<Complex64> {
    if z.im >= 0.0 {
        Ok(w_upper(z))
    } else {
        Ok(2.0 * exp_checked(-z * z, "faddeeva_w")? - w_upper(-z))
    }
}

/// Scaled complementary error function `e^{z^2} erfc(z)`.
pub fn erfcx_complex(z: Complex64) -> Result<Complex64> {
    faddeeva_w(Complex64::i() * z)
}

/// Complementary error function, supported for `|z| <= 50`.
pub fn erfc_complex(z: Complex64) -> Result<Complex64> {
    if !(z.norm() <= 50.0) {
        return Err(Error::domain("erfc_complex", format!("|z| = {} exceeds 50", z.norm())));
    }
    if z.re >= 0.0 {
        let e = exp_checked(-z * z, "erfc_complex")?;
        Ok(e * w_upper(Complex64::i() * z))
    } else {
        let e = exp_checked(-z * z, "erfc_complex")?;
        Ok(2.0 - e * w_upper(-Complex64::i() * z))
    }
}
