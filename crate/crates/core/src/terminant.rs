//! Standard and generalised terminant functions.
//!
//! The standard terminant is `T_w(z) = Gamma(w) Gamma(1 - w, z) / (2 pi)`,
//! continued analytically in `arg z`. Everything here returns the scaled
//! value `e^z T`, which stays of size `e^{-|z|}` in the regimes used by the
//! remainder predictions; unscaled wrappers multiply by `e^{-z}`.
//!
//! The generalised terminant is assembled from `kappa` standard ones,
//!
//! ```text
//! e^z T_w(kappa; z) = (1/kappa) sum_r e^{i w psi_r} e^{z e^{i psi_r}} T_w(z e^{i psi_r}),
//! psi_r = pi - (2r + 1) pi / kappa,
//! ```
//!
//! each evaluated either by Olver's uniform large-`w` form with erfc
//! smoothing or by quadrature of the Laplace integral.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_segment};
use crate::special::{cos_pi, erfcx_complex, sin_pi, ComplexSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Lower end of the accepted band for `w / |z|` in the asymptotic form.
pub const BAND_LO: f64 = 0.5;
/// Upper end of the accepted band for `w / |z|`.
pub const BAND_HI: f64 = 2.0;
/// Smallest `|z|` accepted by the asymptotic form.
pub const MIN_MODULUS: f64 = 5.0;
/// Largest `w` and `|z|` accepted by the quadrature oracle.
pub const ORACLE_LIMIT: f64 = 200.0;

const MAX_ARG: f64 = 1.5 * PI;
const ORACLE_REL_TOL: f64 = 1e-13;
const ORACLE_MAX_INTERVALS: usize = 2000;
// Below this |theta - pi| the two algebraic terms of the uniform form are
// combined through their Taylor expansion.
const UNIFORM_SERIES_CUTOFF: f64 = 1e-5;

/// Point `|z| e^{i arg}` with the argument kept off the principal branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub modulus: f64,
    pub arg: f64,
}

impl Polar {
    pub fn new(modulus: f64, arg: f64) -> Self {
        Polar { modulus, arg }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.arg)
    }

    pub fn rotate(self, by: f64) -> Self {
        Polar { modulus: self.modulus, arg: self.arg + by }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Asymptotic,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminantQuery {
    pub omega: f64,
    pub kappa: u32,
    pub z_mod: f64,
    pub z_arg: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingPoint {
    pub theta: f64,
    pub c_val: Complex64,
}

impl SmoothingPoint {
    pub fn at(theta: f64) -> Result<Self> {
        Ok(SmoothingPoint { theta, c_val: c_theta(theta)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourierMode {
    Phi,
    Psi,
}

/// `phi_r = pi/2 - 2 pi r / kappa` for `0 <= r < p` (argument `p`), or
/// `psi_r = pi - (2r + 1) pi / kappa` for `0 <= r < kappa` (argument `kappa`).
pub fn fourier_roots(mode: FourierMode, p_or_kappa: u32) -> Result<Vec<f64>> {
    match mode {
        FourierMode::Phi => {
            if p_or_kappa < 2 {
                return Err(Error::domain("fourier_roots", format!("phi roots need p >= 2, got {p_or_kappa}")));
            }
            let kappa = 2.0 * (p_or_kappa as f64 - 1.0);
            Ok((0..p_or_kappa).map(|r| FRAC_PI_2 - 2.0 * PI * r as f64 / kappa).collect())
        }
        FourierMode::Psi => {
            if p_or_kappa < 1 {
                return Err(Error::domain("fourier_roots", "psi roots need kappa >= 1"));
            }
            let kappa = p_or_kappa as f64;
            Ok((0..p_or_kappa).map(|r| PI - (2 * r + 1) as f64 * PI / kappa).collect())
        }
    }
}

// c = t sqrt(q) with q = 2 sum_m (it)^m / (m+2)!, so that c^2/2 = 1 + it - e^{it}.
// Re q stays positive for |t| <= 3 pi / 2, which keeps the principal root
// on the branch through c ~ t.
fn c_raw(t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let it = Complex64::new(0.0, t);
    let mut q = Complex64::new(1.0, 0.0);
    for j in (1..=40u32).rev() {
        q = 1.0 + q * it / (j + 2) as f64;
    }
    t * q.sqrt()
}

/// Root of `c^2/2 = 1 + i(theta - pi) - e^{i(theta - pi)}` on the branch
/// with `c(theta) ~ theta - pi + i (theta - pi)^2 / 6`.
pub fn c_theta(theta: f64) -> Result<Complex64> {
    if !(theta > 0.0 && theta < 2.0 * PI) {
        return Err(Error::domain("c_theta", format!("theta = {theta} outside (0, 2 pi)")));
    }
    Ok(c_raw(theta - PI))
}

/// `h_m(theta) = sum_{r=m}^{kappa-1} 1 / (1 - lambda_r e^{-i theta})`,
/// `lambda_r = e^{(2r+1) pi i / kappa}`.
pub fn h_m(m: u32, kappa: u32, theta: f64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for r in m..kappa {
        let phase = (2 * r + 1) as f64 * PI / kappa as f64 - theta;
        acc.add(1.0 / (1.0 - Complex64::from_polar(1.0, phase)));
    }
    acc.value()
}

fn check_omega(func: &'static str, omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(func, format!("omega = {omega} must be positive")));
    }
    Ok(())
}

fn check_z(func: &'static str, z: Polar) -> Result<()> {
    if !(z.modulus.is_finite() && z.modulus > 0.0) {
        return Err(Error::domain(func, format!("|z| = {} must be positive", z.modulus)));
    }
    if !(z.arg.abs() < MAX_ARG) {
        return Err(Error::domain(func, format!("arg z = {} outside (-3pi/2, 3pi/2)", z.arg)));
    }
    Ok(())
}

// e^{-i pi w}, exact at integer and half-integer w.
fn e_minus_i_pi(omega: f64) -> Complex64 {
    Complex64::new(cos_pi(omega), -sin_pi(omega))
}

/// `e^z T_w(z)` from the uniform large-`w` expansion, valid for
/// `w ~ |z|` across the Stokes line `arg z = pi`.
pub fn scaled_terminant_std(omega: f64, z: Polar) -> Result<Complex64> {
    const FUNC: &str = "terminant_std";
    check_omega(FUNC, omega)?;
    check_z(FUNC, z)?;
    if z.modulus < MIN_MODULUS {
        return Err(Error::regime(FUNC, format!("|z| = {} below {MIN_MODULUS}", z.modulus)));
    }
    let ratio = omega / z.modulus;
    if !(BAND_LO..=BAND_HI).contains(&ratio) {
        return Err(Error::regime(FUNC, format!("omega/|z| = {ratio} outside [{BAND_LO}, {BAND_HI}]")));
    }
    if z.arg < 0.0 {
        return Ok(uniform_upper(omega, z.modulus, -z.arg)?.conj());
    }
    uniform_upper(omega, z.modulus, z.arg)
}

// e^{i N theta + i pi gamma} [e^{-i w theta} / (1 + e^{-i theta}) + i e^{-i N theta - i pi gamma} / c]
fn bracket(gamma: f64, t: f64, c: Complex64, direct: bool) -> Complex64 {
    if direct {
        // 1 - e^{-it} = 2i sin(t/2) e^{-it/2}
        let denom = Complex64::new(0.0, 2.0 * (0.5 * t).sin()) * Complex64::from_polar(1.0, -0.5 * t);
        Complex64::from_polar(1.0, -gamma * t) / denom + Complex64::i() / c
    } else {
        Complex64::new(2.0 / 3.0 - gamma, t * (1.0 / 12.0 - 0.5 * gamma + 0.5 * gamma * gamma))
    }
}

fn uniform_upper(omega: f64, n: f64, theta: f64) -> Result<Complex64> {
    let t = theta - PI;
    let gamma = omega - n;
    let c = c_raw(t);
    // e^{-i N theta - i pi gamma} = e^{-i N t} e^{-i pi omega}
    let pre = Complex64::from_polar(1.0, -n * t) * e_minus_i_pi(omega);
    let w = -c * (0.5 * n).sqrt();
    let e = if w.re >= 0.0 { erfcx_complex(w)? } else { -erfcx_complex(-w)? };
    let bracket = bracket(gamma, t, c, t.abs() > UNIFORM_SERIES_CUTOFF);
    let algebraic = pre * (0.5 * Complex64::i() * e + bracket / (2.0 * PI * n).sqrt());
    let mut value = algebraic * (-n).exp();
    if w.re < 0.0 {
        let z = Complex64::from_polar(n, theta);
        value += Complex64::i() * e_minus_i_pi(omega) * z.exp();
    }
    Ok(value)
}

/// `T_w(z)` from the uniform expansion.
pub fn terminant_std(omega: f64, z: Polar) -> Result<Complex64> {
    unscale("terminant_std", scaled_terminant_std(omega, z)?, z)
}

fn unscale(func: &'static str, scaled: Complex64, z: Polar) -> Result<Complex64> {
    let v = scaled * (-z.to_complex()).exp();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow { func, detail: format!("e^-z at |z| = {}, arg {}", z.modulus, z.arg) });
    }
    Ok(v)
}

/// `e^z T_w(z)` by quadrature of
///
/// ```text
/// e^z T_w(z) = e^{-i w theta} / (2 pi) int_0^inf r^{w-1} e^{-|z| r} / (1 + r e^{-i theta}) dr,
/// ```
///
/// continued past `theta = pi` by deforming the path over the pole at
/// `r = e^{i(theta - pi)}` or, further out, by adding its residue.
pub fn scaled_terminant_oracle(omega: f64, z: Polar) -> Result<Complex64> {
    const FUNC: &str = "terminant_oracle";
    check_omega(FUNC, omega)?;
    check_z(FUNC, z)?;
    if omega > ORACLE_LIMIT || z.modulus > ORACLE_LIMIT {
        return Err(Error::domain(FUNC, format!("omega = {omega}, |z| = {} above {ORACLE_LIMIT}", z.modulus)));
    }
    if z.arg < 0.0 {
        return Ok(oracle_upper(omega, z.modulus, -z.arg)?.conj());
    }
    oracle_upper(omega, z.modulus, z.arg)
}

// Solves omega (u - e^u + 1) = -depth for u on the side given by `sign`.
fn window_edge(omega: f64, depth: f64, sign: f64) -> f64 {
    let g = |u: f64| omega * (u - u.exp_m1());
    let (mut lo, mut hi) = if sign < 0.0 { (-(depth / omega) - 2.0, 0.0) } else { (0.0, (depth / omega + 2.0).ln() + 1.0) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let inside = g(mid) > -depth;
        if (sign < 0.0) == inside {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn oracle_upper(omega: f64, m: f64, theta: f64) -> Result<Complex64> {
    let t = theta - PI;
    let rot = Complex64::from_polar(1.0, -theta);
    // peak of r^w e^{-m r} at r = w/m, normalised to 1 there
    let s_star = (omega / m).ln();
    let log_peak = omega * s_star - omega;
    let s_lo = s_star + window_edge(omega, 40.0, -1.0);
    let s_hi = s_star + window_edge(omega, 40.0, 1.0);
    let abs_tol = 1e-16 / omega.sqrt().max(1e-3);

    let on_axis = |s: f64| {
        let r = s.exp();
        Complex64::new((omega * s - m * r - log_peak).exp(), 0.0) / (1.0 + r * rot)
    };
    let off_axis = |r: Complex64| (r.ln() * (omega - 1.0) - m * r - log_peak).exp() / (1.0 + r * rot);
    let run = |a: f64, b: f64| integrate(on_axis, a, b, abs_tol, ORACLE_REL_TOL, ORACLE_MAX_INTERVALS);
    let run_seg = |a: Complex64, b: Complex64| integrate_segment(off_axis, a, b, abs_tol, ORACLE_REL_TOL, ORACLE_MAX_INTERVALS);

    let d = (1.5 / omega.sqrt()).min(0.25);
    let detour = t.abs() < 0.5 * d;
    let (s_lo, s_hi) = if detour { (s_lo.min((1.0 - d).ln() - 1.0), s_hi.max((1.0 + d).ln() + 1.0)) } else { (s_lo, s_hi) };
    let integral = if detour {
        let a = Complex64::new(1.0 - d, 0.0);
        let apex = Complex64::new(1.0, d);
        let b = Complex64::new(1.0 + d, 0.0);
        let mut acc = ComplexSum::new();
        acc.add(run(s_lo, (1.0 - d).ln())?.value);
        acc.add(run_seg(a, apex)?.value);
        acc.add(run_seg(apex, b)?.value);
        acc.add(run((1.0 + d).ln(), s_hi)?.value);
        acc.value()
    } else {
        // split at the pole's modulus so the near-singular factor sits on a node boundary
        let s_pole = 0.0f64.clamp(s_lo, s_hi);
        let mut acc = ComplexSum::new();
        acc.add(run(s_lo, s_pole)?.value);
        acc.add(run(s_pole, s_hi)?.value);
        acc.value()
    };
    let phase = Complex64::from_polar(1.0, -theta * omega) / (2.0 * PI);
    let mut value = phase * integral * log_peak.exp();
    if !detour && t > 0.0 {
        let z = Complex64::from_polar(m, theta);
        value += Complex64::i() * e_minus_i_pi(omega) * z.exp();
    }
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Overflow { func: "terminant_oracle", detail: format!("omega = {omega}, |z| = {m}") });
    }
    Ok(value)
}

/// `T_w(z)` by quadrature.
pub fn terminant_oracle(omega: f64, z: Polar) -> Result<Complex64> {
    unscale("terminant_oracle", scaled_terminant_oracle(omega, z)?, z)
}

fn scaled_std_by(method: Method, omega: f64, z: Polar) -> Result<Complex64> {
    match method {
        Method::Asymptotic => scaled_terminant_std(omega, z),
        Method::Oracle => scaled_terminant_oracle(omega, z),
    }
}

/// `e^z T_w(kappa; z)` assembled from standard terminants.
pub fn scaled_terminant_gen(q: &TerminantQuery) -> Result<Complex64> {
    const FUNC: &str = "terminant_gen";
    check_omega(FUNC, q.omega)?;
    let z = Polar::new(q.z_mod, q.z_arg);
    if q.kappa == 1 {
        return scaled_std_by(q.method, q.omega, z);
    }
    if q.kappa == 0 || q.kappa % 2 == 1 {
        return Err(Error::domain(FUNC, format!("kappa = {} must be 1 or even", q.kappa)));
    }
    let kf = q.kappa as f64;
    // sector of the Mellin-Barnes definition, |arg z| < p pi / kappa with kappa = 2(p - 1)
    let sector = PI * (0.5 + 1.0 / kf);
    if !(q.z_arg.abs() < sector) {
        return Err(Error::regime(FUNC, format!("|arg z| = {} not below {sector}", q.z_arg.abs())));
    }
    let mut acc = ComplexSum::new();
    for psi in fourier_roots(FourierMode::Psi, q.kappa)? {
        let zr = z.rotate(psi);
        if !(zr.arg.abs() < MAX_ARG) {
            return Err(Error::regime(FUNC, format!("rotated argument {} leaves (-3pi/2, 3pi/2)", zr.arg)));
        }
        acc.add(Complex64::from_polar(1.0, q.omega * psi) * scaled_std_by(q.method, q.omega, zr)?);
    }
    Ok(acc.value() / kf)
}

/// `T_w(kappa; z)`.
pub fn terminant_gen(q: &TerminantQuery) -> Result<Complex64> {
    let z = Polar::new(q.z_mod, q.z_arg);
    unscale("terminant_gen", scaled_terminant_gen(q)?, z)
}
