//! Brute-force evaluation of the sum with a rigorous tail bound.

use crate::error::{Error, Result};
use crate::special::{bessel_k_scaled, NeumaierSum, ScaledReal};
use serde::{Deserialize, Serialize};

/// Parameters `(nu, p, a)` of `S_{nu,p}(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumParams {
    pub nu: f64,
    pub p: u32,
    pub a: f64,
}

impl SumParams {
    pub fn new(nu: f64, p: u32, a: f64) -> Result<Self> {
        let s = SumParams { nu, p, a };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.nu) {
            return Err(Error::domain("SumParams", format!("nu = {} outside [0, 1)", self.nu)));
        }
        if self.p < 2 {
            return Err(Error::domain("SumParams", format!("p = {} must be at least 2", self.p)));
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::domain("SumParams", format!("a = {} must be positive", self.a)));
        }
        Ok(())
    }

    /// `a n^p`.
    pub fn argument(&self, n: u64) -> f64 {
        self.a * (n as f64).powi(self.p as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub terms_used: u64,
    pub tail_bound: f64,
    pub rel_tol_achieved: f64,
}

/// Largest Bessel argument evaluated term by term.
pub const MAX_TERM_ARGUMENT: f64 = 1e4;

pub const DEFAULT_REL_TOL: f64 = 1e-13;

/// Relative accuracy floor of individual terms.
const ROUNDING_FLOOR: f64 = 2e-15;

const MAX_TERMS: u64 = 100_000_000;

/// `(a n^p / 2)^{-nu} K_nu(a n^p)`.
pub fn bessel_term(n: u64, params: &SumParams) -> Result<ScaledReal> {
    if n == 0 {
        return Err(Error::domain("bessel_term", "n must be at least 1"));
    }
    let x = params.argument(n);
    if x > MAX_TERM_ARGUMENT {
        return Err(Error::regime(
            "bessel_term",
            format!("argument a n^p = {x} is in the tail regime (> {MAX_TERM_ARGUMENT})"),
        ));
    }
    let ks = bessel_k_scaled(params.nu, x)?;
    Ok(ScaledReal::new(ks, -params.nu * (0.5 * x).ln() - x))
}

/// Bound on `sum_{n > n0} term(n)`, valid when `a n0^p >= 1`.
pub fn tail_bound(n0: u64, params: &SumParams) -> f64 {
    let x0 = params.argument(n0);
    let p = params.p as f64;
    let env = std::f64::consts::PI.sqrt() * (-(params.nu + 0.5) * (0.5 * x0).ln() - x0).exp();
    env / (params.a * p * (n0 as f64).powi(params.p as i32 - 1))
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if !(1e-15..=1e-6).contains(&rel_tol) {
        return Err(Error::domain("direct_sum", format!("rel_tol = {rel_tol} outside [1e-15, 1e-6]")));
    }
    Ok(())
}

/// Sums terms in ascending `n` until the analytic tail bound drops below
/// `rel_tol` times the partial sum.
pub fn direct_sum(params: &SumParams, rel_tol: f64) -> Result<OracleResult> {
    params.validate()?;
    check_tol(rel_tol)?;
    if params.a > MAX_TERM_ARGUMENT {
        return Err(Error::domain("direct_sum", format!("a = {} underflows every term", params.a)));
    }
    let mut acc = NeumaierSum::new();
    let mut n = 0u64;
    loop {
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::convergence("direct_sum", format!("no convergence after {MAX_TERMS} terms")));
        }
        let x = params.argument(n);
        if x > MAX_TERM_ARGUMENT {
            // Everything beyond is far below any representable tolerance.
            let tail = tail_bound(n - 1, params);
            return Ok(finish(acc.value(), n - 1, tail));
        }
        acc.add(bessel_term(n, params)?.to_f64());
        if x >= 1.0 {
            let tail = tail_bound(n, params);
            let value = acc.value();
            if tail <= rel_tol * value {
                return Ok(finish(value, n, tail));
            }
        }
    }
}

fn finish(value: f64, terms: u64, tail: f64) -> OracleResult {
    let ratio = if value > 0.0 { tail / value * (1.0 + 4.0 * f64::EPSILON) } else { f64::INFINITY };
    OracleResult { value, terms_used: terms, tail_bound: tail, rel_tol_achieved: ratio.max(ROUNDING_FLOOR) }
}

/// Closed form of the sum at `nu = 1/2`:
/// `(sqrt(pi)/2) (2/a) sum_{n>=1} exp(-a n^p) / n^p`.
pub fn euler_jacobi_closed_form(params: &SumParams, rel_tol: f64) -> Result<f64> {
    params.validate()?;
    if params.nu != 0.5 {
        return Err(Error::domain("euler_jacobi_closed_form", format!("requires nu = 1/2, got {}", params.nu)));
    }
    check_tol(rel_tol)?;
    let p = params.p as i32;
    let pref = 0.5 * std::f64::consts::PI.sqrt() * (2.0 / params.a);
    let mut acc = NeumaierSum::new();
    let mut n = 0u64;
    loop {
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::convergence("euler_jacobi_closed_form", "series did not converge"));
        }
        let nf = n as f64;
        let np = nf.powi(p);
        let x = params.a * np;
        acc.add((-x).exp() / np);
        let tail = (-x).exp() / np / (params.a * params.p as f64 * nf.powi(p - 1));
        if tail <= rel_tol * acc.value() || acc.value() == 0.0 && x > 745.0 {
            return Ok(pref * acc.value());
        }
    }
}
