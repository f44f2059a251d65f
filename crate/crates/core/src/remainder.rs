//! Predictions for the exponentially small remainder
//!
//! ```text
//! R_k(a; N_k) = (-1)^{N_k} A_0/(4 pi) sum_{r<p} sum_{j<M} (-1)^j c_j Z_r^{vartheta-j} e^{Z_r} T_{mu_k-j}(kappa; Z_r),
//! Z_r = X_k e^{i phi_r},
//! ```
//!
//! either assembled through the terminant module or from the closed leading
//! forms available for `p = 2..5`.

use crate::direct::SumParams;
use crate::error::{Error, Result};
use crate::expansion::{derived_scales, ifc_coefficients, optimal_truncation, x_scale, CoefficientTable};
use crate::special::{cos_pi, sin_pi, ComplexSum};
use crate::terminant::{fourier_roots, scaled_terminant_gen, FourierMode, Method, TerminantQuery, ORACLE_LIMIT};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Deepest `M` for which every `c_j` has a closed form.
pub const MAX_CLOSED_M: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderPrediction {
    pub value: f64,
    /// Factors `e` of the exponentials `e^{-e X_k}` present in `value`, ascending.
    pub dominant_exponents: Vec<f64>,
    #[serde(rename = "X_k")]
    pub x_k: f64,
    pub mu_k: f64,
    pub j_terms_used: usize,
}

/// Factors `cos(pi (p - 2l) / kappa)`, `l = 1 .. ceil(p/2) - 1`, together
/// with 1, ascending.
pub fn exponent_ladder(p: u32) -> Vec<f64> {
    let kappa = 2.0 * (p as f64 - 1.0);
    let mut out: Vec<f64> = (1..p.div_ceil(2)).map(|l| (PI * (p - 2 * l) as f64 / kappa).cos()).collect();
    out.push(1.0);
    out.sort_by(f64::total_cmp);
    out
}

/// `mu_k = vartheta + kappa N_k - kappa nu`.
pub fn mu_k(params: &SumParams, n_k: u64) -> f64 {
    let s = derived_scales(params);
    let kf = s.kappa as f64;
    s.vartheta + kf * n_k as f64 - kf * params.nu
}

const TWO_PI_HI: f64 = 6.283_185_307_179_586;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `sin(x c + shift)` with the product formed exactly and reduced modulo
/// `2 pi` in two parts.
fn sin_phase(x: f64, c: f64, shift: f64) -> f64 {
    let hi = x * c;
    let lo = x.mul_add(c, -hi);
    let n = (hi / TWO_PI_HI).round();
    let r = n.mul_add(-TWO_PI_HI, hi) - n * TWO_PI_LO + lo + shift;
    r.sin()
}

fn check_depth(func: &'static str, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::domain(func, "M must be at least 1"));
    }
    Ok(())
}

/// Leading behaviour of `R_k` for `p = 2..5` as `X_k -> infinity`; other
/// `p` go through [`remainder_theorem2`].
pub fn remainder_leading(
    params: &SumParams,
    k: u64,
    n_k: u64,
    alpha_k: f64,
    m: usize,
    table: Option<&CoefficientTable>,
) -> Result<RemainderPrediction> {
    params.validate()?;
    check_depth("remainder_leading", m)?;
    if !(2..=5).contains(&params.p) {
        return remainder_theorem2(params, k, n_k, m, table);
    }
    let nu = params.nu;
    let x = x_scale(params, k);
    let c = ifc_coefficients(m, nu, params.p, table)?;
    let mut acc = 0.0;
    let exponents;
    match params.p {
        2 => {
            let scale = 2f64.powf(nu - 0.5) * x.powf(-nu) * (-x).exp();
            let root = (2.0 * PI * x).sqrt();
            for (j, cj) in c.iter().enumerate() {
                let b0 = 7.0 / 6.0 + alpha_k + j as f64;
                let brace = cos_pi(nu) / root * (1.0 + 2.0 * b0) - sin_pi(nu);
                acc += sign(j) * cj / x.powi(j as i32) * brace;
            }
            acc *= scale;
            exponents = vec![1.0];
        }
        3 => {
            let scale = 2f64.powf(2.0 * nu - 0.5) * 3f64.sqrt() * x.powf(-nu) * (-x * FRAC_1_SQRT_2).exp();
            for (j, cj) in c.iter().enumerate() {
                let s = sin_phase(x, FRAC_1_SQRT_2, PI * (j as f64 / 4.0 - 0.75 * nu));
                acc += sign(j) * cj / x.powi(j as i32) * s;
            }
            acc *= scale;
            exponents = vec![FRAC_1_SQRT_2];
        }
        4 => {
            let scale = 2.0 / 3f64.sqrt() * (x / 6.0).powf(-nu) * (-0.5 * x).exp();
            for (j, cj) in c.iter().enumerate() {
                let s = sin_phase(x, 0.5 * 3f64.sqrt(), PI * (j as f64 / 3.0 - 2.0 * nu / 3.0));
                acc += sign(j) * cj / x.powi(j as i32) * s;
            }
            acc *= scale;
            exponents = vec![0.5];
        }
        _ => {
            let (c3, s3) = ((3.0 * PI / 8.0).cos(), (3.0 * PI / 8.0).sin());
            let (c1, s1) = ((PI / 8.0).cos(), (PI / 8.0).sin());
            let scale = 0.5 * 5f64.sqrt() * (x / 8.0).powf(-nu);
            let e3 = (-x * c3).exp();
            let e1 = 2.0 * cos_pi(nu) * (-x * c1).exp();
            for (j, cj) in c.iter().enumerate() {
                let jf = j as f64;
                let t3 = e3 * sin_phase(x, s3, PI * (3.0 * jf / 8.0 - 5.0 * nu / 8.0));
                let t1 = e1 * sin_phase(x, s1, PI * (jf / 8.0 - 15.0 * nu / 8.0));
                acc += sign(j) * cj / x.powi(j as i32) * (t3 + t1);
            }
            acc *= scale;
            exponents = vec![c3, c1];
        }
    }
    Ok(RemainderPrediction { value: acc, dominant_exponents: exponents, x_k: x, mu_k: mu_k(params, n_k), j_terms_used: m })
}

fn sign(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The full terminant sum, with the terminants evaluated by quadrature whenever their
/// orders and `X_k` allow it, and by the uniform asymptotic form otherwise.
pub fn remainder_theorem2(
    params: &SumParams,
    k: u64,
    n_k: u64,
    m: usize,
    table: Option<&CoefficientTable>,
) -> Result<RemainderPrediction> {
    let x = x_scale(params, k);
    let mu = mu_k(params, n_k);
    let quadrature = mu <= ORACLE_LIMIT && x <= ORACLE_LIMIT && mu - (m as f64 - 1.0) > 0.0;
    let method = if quadrature { Method::Oracle } else { Method::Asymptotic };
    remainder_theorem2_with(params, k, n_k, m, table, method)
}

pub fn remainder_theorem2_with(
    params: &SumParams,
    k: u64,
    n_k: u64,
    m: usize,
    table: Option<&CoefficientTable>,
    method: Method,
) -> Result<RemainderPrediction> {
    params.validate()?;
    check_depth("remainder_theorem2", m)?;
    let s = derived_scales(params);
    let x = x_scale(params, k);
    let mu = mu_k(params, n_k);
    let c = ifc_coefficients(m, params.nu, params.p, table)?;
    let mut acc = ComplexSum::new();
    for phi in fourier_roots(FourierMode::Phi, params.p)? {
        for (j, cj) in c.iter().enumerate() {
            let omega = mu - j as f64;
            let q = TerminantQuery { omega, kappa: s.kappa, z_mod: x, z_arg: phi, method };
            let t = scaled_terminant_gen(&q).map_err(|e| in_context(e, k, j, phi))?;
            let e = s.vartheta - j as f64;
            let power = Complex64::from_polar(x.powf(e), phi * e);
            acc.add(sign(j) * cj * power * t);
        }
    }
    let parity = if n_k % 2 == 0 { 1.0 } else { -1.0 };
    let value = parity * s.a0 / (4.0 * PI) * acc.value().re;
    Ok(RemainderPrediction {
        value,
        dominant_exponents: exponent_ladder(params.p),
        x_k: x,
        mu_k: mu,
        j_terms_used: m,
    })
}

fn in_context(e: Error, k: u64, j: usize, phi: f64) -> Error {
    let ctx = format!("k = {k}, j = {j}, phi = {phi}");
    match e {
        Error::OutOfRegime { func, detail } => Error::OutOfRegime { func, detail: format!("{detail} ({ctx})") },
        Error::Domain { func, detail } => Error::Domain { func, detail: format!("{detail} ({ctx})") },
        Error::Convergence { func, detail } => Error::Convergence { func, detail: format!("{detail} ({ctx})") },
        other => other,
    }
}

/// `sum_{k <= k_max} R_k / k`, each `R_k` at its optimal truncation.
pub fn remainder_sum(
    params: &SumParams,
    k_max: u64,
    m: usize,
    table: Option<&CoefficientTable>,
    use_theorem2: bool,
) -> Result<f64> {
    let mut total = 0.0;
    for k in 1..=k_max {
        let (n, alpha) = optimal_truncation(params, k);
        let r = if use_theorem2 {
            remainder_theorem2(params, k, n, m, table)?
        } else {
            remainder_leading(params, k, n, alpha, m, table)?
        };
        total += r.value / k as f64;
    }
    Ok(total)
}
