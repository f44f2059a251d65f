//! Algebraic side of the small-`a` expansion: the residue part `H`, the
//! scales `kappa, h, vartheta, A, A_0, X_k`, optimal truncation, the
//! per-`k` power series and the inverse factorial coefficients `c_j`.

use crate::direct::SumParams;
use crate::error::{Error, Result};
use crate::special::{
    digamma_real, gamma_real, hurwitz_tail_scaled, log_gamma_real, sin_pi, zeta_real, NeumaierSum, ScaledReal,
    EULER_GAMMA,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Tolerance on `|nu|` and `|nu - 1/(2p)|` below which the double-pole
/// branches of `H` are used.
pub const BRANCH_EPS: f64 = 1e-9;

/// Default number of `k`-series summed explicitly.
pub const DEFAULT_K: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub kappa: u32,
    pub h: f64,
    pub vartheta: f64,
    #[serde(rename = "A_cal")]
    pub a_cal: f64,
    #[serde(rename = "A0")]
    pub a0: f64,
}

pub fn derived_scales(params: &SumParams) -> Scales {
    let p = params.p as f64;
    let kappa = 2 * (params.p - 1);
    let kf = kappa as f64;
    let vartheta = -params.nu;
    Scales {
        kappa,
        h: (2.0 * p).powi(2 * params.p as i32),
        vartheta,
        a_cal: p - 1.5 - (kf + 1.0) * params.nu,
        a0: 2.0 * PI * kf.powf(0.5 - vartheta) * (2.0 * p).sqrt(),
    }
}

/// `X_k = kappa (2 (pi k / p)^p / a)^{1/(p-1)}`.
pub fn x_scale(params: &SumParams, k: u64) -> f64 {
    let p = params.p as f64;
    let kappa = 2.0 * (p - 1.0);
    let inner = 2.0 * (PI * k as f64 / p).powi(params.p as i32) / params.a;
    if params.p == 2 {
        kappa * inner
    } else {
        kappa * inner.powf(1.0 / (p - 1.0))
    }
}

/// Truncation index `N_k` (nearest integer, at least 1) and the residue
/// `alpha_k = X_k - kappa N_k - A`.
pub fn optimal_truncation(params: &SumParams, k: u64) -> (u64, f64) {
    let s = derived_scales(params);
    let x = x_scale(params, k);
    let kf = s.kappa as f64;
    let raw = ((x - s.a_cal) / kf).round();
    let n = if raw < 1.0 { 1 } else { raw as u64 };
    (n, x - kf * n as f64 - s.a_cal)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: Vec<u64>,
    #[serde(rename = "M")]
    pub m: usize,
    pub alpha: Vec<f64>,
}

impl TruncationPlan {
    /// Optimal truncation for the first `k` series.
    pub fn optimal(params: &SumParams, k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::domain("TruncationPlan", "K and M must be at least 1"));
        }
        let (n, alpha) = (1..=k as u64).map(|kk| optimal_truncation(params, kk)).unzip();
        Ok(TruncationPlan { k, n, m, alpha })
    }

    /// Replaces the truncation indices; `alpha` is recomputed to match.
    pub fn with_indices(params: &SumParams, n: Vec<u64>, m: usize) -> Result<Self> {
        if n.is_empty() || n.contains(&0) || m == 0 {
            return Err(Error::domain("TruncationPlan", "indices must be at least 1 and M at least 1"));
        }
        let s = derived_scales(params);
        let alpha = n
            .iter()
            .enumerate()
            .map(|(i, &nk)| x_scale(params, i as u64 + 1) - s.kappa as f64 * nk as f64 - s.a_cal)
            .collect();
        Ok(TruncationPlan { k: n.len(), n, m, alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Generic,
    NuZero,
    NuStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HBranch {
    pub value: f64,
    pub branch: Branch,
    /// `nu` was within `BRANCH_EPS` of a double pole without being on it.
    pub snapped: bool,
}

/// Residue contribution `H` of the poles with `Re s >= 0`.
pub fn h_part(params: &SumParams) -> Result<HBranch> {
    params.validate()?;
    let nu = params.nu;
    let p = params.p as f64;
    let half_a = 0.5 * params.a;
    let ln_half_a = half_a.ln();
    let nu_star = 1.0 / (2.0 * p);
    let inv_p_pow = (-ln_half_a / p).exp(); // (a/2)^{-1/p}

    if nu.abs() < BRANCH_EPS {
        let g = gamma_real(nu_star)?;
        let value = g * g * inv_p_pow / (4.0 * p) + 0.5 * (EULER_GAMMA + ln_half_a - p * (2.0 * PI).ln());
        return Ok(HBranch { value, branch: Branch::NuZero, snapped: nu != 0.0 });
    }
    let t3 = PI / (sin_pi(nu) * 4.0 * gamma_real(1.0 + nu)?);
    if (nu - nu_star).abs() < BRANCH_EPS {
        let t2 = gamma_real(nu_star)? * inv_p_pow / (4.0 * p)
            * (digamma_real(nu_star)? - 2.0 * ln_half_a + (2.0 * p - 1.0) * EULER_GAMMA);
        return Ok(HBranch { value: t2 + t3, branch: Branch::NuStar, snapped: nu != nu_star });
    }
    let t1 = 0.5 * gamma_real(nu)? * (-2.0 * nu * ln_half_a).exp() * zeta_real(2.0 * p * nu)?;
    let t2 = gamma_real(nu_star)? * gamma_real(nu_star - nu)? * inv_p_pow / (4.0 * p);
    Ok(HBranch { value: t1 + t2 + t3, branch: Branch::Generic, snapped: false })
}

/// `sin(pi p nu) / (2 sin(pi nu))`, with the limit `p/2` at `nu -> 0`.
pub fn sin_ratio_prefactor(nu: f64, p: u32) -> f64 {
    if nu.abs() < 1e-12 {
        return 0.5 * p as f64;
    }
    sin_pi(p as f64 * nu) / (2.0 * sin_pi(nu))
}

/// `(-1)^{pn} Gamma(2p(n-nu)+1) / (Gamma(n+1) Gamma(n-nu+1)) (a / (2 (2 pi k)^p))^{2n-2nu}`
/// in scaled form.
pub fn algebraic_term_scaled(n: u64, k: u64, params: &SumParams) -> Result<ScaledReal> {
    if n == 0 || k == 0 {
        return Err(Error::domain("algebraic_term", "n and k must be at least 1"));
    }
    let nf = n as f64;
    let nu = params.nu;
    let p = params.p as f64;
    let ln_ratio = params.a.ln() - std::f64::consts::LN_2 - p * (2.0 * PI * k as f64).ln();
    let lg = log_gamma_real(2.0 * p * (nf - nu) + 1.0)? - log_gamma_real(nf + 1.0)? - log_gamma_real(nf - nu + 1.0)?;
    let sign = if (params.p as u64 * n) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(ScaledReal::from_log(sign, lg + (2.0 * nf - 2.0 * nu) * ln_ratio))
}

pub fn algebraic_term(n: u64, k: u64, params: &SumParams) -> Result<f64> {
    Ok(algebraic_term_scaled(n, k, params)?.to_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    /// `prefactor * sum_{n < N_k} term(n, k)` for `k = 1..=K`.
    pub per_k: Vec<f64>,
    /// Contribution of every `k > K`, each truncated at `N_{K+1}`.
    pub k_tail: f64,
    /// `sum_k per_k[k] / k + k_tail`.
    pub total: f64,
}

/// Optimally truncated power series summed over `k`.
///
/// Series `k > K` are not dropped: with the common truncation `N_{K+1}` they
/// sum in closed form to `sum_n term(n, 1) * sum_{k > K} k^{-1-2p(n-nu)}`.
pub fn algebraic_series(params: &SumParams, plan: &TruncationPlan) -> Result<SeriesResult> {
    params.validate()?;
    if plan.k == 0 || plan.n.len() != plan.k {
        return Err(Error::domain("algebraic_series", "plan must list one index per series"));
    }
    let pref = sin_ratio_prefactor(params.nu, params.p);
    let mut per_k = Vec::with_capacity(plan.k);
    let mut total = NeumaierSum::new();
    for (i, &nk) in plan.n.iter().enumerate() {
        let k = i as u64 + 1;
        let mut acc = NeumaierSum::new();
        if pref != 0.0 {
            for n in 1..nk {
                acc.add(algebraic_term(n, k, params)?);
            }
        }
        let v = pref * acc.value();
        per_k.push(v);
        total.add(v / k as f64);
    }
    let k_tail = if pref == 0.0 { 0.0 } else { series_k_tail(params, plan.k as u64, pref)? };
    total.add(k_tail);
    Ok(SeriesResult { per_k, k_tail, total: total.value() })
}

fn series_k_tail(params: &SumParams, big_k: u64, pref: f64) -> Result<f64> {
    let (n_next, _) = optimal_truncation(params, big_k + 1);
    let p = params.p as f64;
    let mut acc = NeumaierSum::new();
    for n in 1..n_next {
        let coef = algebraic_term_scaled(n, 1, params)?;
        let zt = hurwitz_tail_scaled(1.0 + 2.0 * p * (n as f64 - params.nu), big_k + 1)?;
        acc.add(coef.mul(&zt).to_f64());
    }
    Ok(pref * acc.value())
}

/// User-supplied inverse factorial coefficients `c_j`, `j >= 3`, keyed by
/// `(nu, p)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    entries: BTreeMap<(u64, u32), Vec<f64>>,
}

impl CoefficientTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `c_3, c_4, ...` for `(nu, p)`.
    pub fn insert(&mut self, nu: f64, p: u32, higher: Vec<f64>) {
        self.entries.insert((nu.to_bits(), p), higher);
    }

    pub fn get(&self, j: usize, nu: f64, p: u32) -> Option<f64> {
        let v = self.entries.get(&(nu.to_bits(), p))?;
        v.get(j.checked_sub(3)?).copied()
    }
}

/// Inverse factorial coefficient `c_j(nu, p)`, closed form for `j <= 2`.
pub fn ifc_coefficient(j: usize, nu: f64, p: u32) -> Result<f64> {
    ifc_coefficient_with(j, nu, p, None)
}

pub fn ifc_coefficient_with(j: usize, nu: f64, p: u32, table: Option<&CoefficientTable>) -> Result<f64> {
    let pf = p as f64;
    let pre = 2.0 * pf - 1.0;
    match j {
        0 => Ok(1.0),
        1 => Ok(pre / (12.0 * pf) * (2.0 * pf * (1.0 + 3.0 * nu + 3.0 * nu * nu) - 1.0)),
        2 => {
            let n2 = nu * nu;
            let n3 = n2 * nu;
            let n4 = n2 * n2;
            let b1 = -18.0 - 12.0 * nu + 12.0 * n2;
            let b2 = 36.0 + 72.0 * nu - 12.0 * n2 - 72.0 * n3 - 36.0 * n4;
            let b3 = 8.0 + 96.0 * nu + 264.0 * n2 + 240.0 * n3 + 72.0 * n4;
            Ok(pre / (288.0 * pf * pf) * (-1.0 + pf * b1 + pf * pf * b2 + pf * pf * pf * b3))
        }
        _ => table
            .and_then(|t| t.get(j, nu, p))
            .ok_or(Error::UnsupportedDepth { j, nu, p }),
    }
}

/// `c_0 .. c_{m-1}`.
pub fn ifc_coefficients(m: usize, nu: f64, p: u32, table: Option<&CoefficientTable>) -> Result<Vec<f64>> {
    (0..m).map(|j| ifc_coefficient_with(j, nu, p, table)).collect()
}
