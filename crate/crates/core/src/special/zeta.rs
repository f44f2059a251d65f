//! Riemann zeta on the real line and Hurwitz-type tails.

use super::gamma::{gamma_real, sin_pi};
use super::scaled::ScaledReal;
use super::sum::NeumaierSum;
use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

const BORWEIN_N: usize = 40;

// d_k of Borwein's algorithm 2, k = 0..=n.
fn borwein_d() -> &'static [f64; BORWEIN_N + 1] {
    static D: OnceLock<[f64; BORWEIN_N + 1]> = OnceLock::new();
    D.get_or_init(|| {
        let n = BORWEIN_N as f64;
        let mut d = [0.0; BORWEIN_N + 1];
        // term_i = n (n+i-1)! 4^i / ((n-i)! (2i)!)
        let mut term = 1.0;
        let mut acc = 0.0;
        for i in 0..=BORWEIN_N {
            if i > 0 {
                let fi = i as f64;
                term *= (n + fi - 1.0) * (n - fi + 1.0) * 4.0 / ((2.0 * fi - 1.0) * (2.0 * fi));
            }
            acc += term;
            d[i] = acc;
        }
        d
    })
}

/// Dirichlet eta function for `s > 0`.
fn eta(s: f64) -> f64 {
    let d = borwein_d();
    let dn = d[BORWEIN_N];
    let mut acc = NeumaierSum::new();
    for k in 0..BORWEIN_N {
        let t = (d[k] - dn) / ((k + 1) as f64).powf(s);
        acc.add(if k % 2 == 0 { t } else { -t });
    }
    -acc.value() / dn
}

/// Riemann zeta function for real `s != 1`.
///
/// Accuracy is guaranteed on `[-10, 60]`; outside that range the same
/// formulas are used.
pub fn zeta_real(s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::domain("zeta_real", format!("non-finite argument {s}")));
    }
    if s == 1.0 {
        return Err(Error::Pole { func: "zeta_real", at: s });
    }
    if s == 0.0 {
        return Ok(-0.5);
    }
    if s > 0.0 {
        // 1 - 2^{1-s}, accurate near s = 1
        let denom = -((1.0 - s) * std::f64::consts::LN_2).exp_m1();
        return Ok(eta(s) / denom);
    }
    let sp = sin_pi(0.5 * s);
    if sp == 0.0 {
        return Ok(0.0);
    }
    let t = 1.0 - s;
    Ok(2f64.powf(s) * PI.powf(s - 1.0) * gamma_real(t)? * zeta_real(t)? * sp)
}

const EM_BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `sum_{k >= m} k^{-s}` for `s > 1`, `m >= 1`, by Euler-Maclaurin.
pub fn hurwitz_tail(s: f64, m: u64) -> Result<f64> {
    Ok(hurwitz_tail_scaled(s, m)?.to_f64())
}

/// Same as [`hurwitz_tail`], returned as `m^{-s}` times an `O(1)` factor so
/// that large `s` does not underflow.
pub fn hurwitz_tail_scaled(s: f64, m: u64) -> Result<ScaledReal> {
    if !(s > 1.0) || m == 0 {
        return Err(Error::domain("hurwitz_tail", format!("requires s > 1 and m >= 1, got s={s}, m={m}")));
    }
    let lm = (m as f64).ln();
    // k^{-s} m^{s}
    let rel = |k: f64| (-s * (k.ln() - lm)).exp();
    let big = m.max(16 + s.ceil() as u64);
    let mut acc = NeumaierSum::new();
    for k in m..big {
        acc.add(rel(k as f64));
    }
    let mf = big as f64;
    let base = rel(mf);
    acc.add(mf * base / (s - 1.0));
    acc.add(0.5 * base);
    // sum_j B_{2j}/(2j)! (s)_{2j-1} M^{-s-2j+1}
    let mut rising = s; // (s)_{2j-1}
    let mut fact = 2.0; // (2j)!
    let mut pw = base / mf;
    for (j, &b) in EM_BERNOULLI.iter().enumerate() {
        let t = b / fact * rising * pw;
        acc.add(t);
        let jj = (2 * j + 2) as f64;
        rising *= (s + jj - 1.0) * (s + jj);
        fact *= (jj + 1.0) * (jj + 2.0);
        pw /= mf * mf;
    }
    Ok(ScaledReal::new(acc.value(), -s * lm))
}
