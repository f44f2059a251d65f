//! Comparison of the brute-force oracle with the truncated expansion:
//! single evaluations, scans over geometric `a` grids, exponential slope
//! fits and CSV/JSON rendering.

use crate::direct::{direct_sum, OracleResult, SumParams, DEFAULT_REL_TOL};
use crate::error::{Error, Result};
use crate::expansion::{
    algebraic_series, h_part, optimal_truncation, x_scale, Branch, TruncationPlan, DEFAULT_K,
};
use crate::remainder::{remainder_leading, remainder_theorem2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{self, Write};

/// Tolerance the oracle falls back to when the requested one fails.
pub const FALLBACK_REL_TOL: f64 = 1e-8;

/// Rows with `|r_obs| <= USABILITY_FACTOR * tail_bound` are noise.
pub const USABILITY_FACTOR: f64 = 1e3;

pub const CSV_HEADER: &str = "a,X_1,N_1,r_obs,r_pred,ratio,sign_obs,sign_pred,oracle_terms,tail_bound";

/// Departures from the optimal plan and default accuracy.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanOverrides {
    /// Number of explicitly summed series.
    pub k: Option<usize>,
    /// Depth of the remainder prediction.
    pub m: Option<usize>,
    /// Truncation indices `N_1..N_K`; implies `K`.
    pub n: Option<Vec<u64>>,
    /// Remainders `R_k` included in `r_pred`, `k = 1..=remainder_k`.
    pub remainder_k: Option<u64>,
    pub rel_tol: Option<f64>,
    /// Predict with the terminant sum for every `p`, not only `p >= 6`.
    #[serde(default)]
    pub terminant_sum: bool,
}

pub const DEFAULT_M: usize = 1;
pub const DEFAULT_REMAINDER_K: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalBreakdown {
    pub params: SumParams,
    pub oracle: OracleResult,
    pub h: f64,
    pub h_branch: Branch,
    pub series_total: f64,
    pub series_k_tail: f64,
    pub per_k: Vec<f64>,
    pub r_pred: f64,
    pub r_obs: f64,
    /// `r_obs / r_pred`, absent when `r_pred = 0`.
    pub ratio: Option<f64>,
    #[serde(rename = "X_1")]
    pub x_1: f64,
    pub plan: TruncationPlan,
    /// The oracle missed the requested tolerance.
    pub degraded: bool,
}

/// Expansion side only: residue part, truncated series and remainder
/// prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBreakdown {
    pub params: SumParams,
    pub h: f64,
    pub h_branch: Branch,
    pub series_total: f64,
    pub series_k_tail: f64,
    pub per_k: Vec<f64>,
    pub r_pred: f64,
    /// `h + series_total + r_pred`.
    pub value: f64,
    #[serde(rename = "X_1")]
    pub x_1: f64,
    pub plan: TruncationPlan,
}

pub fn asymptotic_run(params: &SumParams, ov: &PlanOverrides) -> Result<AsymptoticBreakdown> {
    params.validate()?;
    let m = ov.m.unwrap_or(DEFAULT_M);
    let plan = match &ov.n {
        Some(n) => TruncationPlan::with_indices(params, n.clone(), m)?,
        None => TruncationPlan::optimal(params, ov.k.unwrap_or(DEFAULT_K), m)?,
    };
    let h = h_part(params)?;
    let series = algebraic_series(params, &plan)?;
    let mut r_pred = 0.0;
    for k in 1..=ov.remainder_k.unwrap_or(DEFAULT_REMAINDER_K) {
        let (n, alpha) = match plan.n.get(k as usize - 1) {
            Some(&n) => (n, plan.alpha[k as usize - 1]),
            None => optimal_truncation(params, k),
        };
        let r = if ov.terminant_sum {
            remainder_theorem2(params, k, n, m, None)?
        } else {
            remainder_leading(params, k, n, alpha, m, None)?
        };
        r_pred += r.value / k as f64;
    }
    Ok(AsymptoticBreakdown {
        params: *params,
        h: h.value,
        h_branch: h.branch,
        series_total: series.total,
        series_k_tail: series.k_tail,
        per_k: series.per_k,
        r_pred,
        value: h.value + series.total + r_pred,
        x_1: x_scale(params, 1),
        plan,
    })
}

/// Oracle, residue part, optimally truncated series and remainder
/// prediction for one parameter set.
pub fn compare_run(params: &SumParams, ov: &PlanOverrides) -> Result<EvalBreakdown> {
    let asym = asymptotic_run(params, ov)?;
    let rel_tol = ov.rel_tol.unwrap_or(DEFAULT_REL_TOL);
    let (oracle, degraded) = match direct_sum(params, rel_tol) {
        Ok(o) => {
            let degraded = o.rel_tol_achieved > rel_tol;
            (o, degraded)
        }
        Err(Error::Convergence { .. }) if rel_tol < FALLBACK_REL_TOL => (direct_sum(params, FALLBACK_REL_TOL)?, true),
        Err(e) => return Err(e),
    };
    let r_obs = oracle.value - asym.h - asym.series_total;
    let ratio = (asym.r_pred != 0.0).then(|| r_obs / asym.r_pred);
    Ok(EvalBreakdown {
        params: *params,
        oracle,
        h: asym.h,
        h_branch: asym.h_branch,
        series_total: asym.series_total,
        series_k_tail: asym.series_k_tail,
        per_k: asym.per_k,
        r_pred: asym.r_pred,
        r_obs,
        ratio,
        x_1: asym.x_1,
        plan: asym.plan,
        degraded,
    })
}

/// The `a` at which `X_1 = x1`; inverse of [`x_scale`] at `k = 1`.
pub fn a_for_x1(p: u32, x1: f64) -> f64 {
    let pf = p as f64;
    let kappa = 2.0 * (pf - 1.0);
    2.0 * (PI / pf).powi(p as i32) / (x1 / kappa).powi(p as i32 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    #[default]
    Geometric,
}

/// `a_i = a_start (a_stop / a_start)^{i / (points - 1)}`.
pub fn grid_points(a_start: f64, a_stop: f64, points: usize, grid: Grid) -> Result<Vec<f64>> {
    if !(a_stop > 0.0 && a_start > a_stop && a_start.is_finite()) {
        return Err(Error::domain("scan_grid", format!("need a_start > a_stop > 0, got {a_start}, {a_stop}")));
    }
    if points < 3 {
        return Err(Error::domain("scan_grid", format!("need at least 3 points, got {points}")));
    }
    match grid {
        Grid::Geometric => {
            let ln_ratio = (a_stop / a_start).ln();
            let last = (points - 1) as f64;
            Ok((0..points)
                .map(|i| match i {
                    0 => a_start,
                    i if i == points - 1 => a_stop,
                    i => a_start * (ln_ratio * i as f64 / last).exp(),
                })
                .collect())
        }
    }
}

/// One [`compare_run`] per grid point, in descending `a`. Points run in
/// parallel; the output order never depends on the worker count.
pub fn scan_grid(
    nu: f64,
    p: u32,
    a_start: f64,
    a_stop: f64,
    points: usize,
    grid: Grid,
    ov: &PlanOverrides,
) -> Result<Vec<EvalBreakdown>> {
    let a = grid_points(a_start, a_stop, points, grid)?;
    SumParams::new(nu, p, a_start)?;
    a.par_iter().map(|&a| compare_run(&SumParams { nu, p, a }, ov)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub a: f64,
    #[serde(rename = "X_1")]
    pub x_1: f64,
    #[serde(rename = "N_1")]
    pub n_1: u64,
    pub r_obs: f64,
    pub r_pred: f64,
    pub ratio: Option<f64>,
    pub sign_obs: i8,
    pub sign_pred: i8,
    pub oracle_terms: u64,
    pub tail_bound: f64,
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

impl From<&EvalBreakdown> for ScanRow {
    fn from(b: &EvalBreakdown) -> Self {
        ScanRow {
            a: b.params.a,
            x_1: b.x_1,
            n_1: b.plan.n[0],
            r_obs: b.r_obs,
            r_pred: b.r_pred,
            ratio: b.ratio,
            sign_obs: sign_of(b.r_obs),
            sign_pred: sign_of(b.r_pred),
            oracle_terms: b.oracle.terms_used,
            tail_bound: b.oracle.tail_bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// Standard error of the slope; NaN when the fit has no residual
    /// degrees of freedom.
    pub stderr: f64,
    pub rows_used: usize,
    pub points_fitted: usize,
    pub envelope: bool,
}

/// Least-squares slope of `ln|r_obs|` against `X_1`.
///
/// Rows at or below the oracle noise floor are dropped. When the usable
/// rows change sign only the local maxima of `|r_obs|` (refined by a
/// parabola through each maximum and its neighbours) are fitted.
pub fn slope_fit(rows: &[ScanRow]) -> Result<SlopeFit> {
    let mut usable: Vec<(f64, f64, i8)> = rows
        .iter()
        .filter(|r| r.r_obs != 0.0 && r.r_obs.abs() > USABILITY_FACTOR * r.tail_bound)
        .map(|r| (r.x_1, r.r_obs.abs().ln(), sign_of(r.r_obs)))
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientData(format!("{} usable rows, need 4", usable.len())));
    }
    usable.sort_by(|a, b| a.0.total_cmp(&b.0));
    let oscillates = usable.windows(2).any(|w| w[0].2 != w[1].2);
    let pts: Vec<(f64, f64)> = if oscillates {
        usable
            .windows(3)
            .filter(|w| w[1].1 >= w[0].1 && w[1].1 >= w[2].1)
            .map(|w| parabola_vertex(w[0].0, w[0].1, w[1].0, w[1].1, w[2].0, w[2].1))
            .collect()
    } else {
        usable.iter().map(|&(x, y, _)| (x, y)).collect()
    };
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!("{} envelope maxima, need 2", pts.len())));
    }
    let (slope, stderr) = least_squares(&pts);
    Ok(SlopeFit { slope, stderr, rows_used: usable.len(), points_fitted: pts.len(), envelope: oscillates })
}

fn parabola_vertex(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> (f64, f64) {
    // Divided differences.
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if !(c < 0.0) {
        return (x1, y1);
    }
    let b = d01 - c * (x0 + x1);
    let xv = (-b / (2.0 * c)).clamp(x0, x2);
    let yv = y0 + (xv - x0) * (d01 + c * (xv - x1));
    (xv, yv)
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if pts.len() < 3 {
        return (slope, f64::NAN);
    }
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Writes the breakdowns as CSV rows or as a JSON array, every float with
/// 17 significant digits.
pub fn render_output<W: Write>(breakdowns: &[EvalBreakdown], format: Format, mut out: W) -> Result<()> {
    if breakdowns.is_empty() {
        return Err(Error::InsufficientData("nothing to render".into()));
    }
    match format {
        Format::Csv => {
            let rows: Vec<ScanRow> = breakdowns.iter().map(ScanRow::from).collect();
            write_csv(&rows, &mut out)?;
        }
        Format::Json => {
            write_json(breakdowns, &mut out)?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn render_to_string(breakdowns: &[EvalBreakdown], format: Format) -> Result<String> {
    let mut buf = Vec::new();
    render_output(breakdowns, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("rendered output is ASCII"))
}

fn write_csv<W: Write>(rows: &[ScanRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let ratio = r.ratio.map(|x| format!("{x:.16e}")).unwrap_or_default();
        writeln!(
            out,
            "{:.16e},{:.16e},{},{:.16e},{:.16e},{},{},{},{},{:.16e}",
            r.a, r.x_1, r.n_1, r.r_obs, r.r_pred, ratio, r.sign_obs, r.sign_pred, r.oracle_terms, r.tail_bound
        )?;
    }
    Ok(())
}

/// Serializes any value with floats printed as `{:.16e}`.
pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, out: W) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(out, SciFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", value as f64)
    }
}

/// Parses CSV produced by [`render_output`].
pub fn parse_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        Some(h) => return Err(Error::Parse(format!("unexpected header {h:?}"))),
        None => return Err(Error::Parse("empty input".into())),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_row(l).map_err(|e| Error::Parse(format!("line {}: {e}", i + 2))))
        .collect()
}

fn parse_row(line: &str) -> std::result::Result<ScanRow, String> {
    let f: Vec<&str> = line.trim_end().split(',').collect();
    if f.len() != 10 {
        return Err(format!("expected 10 fields, found {}", f.len()));
    }
    fn num<T: std::str::FromStr>(s: &str, name: &str) -> std::result::Result<T, String> {
        s.trim().parse().map_err(|_| format!("bad {name} {s:?}"))
    }
    Ok(ScanRow {
        a: num(f[0], "a")?,
        x_1: num(f[1], "X_1")?,
        n_1: num(f[2], "N_1")?,
        r_obs: num(f[3], "r_obs")?,
        r_pred: num(f[4], "r_pred")?,
        ratio: if f[5].trim().is_empty() { None } else { Some(num(f[5], "ratio")?) },
        sign_obs: num(f[6], "sign_obs")?,
        sign_pred: num(f[7], "sign_pred")?,
        oracle_terms: num(f[8], "oracle_terms")?,
        tail_bound: num(f[9], "tail_bound")?,
    })
}
