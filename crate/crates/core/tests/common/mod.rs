#![allow(dead_code)]

/// Trapezoid rule on `[-L, L]` for smooth, rapidly decaying integrands on
/// the whole line. Converges geometrically in `1/h`.
pub fn trapezoid_line<F: Fn(f64) -> f64>(f: F, h: f64, l: f64) -> f64 {
    let n = (l / h).ceil() as i64;
    let mut s = 0.0;
    let mut c = 0.0;
    for k in -n..=n {
        let y = f(k as f64 * h) - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s * h
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}
