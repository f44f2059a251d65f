use serde::{Deserialize, Serialize};

/// A real number stored as `mantissa * exp(log_scale)`.
///
/// Normalised so that `|mantissa|` lies in `[1/e, e)` (or is zero, with a zero
/// scale). Used wherever factorials and `e^{-x}` factors would otherwise
/// leave the double range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledReal {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal { mantissa: 0.0, log_scale: 0.0 };

    /// Builds `m * exp(l)` and normalises it.
    pub fn new(m: f64, l: f64) -> Self {
        if m == 0.0 || !m.is_finite() || !l.is_finite() {
            if m == 0.0 || l == f64::NEG_INFINITY {
                return Self::ZERO;
            }
            return ScaledReal { mantissa: m, log_scale: l };
        }
        let total = m.abs().ln() + l;
        let k = total.floor();
        // |m| e^{l-k} = e^{total-k} with total-k in [0,1).
        let frac = total - k;
        let mut mant = m.signum() * frac.exp();
        let mut scale = k;
        // Guard the half-open interval against rounding at the ends.
        if mant.abs() >= std::f64::consts::E {
            mant /= std::f64::consts::E;
            scale += 1.0;
        }
        ScaledReal { mantissa: mant, log_scale: scale }
    }

    /// `sign * exp(log_abs)`.
    pub fn from_log(sign: f64, log_abs: f64) -> Self {
        Self::new(sign, log_abs)
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(&self) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.log_scale
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn to_f64(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * self.log_scale.exp()
        }
    }

    pub fn mul(&self, other: &ScaledReal) -> ScaledReal {
        Self::new(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalised_range() {
        for &(m, l) in &[(1.0, 0.0), (1e-300, 5.0), (-7.5, -800.0), (2.718281828459045, 0.0)] {
            let s = ScaledReal::new(m, l);
            let am = s.mantissa.abs();
            assert!(am >= (-1.0f64).exp() && am < std::f64::consts::E, "{s:?}");
            assert!(s.log_scale.is_finite());
        }
    }

    #[test]
    fn survives_underflow() {
        let s = ScaledReal::new(3.0, -2000.0);
        assert_eq!(s.to_f64(), 0.0);
        assert!((s.ln_abs() - (3.0f64.ln() - 2000.0)).abs() < 1e-12);
    }

    #[test]
    fn zero() {
        assert!(ScaledReal::new(0.0, 12.0).is_zero());
        assert_eq!(ScaledReal::ZERO.to_f64(), 0.0);
    }
}
