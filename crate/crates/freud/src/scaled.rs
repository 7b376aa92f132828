//! Mantissa/exponent numbers for polynomial values that leave the `f64` range.

#[allow(unused_imports)]
use num_traits::Float;

const LN2: f64 = core::f64::consts::LN_2;
const HI: f64 = 18446744073709551616.0; // 2^64
const LO: f64 = 1.0 / HI;

/// A value pair `(p, dp) · 2^exp` sharing one binary exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPair {
    pub p: f64,
    pub dp: f64,
    pub exp: i64,
}

impl ScaledPair {
    /// `p · 2^exp` as an `f64` (may overflow to ±∞ or underflow to 0).
    pub fn value(&self) -> f64 {
        scale2(self.p, self.exp)
    }

    pub fn derivative(&self) -> f64 {
        scale2(self.dp, self.exp)
    }

    /// `ln |p · 2^exp|`.
    pub fn ln_abs(&self) -> f64 {
        self.p.abs().ln() + self.exp as f64 * LN2
    }

    pub fn ln_abs_derivative(&self) -> f64 {
        self.dp.abs().ln() + self.exp as f64 * LN2
    }

    /// `p · 2^exp · e^{log_weight}` computed without intermediate overflow.
    pub fn weighted(&self, log_weight: f64) -> f64 {
        if self.p == 0.0 {
            return 0.0;
        }
        self.p.signum() * (self.ln_abs() + log_weight).exp()
    }

    pub fn weighted_derivative(&self, log_weight: f64) -> f64 {
        if self.dp == 0.0 {
            return 0.0;
        }
        self.dp.signum() * (self.ln_abs_derivative() + log_weight).exp()
    }
}

/// `x · 2^e` with saturation.
pub fn scale2(x: f64, e: i64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let e = e.clamp(-4000, 4000) as i32;
    libm::scalbn(x, e)
}

/// Renormalizes a group of mantissas sharing `exp` so the largest stays in `[2^-64, 2^64]`.
pub fn renormalize(vals: &mut [f64], exp: &mut i64) {
    let m = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return;
    }
    if m > HI || m < LO {
        let (_, e) = libm::frexp(m);
        let shift = e as i64;
        for v in vals.iter_mut() {
            *v = libm::scalbn(*v, -(shift as i32));
        }
        *exp += shift;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalize_keeps_value() {
        let mut v = [3.0e30, -1.0e25];
        let mut e = 5;
        renormalize(&mut v, &mut e);
        assert!(v[0].abs() <= 1.0 && v[0].abs() >= 0.5);
        assert!((scale2(v[0], e) - 3.0e30 * 32.0).abs() / (3.0e30 * 32.0) < 1e-15);
        assert!((scale2(v[1], e) + 1.0e25 * 32.0).abs() / (1.0e25 * 32.0) < 1e-15);
    }

    #[test]
    fn weighted_is_log_space() {
        let s = ScaledPair { p: 0.75, dp: -0.5, exp: 3000 };
        let w = s.weighted(-3000.0 * LN2);
        assert!((w - 0.75).abs() < 1e-12);
        assert!((s.weighted_derivative(-3000.0 * LN2) + 0.5).abs() < 1e-12);
        assert!(s.value().is_infinite());
    }
}
