//! Truncated Taylor arithmetic for exact derivatives of test functions.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};
#[allow(unused_imports)]
use num_traits::Float;

/// Normalized Taylor coefficients `c_k = f^{(k)}(x_0)/k!`, `k = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    pub fn var(x: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = x;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `f^{(k)}(x_0)`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.c[k] * f
    }

    /// All derivatives `f^{(k)}(x_0)`, `k = 0..=order`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.derivative(k)).collect()
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()).div(self)
    }

    pub fn div(&self, g: &Jet) -> Jet {
        let n = self.c.len();
        let mut h = vec![0.0; n];
        for k in 0..n {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= g.c[j] * h[k - j];
            }
            h[k] = s / g.c[0];
        }
        Jet { c: h }
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut g = vec![0.0; n];
        g[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * g[k - j];
            }
            g[k] = s / k as f64;
        }
        Jet { c: g }
    }

    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let f0 = self.c[0];
        let mut g = vec![0.0; n];
        g[0] = f0.ln();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * g[j] * self.c[k - j];
            }
            g[k] = (self.c[k] - s / k as f64) / f0;
        }
        Jet { c: g }
    }

    /// `f^a` for `f(x_0) ≠ 0` (real power of a positive base, or any integer power).
    pub fn powf(&self, a: f64) -> Jet {
        let n = self.c.len();
        let f0 = self.c[0];
        let mut g = vec![0.0; n];
        g[0] = f0.powf(a);
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += ((a + 1.0) * j as f64 - k as f64) * self.c[j] * g[k - j];
            }
            g[k] = s / (k as f64 * f0);
        }
        Jet { c: g }
    }

    /// `(sin f, cos f)`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..n {
            let (mut a, mut b) = (0.0, 0.0);
            for j in 1..=k {
                a += j as f64 * self.c[j] * c[k - j];
                b += j as f64 * self.c[j] * s[k - j];
            }
            s[k] = a / k as f64;
            c[k] = -b / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.c.len();
        let mut h = vec![0.0; n];
        for i in 0..n {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..n - i {
                h[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c: h }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_square() {
        // d^k/dx^k exp(-x^2) at x = 0.3
        let x = Jet::var(0.3, 4);
        let f = (&x * &x).scale(-1.0).exp();
        let e = (-0.09f64).exp();
        let d1 = -0.6 * e;
        let d2 = (4.0 * 0.09 - 2.0) * e;
        assert!((f.derivative(1) - d1).abs() < 1e-14);
        assert!((f.derivative(2) - d2).abs() < 1e-14);
    }

    #[test]
    fn ln_pow_div() {
        let x = Jet::var(1.7, 3);
        let l = x.ln();
        assert!((l.derivative(2) + 1.0 / (1.7 * 1.7)).abs() < 1e-14);
        let p = x.powf(2.5);
        assert!((p.derivative(3) - 2.5 * 1.5 * 0.5 * 1.7f64.powf(-0.5)).abs() < 1e-13);
        let r = x.recip();
        assert!((r.derivative(1) + 1.0 / (1.7 * 1.7)).abs() < 1e-14);
    }

    #[test]
    fn trig() {
        let x = Jet::var(0.4, 3);
        let (s, c) = x.sin_cos();
        assert!((s.derivative(3) + 0.4f64.cos()).abs() < 1e-14);
        assert!((c.derivative(2) + 0.4f64.cos()).abs() < 1e-14);
    }
}
