//! Freud-type weights, norm indices and rate exponents.

use alloc::format;
use alloc::string::String;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// A Lebesgue index `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormIndex {
    Finite(f64),
    Infinity,
}

impl NormIndex {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("norm index {p} outside [1, inf)")));
        }
        Ok(NormIndex::Finite(p))
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            NormIndex::Finite(p) => 1.0 / p,
            NormIndex::Infinity => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, NormIndex::Infinity)
    }

    pub fn value(self) -> f64 {
        match self {
            NormIndex::Finite(p) => p,
            NormIndex::Infinity => f64::INFINITY,
        }
    }
}

impl core::fmt::Display for NormIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NormIndex::Finite(p) => write!(f, "{p}"),
            NormIndex::Infinity => write!(f, "inf"),
        }
    }
}

/// Even density `|x|^alpha (1+|x|)^beta exp(-c|x|^lambda + log_scale)`.
///
/// Every weight used in the crate (w, v = w², w^q, ...) is of this form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreudDensity {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub log_scale: f64,
}

impl FreudDensity {
    /// `exp(-c|x|^lambda)`.
    pub fn pure(lambda: f64, c: f64) -> Self {
        FreudDensity { lambda, alpha: 0.0, beta: 0.0, c, log_scale: 0.0 }
    }

    /// Logarithm of the density without the constant `log_scale`.
    pub fn log_shape(&self, x: f64) -> f64 {
        let t = x.abs();
        let mut s = -self.c * t.powf(self.lambda);
        if self.alpha != 0.0 {
            s += self.alpha * t.ln();
        }
        if self.beta != 0.0 {
            s += self.beta * t.ln_1p();
        }
        s
    }

    pub fn log_eval(&self, x: f64) -> f64 {
        self.log_shape(x) + self.log_scale
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.log_eval(x).exp()
    }

    /// `true` when the shape is smooth at 0 (allowing plain Gauss–Legendre panels there).
    pub fn smooth_at_origin(&self) -> bool {
        is_even_integer(self.lambda) && is_even_integer(self.alpha) && self.alpha >= 0.0 && self.beta == 0.0
    }
}

fn is_even_integer(x: f64) -> bool {
    x == x.round() && (x as i64) % 2 == 0
}

/// Parameters of the univariate Freud-type weight
/// `w(x) = |x|^τ (1+|x|)^η exp(−a|x|^λ + b)` and of the companion
/// `v(x) = |x|^μ exp(−2a|x|^λ + 2b)`, together with the dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    lambda: f64,
    tau: f64,
    eta: f64,
    a: f64,
    b: f64,
    mu: f64,
    dim: usize,
}

impl WeightSpec {
    pub fn new(lambda: f64, tau: f64, eta: f64, a: f64, b: f64, mu: f64, dim: usize) -> Result<Self> {
        let all = [lambda, tau, eta, a, b, mu];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight("parameters must be finite"));
        }
        if !(lambda > 1.0) {
            return Err(Error::InvalidWeight("lambda must exceed 1"));
        }
        if !(a > 0.0) {
            return Err(Error::InvalidWeight("a must be positive"));
        }
        if tau < 0.0 {
            return Err(Error::InvalidWeight("tau must be non-negative"));
        }
        if eta < 0.0 {
            return Err(Error::InvalidWeight("eta must be non-negative"));
        }
        if mu < -1.0 {
            return Err(Error::InvalidWeight("mu must be at least -1"));
        }
        if dim == 0 {
            return Err(Error::InvalidWeight("dimension must be positive"));
        }
        Ok(WeightSpec { lambda, tau, eta, a, b, mu, dim })
    }

    /// λ=2, a=1/2, b=0, τ=η=μ=0: `w = e^{-x²/2}`, `v = e^{-x²}`.
    pub fn hermite(dim: usize) -> Self {
        WeightSpec { lambda: 2.0, tau: 0.0, eta: 0.0, a: 0.5, b: 0.0, mu: 0.0, dim }
    }

    /// `exp(-a|x|^λ)` with τ=η=μ=b=0.
    pub fn pure(lambda: f64, a: f64, dim: usize) -> Result<Self> {
        Self::new(lambda, 0.0, 0.0, a, 0.0, 0.0, dim)
    }

    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidWeight("dimension must be positive"));
        }
        self.dim = dim;
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ln w(x)`; `-∞` at the origin when τ > 0.
    pub fn log_w(&self, x: f64) -> f64 {
        self.density_w().log_eval(x)
    }

    pub fn w(&self, x: f64) -> f64 {
        if x == 0.0 && self.tau > 0.0 {
            return 0.0;
        }
        self.log_w(x).exp()
    }

    /// Tensor-product weight `Π w(x_i)`.
    pub fn w_multi(&self, x: &[f64]) -> f64 {
        self.log_w_multi(x).exp()
    }

    pub fn log_w_multi(&self, x: &[f64]) -> f64 {
        x.iter().map(|&t| self.log_w(t)).sum()
    }

    pub fn log_v(&self, x: f64) -> f64 {
        self.density_v().log_eval(x)
    }

    pub fn v(&self, x: f64) -> f64 {
        if x == 0.0 && self.mu > 0.0 {
            return 0.0;
        }
        self.log_v(x).exp()
    }

    pub fn density_w(&self) -> FreudDensity {
        FreudDensity { lambda: self.lambda, alpha: self.tau, beta: self.eta, c: self.a, log_scale: self.b }
    }

    pub fn density_v(&self) -> FreudDensity {
        FreudDensity { lambda: self.lambda, alpha: self.mu, beta: 0.0, c: 2.0 * self.a, log_scale: 2.0 * self.b }
    }

    /// Density `w^q`.
    pub fn density_w_pow(&self, q: f64) -> FreudDensity {
        FreudDensity {
            lambda: self.lambda,
            alpha: q * self.tau,
            beta: q * self.eta,
            c: q * self.a,
            log_scale: q * self.b,
        }
    }

    pub fn rate_exponents(&self, p: NormIndex, q: NormIndex, r: u32) -> RateExponents {
        RateExponents::new(self.lambda, p, q, r)
    }

    /// Condition C with a floating tolerance of `1e-12` for clause (i).
    pub fn check_condition_c(&self, p: f64) -> ConditionC {
        let s = self.tau + 1.0 / p;
        let integral = (s - s.round()).abs() <= 1e-12;
        self.finish_condition_c(p, integral)
    }

    /// Condition C where τ and 1/p are given as exact fractions.
    pub fn check_condition_c_rational(&self, tau: Rational, p: Rational) -> Result<ConditionC> {
        if (tau.to_f64() - self.tau).abs() > 1e-12 * (1.0 + self.tau.abs()) {
            return Err(Error::InvalidArgument(format!("rational tau {tau} does not match the weight")));
        }
        // τ + 1/p = tn/td + pd/pn
        let num = tau.num as i128 * p.num as i128 + p.den as i128 * tau.den as i128;
        let den = tau.den as i128 * p.num as i128;
        if den == 0 {
            return Err(Error::InvalidArgument("p must be nonzero".into()));
        }
        let integral = num % den == 0;
        Ok(self.finish_condition_c(p.to_f64(), integral))
    }

    fn finish_condition_c(&self, p: f64, integral: bool) -> ConditionC {
        if !(p > 1.0 && p.is_finite()) {
            return ConditionC {
                holds: false,
                violated: Some(ConditionClause::Domain),
                diagnostic: format!("p = {p} outside (1, inf)"),
            };
        }
        if integral {
            return ConditionC {
                holds: false,
                violated: Some(ConditionClause::Integrality),
                diagnostic: format!("tau + 1/p = {} is an integer", self.tau + 1.0 / p),
            };
        }
        let mid = self.tau - self.mu / 2.0;
        let lo = -1.0 / p;
        let hi = 1.0 - 1.0 / p - self.eta;
        if !(lo < mid && mid < hi) {
            return ConditionC {
                holds: false,
                violated: Some(ConditionClause::Range),
                diagnostic: format!("{lo} < tau - mu/2 = {mid} < {hi} fails"),
            };
        }
        ConditionC { holds: true, violated: None, diagnostic: String::from("ok") }
    }
}

/// A fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        Ok(Rational { num, den })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl core::fmt::Display for Rational {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionClause {
    /// p is not in (1, ∞).
    Domain,
    /// τ + 1/p is an integer.
    Integrality,
    /// −1/p < τ − μ/2 < 1 − 1/p − η fails.
    Range,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionC {
    pub holds: bool,
    pub violated: Option<ConditionClause>,
    pub diagnostic: String,
}

/// `r_λ = (1−1/λ) r`, `δ_{λ,p,q}` and `r_{λ,p,q} = r_λ − δ_{λ,p,q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateExponents {
    pub p: NormIndex,
    pub q: NormIndex,
    pub r: u32,
    pub r_lambda: f64,
    pub delta: f64,
    pub r_lpq: f64,
}

impl RateExponents {
    pub fn new(lambda: f64, p: NormIndex, q: NormIndex, r: u32) -> Self {
        let ip = p.reciprocal();
        let iq = q.reciprocal();
        let r_lambda = (1.0 - 1.0 / lambda) * r as f64;
        // p ≤ q  ⇔  1/p ≥ 1/q
        let delta = if ip >= iq { (1.0 - 1.0 / lambda) * (ip - iq) } else { (1.0 / lambda) * (iq - ip) };
        RateExponents { p, q, r, r_lambda, delta, r_lpq: r_lambda - delta }
    }

    /// Whether a convergence experiment makes sense (`r_{λ,p,q} > 0`).
    pub fn is_convergent(&self) -> bool {
        self.r_lpq > 0.0
    }
}
