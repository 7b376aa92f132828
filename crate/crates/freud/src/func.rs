//! Test functions with exact derivatives, and the default function panel.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::jet::Jet;
use crate::ortho::RecurrenceTable;
use crate::weight::WeightSpec;

/// Univariate building blocks.
#[derive(Debug, Clone)]
pub enum Univariate {
    Constant(f64),
    /// `Σ coeffs[i] x^i`.
    Polynomial(Vec<f64>),
    /// `exp(−c (x − center)²)`.
    Gaussian { c: f64, center: f64 },
    /// `(Σ coeffs[i] x^i) exp(−c x²)`.
    PolyGaussian { coeffs: Vec<f64>, c: f64 },
    /// `exp(1 − 1/(1 − t²))` for `|t| < 1`, `t = (x − center)/radius`; `C^∞` with compact support.
    Bump { center: f64, radius: f64 },
    /// `|x|^beta exp(−c x²)`: finite smoothness at the origin.
    AbsPower { beta: f64, c: f64 },
    /// `(1 − (x/radius)²)_+^power`: a piecewise polynomial with `power − 1` continuous derivatives.
    TruncatedPower { radius: f64, power: u32 },
    /// `cos(2π freq x + phase)`.
    Cosine { freq: f64, phase: f64 },
    /// The orthonormal polynomial `p_m` of a recurrence table.
    Orthonormal { table: Arc<RecurrenceTable>, m: usize },
}

impl Univariate {
    /// Taylor jet of order `order` at `x`.
    pub fn jet(&self, x: f64, order: usize) -> Jet {
        match self {
            Univariate::Constant(v) => Jet::constant(*v, order),
            Univariate::Polynomial(c) => poly_jet(c, x, order),
            Univariate::Gaussian { c, center } => {
                let t = Jet::var(x - center, order);
                (&t * &t).scale(-c).exp()
            }
            Univariate::PolyGaussian { coeffs, c } => {
                let t = Jet::var(x, order);
                let g = (&t * &t).scale(-c).exp();
                &poly_jet(coeffs, x, order) * &g
            }
            Univariate::Bump { center, radius } => {
                let t = (x - center) / radius;
                if t.abs() >= 1.0 {
                    return Jet::constant(0.0, order);
                }
                let tj = Jet::var(t, order);
                let u = (&tj * &tj).scale(-1.0).add_scalar(1.0);
                let e = u.recip().scale(-1.0).add_scalar(1.0).exp();
                chain_scale(e, 1.0 / radius)
            }
            Univariate::AbsPower { beta, c } => {
                if x == 0.0 {
                    let mut j = Jet::constant(0.0, order);
                    for k in 1..=order {
                        j.c[k] = if (k as f64) < *beta { 0.0 } else { f64::NAN };
                    }
                    return j;
                }
                let s = x.signum();
                let a = Jet::var(x.abs(), order).powf(*beta);
                let t = Jet::var(x.abs(), order);
                let g = (&t * &t).scale(-c).exp();
                chain_scale(&a * &g, s)
            }
            Univariate::TruncatedPower { radius, power } => {
                let t = x / radius;
                if t.abs() >= 1.0 {
                    return Jet::constant(0.0, order);
                }
                let tj = Jet::var(t, order);
                let u = (&tj * &tj).scale(-1.0).add_scalar(1.0);
                let mut acc = Jet::constant(1.0, order);
                for _ in 0..*power {
                    acc = &acc * &u;
                }
                chain_scale(acc, 1.0 / radius)
            }
            Univariate::Cosine { freq, phase } => {
                let t = Jet::var(x, order).scale(2.0 * PI * freq).add_scalar(*phase);
                t.sin_cos().1
            }
            Univariate::Orthonormal { table, m } => {
                let xj = Jet::var(x, order);
                let mut prev = Jet::constant(0.0, order);
                let mut cur = Jet::constant(table.norm0(), order);
                for k in 0..*m {
                    let nxt = (&(&xj * &cur) - &prev.scale(table.alpha(k))).scale(1.0 / table.alpha(k + 1));
                    prev = cur;
                    cur = nxt;
                }
                cur
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Univariate::Constant(v) => *v,
            Univariate::Gaussian { c, center } => (-c * (x - center) * (x - center)).exp(),
            Univariate::Bump { center, radius } => {
                let t = (x - center) / radius;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            Univariate::AbsPower { beta, c } => x.abs().powf(*beta) * (-c * x * x).exp(),
            Univariate::Cosine { freq, phase } => (2.0 * PI * freq * x + phase).cos(),
            _ => self.jet(x, 0).value(),
        }
    }

    /// `f^{(k)}(x)`.
    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        if k == 0 {
            return self.eval(x);
        }
        self.jet(x, k).derivative(k)
    }

    /// A radius outside which the function vanishes identically, if any.
    pub fn support_radius(&self) -> Option<(f64, f64)> {
        match self {
            Univariate::Bump { center, radius } => Some((center - radius, center + radius)),
            Univariate::TruncatedPower { radius, .. } => Some((-radius, *radius)),
            _ => None,
        }
    }
}

/// Rescales jet coefficients for an inner affine map with slope `s`.
fn chain_scale(mut j: Jet, s: f64) -> Jet {
    let mut f = 1.0;
    for c in j.c.iter_mut() {
        *c *= f;
        f *= s;
    }
    j
}

fn poly_jet(coeffs: &[f64], x: f64, order: usize) -> Jet {
    let xj = Jet::var(x, order);
    let mut acc = Jet::constant(0.0, order);
    for &c in coeffs.iter().rev() {
        acc = (&acc * &xj).add_scalar(c);
    }
    acc
}

/// A sum of separable products with exact mixed partials.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub name: String,
    pub dim: usize,
    pub terms: Vec<(f64, Vec<Univariate>)>,
}

impl TestFunction {
    pub fn separable(name: &str, factors: Vec<Univariate>) -> Self {
        TestFunction { name: name.to_string(), dim: factors.len(), terms: vec![(1.0, factors)] }
    }

    /// The same univariate factor in every coordinate.
    pub fn product(name: &str, u: Univariate, dim: usize) -> Self {
        Self::separable(name, vec![u; dim])
    }

    pub fn zero(dim: usize) -> Self {
        Self::product("zero", Univariate::Constant(0.0), dim)
    }

    /// The univariate factors if the function is a single product.
    pub fn factors(&self) -> Option<(f64, &[Univariate])> {
        if self.terms.len() == 1 {
            Some((self.terms[0].0, &self.terms[0].1))
        } else {
            None
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, fs)| c * fs.iter().zip(x).map(|(u, &t)| u.eval(t)).product::<f64>()).sum()
    }

    /// Mixed partial `D^k f(x)`.
    pub fn partial(&self, x: &[f64], k: &[usize]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| c * fs.iter().zip(x).zip(k).map(|((u, &t), &ki)| u.derivative(t, ki)).product::<f64>())
            .sum()
    }

    /// `X` such that `|f w| < eps` on every point with some `|x_i| > X`, found by scanning
    /// each factor on a fine grid out to a far limit (a numerical certificate only).
    pub fn decay_radius(&self, spec: &WeightSpec, eps: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (c, fs) in &self.terms {
            let sups: Vec<f64> = fs.iter().map(|u| weighted_sup(u, spec)).collect();
            for (i, u) in fs.iter().enumerate() {
                let others: f64 = sups.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| *s).product();
                let budget = eps / (c.abs() * others * self.terms.len() as f64).max(1e-300);
                worst = worst.max(tail_radius(u, spec, budget));
            }
        }
        worst
    }
}

fn weighted_sup(u: &Univariate, spec: &WeightSpec) -> f64 {
    let mut s: f64 = 0.0;
    let mut x = -60.0;
    while x <= 60.0 {
        s = s.max((u.eval(x) * spec.w(x)).abs());
        x += 0.01;
    }
    s
}

fn tail_radius(u: &Univariate, spec: &WeightSpec, eps: f64) -> f64 {
    let far = 200.0;
    let step = 0.01;
    let mut x = far;
    while x > 0.0 {
        if (u.eval(x) * spec.w(x)).abs() >= eps || (u.eval(-x) * spec.w(-x)).abs() >= eps {
            return x + step;
        }
        x -= step;
    }
    0.0
}

/// Names of the default panel.
pub const DEFAULT_PANEL: [&str; 4] = ["gaussian", "shifted_bump", "bump_product", "poly_gaussian"];

/// Finite-smoothness members that expose algebraic convergence rates.
pub const ROUGH_PANEL: [&str; 2] = ["abs_power", "spline_bump"];

/// Looks up a panel function by name.
pub fn panel_function(name: &str, dim: usize) -> Option<TestFunction> {
    let u = match name {
        "gaussian" => Univariate::Gaussian { c: 0.25, center: 0.0 },
        "shifted_bump" => Univariate::Gaussian { c: 0.5, center: 0.75 },
        "bump_product" => Univariate::Bump { center: 0.0, radius: 2.5 },
        "poly_gaussian" => Univariate::PolyGaussian { coeffs: vec![1.0, 0.5, 0.25], c: 0.25 },
        "abs_power" => Univariate::AbsPower { beta: 2.5, c: 0.25 },
        "spline_bump" => Univariate::TruncatedPower { radius: 3.0, power: 3 },
        "cos2pi" => Univariate::Cosine { freq: 1.0, phase: 0.0 },
        "one" => Univariate::Constant(1.0),
        _ => return None,
    };
    Some(TestFunction::product(name, u, dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(u: &Univariate, x: f64, k: usize) -> f64 {
        let h = 1e-3;
        let g = |t: f64| u.derivative(t, k - 1);
        (8.0 * (g(x + h) - g(x - h)) - (g(x + 2.0 * h) - g(x - 2.0 * h))) / (12.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let xs = [-1.3, -0.4, 0.37, 1.1, 2.2];
        for name in ["gaussian", "shifted_bump", "bump_product", "poly_gaussian", "abs_power", "spline_bump", "cos2pi"] {
            let f = panel_function(name, 1).unwrap();
            let u = &f.terms[0].1[0];
            for &x in &xs {
                for k in 1..=3 {
                    let a = u.derivative(x, k);
                    let b = fd(u, x, k);
                    assert!((a - b).abs() <= 1e-5 * (1.0 + a.abs()), "{name} x={x} k={k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn mixed_partial_product() {
        let f = panel_function("gaussian", 2).unwrap();
        let x = [0.3, -0.8];
        let g = |t: f64| (-0.25 * t * t).exp();
        let dg = |t: f64| -0.5 * t * g(t);
        assert!((f.partial(&x, &[1, 1]) - dg(0.3) * dg(-0.8)).abs() < 1e-15);
        assert!((f.eval(&x) - g(0.3) * g(-0.8)).abs() < 1e-15);
    }

    #[test]
    fn decay_certificate() {
        let f = panel_function("gaussian", 1).unwrap();
        let spec = WeightSpec::hermite(1);
        let x = f.decay_radius(&spec, 1e-16);
        // |f w| = exp(-3x²/4) < 1e-16 beyond sqrt(4·16·ln10/3) ≈ 7.0
        assert!(x > 6.9 && x < 7.1, "{x}");
    }
}
