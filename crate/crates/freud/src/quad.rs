//! Gauss–Legendre rules and composite panel rules.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn append(&mut self, other: &Rule1D) {
        self.nodes.extend_from_slice(&other.nodes);
        self.weights.extend_from_slice(&other.weights);
    }

    /// Mirror a rule on `[0, X]` to `[-X, X]`.
    pub fn symmetrized(&self) -> Rule1D {
        let mut out = Rule1D::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights).rev() {
            out.nodes.push(-x);
            out.weights.push(w);
        }
        out.append(self);
        out
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule1D {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule1D { nodes, weights }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule from a base rule on `[-1,1]` applied on consecutive breakpoints.
pub fn composite(base: &Rule1D, breaks: &[f64]) -> Rule1D {
    let mut out = Rule1D::default();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        for (&t, &wt) in base.nodes.iter().zip(&base.weights) {
            out.nodes.push(c + h * t);
            out.weights.push(h * wt);
        }
    }
    out
}

/// Uniform breakpoints on `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let n = panels.max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Breakpoints on `[0, X]` with geometric grading toward 0 (`levels` halvings of the first panel).
pub fn graded_breaks(x_max: f64, panels: usize, levels: usize) -> Vec<f64> {
    let mut br = uniform_breaks(0.0, x_max, panels);
    let h = br[1];
    let mut head: Vec<f64> = (1..=levels).rev().map(|j| h * 0.5f64.powi(j as i32)).collect();
    head.insert(0, 0.0);
    br.remove(0);
    head.extend(br);
    head
}

/// Adaptive bisection comparing 10- and 20-point Gauss–Legendre on each piece.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let lo = gauss_legendre(10);
    let hi = gauss_legendre(20);
    adaptive_inner(f, a, b, tol, depth, &lo, &hi)
}

fn adaptive_inner(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize, lo: &Rule1D, hi: &Rule1D) -> f64 {
    let br = [a, b];
    let i1 = composite(lo, &br).integrate(f);
    let i2 = composite(hi, &br).integrate(f);
    if depth == 0 || (i1 - i2).abs() <= tol {
        return i2;
    }
    let m = 0.5 * (a + b);
    adaptive_inner(f, a, m, 0.5 * tol, depth - 1, lo, hi) + adaptive_inner(f, m, b, 0.5 * tol, depth - 1, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 10, 20, 33] {
            let r = gauss_legendre(n);
            for k in 0..(2 * n) {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} k={k} got={got}");
            }
        }
    }

    #[test]
    fn composite_gaussian() {
        let r = composite(&gauss_legendre(16), &uniform_breaks(-10.0, 10.0, 20));
        let v = r.integrate(|x| (-x * x).exp());
        assert!((v - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn graded_singular() {
        let r = composite(&gauss_legendre(16), &graded_breaks(1.0, 4, 60));
        let v = r.integrate(|x| x.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }
}
