//! Fooling functions: normalized bumps in `W^r_{p,w}` that vanish on a given node set.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::func::Univariate;
use crate::jet::Jet;
use crate::quad::{composite, gauss_legendre, uniform_breaks, Rule1D};
use crate::weight::{NormIndex, WeightSpec};
use crate::{Error, Result};

/// `Γ_d(M) = { s ∈ ℕ^d : Π s_i ≤ 2M, s_i ≥ ⌈M^{1/d}⌉ }` in lexicographic order.
pub fn gamma_set(dim: usize, m: u64) -> Vec<Vec<u64>> {
    let lo = root_ceil(m, dim);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(dim);
    gamma_rec(dim, lo, 2 * m, &mut cur, &mut out);
    out
}

/// `|Γ_d(M)|` without materializing the set.
pub fn gamma_count(dim: usize, m: u64) -> u64 {
    fn rec(left: usize, lo: u64, budget: u64) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut c = 0;
        let mut s = lo;
        while s * lo.saturating_pow(left as u32 - 1) <= budget {
            c += rec(left - 1, lo, budget / s);
            s += 1;
        }
        c
    }
    rec(dim, root_ceil(m, dim), 2 * m)
}

fn gamma_rec(dim: usize, lo: u64, budget: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let left = dim - cur.len();
    if left == 0 {
        out.push(cur.clone());
        return;
    }
    let mut s = lo;
    while s * lo.saturating_pow(left as u32 - 1) <= budget {
        cur.push(s);
        gamma_rec(dim, lo, budget / s, cur, out);
        cur.pop();
        s += 1;
    }
}

/// Smallest integer `s` with `s^d ≥ m`.
fn root_ceil(m: u64, dim: usize) -> u64 {
    let mut s = (m as f64).powf(1.0 / dim as f64).floor().max(1.0) as u64;
    while s.saturating_pow(dim as u32) < m {
        s += 1;
    }
    while s > 1 && (s - 1).saturating_pow(dim as u32) >= m {
        s -= 1;
    }
    s
}

/// Smallest `M ≥ 1` with `|Γ_d(M)| ≥ n + 1`.
pub fn smallest_m(dim: usize, n: u64) -> u64 {
    let mut m = 1;
    while gamma_count(dim, m) < n + 1 {
        m += 1;
    }
    m
}

/// A fooling function `h̄ = c · Π_i g_i / w`, supported on the cell `K_s`.
#[derive(Debug, Clone)]
pub struct FoolingFunction {
    spec: WeightSpec,
    pub m: u64,
    pub delta: f64,
    pub cell: Vec<u64>,
    /// Factors `g_i(x) = φ((x − δ(s_i − 1))/δ)` with `φ` the standard bump on `[0, 1]`.
    pub factors: Vec<Univariate>,
    /// `c = 1/‖Π g_i/w‖_{W^r_{p,w}}`.
    pub scale: f64,
    pub r: u32,
    pub p: NormIndex,
}

impl FoolingFunction {
    /// Builds `h̄` avoiding every point of `nodes` (each of length `d`).
    pub fn new(spec: &WeightSpec, nodes: &[Vec<f64>], r: u32, p: NormIndex) -> Result<Self> {
        let dim = spec.dim();
        if nodes.iter().any(|x| x.len() != dim) {
            return Err(Error::InvalidArgument("node dimension mismatch".into()));
        }
        let m = smallest_m(dim, nodes.len() as u64);
        let delta = (m as f64).powf((1.0 / spec.lambda() - 1.0) / dim as f64);
        let inside = |s: &[u64], x: &[f64]| {
            s.iter().zip(x).all(|(&si, &xi)| xi > delta * (si - 1) as f64 && xi < delta * si as f64)
        };
        let cell = gamma_set(dim, m)
            .into_iter()
            .find(|s| !nodes.iter().any(|x| inside(s, x)))
            .ok_or(Error::CellSearchFailure)?;
        let factors: Vec<Univariate> = cell
            .iter()
            .map(|&s| Univariate::Bump { center: delta * (s as f64 - 0.5), radius: 0.5 * delta })
            .collect();
        let mut f = FoolingFunction { spec: *spec, m, delta, cell, factors, scale: 1.0, r, p };
        f.scale = 1.0 / f.unscaled_sobolev_norm();
        Ok(f)
    }

    fn cell_rule(&self, i: usize) -> Rule1D {
        let lo = self.delta * (self.cell[i] - 1) as f64;
        composite(&gauss_legendre(20), &uniform_breaks(lo, lo + self.delta, 16))
    }

    /// `(g_i/w)^{(k)}(x) · w(x)` for `k = 0..=r`.
    fn factor_jet(&self, i: usize, x: f64) -> Jet {
        let order = self.r as usize;
        let g = self.factors[i].jet(x, order);
        if g.c.iter().all(|&c| c == 0.0) {
            return g;
        }
        let s = &self.spec;
        let t = Jet::var(x.abs(), order);
        let mut ln = t.powf(s.lambda()).scale(s.a()).add_scalar(-s.b());
        if s.tau() != 0.0 {
            ln = &ln - &t.ln().scale(s.tau());
        }
        if s.eta() != 0.0 {
            ln = &ln - &t.add_scalar(1.0).ln().scale(s.eta());
        }
        let c0 = ln.value();
        let mut e = ln.add_scalar(-c0).exp();
        let mut sign = 1.0;
        for c in e.c.iter_mut() {
            *c *= sign;
            sign *= x.signum();
        }
        &g * &e
    }

    /// `‖(g_i/w)^{(k)} w‖_{L_p}` for `k = 0..=r`.
    fn factor_norms(&self, i: usize) -> Vec<f64> {
        let rule = self.cell_rule(i);
        let r = self.r as usize;
        let mut acc = vec![0.0; r + 1];
        for (&x, &wq) in rule.nodes.iter().zip(&rule.weights) {
            let d = self.factor_jet(i, x).derivatives();
            for k in 0..=r {
                match self.p {
                    NormIndex::Infinity => acc[k] = f64::max(acc[k], d[k].abs()),
                    NormIndex::Finite(p) => acc[k] += wq * d[k].abs().powf(p),
                }
            }
        }
        match self.p {
            NormIndex::Infinity => acc,
            NormIndex::Finite(p) => acc.into_iter().map(|v| v.powf(1.0 / p)).collect(),
        }
    }

    /// `‖Π g_i/w‖_{W^r_{p,w}}`; the mixed norm factorizes over axes for separable functions.
    pub fn unscaled_sobolev_norm(&self) -> f64 {
        let mut total = 1.0;
        for i in 0..self.factors.len() {
            let n = self.factor_norms(i);
            total *= match self.p {
                NormIndex::Infinity => n.iter().cloned().fold(0.0, f64::max),
                NormIndex::Finite(p) => n.iter().map(|v| v.powf(p)).sum::<f64>(),
            };
        }
        match self.p {
            NormIndex::Infinity => total,
            NormIndex::Finite(p) => total.powf(1.0 / p),
        }
    }

    /// `h̄(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_weighted(x) * (-self.spec.log_w_multi(x)).exp()
    }

    /// `h̄(x) w(x)`.
    pub fn eval_weighted(&self, x: &[f64]) -> f64 {
        self.scale * self.factors.iter().zip(x).map(|(u, &t)| u.eval(t)).product::<f64>()
    }

    /// `‖h̄‖_{L_{q,w}}`.
    pub fn weighted_norm(&self, q: NormIndex) -> f64 {
        let mut total = self.scale;
        for i in 0..self.factors.len() {
            let rule = self.cell_rule(i);
            let u = &self.factors[i];
            total *= match q {
                NormIndex::Infinity => u.eval(self.delta * (self.cell[i] as f64 - 0.5)),
                NormIndex::Finite(q) => rule.integrate(|x| u.eval(x).abs().powf(q)).powf(1.0 / q),
            };
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_counts() {
        for d in 1..=3 {
            for m in [1u64, 5, 17, 40] {
                assert_eq!(gamma_count(d, m), gamma_set(d, m).len() as u64, "d={d} m={m}");
            }
        }
        // d = 1: s ∈ {M, …, 2M}
        assert_eq!(gamma_count(1, 10), 11);
        assert_eq!(smallest_m(1, 64), 64);
    }

    #[test]
    fn vanishes_on_nodes() {
        let spec = WeightSpec::hermite(1);
        let nodes: Vec<Vec<f64>> = (0..30).map(|i| vec![0.3 * i as f64]).collect();
        let h = FoolingFunction::new(&spec, &nodes, 2, NormIndex::Finite(2.0)).unwrap();
        for x in &nodes {
            assert_eq!(h.eval(x), 0.0);
        }
        assert!(h.weighted_norm(NormIndex::Finite(2.0)) > 0.0);
    }
}
