//! Assembled operators on ℝ^d: a smooth partition of unity over shifted cubes,
//! exponential sample budgets, and periodic inner operators on each cell.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bspline::{for_each_index, BSplineMask, PeriodicInterpolant, PeriodicPlan};
use crate::sparse::level_set;
use crate::{Error, Result};

/// Default `θ`.
pub const DEFAULT_THETA: f64 = 1.5;

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, and `S(t) + S(1 − t) = 1`.
pub fn smooth_step(t: f64) -> f64 {
    let a = psi(t);
    let b = psi(1.0 - t);
    if a + b == 0.0 {
        return if t > 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// `φ_k(x) = Π_i g(x_i − k_i)` with `Σ_{k∈ℤ} g(x − k) = 1` and `supp g ⊂ (−θ/2, θ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOfUnity {
    theta: f64,
    eps: f64,
    dim: usize,
}

impl PartitionOfUnity {
    pub fn new(theta: f64, dim: usize) -> Result<Self> {
        if !(theta.is_finite() && theta > 1.0) {
            return Err(Error::InvalidTheta(theta));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        // the ramp half-width stays strictly below (θ − 1)/2 and at most 1/2
        let eps = (0.9 * (theta - 1.0) / 2.0).min(0.45);
        Ok(PartitionOfUnity { theta, eps, dim })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Half-width of the ramp around `±1/2`.
    pub fn ramp(&self) -> f64 {
        self.eps
    }

    /// Univariate generator `g`.
    pub fn g(&self, x: f64) -> f64 {
        let t = (x.abs() - (0.5 - self.eps)) / (2.0 * self.eps);
        1.0 - smooth_step(t)
    }

    pub fn phi(&self, k: &[i64], x: &[f64]) -> f64 {
        k.iter().zip(x).map(|(&ki, &xi)| self.g(xi - ki as f64)).product()
    }

    /// Cells `k` with `φ_k(x) ≠ 0` (at most `2^d`).
    pub fn cells_at(&self, x: &[f64]) -> Vec<Vec<i64>> {
        let per: Vec<Vec<i64>> = x
            .iter()
            .map(|&xi| {
                let c = xi.round() as i64;
                (c - 1..=c + 1).filter(|&k| (xi - k as f64).abs() < 0.5 + self.eps).collect()
            })
            .collect();
        let lens: Vec<usize> = per.iter().map(Vec::len).collect();
        let mut out = Vec::new();
        for_each_index(&lens, |s| out.push(s.iter().enumerate().map(|(i, &j)| per[i][j]).collect()));
        out
    }
}

/// How the scale `ϱ` in `n_k = ⌊ϱ n e^{−(aδ/α)|k|^λ} + 1⌋` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// `ϱ = (n − N)/(n Σ_{|k|<m_n} e^{−(aδ/α)|k|^λ})` with `N` the number of cells: guarantees `Σ n_k ≤ n`.
    Lattice,
    /// `ϱ^{−1} = 2(2π)^{(d−1)/2}/d!! · Σ_{s≥0} s^d e^{−(aδ/α)s^λ}` (ball-volume bound).
    Volume,
}

/// Per-cell sample budgets `n_k` over the lattice ball `|k|₂ < m_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetAllocation {
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub lambda: f64,
    pub a: f64,
    pub dim: usize,
    pub m_n: f64,
    pub rho: f64,
    pub normalizer: Normalizer,
    /// `(k, n_k)` in lexicographic order of `k`.
    pub cells: Vec<(Vec<i64>, usize)>,
}

impl BudgetAllocation {
    pub fn new(n: usize, alpha: f64, delta: f64, lambda: f64, a: f64, dim: usize) -> Result<Self> {
        Self::with_normalizer(n, alpha, delta, lambda, a, dim, Normalizer::Lattice)
    }

    pub fn with_normalizer(
        n: usize,
        alpha: f64,
        delta: f64,
        lambda: f64,
        a: f64,
        dim: usize,
        normalizer: Normalizer,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::BudgetInfeasible { n, reason: "n must be at least 2".into() });
        }
        if !(alpha > 0.0 && delta > 0.0 && lambda > 1.0 && a > 0.0) || dim == 0 {
            return Err(Error::InvalidArgument("budget parameters out of range".into()));
        }
        let m_n = (lambda * alpha * (n as f64).ln() / delta).powf(1.0 / lambda);
        if m_n < 1.0 {
            return Err(Error::BudgetInfeasible { n, reason: format!("m_n = {m_n} < 1") });
        }
        let c = a * delta / alpha;
        let ks = lattice_ball(dim, m_n);
        let decay = |k: &[i64]| (-c * norm2(k).powf(lambda)).exp();
        let rho = match normalizer {
            Normalizer::Lattice => {
                if n <= ks.len() {
                    return Err(Error::BudgetInfeasible {
                        n,
                        reason: format!("{} cells need at least one sample each", ks.len()),
                    });
                }
                let total: f64 = ks.iter().map(|k| decay(k)).sum();
                (n - ks.len()) as f64 / (n as f64 * total)
            }
            Normalizer::Volume => {
                let mut s = 0.0;
                let mut i = 0u32;
                loop {
                    let t = (i as f64).powi(dim as i32) * (-c * (i as f64).powf(lambda)).exp();
                    s += t;
                    if i > 10 && t < 1e-18 * s {
                        break;
                    }
                    i += 1;
                }
                1.0 / (ball_volume_constant(dim) * s)
            }
        };
        let cells = ks
            .into_iter()
            .map(|k| {
                let nk = (rho * n as f64 * decay(&k) + 1.0).floor() as usize;
                (k, nk)
            })
            .collect();
        Ok(BudgetAllocation { n, alpha, delta, lambda, a, dim, m_n, rho, normalizer, cells })
    }

    pub fn total(&self) -> usize {
        self.cells.iter().map(|c| c.1).sum()
    }

    pub fn budget(&self, k: &[i64]) -> usize {
        self.cells.iter().find(|c| c.0 == k).map_or(0, |c| c.1)
    }
}

/// `2(2π)^{(d−1)/2}/d!!`.
pub fn ball_volume_constant(dim: usize) -> f64 {
    let mut df = 1.0;
    let mut i = dim;
    while i > 1 {
        df *= i as f64;
        i -= 2;
    }
    2.0 * (2.0 * PI).powf((dim as f64 - 1.0) / 2.0) / df
}

fn norm2(k: &[i64]) -> f64 {
    k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt()
}

/// All `k ∈ ℤ^d` with `|k|₂ < radius`, lexicographic.
pub fn lattice_ball(dim: usize, radius: f64) -> Vec<Vec<i64>> {
    let r = radius.ceil() as i64;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::new();
    for_each_index(&vec![side; dim], |s| {
        let k: Vec<i64> = s.iter().map(|&v| v as i64 - r).collect();
        if norm2(&k) < radius {
            out.push(k);
        }
    });
    out
}

/// The periodic Smolyak plans `R_0, R_1, …` used as inner samplers.
#[derive(Debug, Clone)]
pub struct PeriodicFamily {
    plans: Vec<PeriodicPlan>,
}

impl PeriodicFamily {
    pub fn new(mask: &BSplineMask, dim: usize, max_level: usize) -> Result<Self> {
        let plans = (0..=max_level).map(|m| PeriodicPlan::new(mask, dim, m)).collect::<Result<_>>()?;
        Ok(PeriodicFamily { plans })
    }

    /// Plans up to the largest level whose grid fits `budget`.
    pub fn for_budget(mask: &BSplineMask, dim: usize, budget: usize) -> Result<Self> {
        let mut plans: Vec<PeriodicPlan> = Vec::new();
        loop {
            let p = PeriodicPlan::new(mask, dim, plans.len())?;
            if p.cardinality() > budget {
                break;
            }
            plans.push(p);
        }
        Ok(PeriodicFamily { plans })
    }

    pub fn plan(&self, m: usize) -> &PeriodicPlan {
        &self.plans[m]
    }

    /// Largest level `m` with `|G^d(m)| ≤ n`.
    pub fn fit(&self, n: usize) -> Option<usize> {
        (0..self.plans.len()).rev().find(|&m| self.plans[m].cardinality() <= n)
    }
}

/// Maps `t ∈ ℝ` to its representative in `[−1/2, 1/2)`.
fn wrap_half(t: f64) -> f64 {
    t - (t + 0.5).floor()
}

/// One cell of an assembled operator.
#[derive(Debug, Clone)]
pub struct Cell<T> {
    pub k: Vec<i64>,
    pub budget: usize,
    /// `None` when the budget is too small for any inner operator (the term is zero).
    pub inner: Option<T>,
    /// Samples of `f` this cell used.
    pub samples: usize,
    /// Points where `f` was evaluated (sampling operators only).
    pub points: Vec<Vec<f64>>,
}

/// `S^μ_{θ,n} f = Σ_{|k|<m_n} (S_{θ,n_k} f̃_{θ,k})(· − k)`.
#[derive(Debug, Clone)]
pub struct AssembledSample<'a> {
    partition: PartitionOfUnity,
    pub cells: Vec<Cell<PeriodicInterpolant<'a>>>,
    index: BTreeMap<Vec<i64>, usize>,
}

/// Builds `S^μ_{θ,n} f`. `f` is evaluated only at grid points where `φ_k ≠ 0`.
pub fn assembled_sample<'a>(
    partition: &PartitionOfUnity,
    allocation: &BudgetAllocation,
    inner: &'a PeriodicFamily,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<AssembledSample<'a>> {
    let theta = partition.theta;
    let mut cells = Vec::with_capacity(allocation.cells.len());
    let mut index = BTreeMap::new();
    for (k, nk) in &allocation.cells {
        let level = inner.fit(*nk);
        let mut points = Vec::new();
        let approx = match level {
            None => None,
            Some(m) => {
                let plan = inner.plan(m);
                let mut y = vec![0.0; k.len()];
                let mut x = vec![0.0; k.len()];
                let r = plan.apply(|t| {
                    for i in 0..t.len() {
                        y[i] = theta * wrap_half(t[i]);
                        x[i] = y[i] + k[i] as f64;
                    }
                    let ph: f64 = y.iter().map(|&yi| partition.g(yi)).product();
                    if ph == 0.0 {
                        0.0
                    } else {
                        points.push(x.clone());
                        f(&x) * ph
                    }
                });
                Some(r?)
            }
        };
        index.insert(k.clone(), cells.len());
        cells.push(Cell { k: k.clone(), budget: *nk, inner: approx, samples: points.len(), points });
    }
    Ok(AssembledSample { partition: *partition, cells, index })
}

impl AssembledSample<'_> {
    /// Total number of evaluations of `f`.
    pub fn samples(&self) -> usize {
        self.cells.iter().map(|c| c.samples).sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let theta = self.partition.theta;
        let mut total = 0.0;
        for k in cells_containing(x, theta) {
            let Some(&ci) = self.index.get(&k) else { continue };
            if let Some(r) = &self.cells[ci].inner {
                let t: Vec<f64> = x.iter().zip(&k).map(|(&xi, &ki)| (xi - ki as f64) / theta).collect();
                total += r.eval(&t.iter().map(|v| v - v.floor()).collect::<Vec<_>>());
            }
        }
        total
    }
}

/// Cells `k` with `x ∈ k + [−θ/2, θ/2]^d`.
fn cells_containing(x: &[f64], theta: f64) -> Vec<Vec<i64>> {
    let per: Vec<Vec<i64>> = x
        .iter()
        .map(|&xi| {
            let c = xi.round() as i64;
            (c - 1..=c + 1).filter(|&k| (xi - k as f64).abs() <= theta / 2.0).collect()
        })
        .collect();
    let lens: Vec<usize> = per.iter().map(Vec::len).collect();
    let mut out = Vec::new();
    for_each_index(&lens, |s| out.push(s.iter().enumerate().map(|(i, &j)| per[i][j]).collect()));
    out
}

/// The step hyperbolic cross `Δ(m) = ∪_{|k|₁ ≤ m} Π(k)` of frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicCross {
    pub dim: usize,
    pub m: usize,
    pub modes: Vec<Vec<i64>>,
}

/// Frequencies of the dyadic block `ρ(k) = {s : 2^{k−1} ≤ |s| < 2^k}`, `ρ(0) = {0}`.
pub fn dyadic_block(k: usize) -> Vec<i64> {
    if k == 0 {
        return vec![0];
    }
    let lo = 1i64 << (k - 1);
    let hi = 1i64 << k;
    (-hi + 1..=-lo).chain(lo..hi).collect()
}

impl HyperbolicCross {
    pub fn new(dim: usize, m: usize) -> Self {
        let mut set = alloc::collections::BTreeSet::new();
        for k in level_set(dim, m) {
            let blocks: Vec<Vec<i64>> = k.iter().map(|&ki| dyadic_block(ki)).collect();
            let lens: Vec<usize> = blocks.iter().map(Vec::len).collect();
            for_each_index(&lens, |s| {
                set.insert(s.iter().enumerate().map(|(i, &j)| blocks[i][j]).collect::<Vec<i64>>());
            });
        }
        HyperbolicCross { dim, m, modes: set.into_iter().collect() }
    }

    /// `rank F_{Δ(m)} = |Δ(m)|`.
    pub fn rank(&self) -> usize {
        self.modes.len()
    }

    /// Required grid resolution per axis, `4 · 2^m`.
    pub fn min_resolution(&self) -> usize {
        4 << self.m
    }

    /// `F_{Δ(m)} f` from samples on the uniform grid `j/N`, `N = resolution` per axis.
    pub fn project(&self, mut f: impl FnMut(&[f64]) -> f64, resolution: usize) -> Result<TrigPolynomial> {
        self.project_complex(|x| Complex64::new(f(x), 0.0), resolution)
    }

    pub fn project_complex(&self, mut f: impl FnMut(&[f64]) -> Complex64, resolution: usize) -> Result<TrigPolynomial> {
        if resolution < self.min_resolution() {
            return Err(Error::ResolutionTooLow { given: resolution, required: self.min_resolution() });
        }
        let d = self.dim;
        let n = resolution;
        let top = 1i64 << self.m;
        let freqs: Vec<i64> = (-top + 1..top).collect();
        let nf = freqs.len();
        // twiddles[s][j] = e^{−2πi s j/N}/N
        let tw: Vec<Vec<Complex64>> = freqs
            .iter()
            .map(|&s| {
                (0..n)
                    .map(|j| Complex64::from_polar(1.0 / n as f64, -2.0 * PI * (s * j as i64) as f64 / n as f64))
                    .collect()
            })
            .collect();
        let mut t: Vec<Complex64> = Vec::with_capacity(n.pow(d as u32));
        let mut x = vec![0.0; d];
        for_each_index(&vec![n; d], |s| {
            for i in 0..d {
                x[i] = s[i] as f64 / n as f64;
            }
            t.push(f(&x));
        });
        let mut shape = vec![n; d];
        for axis in 0..d {
            let outer: usize = shape[..axis].iter().product();
            let inner: usize = shape[axis + 1..].iter().product();
            let mut out = vec![Complex64::new(0.0, 0.0); outer * nf * inner];
            for o in 0..outer {
                for (fi, row) in tw.iter().enumerate() {
                    let dst = (o * nf + fi) * inner;
                    for (j, &w) in row.iter().enumerate() {
                        let src = (o * n + j) * inner;
                        for q in 0..inner {
                            out[dst + q] += w * t[src + q];
                        }
                    }
                }
            }
            t = out;
            shape[axis] = nf;
        }
        let coeffs = self
            .modes
            .iter()
            .map(|s| {
                let mut idx = 0;
                for i in 0..d {
                    idx = idx * nf + (s[i] + top - 1) as usize;
                }
                t[idx]
            })
            .collect();
        Ok(TrigPolynomial { modes: self.modes.clone(), coeffs })
    }
}

/// `Σ_s c_s e^{2πi (s, x)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub modes: Vec<Vec<i64>>,
    pub coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn eval_complex(&self, x: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .zip(&self.coeffs)
            .map(|(s, c)| {
                let ph: f64 = s.iter().zip(x).map(|(&si, &xi)| si as f64 * xi).sum();
                c * Complex64::from_polar(1.0, 2.0 * PI * ph)
            })
            .sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_complex(x).re
    }

    pub fn rank(&self) -> usize {
        self.modes.len()
    }
}

/// Hyperbolic cross operators `F_{Δ(0)}, F_{Δ(1)}, …` used as inner linear operators.
#[derive(Debug, Clone)]
pub struct FourierFamily {
    crosses: Vec<HyperbolicCross>,
}

impl FourierFamily {
    pub fn for_budget(dim: usize, budget: usize) -> Self {
        let mut crosses: Vec<HyperbolicCross> = Vec::new();
        loop {
            let h = HyperbolicCross::new(dim, crosses.len());
            if h.rank() > budget {
                break;
            }
            crosses.push(h);
        }
        FourierFamily { crosses }
    }

    pub fn cross(&self, m: usize) -> &HyperbolicCross {
        &self.crosses[m]
    }

    /// Largest `m` with `|Δ(m)| ≤ n`.
    pub fn fit(&self, n: usize) -> Option<usize> {
        (0..self.crosses.len()).rev().find(|&m| self.crosses[m].rank() <= n)
    }
}

/// `A^μ_{θ,n} f`: the assembled operator with hyperbolic cross projections on each cell.
#[derive(Debug, Clone)]
pub struct AssembledLinear {
    partition: PartitionOfUnity,
    pub cells: Vec<Cell<TrigPolynomial>>,
    index: BTreeMap<Vec<i64>, usize>,
}

pub fn assembled_linear(
    partition: &PartitionOfUnity,
    allocation: &BudgetAllocation,
    inner: &FourierFamily,
    f: &dyn Fn(&[f64]) -> f64,
) -> Result<AssembledLinear> {
    let theta = partition.theta;
    let mut cells = Vec::with_capacity(allocation.cells.len());
    let mut index = BTreeMap::new();
    for (k, nk) in &allocation.cells {
        let mut samples = 0;
        let approx = match inner.fit(*nk) {
            None => None,
            Some(m) => {
                let h = inner.cross(m);
                let mut y = vec![0.0; k.len()];
                let mut x = vec![0.0; k.len()];
                let p = h.project(
                    |t| {
                        for i in 0..t.len() {
                            y[i] = theta * wrap_half(t[i]);
                            x[i] = y[i] + k[i] as f64;
                        }
                        let ph: f64 = y.iter().map(|&yi| partition.g(yi)).product();
                        if ph == 0.0 {
                            0.0
                        } else {
                            samples += 1;
                            f(&x) * ph
                        }
                    },
                    h.min_resolution(),
                )?;
                Some(p)
            }
        };
        index.insert(k.clone(), cells.len());
        cells.push(Cell { k: k.clone(), budget: *nk, inner: approx, samples, points: Vec::new() });
    }
    Ok(AssembledLinear { partition: *partition, cells, index })
}

impl AssembledLinear {
    /// `Σ_k rank` of the inner operators.
    pub fn rank(&self) -> usize {
        self.cells.iter().filter_map(|c| c.inner.as_ref()).map(TrigPolynomial::rank).sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let theta = self.partition.theta;
        let mut total = 0.0;
        for k in cells_containing(x, theta) {
            let Some(&ci) = self.index.get(&k) else { continue };
            if let Some(p) = &self.cells[ci].inner {
                let t: Vec<f64> = x.iter().zip(&k).map(|(&xi, &ki)| (xi - ki as f64) / theta).collect();
                total += p.eval(&t);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_identity() {
        let p = PartitionOfUnity::new(1.5, 1).unwrap();
        for i in 0..1000 {
            let x = -3.0 + 0.006 * i as f64;
            let s: f64 = (-5..=5).map(|k| p.g(x - k as f64)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert_eq!(p.g(0.75), 0.0);
        assert!(PartitionOfUnity::new(1.0, 1).is_err());
        let p2 = PartitionOfUnity::new(1.5, 2).unwrap();
        let cells = p2.cells_at(&[0.7, -0.26]);
        assert_eq!(cells, vec![vec![0, 0], vec![1, 0]]);
    }

    #[test]
    fn budget_is_feasible() {
        let b = BudgetAllocation::new(10_000, 2.0, 0.125, 2.0, 0.5, 2).unwrap();
        assert!(b.total() <= 10_000);
        assert!(b.cells.iter().all(|c| c.1 >= 1));
        let zero = b.cells.iter().position(|c| c.0 == [0, 0]).unwrap();
        assert_eq!(b.cells.iter().map(|c| c.1).max().unwrap(), b.cells[zero].1);
    }

    #[test]
    fn cross_counts_and_projection() {
        assert_eq!(HyperbolicCross::new(1, 3).rank(), 15);
        let h = HyperbolicCross::new(2, 2);
        let p = h.project(|x| (2.0 * PI * (3.0 * x[0])).cos(), h.min_resolution()).unwrap();
        for x in [[0.1, 0.7], [0.33, 0.2]] {
            assert!((p.eval(&x) - (2.0 * PI * 3.0 * x[0]).cos()).abs() < 1e-12);
        }
        assert!(matches!(h.project(|_| 0.0, 8), Err(Error::ResolutionTooLow { .. })));
    }
}
