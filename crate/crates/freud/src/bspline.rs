//! Cardinal B-splines, periodic quasi-interpolation `Q_k` and the periodic Smolyak operator `R_m`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::solve;
use crate::sparse::level_set;
use crate::{Error, Result};

/// Cardinal B-spline `M_ℓ` of order `ℓ` with knots `0, 1, …, ℓ` (Cox–de Boor).
pub fn cardinal(order: usize, x: f64) -> f64 {
    if order == 0 || !(0.0..order as f64).contains(&x) {
        return 0.0;
    }
    let cell = x.floor() as usize;
    // values of M_1(x − i) for i = 0..order
    let mut b = vec![0.0; order];
    b[cell] = 1.0;
    for k in 2..=order {
        let mut nb = vec![0.0; order];
        for i in 0..=order - k {
            let t = x - i as f64;
            let left = t * b[i];
            let right = if i + 1 < order { (k as f64 - t) * b[i + 1] } else { 0.0 };
            nb[i] = (left + right) / (k - 1) as f64;
        }
        b = nb;
    }
    b[0]
}

/// An even quasi-interpolation mask `λ(j)`, `|j| ≤ μ_mask`, for splines of order `ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineMask {
    order: usize,
    /// `λ(0), λ(1), …, λ(μ_mask)`.
    half: Vec<f64>,
}

impl BSplineMask {
    /// The minimal even mask (`μ_mask = ℓ/2 − 1`) that makes `Q` reproduce `𝒫_{ℓ−1}`,
    /// found by matching the moment series of the centered B-spline.
    pub fn minimal(order: usize) -> Result<Self> {
        if order < 2 || order % 2 == 1 {
            return Err(Error::InvalidArgument("spline order must be even and ≥ 2".into()));
        }
        let n = order / 2;
        // S(ξ) = (sin(ξ/2)/(ξ/2))^ℓ as a series in ξ², truncated to n terms
        let sinc: Vec<f64> = (0..n).map(|i| (-1f64).powi(i as i32) / (factorial(2 * i + 1) * 4f64.powi(i as i32))).collect();
        let mut s = vec![0.0; n];
        s[0] = 1.0;
        for _ in 0..order {
            s = series_mul(&s, &sinc);
        }
        let t = series_inv(&s);
        // λ0 + 2 Σ_j λ_j cos(jξ) = T(ξ) mod ξ^ℓ
        let mut a = vec![0.0; n * n];
        for row in 0..n {
            let c = (-1f64).powi(row as i32) / factorial(2 * row);
            a[row * n] = if row == 0 { 1.0 } else { 0.0 };
            for j in 1..n {
                a[row * n + j] = 2.0 * c * (j as f64).powi(2 * row as i32);
            }
        }
        let half = solve(a, t)?;
        Ok(BSplineMask { order, half })
    }

    /// From `λ(0..=μ_mask)`; evenness holds by construction.
    pub fn from_half(order: usize, half: Vec<f64>) -> Result<Self> {
        if order < 2 || order % 2 == 1 || half.is_empty() {
            return Err(Error::InvalidArgument("spline order must be even and the mask nonempty".into()));
        }
        Ok(BSplineMask { order, half })
    }

    /// From the full sequence `λ(−μ), …, λ(μ)`; rejects sequences that are not even.
    pub fn from_full(order: usize, full: &[f64]) -> Result<Self> {
        if full.len() % 2 == 0 {
            return Err(Error::InvalidArgument("mask length must be odd".into()));
        }
        let mu = full.len() / 2;
        for j in 1..=mu {
            if full[mu + j] != full[mu - j] {
                return Err(Error::InvalidArgument("mask is not even".into()));
            }
        }
        Self::from_half(order, full[mu..].to_vec())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `μ_mask`.
    pub fn half_width(&self) -> usize {
        self.half.len() - 1
    }

    pub fn half(&self) -> &[f64] {
        &self.half
    }

    /// `λ(j)`.
    pub fn coef(&self, j: i64) -> f64 {
        self.half.get(j.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    pub fn full(&self) -> Vec<f64> {
        let mu = self.half_width() as i64;
        (-mu..=mu).map(|j| self.coef(j)).collect()
    }

    /// `Λ(f, s) = Σ_j λ(j) f(s − j + ℓ/2)` on the integer lattice.
    pub fn functional(&self, f: impl Fn(i64) -> f64, s: i64) -> f64 {
        let mu = self.half_width() as i64;
        let c = (self.order / 2) as i64;
        (-mu..=mu).map(|j| self.coef(j) * f(s - j + c)).sum()
    }

    /// `Q f(x) = Σ_s Λ(f, s) M(x − s)` for `f` on ℝ.
    pub fn apply_on_line(&self, f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let l = self.order as i64;
        let lo = x.floor() as i64 - l + 1;
        (lo..=x.floor() as i64)
            .map(|s| self.functional(|t| f(t as f64), s) * cardinal(self.order, x - s as f64))
            .sum()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n];
    for i in 0..n {
        for j in 0..n - i {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

fn series_inv(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut b = vec![0.0; n];
    b[0] = 1.0 / a[0];
    for k in 1..n {
        let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
        b[k] = -s / a[0];
    }
    b
}

/// Number of grid cells `ℓ 2^k` at level `k`.
pub fn level_size(order: usize, k: usize) -> usize {
    order << k
}

/// Two-scale coefficients `2^{1−ℓ} C(ℓ, t)`, `t = 0..=ℓ`.
pub fn refinement_coefficients(order: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for _ in 0..order {
        let mut n = vec![0.0; c.len() + 1];
        for (i, v) in c.iter().enumerate() {
            n[i] += v;
            n[i + 1] += v;
        }
        c = n;
    }
    let s = 2f64.powi(1 - order as i32);
    c.into_iter().map(|v| v * s).collect()
}

/// Sparse stencil: `(point index at level k, weight)`.
pub type Stencil = Vec<(usize, f64)>;

/// Per-level data of `Q_k − Q_{k−1}`: for each `i ∈ I(k)`, the coefficient of `N_{k,i}`
/// as a stencil on level-`k` sample indices.
#[derive(Debug, Clone)]
pub struct DetailLevel {
    pub k: usize,
    pub stencils: Vec<Stencil>,
}

impl DetailLevel {
    pub fn new(mask: &BSplineMask, k: usize) -> Self {
        let n = level_size(mask.order, k) as i64;
        let wrap = |i: i64, n: i64| i.rem_euclid(n) as usize;
        let mu = mask.half_width() as i64;
        let c = (mask.order / 2) as i64;
        let mut stencils = Vec::with_capacity(n as usize);
        let refine = refinement_coefficients(mask.order);
        for i in 0..n {
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            for j in -mu..=mu {
                *acc.entry(wrap(i - j + c, n)).or_default() += mask.coef(j);
            }
            if k > 0 {
                let nc = n / 2;
                // N_{k−1,s} = Σ_t refine[t] N_{k,2s+t}
                for (t, &ct) in refine.iter().enumerate() {
                    let d = i - t as i64;
                    if d.rem_euclid(2) != 0 {
                        continue;
                    }
                    let s = d.div_euclid(2);
                    for j in -mu..=mu {
                        let p = wrap(s - j + c, nc);
                        *acc.entry(2 * p).or_default() -= ct * mask.coef(j);
                    }
                }
            }
            stencils.push(acc.into_iter().filter(|(_, w)| *w != 0.0).collect());
        }
        DetailLevel { k, stencils }
    }

    pub fn max_support(&self) -> usize {
        self.stencils.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// `N_{k,s}(x)` values that are nonzero at `x`: pairs `(s, value)`.
pub fn active_splines(order: usize, k: usize, x: f64) -> Vec<(usize, f64)> {
    let n = level_size(order, k);
    let t = (x - x.floor()) * n as f64;
    let base = t.floor() as i64;
    (0..order as i64)
        .map(|o| {
            let s = base - o;
            (s.rem_euclid(n as i64) as usize, cardinal(order, t - s as f64))
        })
        .collect()
}

/// `Q_k f` for a 1-periodic `f`, as spline coefficients `a_{k,s}`.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    pub order: usize,
    pub k: usize,
    pub coeffs: Vec<f64>,
}

impl PeriodicSpline {
    pub fn eval(&self, x: f64) -> f64 {
        active_splines(self.order, self.k, x).iter().map(|&(s, v)| self.coeffs[s] * v).sum()
    }
}

/// `Q_k f` sampling `f` on `i/(ℓ 2^k)`.
pub fn quasi_interpolate(mask: &BSplineMask, f: impl Fn(f64) -> f64, k: usize) -> Result<PeriodicSpline> {
    let n = level_size(mask.order, k);
    let h = 1.0 / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let coeffs =
        (0..n as i64).map(|s| mask.functional(|t| vals[t.rem_euclid(n as i64) as usize], s)).collect();
    Ok(PeriodicSpline { order: mask.order, k, coeffs })
}

/// `R_m = Σ_{|k|₁ ≤ m} q_k` on `[0,1)^d` with its grid `G^d(m)`.
#[derive(Debug, Clone)]
pub struct PeriodicPlan {
    dim: usize,
    level: usize,
    mask: BSplineMask,
    details: Vec<DetailLevel>,
    levels: Vec<Vec<usize>>,
    /// Grid points as integer coordinates on the level-`m` lattice `i/(ℓ 2^m)`.
    points: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl PeriodicPlan {
    pub fn new(mask: &BSplineMask, dim: usize, m: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let details = (0..=m).map(|k| DetailLevel::new(mask, k)).collect();
        let levels = level_set(dim, m);
        let mut points = Vec::new();
        let mut index = BTreeMap::new();
        for k in &levels {
            let shape: Vec<usize> = k.iter().map(|&ki| level_size(mask.order, ki)).collect();
            for_each_index(&shape, |s| {
                let key: Vec<usize> = s.iter().zip(k).map(|(&si, &ki)| si << (m - ki)).collect();
                if !index.contains_key(&key) {
                    index.insert(key.clone(), points.len());
                    points.push(key);
                }
            });
        }
        Ok(PeriodicPlan { dim, level: m, mask: mask.clone(), details, levels, points, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn mask(&self) -> &BSplineMask {
        &self.mask
    }

    pub fn detail(&self, k: usize) -> &DetailLevel {
        &self.details[k]
    }

    /// Largest number of samples any coefficient functional `c_{k,s}` touches.
    pub fn max_stencil(&self) -> usize {
        let per: Vec<usize> = self.details.iter().map(DetailLevel::max_support).collect();
        self.levels.iter().map(|k| k.iter().map(|&ki| per[ki]).product::<usize>()).max().unwrap_or(0)
    }

    /// `|G^d(m)|`.
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    /// Grid points in `[0,1)^d`.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let n = level_size(self.mask.order, self.level) as f64;
        self.points.iter().map(|p| p.iter().map(|&i| i as f64 / n).collect()).collect()
    }

    /// Integer lattice coordinates of the grid points at level `m`.
    pub fn lattice_points(&self) -> &[Vec<usize>] {
        &self.points
    }

    /// `R_m f`, sampling `f` once per grid point.
    pub fn apply(&self, mut f: impl FnMut(&[f64]) -> f64) -> Result<PeriodicInterpolant<'_>> {
        let grid = self.grid();
        let mut values = Vec::with_capacity(grid.len());
        for x in &grid {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample);
            }
            values.push(v);
        }
        let mut coeffs = Vec::with_capacity(self.levels.len());
        for k in &self.levels {
            let shape: Vec<usize> = k.iter().map(|&ki| level_size(self.mask.order, ki)).collect();
            let mut t = Vec::with_capacity(shape.iter().product());
            for_each_index(&shape, |s| {
                let key: Vec<usize> = s.iter().zip(k).map(|(&si, &ki)| si << (self.level - ki)).collect();
                t.push(values[self.index[&key]]);
            });
            for (axis, &ki) in k.iter().enumerate() {
                t = apply_stencils(&t, &shape, axis, &self.details[ki].stencils);
            }
            coeffs.push(t);
        }
        Ok(PeriodicInterpolant { plan: self, coeffs })
    }
}

/// Visits all multi-indices of a box in row-major order.
pub(crate) fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.iter().any(|&n| n == 0) {
        return;
    }
    let d = shape.len();
    let mut s = vec![0usize; d];
    loop {
        f(&s);
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            s[i] += 1;
            if s[i] < shape[i] {
                break;
            }
            s[i] = 0;
        }
    }
}

fn apply_stencils(t: &[f64], shape: &[usize], axis: usize, stencils: &[Stencil]) -> Vec<f64> {
    let n = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0; t.len()];
    for o in 0..outer {
        for (i, st) in stencils.iter().enumerate() {
            let dst = (o * n + i) * inner;
            for &(p, w) in st {
                let src = (o * n + p) * inner;
                for j in 0..inner {
                    out[dst + j] += w * t[src + j];
                }
            }
        }
    }
    out
}

/// `R_m f` as per-level detail coefficients.
#[derive(Debug, Clone)]
pub struct PeriodicInterpolant<'a> {
    plan: &'a PeriodicPlan,
    coeffs: Vec<Vec<f64>>,
}

impl<'a> PeriodicInterpolant<'a> {
    pub fn plan(&self) -> &'a PeriodicPlan {
        self.plan
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let order = self.plan.mask.order;
        let mut cache: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
        let mut total = 0.0;
        for (k, c) in self.plan.levels.iter().zip(&self.coeffs) {
            let shape: Vec<usize> = k.iter().map(|&ki| level_size(order, ki)).collect();
            let act: Vec<Vec<(usize, f64)>> = k
                .iter()
                .enumerate()
                .map(|(i, &ki)| cache.entry((i, ki)).or_insert_with(|| active_splines(order, ki, x[i])).clone())
                .collect();
            let lens: Vec<usize> = act.iter().map(Vec::len).collect();
            for_each_index(&lens, |s| {
                let mut idx = 0;
                let mut w = 1.0;
                for i in 0..s.len() {
                    let (si, v) = act[i][s[i]];
                    idx = idx * shape[i] + si;
                    w *= v;
                }
                total += w * c[idx];
            });
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinal_values() {
        assert!((cardinal(2, 1.0) - 1.0).abs() < 1e-15);
        assert!((cardinal(4, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(cardinal(4, 4.5), 0.0);
        assert!((cardinal(4, 1.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn masks() {
        let m2 = BSplineMask::minimal(2).unwrap();
        assert_eq!(m2.half(), &[1.0]);
        let m4 = BSplineMask::minimal(4).unwrap();
        assert!((m4.coef(0) - 4.0 / 3.0).abs() < 1e-14);
        assert!((m4.coef(1) + 1.0 / 6.0).abs() < 1e-14);
        assert!((m4.coef(-1) + 1.0 / 6.0).abs() < 1e-14);
        assert!(BSplineMask::from_full(4, &[0.1, 1.0, 0.2]).is_err());
    }

    #[test]
    fn reproduces_polynomials_on_line() {
        for order in [2usize, 4, 6] {
            let mask = BSplineMask::minimal(order).unwrap();
            let p = |x: f64| (0..order).map(|i| (0.3 + i as f64 * 0.1) * x.powi(i as i32)).sum::<f64>();
            for t in 0..20 {
                let x = 3.0 + 0.37 * t as f64;
                let q = mask.apply_on_line(p, x);
                assert!((q - p(x)).abs() < 1e-9 * p(x).abs().max(1.0), "order {order} x={x}: {q} vs {}", p(x));
            }
        }
    }

    #[test]
    fn grid_size_d1() {
        let mask = BSplineMask::minimal(2).unwrap();
        let plan = PeriodicPlan::new(&mask, 1, 2).unwrap();
        assert_eq!(plan.cardinality(), 8);
    }

    #[test]
    fn d1_plan_is_q_m() {
        let mask = BSplineMask::minimal(4).unwrap();
        let plan = PeriodicPlan::new(&mask, 1, 4).unwrap();
        let f = |x: f64| (2.0 * core::f64::consts::PI * x).sin() + 0.3 * (6.0 * core::f64::consts::PI * x).cos();
        let r = plan.apply(|x| f(x[0])).unwrap();
        let q = quasi_interpolate(&mask, f, 4).unwrap();
        for t in 0..50 {
            let x = 0.0199 * t as f64;
            assert!((r.eval(&[x]) - q.eval(x)).abs() < 1e-12);
        }
    }
}
