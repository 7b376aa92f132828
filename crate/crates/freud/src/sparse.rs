//! Tensor samplers `S_{2^k}`, the Smolyak operator `P_m` and its grid `H(m)`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::interp::{DyadicFamily, InterpolationRule};
use crate::weight::WeightSpec;
use crate::{Error, Result};

/// One signed term `(−1)^{d−|e|} S_{2^{k(e)}}` of `P_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanTerm {
    pub k: Vec<usize>,
    /// `e[i]` is true when axis `i` belongs to `e`.
    pub e: Vec<bool>,
    pub sign: i64,
    /// `k(e)`; `None` on an axis where `k(e)_i = −1`, i.e. the zero operator.
    pub levels: Vec<Option<usize>>,
}

impl PlanTerm {
    pub fn is_zero(&self) -> bool {
        self.levels.iter().any(Option::is_none)
    }
}

/// A tensor operator `⊗ I_{m_i}` with its net coefficient in `P_m`.
#[derive(Debug, Clone)]
pub struct Block {
    pub degrees: Vec<usize>,
    pub coef: i64,
    rules: Vec<Arc<InterpolationRule>>,
    /// Plan point index of every tensor node, row-major (last axis fastest).
    points: Vec<usize>,
}

impl Block {
    pub fn shape(&self) -> Vec<usize> {
        self.rules.iter().map(|r| r.len()).collect()
    }

    pub fn rules(&self) -> &[Arc<InterpolationRule>] {
        &self.rules
    }

    pub fn point_indices(&self) -> &[usize] {
        &self.points
    }
}

/// A point of `H(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub x: Vec<f64>,
    /// Per axis `(degree, position in the rule's node list)`.
    pub key: Vec<(usize, usize)>,
    /// Smallest `|k(e)|₁` among the terms that sample here.
    pub level_l1: usize,
    /// False when every block containing the point has net coefficient zero.
    pub active: bool,
}

/// Index set, signed terms and deduplicated samples of `P_m`.
#[derive(Debug, Clone)]
pub struct SparsePlan {
    dim: usize,
    level_cap: usize,
    spec: WeightSpec,
    terms: Vec<PlanTerm>,
    blocks: Vec<Block>,
    points: Vec<GridPoint>,
}

/// All `k ∈ ℕ₀^d` with `|k|₁ ≤ m`, in lexicographic order.
pub fn level_set(dim: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, m, &mut Vec::with_capacity(dim), &mut out);
    out
}

impl SparsePlan {
    /// Builds `P_m` from one dyadic family per axis (the same family may be repeated).
    pub fn new(families: &[Arc<DyadicFamily>], m: usize) -> Result<Self> {
        let dim = families.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if let Some(f) = families.iter().find(|f| f.max_level() < m) {
            return Err(Error::DegreeCapExceeded { requested: m, cap: f.max_level() });
        }
        let spec = *families[0].spec();
        let mut terms = Vec::new();
        for k in level_set(dim, m) {
            for mask in 0u32..(1 << dim) {
                let e: Vec<bool> = (0..dim).map(|i| mask >> i & 1 == 1).collect();
                let size = e.iter().filter(|&&b| b).count();
                let sign = if (dim - size) % 2 == 0 { 1 } else { -1 };
                let levels = (0..dim)
                    .map(|i| if e[i] { Some(k[i]) } else { k[i].checked_sub(1) })
                    .collect();
                terms.push(PlanTerm { k: k.clone(), e, sign, levels });
            }
        }

        // net coefficient per degree tuple, plus the smallest |k(e)|₁ producing it
        let mut net: BTreeMap<Vec<usize>, (i64, usize, Vec<usize>)> = BTreeMap::new();
        for t in terms.iter().filter(|t| !t.is_zero()) {
            let lv: Vec<usize> = t.levels.iter().map(|l| l.unwrap()).collect();
            let deg: Vec<usize> = lv.iter().enumerate().map(|(i, &l)| families[i].degree(l)).collect();
            let l1 = lv.iter().sum();
            let ent = net.entry(deg).or_insert((0, usize::MAX, lv.clone()));
            ent.0 += t.sign;
            if l1 < ent.1 {
                ent.1 = l1;
                ent.2 = lv;
            }
        }

        let mut points: Vec<GridPoint> = Vec::new();
        let mut index: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
        let mut blocks = Vec::with_capacity(net.len());
        for (degrees, (coef, l1, lv)) in net {
            let rules: Vec<Arc<InterpolationRule>> =
                lv.iter().enumerate().map(|(i, &l)| families[i].rule(l).clone()).collect();
            let shape: Vec<usize> = rules.iter().map(|r| r.len()).collect();
            let total: usize = shape.iter().product();
            let mut pts = Vec::with_capacity(total);
            let mut s = vec![0usize; dim];
            for _ in 0..total {
                let key: Vec<(usize, usize)> = (0..dim).map(|i| (degrees[i], s[i])).collect();
                let id = match index.get(&key) {
                    Some(&id) => {
                        let p = &mut points[id];
                        p.level_l1 = p.level_l1.min(l1);
                        p.active |= coef != 0;
                        id
                    }
                    None => {
                        let x = (0..dim).map(|i| rules[i].nodes()[s[i]]).collect();
                        points.push(GridPoint { x, key: key.clone(), level_l1: l1, active: coef != 0 });
                        index.insert(key, points.len() - 1);
                        points.len() - 1
                    }
                };
                pts.push(id);
                for i in (0..dim).rev() {
                    s[i] += 1;
                    if s[i] < shape[i] {
                        break;
                    }
                    s[i] = 0;
                }
            }
            blocks.push(Block { degrees, coef, rules, points: pts });
        }
        Ok(SparsePlan { dim, level_cap: m, spec, terms, blocks, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level_cap(&self) -> usize {
        self.level_cap
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[PlanTerm] {
        &self.terms
    }

    /// Distinct tensor operators, including those whose net coefficient cancels to zero.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `H(m)`, deduplicated.
    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// `|H(m)|`.
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    /// Number of points `P_m` actually evaluates.
    pub fn active_count(&self) -> usize {
        self.points.iter().filter(|p| p.active).count()
    }

    /// `P_m f`, sampling `f` once per active point of `H(m)`.
    pub fn apply(&self, f: impl Fn(&[f64]) -> f64) -> Result<SparseInterpolant<'_>> {
        let mut values = vec![0.0; self.points.len()];
        for (v, p) in values.iter_mut().zip(&self.points) {
            if p.active {
                let y = f(&p.x);
                if !y.is_finite() {
                    return Err(Error::NonFiniteSample);
                }
                *v = y;
            }
        }
        Ok(SparseInterpolant { plan: self, values })
    }
}

/// `P_m f` represented by its samples on `H(m)`.
#[derive(Debug, Clone)]
pub struct SparseInterpolant<'a> {
    plan: &'a SparsePlan,
    values: Vec<f64>,
}

impl<'a> SparseInterpolant<'a> {
    pub fn plan(&self) -> &'a SparsePlan {
        self.plan
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `e^{log_scale} (P_m f)(x)`.
    pub fn eval_scaled(&self, x: &[f64], log_scale: f64) -> f64 {
        let mut cache: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        let mut total = 0.0;
        for b in self.plan.blocks.iter().filter(|b| b.coef != 0) {
            let bases: Vec<Vec<f64>> = (0..self.plan.dim)
                .map(|i| {
                    cache
                        .entry((i, b.degrees[i]))
                        .or_insert_with(|| b.rules[i].basis(x[i], if i == 0 { log_scale } else { 0.0 }))
                        .clone()
                })
                .collect();
            let vals: Vec<f64> = b.points.iter().map(|&id| self.values[id]).collect();
            total += b.coef as f64 * contract(&vals, &b.shape(), &bases);
        }
        total
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_scaled(x, 0.0)
    }

    /// `w(x) (P_m f)(x)`.
    pub fn eval_weighted(&self, x: &[f64]) -> f64 {
        self.eval_scaled(x, self.plan.spec.log_w_multi(x))
    }

    /// `w(x)·(P_m f)(x)` on the tensor grid `axes[0] × … × axes[d−1]`, row-major.
    pub fn weighted_on_grid(&self, axes: &[Vec<f64>]) -> Vec<f64> {
        let spec = &self.plan.spec;
        let out_shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let mut out = vec![0.0; out_shape.iter().product()];
        let mut mats: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for b in self.plan.blocks.iter().filter(|b| b.coef != 0) {
            let mut t: Vec<f64> = b.points.iter().map(|&id| self.values[id]).collect();
            let mut shape = b.shape();
            for i in 0..self.plan.dim {
                let mat = mats.entry((i, b.degrees[i])).or_insert_with(|| {
                    let r = &b.rules[i];
                    axes[i].iter().flat_map(|&x| r.basis(x, spec.log_w(x))).collect()
                });
                t = mode_product(&t, &shape, i, mat, axes[i].len());
                shape[i] = axes[i].len();
            }
            let c = b.coef as f64;
            out.iter_mut().zip(&t).for_each(|(o, v)| *o += c * v);
        }
        out
    }
}

/// `Σ_s values[s] Π_i bases[i][s_i]` for a row-major tensor of the given shape.
pub fn contract(values: &[f64], shape: &[usize], bases: &[Vec<f64>]) -> f64 {
    let mut t = values.to_vec();
    for i in (0..shape.len()).rev() {
        let n = shape[i];
        let b = &bases[i];
        t = t.chunks_exact(n).map(|c| c.iter().zip(b).map(|(x, y)| x * y).sum()).collect();
    }
    t[0]
}

/// Replaces axis `axis` (length `shape[axis]`) by `rows`, applying the `rows × shape[axis]` matrix `mat`.
fn mode_product(t: &[f64], shape: &[usize], axis: usize, mat: &[f64], rows: usize) -> Vec<f64> {
    let n = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0; outer * rows * inner];
    for o in 0..outer {
        for r in 0..rows {
            let row = &mat[r * n..(r + 1) * n];
            let dst = &mut out[(o * rows + r) * inner..(o * rows + r + 1) * inner];
            for (s, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let src = &t[(o * n + s) * inner..(o * n + s + 1) * inner];
                dst.iter_mut().zip(src).for_each(|(d, v)| *d += a * v);
            }
        }
    }
    out
}

/// The tensor sampler `S_{2^k} = ⊗_i I_{m_{k_i}}`.
#[derive(Debug, Clone)]
pub struct TensorSampler {
    rules: Vec<Arc<InterpolationRule>>,
}

impl TensorSampler {
    pub fn new(families: &[Arc<DyadicFamily>], k: &[usize]) -> Result<Self> {
        if families.len() != k.len() {
            return Err(Error::InvalidArgument("one level per axis expected".into()));
        }
        let mut rules = Vec::with_capacity(k.len());
        for (f, &ki) in families.iter().zip(k) {
            if ki > f.max_level() {
                return Err(Error::DegreeCapExceeded { requested: ki, cap: f.max_level() });
            }
            rules.push(f.rule(ki).clone());
        }
        Ok(TensorSampler { rules })
    }

    pub fn shape(&self) -> Vec<usize> {
        self.rules.iter().map(|r| r.len()).collect()
    }

    /// Tensor nodes in row-major order.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        let shape = self.shape();
        let total: usize = shape.iter().product();
        let d = shape.len();
        let mut out = Vec::with_capacity(total);
        let mut s = vec![0usize; d];
        for _ in 0..total {
            out.push((0..d).map(|i| self.rules[i].nodes()[s[i]]).collect());
            for i in (0..d).rev() {
                s[i] += 1;
                if s[i] < shape[i] {
                    break;
                }
                s[i] = 0;
            }
        }
        out
    }

    pub fn apply(&self, f: impl Fn(&[f64]) -> f64) -> Result<TensorInterpolant<'_>> {
        let values: Vec<f64> = self.nodes().iter().map(|x| f(x)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample);
        }
        Ok(TensorInterpolant { sampler: self, values })
    }
}

#[derive(Debug, Clone)]
pub struct TensorInterpolant<'a> {
    sampler: &'a TensorSampler,
    values: Vec<f64>,
}

impl TensorInterpolant<'_> {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let bases: Vec<Vec<f64>> = self.sampler.rules.iter().zip(x).map(|(r, &t)| r.basis(t, 0.0)).collect();
        contract(&self.values, &self.sampler.shape(), &bases)
    }
}
