//! Truncated Lagrange interpolation `I_m` on the zeros of `p_m` and the
//! dyadic detail operators.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::ortho::RecurrenceTable;
use crate::weight::WeightSpec;
use crate::{Error, Result};

/// Default `ρ` in `j(m)`.
pub const DEFAULT_RHO: f64 = 0.9;

const LN2: f64 = core::f64::consts::LN_2;

/// Degree of the dyadic ladder at level `k`: `2^k − 2` for `k ≥ 2`, and the base
/// degree 2 for `k < 2`.
pub fn level_degree(k: usize) -> usize {
    if k <= 2 {
        2
    } else {
        (1usize << k) - 2
    }
}

/// `x = mant · 2^exp` with `|mant| ∈ [0.5, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Split {
    mant: f64,
    exp: i32,
}

impl Split {
    fn from_log(sign: f64, ln_abs: f64) -> Split {
        if ln_abs == f64::NEG_INFINITY || sign == 0.0 {
            return Split { mant: 0.0, exp: 0 };
        }
        let e = (ln_abs / LN2).floor();
        let mant = sign * (ln_abs - e * LN2).exp();
        Split { mant, exp: e as i32 }
    }
}

fn scale(mant: f64, exp: i32) -> f64 {
    if mant == 0.0 {
        return 0.0;
    }
    libm::scalbn(mant, exp.clamp(-2000, 2000))
}

/// The rule behind `I_m`: nodes `x_{m,k}`, `|k| ≤ j(m)`, and the cardinal basis.
#[derive(Debug, Clone)]
pub struct InterpolationRule {
    table: Arc<RecurrenceTable>,
    spec: WeightSpec,
    m: usize,
    rho: f64,
    jm: usize,
    flagged: bool,
    am: f64,
    nodes: Vec<f64>,
    coef: Vec<Split>,
}

impl InterpolationRule {
    pub fn new(table: Arc<RecurrenceTable>, spec: &WeightSpec, m: usize, rho: f64) -> Result<Self> {
        if table.density() != &spec.density_v() {
            return Err(Error::InvalidArgument("recurrence table was built for a different weight".into()));
        }
        if m == 0 || m % 2 == 1 {
            return Err(Error::OddDegree(m));
        }
        let ti = table.truncation_index(m, rho)?;
        let pos = table.positive_zeros(m)?;
        let am = table.mrs_number(m).value;
        let j = ti.j;
        let mut nodes: Vec<f64> = pos[..j].iter().rev().map(|x| -x).collect();
        nodes.extend_from_slice(&pos[..j]);
        let a2 = am * am;
        let coef = nodes
            .iter()
            .map(|&x| {
                let s = table.eval(m, x);
                let ln = -(s.ln_abs_derivative() + (a2 - x * x).ln());
                Split::from_log(s.dp.signum(), ln)
            })
            .collect();
        Ok(InterpolationRule { table, spec: *spec, m, rho, jm: j, flagged: ti.flagged, am, nodes, coef })
    }

    pub fn table(&self) -> &Arc<RecurrenceTable> {
        &self.table
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `j(m)`.
    pub fn jm(&self) -> usize {
        self.jm
    }

    /// Set when no positive zero reached `ρ a_m` and `j(m) = m/2` was used.
    pub fn flagged(&self) -> bool {
        self.flagged
    }

    pub fn am(&self) -> f64 {
        self.am
    }

    /// Nodes in ascending order (`x_{m,−j}, …, x_{m,−1}, x_{m,1}, …, x_{m,j}`).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position in [`nodes`](Self::nodes) of the signed index `k`, `1 ≤ |k| ≤ j(m)`.
    pub fn position(&self, k: i64) -> Option<usize> {
        let j = self.jm as i64;
        if k == 0 || k.abs() > j {
            return None;
        }
        Some(if k < 0 { (j + k) as usize } else { (j + k - 1) as usize })
    }

    /// `x_{m,k}` for the signed index `k`.
    pub fn node(&self, k: i64) -> Option<f64> {
        self.position(k).map(|i| self.nodes[i])
    }

    fn snap(&self, x: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&t| t < x);
        for c in [i.wrapping_sub(1), i] {
            if let Some(&t) = self.nodes.get(c) {
                if (x - t).abs() < 1e-12 * t.abs().max(1.0) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// `e^{log_scale} ℓ_{m,k}(x)` for every node (by position), without intermediate overflow.
    pub fn basis_into(&self, x: f64, log_scale: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.nodes.len());
        if let Some(c) = self.snap(x) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[c] = log_scale.exp();
            return;
        }
        let a2 = self.am * self.am;
        let s = self.table.eval(self.m, x);
        let q = a2 - x * x;
        let head = Split::from_log(s.p.signum() * q.signum(), s.ln_abs() + q.abs().ln() + log_scale);
        for ((o, &xs), c) in out.iter_mut().zip(&self.nodes).zip(&self.coef) {
            *o = scale(head.mant * c.mant / (x - xs), head.exp + c.exp);
        }
    }

    /// `e^{log_scale} ℓ_{m,k}(x)` for all nodes.
    pub fn basis(&self, x: f64, log_scale: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        self.basis_into(x, log_scale, &mut out);
        out
    }

    /// `w(x) ℓ_{m,k}(x)` for all nodes.
    pub fn weighted_basis(&self, x: f64) -> Vec<f64> {
        self.basis(x, self.spec.log_w(x))
    }

    /// Fundamental polynomial `ℓ_{m,k}(x)` for the signed index `k`.
    pub fn fundamental(&self, k: i64, x: f64) -> f64 {
        let Some(pos) = self.position(k) else { return 0.0 };
        if let Some(c) = self.snap(x) {
            return if c == pos { 1.0 } else { 0.0 };
        }
        let a2 = self.am * self.am;
        let s = self.table.eval(self.m, x);
        let q = a2 - x * x;
        let head = Split::from_log(s.p.signum() * q.signum(), s.ln_abs() + q.abs().ln());
        let c = self.coef[pos];
        scale(head.mant * c.mant / (x - self.nodes[pos]), head.exp + c.exp)
    }

    /// `I_m f` from a point oracle.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Result<Interpolant<'_>> {
        let values: Vec<f64> = self.nodes.iter().map(|&x| f(x)).collect();
        self.interpolant(values)
    }

    /// `I_m` applied to given node values (ordered like [`nodes`](Self::nodes)).
    pub fn interpolant(&self, values: Vec<f64>) -> Result<Interpolant<'_>> {
        if values.len() != self.nodes.len() {
            return Err(Error::InvalidArgument("one value per node expected".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample);
        }
        Ok(Interpolant { rule: self, values })
    }
}

/// `I_m f` represented by its node values.
#[derive(Debug, Clone)]
pub struct Interpolant<'a> {
    rule: &'a InterpolationRule,
    values: Vec<f64>,
}

impl<'a> Interpolant<'a> {
    pub fn rule(&self) -> &'a InterpolationRule {
        self.rule
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `e^{log_scale} (I_m f)(x)`.
    pub fn eval_scaled(&self, x: f64, log_scale: f64) -> f64 {
        let b = self.rule.basis(x, log_scale);
        b.iter().zip(&self.values).map(|(a, v)| a * v).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_scaled(x, 0.0)
    }

    /// `w(x) (I_m f)(x)`.
    pub fn eval_weighted(&self, x: f64) -> f64 {
        self.eval_scaled(x, self.rule.spec.log_w(x))
    }
}

/// Interpolation rules for the dyadic ladder `m_k`, `k = 0..=K`, sharing one table.
#[derive(Debug, Clone)]
pub struct DyadicFamily {
    rules: Vec<Arc<InterpolationRule>>,
}

impl DyadicFamily {
    pub fn new(table: Arc<RecurrenceTable>, spec: &WeightSpec, max_level: usize, rho: f64) -> Result<Self> {
        let need = level_degree(max_level);
        if need > table.max_degree() {
            return Err(Error::DegreeCapExceeded { requested: need, cap: table.max_degree() });
        }
        let mut rules: Vec<Arc<InterpolationRule>> = Vec::with_capacity(max_level + 1);
        for k in 0..=max_level {
            let m = level_degree(k);
            if let Some(prev) = rules.last() {
                if prev.degree() == m {
                    let r = prev.clone();
                    rules.push(r);
                    continue;
                }
            }
            rules.push(Arc::new(InterpolationRule::new(table.clone(), spec, m, rho)?));
        }
        Ok(DyadicFamily { rules })
    }

    pub fn max_level(&self) -> usize {
        self.rules.len() - 1
    }

    pub fn rule(&self, k: usize) -> &Arc<InterpolationRule> {
        &self.rules[k]
    }

    pub fn degree(&self, k: usize) -> usize {
        self.rules[k].degree()
    }

    pub fn spec(&self) -> &WeightSpec {
        self.rules[0].spec()
    }

    /// `Δ^I_k f = I_{m_k} f − I_{m_{k−1}} f`, with `Δ^I_0 = I_{m_0}`.
    pub fn detail(&self, k: usize, f: impl Fn(f64) -> f64) -> Result<Detail<'_>> {
        let fine = self.rules[k].interpolate(&f)?;
        let coarse = if k == 0 { None } else { Some(self.rules[k - 1].interpolate(&f)?) };
        Ok(Detail { fine, coarse })
    }
}

/// A detail `I_{m_k} f − I_{m_{k−1}} f`.
#[derive(Debug, Clone)]
pub struct Detail<'a> {
    pub fine: Interpolant<'a>,
    pub coarse: Option<Interpolant<'a>>,
}

impl Detail<'_> {
    pub fn eval_scaled(&self, x: f64, log_scale: f64) -> f64 {
        let c = self.coarse.as_ref().map_or(0.0, |c| c.eval_scaled(x, log_scale));
        self.fine.eval_scaled(x, log_scale) - c
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_scaled(x, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder() {
        assert_eq!([0, 1, 2, 3, 4, 5].map(level_degree), [2, 2, 2, 6, 14, 30]);
    }

    #[test]
    fn cardinal_at_nodes_and_edges() {
        let spec = WeightSpec::hermite(1);
        let t = Arc::new(RecurrenceTable::for_v(&spec, 64).unwrap());
        let r = InterpolationRule::new(t, &spec, 16, DEFAULT_RHO).unwrap();
        let j = r.jm() as i64;
        for k in (-j..=j).filter(|&k| k != 0) {
            for s in (-8i64..=8).filter(|&s| s != 0) {
                let xs = r.table().positive_zeros(16).unwrap()[(s.unsigned_abs() - 1) as usize] * s.signum() as f64;
                let v = r.fundamental(k, xs);
                let want = if s == k { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-9, "k={k} s={s} v={v}");
            }
            assert!(r.fundamental(k, r.am()).abs() < 1e-12);
            assert!(r.fundamental(k, -r.am()).abs() < 1e-12);
        }
    }
}
