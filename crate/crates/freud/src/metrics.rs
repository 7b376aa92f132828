//! Weighted Lebesgue and Sobolev norms, discrete Marcinkiewicz norms.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::func::TestFunction;
use crate::interp::InterpolationRule;
use crate::ortho::RecurrenceTable;
use crate::quad::{composite, gauss_legendre, uniform_breaks, Rule1D};
use crate::weight::{NormIndex, WeightSpec};
use crate::{Error, Result};

/// `X` with `a X^λ = 750`: beyond it `w` is below double-precision underflow.
pub fn underflow_cutoff(spec: &WeightSpec) -> f64 {
    (750.0 / spec.a()).powf(1.0 / spec.lambda())
}

/// Composite Gauss–Legendre rule on `[−X, X]` with `panels` panels of `order` points.
pub fn panel_rule(cutoff: f64, panels: usize, order: usize) -> Rule1D {
    composite(&gauss_legendre(order), &uniform_breaks(-cutoff, cutoff, panels))
}

/// A panel rule resolving weighted polynomials up to degree `max_degree`:
/// the cutoff covers both the weight underflow point and the MRS edge, and
/// each panel spans at most a few zero spacings.
pub fn rule_for_degree(spec: &WeightSpec, max_degree: usize) -> Rule1D {
    let am = crate::ortho::mrs_number(spec, max_degree.max(2)).value;
    let cutoff = underflow_cutoff(spec).max(1.2 * am + 1.0);
    let spacing = (am / max_degree.max(1) as f64).min(0.25);
    let panels = ((2.0 * cutoff / (4.0 * spacing)).ceil() as usize).max(64);
    panel_rule(cutoff, panels, 20)
}

/// Gauss rule of the table's density rewritten for Lebesgue measure:
/// weights `λ_i / v(x_i) = 1/Σ_{k<n} (p_k(x_i) √v(x_i))²`, which never underflow.
pub fn gauss_lebesgue_rule(table: &RecurrenceTable, n: usize) -> Result<Rule1D> {
    let nodes = table.zeros(n)?;
    let weights = nodes
        .iter()
        .map(|&x| {
            let half = 0.5 * table.density().log_eval(x);
            let p = table.eval_weighted_all(n - 1, x, half);
            1.0 / p.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    Ok(Rule1D { nodes, weights })
}

/// `(Σ weights_i |values_i|^q)^{1/q}`, or `max |values_i|` for `q = ∞`.
pub fn lq_from_values(weights: &[f64], values: &[f64], q: NormIndex) -> f64 {
    match q {
        NormIndex::Infinity => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        NormIndex::Finite(q) => {
            let s: f64 = weights.iter().zip(values).map(|(w, v)| w * v.abs().powf(q)).sum();
            s.powf(1.0 / q)
        }
    }
}

/// `‖g‖_{L_q}` over a one-dimensional rule, `g` being already weighted.
pub fn lq_1d(rule: &Rule1D, q: NormIndex, g: impl Fn(f64) -> f64) -> f64 {
    let vals: Vec<f64> = rule.nodes.iter().map(|&x| g(x)).collect();
    lq_from_values(&rule.weights, &vals, q)
}

/// Calls `f(point, weight)` for every node of the tensor rule.
pub fn for_each_tensor(rules: &[&Rule1D], mut f: impl FnMut(&[f64], f64)) {
    let d = rules.len();
    if rules.iter().any(|r| r.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; d];
    let mut x: Vec<f64> = rules.iter().map(|r| r.nodes[0]).collect();
    loop {
        let w: f64 = (0..d).map(|i| rules[i].weights[idx[i]]).product();
        f(&x, w);
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < rules[i].len() {
                x[i] = rules[i].nodes[idx[i]];
                break;
            }
            idx[i] = 0;
            x[i] = rules[i].nodes[0];
        }
    }
}

fn tail_shell(rule: &Rule1D) -> Rule1D {
    let x = rule.nodes.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let outer = composite(&gauss_legendre(20), &uniform_breaks(x, 2.0 * x, 8));
    outer.symmetrized()
}

/// `∫ |g|^q` over the tensor rule, with its tail beyond the rule's extent.
fn tensor_power_sum(rules: &[Rule1D], q: f64, g: &impl Fn(&[f64]) -> f64) -> (f64, f64) {
    let refs: Vec<&Rule1D> = rules.iter().collect();
    let mut body = 0.0;
    for_each_tensor(&refs, |x, w| body += w * g(x).abs().powf(q));
    let mut tail = 0.0;
    for i in 0..rules.len() {
        let shell = tail_shell(&rules[i]);
        let mut r = refs.clone();
        r[i] = &shell;
        for_each_tensor(&r, |x, w| tail += w * g(x).abs().powf(q));
    }
    (body, tail)
}

fn tensor_sup(rules: &[Rule1D], g: &impl Fn(&[f64]) -> f64) -> f64 {
    let refs: Vec<&Rule1D> = rules.iter().collect();
    let mut s: f64 = 0.0;
    for_each_tensor(&refs, |x, _| s = s.max(g(x).abs()));
    s
}

/// `‖g‖_{L_q(ℝ^d)}` of an already weighted function on a tensor rule; fails with
/// [`Error::CutoffTooSmall`] if the tail beyond the cutoff exceeds `1e−3` of the value.
pub fn tensor_lq(rules: &[Rule1D], q: NormIndex, g: impl Fn(&[f64]) -> f64) -> Result<f64> {
    match q {
        NormIndex::Infinity => Ok(tensor_sup(rules, &g)),
        NormIndex::Finite(q) => {
            let (body, tail) = tensor_power_sum(rules, q, &g);
            let value = body.powf(1.0 / q);
            let t = tail.powf(1.0 / q);
            if t > 1e-3 * value && t > 1e-300 {
                return Err(Error::CutoffTooSmall { tail: t, value });
            }
            Ok(value)
        }
    }
}

/// Per-axis graded sup grid: 1000 uniform points on `[−a_m, a_m]`, geometric
/// refinement toward `±a_m` (and toward 0 when `τ > 0`), and a coarse extension to `cutoff`.
pub fn sup_grid(spec: &WeightSpec, am: f64, cutoff: f64, density: usize) -> Vec<f64> {
    let n = 1000 * density.max(1);
    let mut g: Vec<f64> = (0..=n).map(|i| -am + 2.0 * am * i as f64 / n as f64).collect();
    for j in 1..=30 * density.max(1) {
        let t = am * (1.0 - 0.5f64.powf(j as f64 / density.max(1) as f64));
        g.push(t);
        g.push(-t);
        if spec.tau() > 0.0 {
            let s = am * 0.5f64.powf(j as f64 / density.max(1) as f64);
            g.push(s);
            g.push(-s);
        }
    }
    if cutoff > am {
        let k = 200 * density.max(1);
        for i in 1..=k {
            let t = am + (cutoff - am) * i as f64 / k as f64;
            g.push(t);
            g.push(-t);
        }
    }
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g.dedup();
    g
}

/// `‖f‖_{L_{q,w}}` for a test function; `q = ∞` takes the sup over the per-axis points of `rules`.
pub fn weighted_lq_norm(spec: &WeightSpec, q: NormIndex, f: &TestFunction, rules: &[Rule1D]) -> Result<f64> {
    tensor_lq(rules, q, |x| f.eval(x) * spec.w_multi(x))
}

/// `‖f‖_{L_q(μ_w)} = (∫ |f|^q w)^{1/q}`.
pub fn measure_norm(spec: &WeightSpec, q: NormIndex, rules: &[Rule1D], f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    match q {
        NormIndex::Infinity => tensor_lq(rules, q, |x| f(x)),
        NormIndex::Finite(qq) => tensor_lq(rules, q, |x| f(x) * (spec.log_w_multi(x) / qq).exp()),
    }
}

/// `(Σ_{|k|_∞ ≤ r} ‖D^k f‖^p_{L_{p,w}})^{1/p}`, or the max over `k` when `p = ∞`.
pub fn sobolev_norm(spec: &WeightSpec, p: NormIndex, r: u32, f: &TestFunction, rules: &[Rule1D]) -> Result<f64> {
    sobolev_with(p, r, f, rules, |x| spec.log_w_multi(x), |x, i| spec.log_w(x[i]))
}

/// Sobolev norm with measure `μ_w`: like [`sobolev_norm`] with weight `w^{1/p}`.
pub fn sobolev_norm_measure(spec: &WeightSpec, p: NormIndex, r: u32, f: &TestFunction, rules: &[Rule1D]) -> Result<f64> {
    let e = match p {
        NormIndex::Infinity => 0.0,
        NormIndex::Finite(p) => 1.0 / p,
    };
    sobolev_with(p, r, f, rules, |x| e * spec.log_w_multi(x), |x, i| e * spec.log_w(x[i]))
}

fn sobolev_with(
    p: NormIndex,
    r: u32,
    f: &TestFunction,
    rules: &[Rule1D],
    log_weight: impl Fn(&[f64]) -> f64,
    log_weight_axis: impl Fn(&[f64], usize) -> f64,
) -> Result<f64> {
    let d = f.dim;
    let orders: Vec<Vec<usize>> = multi_indices(d, r as usize);
    if let Some((c, factors)) = f.factors() {
        // separable: the sum over k factorizes into per-axis sums
        let mut total = c.abs().powf(match p {
            NormIndex::Infinity => 1.0,
            NormIndex::Finite(p) => p,
        });
        for (i, u) in factors.iter().enumerate() {
            let mut per_k = Vec::with_capacity(r as usize + 1);
            for k in 0..=r as usize {
                let g = |x: &[f64]| {
                    let mut pt = vec![0.0; d];
                    pt[i] = x[0];
                    u.derivative(x[0], k) * log_weight_axis(&pt, i).exp()
                };
                per_k.push(tensor_lq(core::slice::from_ref(&rules[i]), p, g)?);
            }
            total *= match p {
                NormIndex::Infinity => per_k.iter().cloned().fold(0.0, f64::max),
                NormIndex::Finite(p) => per_k.iter().map(|v| v.powf(p)).sum(),
            };
        }
        return Ok(match p {
            NormIndex::Infinity => total,
            NormIndex::Finite(p) => total.powf(1.0 / p),
        });
    }
    let mut acc: f64 = 0.0;
    for k in &orders {
        let v = tensor_lq(rules, p, |x| f.partial(x, k) * log_weight(x).exp())?;
        acc = match p {
            NormIndex::Infinity => acc.max(v),
            NormIndex::Finite(p) => acc + v.powf(p),
        };
    }
    Ok(match p {
        NormIndex::Infinity => acc,
        NormIndex::Finite(p) => acc.powf(1.0 / p),
    })
}

/// All `k ∈ ℕ₀^d` with `|k|_∞ ≤ r`.
pub fn multi_indices(d: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=r).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// `(m^{1/λ−1} Σ_{|k|≤j(m)} |φ(x_{m,k}) w(x_{m,k})|^p)^{1/p}` from node values
/// ordered like the rule's nodes.
pub fn marcinkiewicz_norm(rule: &InterpolationRule, p: NormIndex, values: &[f64]) -> f64 {
    let spec = rule.spec();
    let weighted: Vec<f64> = rule.nodes().iter().zip(values).map(|(&x, v)| v * spec.w(x)).collect();
    let scale = (rule.degree() as f64).powf(1.0 / spec.lambda() - 1.0);
    let w = vec![scale; weighted.len()];
    lq_from_values(&w, &weighted, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::panel_function;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_integrals() {
        let spec = WeightSpec::hermite(1);
        let rule = panel_rule(underflow_cutoff(&spec), 256, 20);
        let one = panel_function("one", 1).unwrap();
        let v = weighted_lq_norm(&spec, NormIndex::Finite(2.0), &one, &[rule.clone()]).unwrap();
        assert_relative_eq!(v, core::f64::consts::PI.powf(0.25), max_relative = 1e-13);
        let s = sobolev_norm(&spec, NormIndex::Finite(2.0), 1, &one, &[rule.clone()]).unwrap();
        assert_relative_eq!(s, core::f64::consts::PI.powf(0.25), max_relative = 1e-13);
        let x = crate::func::TestFunction::product("x", crate::func::Univariate::Polynomial(vec![0.0, 1.0]), 1);
        let s = sobolev_norm(&spec, NormIndex::Finite(2.0), 1, &x, &[rule]).unwrap();
        assert_relative_eq!(s, (1.5 * core::f64::consts::PI.sqrt()).sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn gauss_lebesgue_weights() {
        let spec = WeightSpec::hermite(1);
        let opts = crate::ortho::BuildOptions::with_cap(700);
        let t = RecurrenceTable::build(&spec.density_v(), 700, &opts).unwrap();
        let r = gauss_lebesgue_rule(&t, 600).unwrap();
        // ∫ e^{-x²} = √π
        let s = r.integrate(|x| (-x * x).exp());
        assert_relative_eq!(s, core::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn cutoff_check() {
        let spec = WeightSpec::hermite(1);
        let one = panel_function("one", 1).unwrap();
        let short = panel_rule(1.0, 8, 20);
        assert!(matches!(
            weighted_lq_norm(&spec, NormIndex::Finite(2.0), &one, &[short]),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}
