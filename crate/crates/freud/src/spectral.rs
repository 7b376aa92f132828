//! Orthonormal expansions in `L₂(ℝ^d; μ_w)`, the `𝓗^{r_λ}` norm and its kernel,
//! and identities for derivatives of Freud orthonormal polynomials.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bspline::for_each_index;
use crate::func::TestFunction;
use crate::metrics::{panel_rule, sobolev_norm_measure, underflow_cutoff};
use crate::ortho::RecurrenceTable;
use crate::quad::Rule1D;
use crate::weight::{NormIndex, WeightSpec};
use crate::{Error, Result};

/// Extra Gauss points beyond the largest degree of the coefficient box.
const EXTRA_POINTS: usize = 64;

/// Coefficients `f̂(k)` on the box `0 ≤ k_j < shape[j]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    pub shape: Vec<usize>,
    pub coeffs: Vec<f64>,
}

impl SpectralCoefficients {
    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    fn offset(&self, k: &[usize]) -> Option<usize> {
        let mut idx = 0;
        for (&ki, &n) in k.iter().zip(&self.shape) {
            if ki >= n {
                return None;
            }
            idx = idx * n + ki;
        }
        Some(idx)
    }

    /// `f̂(k)`, zero outside the box.
    pub fn get(&self, k: &[usize]) -> f64 {
        self.offset(k).map_or(0.0, |i| self.coeffs[i])
    }

    /// `Σ |f̂(k)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Visits `(k, f̂(k))` in row-major order.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut i = 0;
        for_each_index(&self.shape, |k| {
            f(k, self.coeffs[i]);
            i += 1;
        });
    }
}

fn check_table(table: &RecurrenceTable, spec: &WeightSpec) -> Result<()> {
    if spec.tau() != 0.0 || spec.eta() != 0.0 {
        return Err(Error::InvalidArgument("spectral expansions need τ = η = 0".into()));
    }
    if *table.density() != spec.density_w() {
        return Err(Error::InvalidArgument("table must be built for the density w".into()));
    }
    Ok(())
}

/// Gauss rule of the table density with `n` points, together with `p_k(x_i)` for `k < degrees`.
fn gauss_basis(table: &RecurrenceTable, n: usize, degrees: usize) -> Result<(Rule1D, Vec<Vec<f64>>)> {
    let rule = table.gauss_rule(n)?;
    // basis[k][i] = λ_i p_k(x_i), computed as ±exp(ln λ_i + ln|p_k|) to avoid overflow
    let mut basis = vec![vec![0.0; n]; degrees];
    for (i, (&x, &wq)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let vals = table.eval_weighted_all(degrees - 1, x, wq.ln());
        for k in 0..degrees {
            basis[k][i] = vals[k];
        }
    }
    Ok((rule, basis))
}

/// `f̂(k) = ∫ f φ_k w` for `k` in the box, by tensor Gauss quadrature for `w`.
///
/// Two rules (`N` and `N + 32` points) are compared; a relative change above
/// `1e−8` of `‖f̂‖` is reported as non-convergence.
pub fn spectral_analyze(
    table: &RecurrenceTable,
    spec: &WeightSpec,
    f: impl Fn(&[f64]) -> f64,
    shape: &[usize],
) -> Result<SpectralCoefficients> {
    check_table(table, spec)?;
    if shape.len() != spec.dim() || shape.iter().any(|&n| n == 0) {
        return Err(Error::InvalidArgument("coefficient box does not match the dimension".into()));
    }
    let top = *shape.iter().max().unwrap();
    let cap = table.max_degree();
    let n1 = (top + EXTRA_POINTS).min(cap);
    let n2 = (top + EXTRA_POINTS + 32).min(cap);
    if n1 < top {
        return Err(Error::DegreeCapExceeded { requested: top, cap });
    }
    let a = analyze_with(table, &f, shape, n1)?;
    if n2 > n1 {
        let b = analyze_with(table, &f, shape, n2)?;
        let scale = b.energy().sqrt().max(f64::MIN_POSITIVE);
        let diff = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        if diff > 1e-8 * scale.max(1e-300) && diff > 1e-14 {
            return Err(Error::QuadratureNonConvergence(diff / scale));
        }
        return Ok(b);
    }
    Ok(a)
}

fn analyze_with(
    table: &RecurrenceTable,
    f: &impl Fn(&[f64]) -> f64,
    shape: &[usize],
    n: usize,
) -> Result<SpectralCoefficients> {
    let d = shape.len();
    let top = *shape.iter().max().unwrap();
    let (rule, basis) = gauss_basis(table, n, top)?;
    let mut t = Vec::with_capacity(n.pow(d as u32));
    let mut x = vec![0.0; d];
    let mut bad = false;
    for_each_index(&vec![n; d], |s| {
        for i in 0..d {
            x[i] = rule.nodes[s[i]];
        }
        let v = f(&x);
        bad |= !v.is_finite();
        t.push(v);
    });
    if bad {
        return Err(Error::NonFiniteSample);
    }
    let mut cur = vec![n; d];
    for axis in 0..d {
        let outer: usize = cur[..axis].iter().product();
        let inner: usize = cur[axis + 1..].iter().product();
        let nk = shape[axis];
        let mut out = vec![0.0; outer * nk * inner];
        for o in 0..outer {
            for k in 0..nk {
                let dst = (o * nk + k) * inner;
                for (j, &b) in basis[k].iter().enumerate() {
                    let src = (o * n + j) * inner;
                    for q in 0..inner {
                        out[dst + q] += b * t[src + q];
                    }
                }
            }
        }
        t = out;
        cur[axis] = nk;
    }
    Ok(SpectralCoefficients { shape: shape.to_vec(), coeffs: t })
}

/// `ρ_{λ,r,k} = Π_j (k_j + 1)^{r_λ}` with `r_λ = (1 − 1/λ) r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkhsWeights {
    pub r_lambda: f64,
}

impl RkhsWeights {
    pub fn new(lambda: f64, r: f64) -> Self {
        RkhsWeights { r_lambda: (1.0 - 1.0 / lambda) * r }
    }

    pub fn from_exponent(r_lambda: f64) -> Self {
        RkhsWeights { r_lambda }
    }

    pub fn weight(&self, k: &[usize]) -> f64 {
        k.iter().map(|&ki| ((ki + 1) as f64).powf(self.r_lambda)).product()
    }

    /// Whether `𝓗^{r_λ}` has a reproducing kernel (`r_λ > 1/2`).
    pub fn is_rkhs(&self) -> bool {
        self.r_lambda > 0.5
    }
}

/// `(Σ |ρ_k f̂(k)|²)^{1/2}`.
pub fn rkhs_norm(coeffs: &SpectralCoefficients, weights: &RkhsWeights) -> f64 {
    rkhs_inner(coeffs, coeffs, weights).sqrt()
}

/// `Σ ρ_k² f̂(k) ĝ(k)` over the common box.
pub fn rkhs_inner(f: &SpectralCoefficients, g: &SpectralCoefficients, weights: &RkhsWeights) -> f64 {
    let mut acc = 0.0;
    f.for_each(|k, c| {
        let w = weights.weight(k);
        acc += w * w * c * g.get(k);
    });
    acc
}

/// `K(x, y)` truncated to a box, with an estimate of the neglected part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    /// `|Σ_{k ∈ B' \ B} ρ^{−2} φ_k(x) φ_k(y)|` with `B'` the box of doubled side.
    pub tail: f64,
}

/// `Σ_{k < N} ρ^{−2} φ_k(x) φ_k(y)`; errors when the tail exceeds `tol · max(1, |K|)`.
pub fn kernel_eval(
    weights: &RkhsWeights,
    table: &RecurrenceTable,
    x: &[f64],
    y: &[f64],
    truncation: usize,
    tol: f64,
) -> Result<KernelValue> {
    if !weights.is_rkhs() {
        return Err(Error::InvalidArgument("r_λ must exceed 1/2".into()));
    }
    if x.len() != y.len() || x.is_empty() || truncation == 0 {
        return Err(Error::InvalidArgument("kernel arguments out of range".into()));
    }
    let big = 2 * truncation;
    if big > table.max_degree() + 1 {
        return Err(Error::DegreeCapExceeded { requested: big - 1, cap: table.max_degree() });
    }
    // per-axis products ρ_k^{−2} p_k(x_i) p_k(y_i) for k < 2N
    let per: Vec<Vec<f64>> = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let px = table.eval_all(big - 1, xi);
            let py = table.eval_all(big - 1, yi);
            (0..big).map(|k| px[k] * py[k] * ((k + 1) as f64).powf(-2.0 * weights.r_lambda)).collect()
        })
        .collect();
    let value: f64 = per.iter().map(|v| v[..truncation].iter().sum::<f64>()).product();
    let wide: f64 = per.iter().map(|v| v.iter().sum::<f64>()).product();
    let tail = (wide - value).abs();
    if tail > tol * value.abs().max(1.0) {
        return Err(Error::TruncationInsufficient { tail, tol });
    }
    Ok(KernelValue { value, tail })
}

/// `∫ K(x, x) w = Π_j Σ_{k<N} (k+1)^{−2 r_λ}` on a box of side `N` in `d` dimensions.
pub fn kernel_trace(weights: &RkhsWeights, dim: usize, truncation: usize) -> f64 {
    let s: f64 = (0..truncation).map(|k| ((k + 1) as f64).powf(-2.0 * weights.r_lambda)).sum();
    s.powi(dim as i32)
}

/// Trace of the truncated kernel by Gauss quadrature for `w` (d = 1).
pub fn kernel_trace_quadrature(weights: &RkhsWeights, table: &RecurrenceTable, truncation: usize) -> Result<f64> {
    let n = (truncation + EXTRA_POINTS).min(table.max_degree());
    let (rule, basis) = gauss_basis(table, n, truncation)?;
    let mut acc = 0.0;
    for (i, &wq) in rule.weights.iter().enumerate() {
        for (k, b) in basis.iter().enumerate() {
            // b[i] = λ_i p_k(x_i); λ_i p_k(x_i)² = b[i]² / λ_i
            acc += ((k + 1) as f64).powf(-2.0 * weights.r_lambda) * b[i] * b[i] / wq;
        }
    }
    Ok(acc)
}

/// One checked identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&IdentityRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    fn push(&mut self, name: &str, max_residual: f64, tolerance: f64) {
        self.rows.push(IdentityRow {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual.is_finite() && max_residual < tolerance,
        });
    }
}

/// Default probe grid: 41 points on `[−2, 2]`.
pub fn default_probe_grid() -> Vec<f64> {
    (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect()
}

/// `a_{m,k} = ∫ φ_m' φ_k` against the table density, for `k < m`, by Gauss quadrature.
pub fn derivative_band(table: &RecurrenceTable, m: usize) -> Result<Vec<f64>> {
    let n = (m + 8).min(table.max_degree());
    let rule = table.gauss_rule(n)?;
    let mut out = vec![0.0; m];
    for (&x, &wq) in rule.nodes.iter().zip(&rule.weights) {
        let vals = table.eval_all(m, x);
        let dp = table.eval(m, x).derivative();
        for k in 0..m {
            out[k] += wq * dp * vals[k];
        }
    }
    Ok(out)
}

/// `cλ ∫ φ_m φ_k x^{λ−1}` against the table density `e^{−c|x|^λ}`.
pub fn band_by_moment(table: &RecurrenceTable, m: usize) -> Result<Vec<f64>> {
    let dens = table.density();
    let lambda = dens.lambda;
    let n = (m + lambda.ceil() as usize + 8).min(table.max_degree());
    let rule = table.gauss_rule(n)?;
    let mut out = vec![0.0; m];
    for (&x, &wq) in rule.nodes.iter().zip(&rule.weights) {
        let vals = table.eval_all(m, x);
        let xp = x.signum() * x.abs().powf(lambda - 1.0);
        for k in 0..m {
            out[k] += dens.c * lambda * wq * vals[m] * vals[k] * xp;
        }
    }
    Ok(out)
}

/// Checks the λ = 4 identities for the table density `e^{−c x⁴}`:
///
/// * `φ_m' = (m/α_m) φ_{m−1} + 4c α_m α_{m−1} α_{m−2} φ_{m−3}` on `probe`, relative;
/// * `4c α_m² (α_{m+1}² + α_m² + α_{m−1}²) = m`;
/// * `(12c/m)^{1/4} α_m → 1` (the distance to 1 at `max_m` is below its value at `max_m/2`);
/// * the band `φ_m' = Σ_{m−3 ≤ k < m} a_{m,k} φ_k`, with `a_{m,k}` from the moment formula
///   vanishing outside the band and `|a_{m,k}| / m^{3/4}` bounded.
pub fn derivative_recurrence_check(table: &RecurrenceTable, probe: &[f64], max_m: usize) -> Result<IdentityReport> {
    let dens = table.density();
    if dens.lambda != 4.0 || dens.alpha != 0.0 || dens.beta != 0.0 {
        return Err(Error::InvalidArgument("identities need the density exp(−c x⁴)".into()));
    }
    if max_m < 3 || max_m + 1 > table.max_degree() {
        return Err(Error::InvalidArgument("max_m out of range".into()));
    }
    let c = dens.c;
    let al = |m: usize| table.alpha(m);
    let mut report = IdentityReport::default();

    let mut worst: f64 = 0.0;
    for m in 3..=max_m {
        for &x in probe {
            let v = table.eval_all(m, x);
            let lhs = table.eval(m, x).derivative();
            let t1 = m as f64 / al(m) * v[m - 1];
            let t2 = 4.0 * c * al(m) * al(m - 1) * al(m - 2) * v[m - 3];
            let scale = lhs.abs().max(t1.abs() + t2.abs()).max(1e-300);
            worst = worst.max((lhs - t1 - t2).abs() / scale);
        }
    }
    report.push("derivative_recurrence", worst, 1e-7);

    let mut worst: f64 = 0.0;
    for m in 1..=max_m {
        let s = al(m + 1).powi(2) + al(m).powi(2) + if m > 1 { al(m - 1).powi(2) } else { 0.0 };
        worst = worst.max((4.0 * c * al(m).powi(2) * s - m as f64).abs());
    }
    report.push("string_equation", worst, 1e-8);

    let dist = |m: usize| ((12.0 * c / m as f64).powf(0.25) * al(m) - 1.0).abs();
    let (half, full) = (dist(max_m / 2), dist(max_m));
    report.push("freud_limit_trend", full / half.max(1e-300), 1.0);

    let mut outside: f64 = 0.0;
    let mut agree: f64 = 0.0;
    let mut bound: f64 = 0.0;
    for m in 1..=max_m {
        let band = band_by_moment(table, m)?;
        let direct = derivative_band(table, m)?;
        for k in 0..m {
            if k + 3 < m {
                outside = outside.max(band[k].abs());
            } else {
                bound = bound.max(band[k].abs() / (m as f64).powf(0.75));
            }
            agree = agree.max((band[k] - direct[k]).abs() / (1.0 + direct[k].abs()));
        }
    }
    report.push("band_outside", outside, 1e-8);
    report.push("band_agreement", agree, 1e-8);
    report.rows.push(IdentityRow {
        name: "band_growth_constant".into(),
        max_residual: bound,
        tolerance: f64::INFINITY,
        pass: bound.is_finite(),
    });
    Ok(report)
}

/// `‖f‖_{W^r_2(μ)}` against `‖f‖_{𝓗^{r_λ}}` for one function.
#[derive(Debug, Clone, PartialEq)]
pub struct NormPair {
    pub name: String,
    pub sobolev: f64,
    pub rkhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEquivalenceReport {
    pub rows: Vec<NormPair>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl NormEquivalenceReport {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Ratios `‖f‖_{W^r_2(μ)} / ‖f‖_{𝓗^{r_λ}}` over a panel, with coefficients on a box of side `degrees`.
pub fn norm_equivalence_probe(
    spec: &WeightSpec,
    table: &RecurrenceTable,
    panel: &[TestFunction],
    r: u32,
    degrees: usize,
) -> Result<NormEquivalenceReport> {
    check_table(table, spec)?;
    let d = spec.dim();
    let weights = RkhsWeights::new(spec.lambda(), r as f64);
    let cutoff = underflow_cutoff(spec).min(40.0);
    let rule = panel_rule(cutoff, 400, 20);
    let rules: Vec<Rule1D> = vec![rule; d];
    let mut rows = Vec::with_capacity(panel.len());
    for f in panel {
        let sob = sobolev_norm_measure(spec, NormIndex::Finite(2.0), r, f, &rules)?;
        let coeffs = spectral_analyze(table, spec, |x| f.eval(x), &vec![degrees; d])?;
        let rk = rkhs_norm(&coeffs, &weights);
        rows.push(NormPair { name: f.name.clone(), sobolev: sob, rkhs: rk, ratio: sob / rk });
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(NormEquivalenceReport { rows, min_ratio, max_ratio })
}

/// Shared table for the density `w` of `spec`.
pub fn table_for(spec: &WeightSpec, max_degree: usize) -> Result<Arc<RecurrenceTable>> {
    RecurrenceTable::for_w(spec, max_degree).map(Arc::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_and_shift() {
        let spec = WeightSpec::hermite(1);
        let t = table_for(&spec, 160).unwrap();
        let c = spectral_analyze(&t, &spec, |x| t.eval_all(3, x[0])[3], &[10]).unwrap();
        for k in 0..10 {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((c.get(&[k]) - want).abs() < 1e-9);
        }
        let c = spectral_analyze(&t, &spec, |x| x[0] * t.norm0(), &[6]).unwrap();
        assert!((c.get(&[1]) - t.alpha(1)).abs() < 1e-12);
        assert!(c.get(&[0]).abs() < 1e-12 && c.get(&[2]).abs() < 1e-12);
    }

    #[test]
    fn weights_multiply() {
        let w = RkhsWeights::from_exponent(0.75);
        assert!((w.weight(&[1, 3]) - 8f64.powf(0.75)).abs() < 1e-12);
        assert_eq!(w.weight(&[0, 0]), 1.0);
        assert!((w.weight(&[1, 3]) - w.weight(&[1]) * w.weight(&[3])).abs() == 0.0);
    }

    #[test]
    fn quartic_identities() {
        let spec = WeightSpec::pure(4.0, 1.0, 1).unwrap();
        let t = table_for(&spec, 120).unwrap();
        let rep = derivative_recurrence_check(&t, &default_probe_grid(), 40).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
