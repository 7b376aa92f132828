//! Orthonormal polynomials for even Freud densities.
//!
//! Recurrence coefficients come from a discretized Stieltjes procedure on
//! `[0, X]` (the densities are even, so the Jacobi matrix has zero diagonal).

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::tridiag_eigen;
use crate::quad::{composite, gauss_legendre, graded_breaks, uniform_breaks, Rule1D};
use crate::scaled::{renormalize, ScaledPair};
use crate::weight::{FreudDensity, WeightSpec};
use crate::{Error, Result};

/// Default upper bound on the degree of a recurrence table.
pub const DEFAULT_DEGREE_CAP: usize = 512;

const LN2: f64 = core::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub cap: usize,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Rebuild on a refined discretization and compare the coefficients.
    pub verify: bool,
    /// Maximum tolerated relative change between the two discretizations.
    pub tolerance: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { cap: DEFAULT_DEGREE_CAP, order: 20, verify: true, tolerance: 1e-11 }
    }
}

impl BuildOptions {
    pub fn with_cap(cap: usize) -> Self {
        BuildOptions { cap, ..Default::default() }
    }
}

/// Jacobi coefficients `α_1..α_M` of the orthonormal family of a density,
/// `x p_m = α_{m+1} p_{m+1} + α_m p_{m−1}`, and `p_0 = (∫ density)^{−1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    density: FreudDensity,
    alpha: Vec<f64>,
    log_norm0: f64,
}

/// `C_λ = 2^{λ−1} Γ(λ/2)² / Γ(λ)`.
pub fn mrs_constant(lambda: f64) -> f64 {
    ((lambda - 1.0) * LN2 + 2.0 * libm::lgamma(lambda / 2.0) - libm::lgamma(lambda)).exp()
}

/// Mhaskar–Rakhmanov–Saff number of degree `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrsNumber {
    pub m: usize,
    pub value: f64,
}

/// MRS number for the density `exp(−c|x|^λ)`: `(C_λ m / c)^{1/λ}`.
pub fn mrs_number_for(lambda: f64, c: f64, m: usize) -> MrsNumber {
    MrsNumber { m, value: (mrs_constant(lambda) * m as f64 / c).powf(1.0 / lambda) }
}

/// MRS number of the weight `v` of a [`WeightSpec`] (`c = 2a`).
pub fn mrs_number(spec: &WeightSpec, m: usize) -> MrsNumber {
    mrs_number_for(spec.lambda(), 2.0 * spec.a(), m)
}

/// `j(m)` with a flag set when no positive zero reaches `ρ a_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationIndex {
    pub j: usize,
    pub flagged: bool,
}

impl RecurrenceTable {
    /// Table for the weight `v` of `spec`.
    pub fn for_v(spec: &WeightSpec, max_degree: usize) -> Result<Self> {
        Self::build(&spec.density_v(), max_degree, &BuildOptions::default())
    }

    /// Table for the density `w` of `spec` (used by the spectral module).
    pub fn for_w(spec: &WeightSpec, max_degree: usize) -> Result<Self> {
        Self::build(&spec.density_w(), max_degree, &BuildOptions::default())
    }

    pub fn build(density: &FreudDensity, max_degree: usize, opts: &BuildOptions) -> Result<Self> {
        if !(density.lambda > 1.0) || !(density.c > 0.0) || density.beta < 0.0 {
            return Err(Error::InvalidWeight("density needs lambda > 1, c > 0, beta >= 0"));
        }
        if !(density.alpha > -1.0) {
            return Err(Error::NonIntegrableWeight);
        }
        if max_degree > opts.cap {
            return Err(Error::DegreeCapExceeded { requested: max_degree, cap: opts.cap });
        }
        let x_max = cutoff(density, max_degree);
        let panels = panel_count(density, max_degree, x_max);
        let (alpha, log_mass) = stieltjes(density, max_degree, x_max, panels, opts.order);
        if opts.verify {
            let (alpha2, log_mass2) = stieltjes(density, max_degree, x_max * 1.05, 2 * panels, opts.order);
            let mut worst = ((log_mass - log_mass2) / log_mass2.abs().max(1.0)).abs();
            for (a, b) in alpha.iter().zip(&alpha2).skip(1) {
                worst = worst.max(((a - b) / b).abs());
            }
            if !(worst <= opts.tolerance) {
                return Err(Error::QuadratureNonConvergence(worst));
            }
        }
        if alpha.iter().skip(1).any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::QuadratureNonConvergence(f64::NAN));
        }
        let log_mass = log_mass + density.log_scale;
        Ok(RecurrenceTable { density: *density, alpha, log_norm0: -0.5 * log_mass })
    }

    /// Rebuilds a table from stored coefficients (e.g. a cache file).
    pub fn from_parts(density: FreudDensity, alpha_1_to_m: &[f64], log_norm0: f64) -> Result<Self> {
        if alpha_1_to_m.iter().any(|a| !(*a > 0.0) || !a.is_finite()) || !log_norm0.is_finite() {
            return Err(Error::InvalidArgument("recurrence coefficients must be positive and finite".into()));
        }
        let mut alpha = vec![0.0];
        alpha.extend_from_slice(alpha_1_to_m);
        Ok(RecurrenceTable { density, alpha, log_norm0 })
    }

    pub fn density(&self) -> &FreudDensity {
        &self.density
    }

    pub fn max_degree(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `α_m` for `1 ≤ m ≤ M` (`α_0 = 0`).
    pub fn alpha(&self, m: usize) -> f64 {
        self.alpha[m]
    }

    /// `α_1..α_M`.
    pub fn alphas(&self) -> &[f64] {
        &self.alpha[1..]
    }

    pub fn log_norm0(&self) -> f64 {
        self.log_norm0
    }

    pub fn norm0(&self) -> f64 {
        self.log_norm0.exp()
    }

    /// `ln ∫ density`.
    pub fn log_mass(&self) -> f64 {
        -2.0 * self.log_norm0
    }

    pub fn mrs_number(&self, m: usize) -> MrsNumber {
        mrs_number_for(self.density.lambda, self.density.c, m)
    }

    fn check_degree(&self, m: usize) -> Result<()> {
        if m > self.max_degree() {
            return Err(Error::DegreeCapExceeded { requested: m, cap: self.max_degree() });
        }
        Ok(())
    }

    /// `(p_m(x), p_m'(x))` in exponent-scaled form.
    ///
    /// # Panics
    /// If `m` exceeds the table degree.
    pub fn eval(&self, m: usize, x: f64) -> ScaledPair {
        let mut st = self.start();
        for k in 0..m {
            self.step(&mut st, k, x);
        }
        ScaledPair { p: st[1], dp: st[3], exp: st[4] as i64 }
    }

    /// Weighted values `e^{log_weight} p_k(x)` for `k = 0..=m`.
    pub fn eval_weighted_all(&self, m: usize, x: f64, log_weight: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(m + 1);
        let mut st = self.start();
        out.push(ScaledPair { p: st[1], dp: st[3], exp: st[4] as i64 }.weighted(log_weight));
        for k in 0..m {
            self.step(&mut st, k, x);
            out.push(ScaledPair { p: st[1], dp: st[3], exp: st[4] as i64 }.weighted(log_weight));
        }
        out
    }

    /// Plain values `p_k(x)`, `k = 0..=m` (fine for moderate degrees and arguments).
    pub fn eval_all(&self, m: usize, x: f64) -> Vec<f64> {
        self.eval_weighted_all(m, x, 0.0)
    }

    // state: [p_{k−1}, p_k, dp_{k−1}, dp_k, exp]
    fn start(&self) -> [f64; 5] {
        let e0 = (self.log_norm0 / LN2).floor();
        let m0 = (self.log_norm0 - e0 * LN2).exp();
        [0.0, m0, 0.0, 0.0, e0]
    }

    fn step(&self, st: &mut [f64; 5], k: usize, x: f64) {
        let an = self.alpha[k + 1];
        let ak = self.alpha[k];
        let p_next = (x * st[1] - ak * st[0]) / an;
        let dp_next = (st[1] + x * st[3] - ak * st[2]) / an;
        let mut v = [st[1], p_next, st[3], dp_next];
        let mut e = st[4] as i64;
        renormalize(&mut v, &mut e);
        *st = [v[0], v[1], v[2], v[3], e as f64];
    }

    /// All `m` zeros of `p_m`, ascending, exactly symmetric about 0.
    pub fn zeros(&self, m: usize) -> Result<Vec<f64>> {
        self.check_degree(m)?;
        if m == 0 {
            return Ok(Vec::new());
        }
        let (mut x, _) = tridiag_eigen(&vec![0.0; m], &self.alpha[1..m], false)?;
        // one Newton polish step; p/p' is exact in the shared exponent
        for xi in x.iter_mut() {
            let s = self.eval(m, *xi);
            if s.dp != 0.0 {
                let step = s.p / s.dp;
                if step.abs() < 1e-6 * (1.0 + xi.abs()) {
                    *xi -= step;
                }
            }
        }
        for i in 0..m / 2 {
            let j = m - 1 - i;
            let t = 0.5 * (x[j] - x[i]);
            x[i] = -t;
            x[j] = t;
        }
        if m % 2 == 1 {
            x[m / 2] = 0.0;
        }
        Ok(x)
    }

    /// Positive zeros `x_{m,1} < … < x_{m,m/2}` of `p_m` for even `m`.
    pub fn positive_zeros(&self, m: usize) -> Result<Vec<f64>> {
        if m % 2 == 1 {
            return Err(Error::OddDegree(m));
        }
        let z = self.zeros(m)?;
        Ok(z[m / 2..].to_vec())
    }

    /// `n`-point Gauss rule for the table density (Golub–Welsch).
    pub fn gauss_rule(&self, n: usize) -> Result<Rule1D> {
        self.check_degree(n)?;
        let (nodes, z) = tridiag_eigen(&vec![0.0; n], &self.alpha[1..n.max(1)], true)?;
        let lm = self.log_mass();
        let weights = z.iter().map(|t| (2.0 * t.abs().ln() + lm).exp()).collect();
        let mut rule = Rule1D { nodes, weights };
        // exact symmetry
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let t = 0.5 * (rule.nodes[j] - rule.nodes[i]);
            let w = 0.5 * (rule.weights[i] + rule.weights[j]);
            rule.nodes[i] = -t;
            rule.nodes[j] = t;
            rule.weights[i] = w;
            rule.weights[j] = w;
        }
        if n % 2 == 1 {
            rule.nodes[n / 2] = 0.0;
        }
        Ok(rule)
    }

    /// `j(m)`: smallest `k ≥ 1` with `x_{m,k} ≥ ρ a_m`, or `m/2` with a flag.
    pub fn truncation_index(&self, m: usize, rho: f64) -> Result<TruncationIndex> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidArgument(alloc::format!("rho = {rho} outside (0, 1)")));
        }
        let pos = self.positive_zeros(m)?;
        let am = self.mrs_number(m).value;
        Ok(truncation_from_zeros(&pos, rho * am))
    }
}

pub(crate) fn truncation_from_zeros(pos: &[f64], threshold: f64) -> TruncationIndex {
    match pos.iter().position(|&x| x >= threshold) {
        Some(i) => TruncationIndex { j: i + 1, flagged: false },
        None => TruncationIndex { j: pos.len(), flagged: true },
    }
}

/// Upper end `X` of the discretization interval.
fn cutoff(d: &FreudDensity, m: usize) -> f64 {
    let deg = 2.0 * m as f64 + 2.0 + d.alpha.max(0.0) + d.beta;
    let g = |x: f64| deg * x.ln() - d.c * x.powf(d.lambda);
    let x_peak = (deg / (d.c * d.lambda)).powf(1.0 / d.lambda).max(1.0);
    let target = g(x_peak) - 750.0;
    let mut hi = 2.0 * x_peak;
    while g(hi) > target {
        hi *= 1.5;
    }
    let mut lo = x_peak;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn panel_count(d: &FreudDensity, m: usize, x_max: f64) -> usize {
    let deg = 2 * m + 2;
    let spacing = 2.0 * mrs_number_for(d.lambda, d.c, deg).value / deg as f64;
    let h = (x_max / 64.0).min(spacing);
    (x_max / h).ceil() as usize
}

/// Returns `(α_0 = 0, α_1..α_M)` and `ln` of the full-line mass of the shape.
///
/// The Stieltjes vectors `sqrt(W_i) p_k(x_i)` carry one binary exponent per
/// node, since `sqrt(W_i)` alone underflows far out while `p_k(x_i)` grows.
fn stieltjes(d: &FreudDensity, m: usize, x_max: f64, panels: usize, order: usize) -> (Vec<f64>, f64) {
    let breaks = if d.smooth_at_origin() { uniform_breaks(0.0, x_max, panels) } else { graded_breaks(x_max, panels, 60) };
    let rule = composite(&gauss_legendre(order), &breaks);
    let logs: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w.ln() + d.log_shape(x)).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mass: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    let log_mass = top + mass.ln() + LN2;
    let x = &rule.nodes;
    let n = x.len();
    let mut prev = vec![0.0; n];
    let mut cur = vec![0.0; n];
    let mut ex = vec![0i32; n];
    let mut fac = vec![0.0; n];
    for i in 0..n {
        let lu = 0.5 * (logs[i] - top - mass.ln());
        let e = if lu.is_finite() { (lu / LN2).floor() as i32 } else { 0 };
        cur[i] = if lu.is_finite() { (lu - e as f64 * LN2).exp() } else { 0.0 };
        ex[i] = e;
        fac[i] = libm::scalbn(1.0, e);
    }
    let hi = 18446744073709551616.0f64;
    let mut alpha = vec![0.0; m + 1];
    for k in 0..m {
        let ak = alpha[k];
        let mut s = 0.0;
        for i in 0..n {
            let r = x[i] * cur[i] - ak * prev[i];
            prev[i] = cur[i];
            cur[i] = r;
            let t = r * fac[i];
            s += t * t;
        }
        let a = s.sqrt();
        alpha[k + 1] = a;
        let inv = 1.0 / a;
        for i in 0..n {
            let r = cur[i] * inv;
            cur[i] = r;
            let ar = r.abs();
            if ar > hi || (ar < 1.0 / hi && ar != 0.0) {
                let (_, sh) = libm::frexp(r);
                cur[i] = libm::scalbn(r, -sh);
                prev[i] = libm::scalbn(prev[i], -sh);
                ex[i] += sh;
                fac[i] = libm::scalbn(1.0, ex[i]);
            }
        }
    }
    (alpha, log_mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_alphas() {
        let t = RecurrenceTable::for_v(&WeightSpec::hermite(1), 40).unwrap();
        for m in 1..=40 {
            assert!((t.alpha(m) - (m as f64 / 2.0).sqrt()).abs() < 1e-12, "m={m}");
        }
        let pi = core::f64::consts::PI;
        assert!((t.norm0() - pi.powf(-0.25)).abs() < 1e-14);
    }

    #[test]
    fn mrs_examples() {
        assert!((mrs_number(&WeightSpec::hermite(1), 4).value - 8f64.sqrt()).abs() < 1e-14);
        let s = WeightSpec::pure(4.0, 0.5, 1).unwrap();
        assert!((mrs_number(&s, 3).value - 4f64.powf(0.25)).abs() < 1e-14);
        assert!((mrs_constant(4.0) - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn degree_cap() {
        let r = RecurrenceTable::for_v(&WeightSpec::hermite(1), 600);
        assert!(matches!(r, Err(Error::DegreeCapExceeded { .. })));
    }

    #[test]
    fn non_integrable() {
        let s = WeightSpec::new(2.0, 0.0, 0.0, 0.5, 0.0, -1.0, 1).unwrap();
        assert_eq!(RecurrenceTable::for_v(&s, 4), Err(Error::NonIntegrableWeight));
    }
}
