//! Empirical probes of Bernstein, Nikol'skii and Marcinkiewicz inequalities on random
//! weighted polynomials.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::interp::InterpolationRule;
use crate::metrics::{lq_from_values, marcinkiewicz_norm, rule_for_degree, sup_grid, underflow_cutoff};
use crate::ortho::{mrs_number, RecurrenceTable};
use crate::weight::{NormIndex, WeightSpec};
use crate::{Error, Result};

/// Inequality being probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// `‖φ'‖_{p,w} / (m^{1−1/λ} ‖φ‖_{p,w})`.
    Bernstein,
    /// `p < q`: `‖φ‖_{q,w} / (m^{(1−1/λ)(1/p−1/q)} ‖φ‖_{p,w})`.
    NikolskiiUp,
    /// `q < p`: `‖φ‖_{q,w} / (m^{(1/λ)(1/q−1/p)} ‖φ‖_{p,w})`.
    NikolskiiDown,
    /// `‖φ‖_{p,w}(ℝ) / ‖φ‖_{p,w}(I^δ_m)` with `I^δ_m = {δ a_m/m ≤ |x| ≤ a_m}`.
    RestrictedSupport,
    /// Discrete over continuous norm for `φ ∈ 𝒫*_{m+1}` from random node values.
    Marcinkiewicz,
}

impl ProbeKind {
    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::Bernstein => "bernstein",
            ProbeKind::NikolskiiUp => "nikolskii_up",
            ProbeKind::NikolskiiDown => "nikolskii_down",
            ProbeKind::RestrictedSupport => "restricted_support",
            ProbeKind::Marcinkiewicz => "marcinkiewicz",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "bernstein" => ProbeKind::Bernstein,
            "nikolskii_up" => ProbeKind::NikolskiiUp,
            "nikolskii_down" => ProbeKind::NikolskiiDown,
            "restricted_support" => ProbeKind::RestrictedSupport,
            "marcinkiewicz" => ProbeKind::Marcinkiewicz,
            _ => return None,
        })
    }
}

/// Probe result at one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub kind: String,
    pub p: f64,
    pub q: f64,
    pub m: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub kind: ProbeKind,
    pub p: NormIndex,
    pub q: NormIndex,
    pub degrees: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// `δ` of the restricted-support probe.
    pub delta: f64,
}

impl ProbeConfig {
    pub fn new(kind: ProbeKind, p: NormIndex, q: NormIndex, degrees: Vec<usize>) -> Self {
        ProbeConfig { kind, p, q, degrees, trials: 50, seed: 7, delta: 0.1 }
    }
}

/// Uniform draw in `[−1, 1)`.
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

/// Standard normal draw (Box–Muller).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    let v = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * u.ln()).sqrt() * (2.0 * core::f64::consts::PI * v).cos()
}

/// Independent stream per `(degree, trial)`.
fn stream(seed: u64, m: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | trial as u64);
    rng
}

/// `(p_k w, p_k' w)` at `x` for `k < m`, by the recurrence started from `p_0 w(x)`.
fn weighted_values(table: &RecurrenceTable, spec: &WeightSpec, m: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut q = vec![0.0; m];
    let mut d = vec![0.0; m];
    q[0] = (table.log_norm0() + spec.log_w(x)).exp();
    for k in 0..m - 1 {
        let an = table.alpha(k + 1);
        let ak = table.alpha(k);
        let (qp, dp) = if k == 0 { (0.0, 0.0) } else { (q[k - 1], d[k - 1]) };
        q[k + 1] = (x * q[k] - ak * qp) / an;
        d[k + 1] = (q[k] + x * d[k] - ak * dp) / an;
    }
    (q, d)
}

/// `L_{p,w}` norms of `φ w` and `φ' w` on a rule (`p = ∞`: sup over the grid points).
struct Sampled {
    x: Vec<f64>,
    quad: Vec<f64>,
    val: Vec<Vec<f64>>,
    der: Vec<Vec<f64>>,
    sup_x: Vec<f64>,
    sup_val: Vec<Vec<f64>>,
}

impl Sampled {
    fn new(table: &RecurrenceTable, spec: &WeightSpec, m: usize) -> Self {
        let rule = rule_for_degree(spec, m);
        let mut val = Vec::with_capacity(rule.len());
        let mut der = Vec::with_capacity(rule.len());
        for &x in &rule.nodes {
            let (q, d) = weighted_values(table, spec, m, x);
            val.push(q);
            der.push(d);
        }
        let am = mrs_number(spec, m).value;
        let sup_x = sup_grid(spec, am, underflow_cutoff(spec).min(1.5 * am + 2.0), 1);
        let sup_val = sup_x.iter().map(|&x| weighted_values(table, spec, m, x).0).collect();
        Sampled { x: rule.nodes, quad: rule.weights, val, der, sup_x, sup_val }
    }

    fn norm(&self, c: &[f64], p: NormIndex, derivative: bool, keep: impl Fn(f64) -> bool) -> f64 {
        let dot = |b: &[f64]| b.iter().zip(c).map(|(u, v)| u * v).sum::<f64>();
        match p {
            NormIndex::Infinity if !derivative => self
                .sup_x
                .iter()
                .zip(&self.sup_val)
                .filter(|(x, _)| keep(**x))
                .map(|(_, b)| dot(b).abs())
                .fold(0.0, f64::max),
            _ => {
                let src = if derivative { &self.der } else { &self.val };
                let mut w = Vec::with_capacity(self.x.len());
                let mut v = Vec::with_capacity(self.x.len());
                for ((&x, &wq), b) in self.x.iter().zip(&self.quad).zip(src) {
                    if keep(x) {
                        w.push(wq);
                        v.push(dot(b));
                    }
                }
                lq_from_values(&w, &v, p)
            }
        }
    }
}

/// Runs a probe; the table must be for the weight `v` of `spec` (1-D).
pub fn inequality_probe(table: &Arc<RecurrenceTable>, spec: &WeightSpec, cfg: &ProbeConfig) -> Result<Vec<ProbeRow>> {
    if spec.dim() != 1 {
        return Err(Error::InvalidArgument("probes are univariate".into()));
    }
    let (ip, iq) = (cfg.p.reciprocal(), cfg.q.reciprocal());
    match cfg.kind {
        ProbeKind::NikolskiiUp if ip <= iq => return Err(Error::InvalidArgument("nikolskii_up needs p < q".into())),
        ProbeKind::NikolskiiDown if iq <= ip => {
            return Err(Error::InvalidArgument("nikolskii_down needs q < p".into()))
        }
        _ => {}
    }
    let lambda = spec.lambda();
    let mut rows = Vec::with_capacity(cfg.degrees.len());
    for &m in &cfg.degrees {
        if m == 0 {
            return Err(Error::InvalidArgument("degree must be positive".into()));
        }
        let fm = m as f64;
        let mut ratios = Vec::with_capacity(cfg.trials);
        if cfg.kind == ProbeKind::Marcinkiewicz {
            let rule = InterpolationRule::new(table.clone(), spec, m, crate::interp::DEFAULT_RHO)?;
            let quad = rule_for_degree(spec, m);
            for t in 0..cfg.trials {
                let mut rng = stream(cfg.seed, m, t);
                let values: Vec<f64> = rule.nodes().iter().map(|&x| uniform(&mut rng) / spec.w(x)).collect();
                let disc = marcinkiewicz_norm(&rule, cfg.p, &values);
                let ip = rule.interpolant(values)?;
                let cont: Vec<f64> = quad.nodes.iter().map(|&x| ip.eval_weighted(x)).collect();
                ratios.push(disc / lq_from_values(&quad.weights, &cont, cfg.p));
            }
        } else {
            if m > table.max_degree() {
                return Err(Error::DegreeCapExceeded { requested: m, cap: table.max_degree() });
            }
            let s = Sampled::new(table, spec, m);
            let am = mrs_number(spec, m).value;
            let lo = cfg.delta * am / fm;
            for t in 0..cfg.trials {
                let mut rng = stream(cfg.seed, m, t);
                let c: Vec<f64> = (0..m).map(|_| normal(&mut rng)).collect();
                let all = |_: f64| true;
                let r = match cfg.kind {
                    ProbeKind::Bernstein => {
                        s.norm(&c, cfg.p, true, all) / (fm.powf(1.0 - 1.0 / lambda) * s.norm(&c, cfg.p, false, all))
                    }
                    ProbeKind::NikolskiiUp => {
                        s.norm(&c, cfg.q, false, all)
                            / (fm.powf((1.0 - 1.0 / lambda) * (ip - iq)) * s.norm(&c, cfg.p, false, all))
                    }
                    ProbeKind::NikolskiiDown => {
                        s.norm(&c, cfg.q, false, all)
                            / (fm.powf((iq - ip) / lambda) * s.norm(&c, cfg.p, false, all))
                    }
                    ProbeKind::RestrictedSupport => {
                        s.norm(&c, cfg.p, false, all)
                            / s.norm(&c, cfg.p, false, |x| x.abs() >= lo && x.abs() <= am)
                    }
                    ProbeKind::Marcinkiewicz => unreachable!(),
                };
                ratios.push(r);
            }
        }
        rows.push(ProbeRow {
            kind: cfg.kind.name().into(),
            p: cfg.p.value(),
            q: cfg.q.value(),
            m,
            max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
            min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
            trials: cfg.trials,
            seed: cfg.seed,
        });
    }
    Ok(rows)
}

/// Largest per-octave growth `(x(2m)/x(m))^{1/log₂(m'/m)} − 1` of `x` across consecutive rows.
pub fn growth_per_octave(rows: &[ProbeRow], x: impl Fn(&ProbeRow) -> f64) -> f64 {
    rows.windows(2)
        .map(|w| {
            let oct = (w[1].m as f64 / w[0].m as f64).log2();
            (x(&w[1]) / x(&w[0])).powf(1.0 / oct) - 1.0
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Arc<RecurrenceTable> {
        Arc::new(RecurrenceTable::for_v(&WeightSpec::hermite(1), 128).unwrap())
    }

    #[test]
    fn bernstein_is_bounded() {
        let spec = WeightSpec::hermite(1);
        let mut cfg = ProbeConfig::new(ProbeKind::Bernstein, NormIndex::Finite(2.0), NormIndex::Finite(2.0), vec![8, 16, 32]);
        cfg.trials = 10;
        let rows = inequality_probe(&table(), &spec, &cfg).unwrap();
        assert!(rows.iter().all(|r| r.max_ratio.is_finite() && r.max_ratio > 0.0));
        assert!(growth_per_octave(&rows, |r| r.max_ratio) < 0.1);
    }

    #[test]
    fn deterministic() {
        let spec = WeightSpec::hermite(1);
        let mut cfg =
            ProbeConfig::new(ProbeKind::Marcinkiewicz, NormIndex::Finite(2.0), NormIndex::Finite(2.0), vec![16]);
        cfg.trials = 5;
        let t = table();
        assert_eq!(inequality_probe(&t, &spec, &cfg).unwrap(), inequality_probe(&t, &spec, &cfg).unwrap());
    }
}
