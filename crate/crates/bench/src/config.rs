//! Experiment configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use freud::func::panel_function;
use freud::{NormIndex, WeightSpec};
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

/// Operators the harness can sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Interp1d,
    Smolyak,
    PeriodicSmolyak,
    AssembledSample,
    AssembledLinear,
    HcFourier,
}

impl Operator {
    /// Whether the sweep values are sample budgets `n` (otherwise levels).
    pub fn sweeps_budget(self) -> bool {
        matches!(self, Operator::AssembledSample | Operator::AssembledLinear)
    }

    /// Whether `samples_used` holds a rank rather than a count of evaluations.
    pub fn is_linear(self) -> bool {
        matches!(self, Operator::AssembledLinear | Operator::HcFourier)
    }
}

/// A norm index: a number `≥ 1` or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Norm {
    Finite(f64),
    Named(NamedNorm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedNorm {
    Inf,
    Infinity,
}

impl Norm {
    pub fn index(self) -> Result<NormIndex> {
        match self {
            Norm::Finite(p) => NormIndex::finite(p).map_err(BenchError::from),
            Norm::Named(_) => Ok(NormIndex::Infinity),
        }
    }
}

impl From<NormIndex> for Norm {
    fn from(p: NormIndex) -> Self {
        match p {
            NormIndex::Finite(v) => Norm::Finite(v),
            NormIndex::Infinity => Norm::Named(NamedNorm::Inf),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightBlock {
    pub lambda: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub eta: f64,
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "one")]
    pub dim: usize,
}

fn one() -> usize {
    1
}

impl WeightBlock {
    pub fn hermite(dim: usize) -> Self {
        WeightBlock { lambda: 2.0, tau: 0.0, eta: 0.0, a: 0.5, b: 0.0, mu: 0.0, dim }
    }

    pub fn spec(&self) -> Result<WeightSpec> {
        Ok(WeightSpec::new(self.lambda, self.tau, self.eta, self.a, self.b, self.mu, self.dim)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Directory for `report.json`, `errors.csv` and grid files.
    pub dir: PathBuf,
    /// Directory of the recurrence-table cache (none: no caching).
    #[serde(default)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub weight: WeightBlock,
    pub operator: Operator,
    pub functions: Vec<String>,
    pub p: Norm,
    pub q: Norm,
    pub r: u32,
    /// Levels `k` (or `m`) for level-indexed operators, budgets `n` for assembled ones.
    pub sweep: Vec<usize>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Tail parameter of the budget allocation; defaults to `(1/q − 1/p)/2` when `q < p`.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Spline order `ℓ` of the periodic inner sampler.
    #[serde(default = "default_order")]
    pub order: usize,
    /// Mask choice; only `"minimal"` is built in.
    #[serde(default = "default_mask")]
    pub mask: String,
    /// Rate tolerance; defaults to 0.15 for `interp1d` and 0.3 otherwise.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    pub output: OutputBlock,
}

fn default_rho() -> f64 {
    freud::interp::DEFAULT_RHO
}

fn default_theta() -> f64 {
    freud::assemble::DEFAULT_THETA
}

fn default_order() -> usize {
    4
}

fn default_mask() -> String {
    "minimal".into()
}

impl ExperimentConfig {
    /// A config with defaults for everything but the essentials.
    pub fn new(weight: WeightBlock, operator: Operator, functions: &[&str], p: f64, q: f64, r: u32, sweep: Vec<usize>) -> Self {
        ExperimentConfig {
            weight,
            operator,
            functions: functions.iter().map(|s| s.to_string()).collect(),
            p: Norm::Finite(p),
            q: Norm::Finite(q),
            r,
            sweep,
            rho: default_rho(),
            theta: default_theta(),
            delta: None,
            order: default_order(),
            mask: default_mask(),
            tolerance: None,
            seed: 0,
            output: OutputBlock { dir: PathBuf::from("out"), cache: None },
        }
    }

    /// Reads `.toml` or `.json` by extension (TOML otherwise).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)?,
            _ => toml::from_str(&text)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.weight.spec()?;
        self.p.index()?;
        self.q.index()?;
        if self.functions.is_empty() {
            return Err(BenchError::Config("no functions listed".into()));
        }
        for name in &self.functions {
            if panel_function(name, spec.dim()).is_none() {
                return Err(BenchError::Config(format!("unknown function `{name}`")));
            }
        }
        if self.sweep.is_empty() {
            return Err(BenchError::Config("empty sweep".into()));
        }
        if self.mask != "minimal" {
            return Err(BenchError::Config(format!("unknown mask `{}`", self.mask)));
        }
        if self.operator == Operator::Interp1d && spec.dim() != 1 {
            return Err(BenchError::Config("interp1d needs dim = 1".into()));
        }
        Ok(())
    }

    /// `δ` for the budget allocation.
    pub fn budget_delta(&self) -> Result<f64> {
        if let Some(d) = self.delta {
            return Ok(d);
        }
        let (ip, iq) = (self.p.index()?.reciprocal(), self.q.index()?.reciprocal());
        if iq > ip {
            Ok((iq - ip) / 2.0)
        } else {
            Err(BenchError::Config("delta must be given when q ≥ p".into()))
        }
    }

    pub fn rate_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(if self.operator == Operator::Interp1d { 0.15 } else { 0.3 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let mut c = ExperimentConfig::new(WeightBlock::hermite(1), Operator::Interp1d, &["gaussian"], 2.0, 2.0, 2, vec![5, 6]);
        c.q = Norm::Named(NamedNorm::Inf);
        let t = c.to_toml();
        let back: ExperimentConfig = toml::from_str(&t).unwrap();
        assert_eq!(back, c);
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&j).unwrap(), c);
        assert_eq!(back.q.index().unwrap(), NormIndex::Infinity);
    }

    #[test]
    fn rejects_unknown_function() {
        let c = ExperimentConfig::new(WeightBlock::hermite(1), Operator::Interp1d, &["nope"], 2.0, 2.0, 2, vec![5]);
        assert!(c.validate().is_err());
    }
}
