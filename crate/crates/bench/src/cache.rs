//! On-disk cache of recurrence tables keyed by a SHA-256 of the density and degree.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use freud::ortho::{BuildOptions, RecurrenceTable, DEFAULT_DEGREE_CAP};
use freud::weight::FreudDensity;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

#[derive(Debug, Serialize, Deserialize)]
struct Stored {
    lambda: f64,
    alpha: f64,
    beta: f64,
    c: f64,
    log_scale: f64,
    degree: usize,
    log_norm0: f64,
    coefficients: Vec<f64>,
}

/// Tables shared in memory and optionally persisted under `dir`.
#[derive(Debug, Default)]
pub struct TableCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<String, Arc<RecurrenceTable>>>,
}

/// Hex SHA-256 of the density parameters (bit patterns) and degree.
pub fn cache_key(density: &FreudDensity, degree: usize) -> String {
    let mut h = Sha256::new();
    for v in [density.lambda, density.alpha, density.beta, density.c, density.log_scale] {
        h.update(v.to_bits().to_le_bytes());
    }
    h.update((degree as u64).to_le_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl TableCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        TableCache { dir, memory: Mutex::new(HashMap::new()) }
    }

    /// A table of at least `degree` for `density`, built on a miss.
    pub fn get(&self, density: &FreudDensity, degree: usize) -> Result<Arc<RecurrenceTable>> {
        let key = cache_key(density, degree);
        if let Some(t) = self.memory.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let table = Arc::new(match self.load(&key, density)? {
            Some(t) => t,
            None => {
                let opts = BuildOptions::with_cap(degree.max(DEFAULT_DEGREE_CAP));
                let t = RecurrenceTable::build(density, degree, &opts)?;
                self.store(&key, density, &t)?;
                t
            }
        });
        self.memory.lock().unwrap().insert(key, table.clone());
        Ok(table)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    fn load(&self, key: &str, density: &FreudDensity) -> Result<Option<RecurrenceTable>> {
        let Some(path) = self.path(key) else { return Ok(None) };
        let Ok(text) = std::fs::read_to_string(&path) else { return Ok(None) };
        let s: Stored = match serde_json::from_str(&text) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        let same = [s.lambda, s.alpha, s.beta, s.c, s.log_scale]
            .iter()
            .zip([density.lambda, density.alpha, density.beta, density.c, density.log_scale])
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Ok(None);
        }
        Ok(Some(RecurrenceTable::from_parts(*density, &s.coefficients, s.log_norm0)?))
    }

    fn store(&self, key: &str, density: &FreudDensity, t: &RecurrenceTable) -> Result<()> {
        let Some(path) = self.path(key) else { return Ok(()) };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let s = Stored {
            lambda: density.lambda,
            alpha: density.alpha,
            beta: density.beta,
            c: density.c,
            log_scale: density.log_scale,
            degree: t.max_degree(),
            log_norm0: t.log_norm0(),
            coefficients: t.alphas().to_vec(),
        };
        std::fs::write(path, serde_json::to_string(&s)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use freud::WeightSpec;

    #[test]
    fn persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let d = WeightSpec::hermite(1).density_v();
        let a = TableCache::new(Some(dir.path().into())).get(&d, 40).unwrap();
        let b = TableCache::new(Some(dir.path().into())).get(&d, 40).unwrap();
        assert_eq!(*a, *b);
        assert_ne!(cache_key(&d, 40), cache_key(&d, 41));
    }
}
