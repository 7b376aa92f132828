//! Sample-grid CSV export: one row per point, `x1..xd`, the `ℓ₁` level and (assembled) the cell.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use freud::assemble::{assembled_sample, BudgetAllocation, PartitionOfUnity, PeriodicFamily};
use freud::bspline::{BSplineMask, PeriodicPlan};
use freud::interp::{level_degree, DyadicFamily, InterpolationRule};
use freud::sparse::SparsePlan;

use crate::cache::TableCache;
use crate::config::{ExperimentConfig, Operator};
use crate::{BenchError, Result};

/// One exported point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub x: Vec<f64>,
    pub level_l1: usize,
    pub cell: Option<Vec<i64>>,
}

/// Level of a periodic lattice coordinate `j` on the level-`m` grid.
pub fn periodic_level(j: usize, m: usize) -> usize {
    if j == 0 {
        0
    } else {
        m - (j.trailing_zeros() as usize).min(m)
    }
}

/// Grid rows for one sweep value.
pub fn grid_rows(cfg: &ExperimentConfig, cache: &TableCache, value: usize) -> Result<Vec<GridRow>> {
    let spec = cfg.weight.spec()?;
    let d = spec.dim();
    let row = |x: Vec<f64>, level_l1| GridRow { x, level_l1, cell: None };
    match cfg.operator {
        Operator::Interp1d => {
            let m = level_degree(value);
            let table = cache.get(&spec.density_v(), m)?;
            let rule = InterpolationRule::new(table, &spec, m, cfg.rho)?;
            Ok(rule.nodes().iter().map(|&x| row(vec![x], value)).collect())
        }
        Operator::Smolyak => {
            let spec1 = spec.with_dim(1)?;
            let table = cache.get(&spec1.density_v(), level_degree(value))?;
            let fam = Arc::new(DyadicFamily::new(table, &spec1, value, cfg.rho)?);
            let plan = SparsePlan::new(&vec![fam; d], value)?;
            Ok(plan.points().iter().filter(|p| p.active).map(|p| row(p.x.clone(), p.level_l1)).collect())
        }
        Operator::PeriodicSmolyak | Operator::HcFourier => {
            let plan = PeriodicPlan::new(&BSplineMask::minimal(cfg.order)?, d, value)?;
            Ok(plan
                .grid()
                .into_iter()
                .zip(plan.lattice_points())
                .map(|(x, j)| row(x, j.iter().map(|&ji| periodic_level(ji, value)).sum()))
                .collect())
        }
        Operator::AssembledSample | Operator::AssembledLinear => {
            let part = PartitionOfUnity::new(cfg.theta, d)?;
            let alloc = BudgetAllocation::new(value, cfg.r as f64, cfg.budget_delta()?, spec.lambda(), spec.a(), d)?;
            let peak = alloc.cells.iter().map(|c| c.1).max().unwrap_or(0);
            let fam = PeriodicFamily::for_budget(&BSplineMask::minimal(cfg.order)?, d, peak)?;
            let s = assembled_sample(&part, &alloc, &fam, &|_| 0.0)?;
            let mut out = Vec::new();
            for c in &s.cells {
                let level = c.inner.as_ref().map_or(0, |r| r.plan().level());
                for x in &c.points {
                    out.push(GridRow { x: x.clone(), level_l1: level, cell: Some(c.k.clone()) });
                }
            }
            Ok(out)
        }
    }
}

pub fn write_grid(path: &Path, dim: usize, rows: &[GridRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let cells = rows.iter().any(|r| r.cell.is_some());
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.push("level_l1".into());
    if cells {
        header.extend((1..=dim).map(|i| format!("k{i}")));
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.x.iter().map(|v| format!("{v:.17e}")).collect();
        rec.push(r.level_l1.to_string());
        if let Some(k) = &r.cell {
            rec.extend(k.iter().map(|v| v.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `grid_<value>.csv` for every sweep value and returns the paths.
pub fn export_grids(cfg: &ExperimentConfig, cache: &TableCache, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let d = cfg.weight.dim;
    let mut out = Vec::new();
    for &v in &cfg.sweep {
        let rows = grid_rows(cfg, cache, v)?;
        if rows.is_empty() {
            return Err(BenchError::Config(format!("empty grid at {v}")));
        }
        let path = dir.join(format!("grid_{v}.csv"));
        write_grid(&path, d, &rows)?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_levels() {
        assert_eq!(periodic_level(0, 3), 0);
        assert_eq!(periodic_level(8, 3), 0);
        assert_eq!(periodic_level(4, 3), 1);
        assert_eq!(periodic_level(2, 3), 2);
        assert_eq!(periodic_level(3, 3), 3);
    }
}
