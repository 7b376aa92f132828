//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails. Tolerances are fixed here.

use std::sync::Arc;

use freud::assemble::{BudgetAllocation, HyperbolicCross, PartitionOfUnity};
use freud::bspline::{cardinal, quasi_interpolate, BSplineMask};
use freud::fooling::FoolingFunction;
use freud::interp::{level_degree, InterpolationRule};
use freud::ortho::{BuildOptions, RecurrenceTable};
use freud::probe::{growth_per_octave, inequality_probe, ProbeConfig, ProbeKind};
use freud::quad::{adaptive, composite, gauss_legendre, uniform_breaks};
use freud::spectral::{default_probe_grid, derivative_recurrence_check};
use freud::sparse::SparsePlan;
use freud::{NormIndex, WeightSpec};
use freud_bench::cache::TableCache;
use freud_bench::config::{ExperimentConfig, Operator, WeightBlock};
use freud_bench::experiment::{run_experiment, ExperimentReport, Verdict};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn lambda4() -> WeightSpec {
    WeightSpec::pure(4.0, 1.0, 1).unwrap()
}

/// `max |⟨p_j, p_k⟩_v − δ_jk|` for `j, k ≤ 30` by composite Gauss–Legendre on `[−L, L]`.
fn gram_defect(spec: &WeightSpec, half_width: f64) -> f64 {
    let deg = 30;
    let t = RecurrenceTable::for_v(spec, deg).unwrap();
    let rule = composite(&gauss_legendre(20), &uniform_breaks(-half_width, half_width, 400));
    let mut g = vec![vec![0.0; deg + 1]; deg + 1];
    for (&x, &wq) in rule.nodes.iter().zip(&rule.weights) {
        let p = t.eval_all(deg, x);
        let v = spec.v(x) * wq;
        for j in 0..=deg {
            for k in 0..=j {
                g[j][k] += p[j] * p[k] * v;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for j in 0..=deg {
        for k in 0..=j {
            worst = worst.max((g[j][k] - if j == k { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

fn c01_gram() -> Check {
    let h = gram_defect(&WeightSpec::hermite(1), 12.0);
    let f = gram_defect(&lambda4(), 4.0);
    ensure(h < 1e-9 && f < 1e-9, format!("max Gram defect: Hermite {h:.1e}, λ=4 {f:.1e} (tol 1e-9)"))
}

fn c02_hermite_reference() -> Check {
    let t = RecurrenceTable::for_v(&WeightSpec::hermite(1), 31).unwrap();
    let s6 = 6f64.sqrt();
    let (a, b) = (((3.0 - s6) / 2.0).sqrt(), ((3.0 + s6) / 2.0).sqrt());
    let expect = [-b, -a, a, b];
    let z = t.zeros(4).unwrap();
    let zerr = z.iter().zip(&expect).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let aerr = (1..=30).map(|m| (t.alpha(m) - (m as f64 / 2.0).sqrt()).abs()).fold(0.0, f64::max);
    ensure(zerr < 1e-9 && aerr < 1e-10, format!("zeros of p_4 err {zerr:.1e} (tol 1e-9), α_m err {aerr:.1e} (tol 1e-10)"))
}

fn c03_freud_identities() -> Check {
    let t = RecurrenceTable::for_w(&lambda4(), 64).unwrap();
    let c = t.density().c;
    let a = |m: usize| t.alpha(m);
    let string = (3..=40)
        .map(|m| {
            let lhs = 4.0 * c * a(m) * a(m) * (a(m + 1).powi(2) + a(m).powi(2) + a(m - 1).powi(2));
            (lhs - m as f64).abs() / m as f64
        })
        .fold(0.0, f64::max);
    // derivative recurrence against a five-point difference of p_m
    let h = 1e-4;
    let mut deriv: f64 = 0.0;
    for &x in &default_probe_grid() {
        let p = t.eval_all(40, x);
        for m in 3..=40 {
            let rhs = m as f64 / a(m) * p[m - 1] + 4.0 * c * a(m) * a(m - 1) * a(m - 2) * p[m - 3];
            let p = |y: f64| t.eval(m, y).value();
            let fd = (p(x - 2.0 * h) - 8.0 * p(x - h) + 8.0 * p(x + h) - p(x + 2.0 * h)) / (12.0 * h);
            deriv = deriv.max((fd - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    let report = derivative_recurrence_check(&t, &default_probe_grid(), 40).unwrap();
    let lib = report.row("string_equation").unwrap().max_residual;
    let der = report.row("derivative_recurrence").unwrap().max_residual;
    ensure(
        string < 1e-8 && lib < 1e-8 && der < 1e-7 && deriv < 1e-7 && report.passed(),
        format!("string equation {string:.1e} / {lib:.1e} (tol 1e-8), derivative recurrence {der:.1e} (tol 1e-7), finite-difference check {deriv:.1e}"),
    )
}

fn c04_interpolation() -> Check {
    let spec = WeightSpec::hermite(1);
    let table = Arc::new(RecurrenceTable::for_v(&spec, 64).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for m in [8usize, 16, 32] {
        let rule = InterpolationRule::new(table.clone(), &spec, m, 0.9).unwrap();
        let zeros = table.zeros(m).unwrap();
        let am = rule.am();
        let j = rule.jm() as i64;
        // fundamental polynomial from its product form over all zeros of p_m
        let lagrange = |xk: f64, x: f64| {
            let mut v = (am * am - x * x) / (am * am - xk * xk);
            for &z in &zeros {
                if z != xk {
                    v *= (x - z) / (xk - z);
                }
            }
            v
        };
        for k in (-j..=j).filter(|&k| k != 0) {
            let xk = rule.node(k).unwrap();
            let values: Vec<f64> = rule.nodes().iter().map(|&x| if x == xk { 1.0 } else { 0.0 }).collect();
            let ip = rule.interpolant(values).unwrap();
            for i in 0..20 {
                let x = -3.0 + 0.3 * i as f64 + 0.0137;
                let l = lagrange(xk, x);
                worst = worst.max((ip.eval(x) - l).abs() / (1.0 + l.abs()));
                worst = worst.max((rule.fundamental(k, x) - l).abs() / (1.0 + l.abs()));
            }
        }
        let data: Vec<f64> = rule.nodes().iter().map(|_| unit(&mut rng) - 0.5).collect();
        let ip = rule.interpolant(data.clone()).unwrap();
        for (&x, &v) in rule.nodes().iter().zip(&data) {
            worst = worst.max((ip.eval(x) - v).abs());
        }
    }
    ensure(worst < 1e-9, format!("I_m ℓ_mk and node data, m ∈ {{8,16,32}}: max err {worst:.1e} (tol 1e-9)"))
}

fn c05_marcinkiewicz() -> Check {
    let spec = WeightSpec::hermite(1);
    let table = Arc::new(RecurrenceTable::for_v(&spec, 200).unwrap());
    let mut details = Vec::new();
    let mut ok = true;
    for p in [2.0, 4.0] {
        let np = NormIndex::Finite(p);
        let cfg = ProbeConfig::new(ProbeKind::Marcinkiewicz, np, np, vec![16, 32, 64]);
        let rows = inequality_probe(&table, &spec, &cfg).unwrap();
        let g = growth_per_octave(&rows, |r| r.max_ratio / r.min_ratio);
        ok &= g < 0.1 && rows.iter().all(|r| r.trials == 50);
        details.push(format!("p={p}: {:.3}", g));
    }
    ensure(ok, format!("spread growth per octave {} (tol 0.10)", details.join(", ")))
}

fn verdicts(r: &ExperimentReport) -> String {
    r.fits
        .iter()
        .map(|f| match f.slope {
            Some(s) => format!("{} {s:.2}/R² {:.3}", f.function, f.r_squared.unwrap()),
            None => format!("{} {:?}", f.function, f.verdict),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn conclusive_pass(r: &ExperimentReport) -> bool {
    r.fits.iter().all(|f| matches!(f.verdict, Verdict::Pass | Verdict::Floor))
        && r.fits.iter().any(|f| f.verdict == Verdict::Pass)
        && r.samples_within_budget
}

fn c06_interp_rate(cache: &TableCache) -> Check {
    let funcs = ["gaussian", "shifted_bump", "bump_product", "poly_gaussian", "abs_power", "spline_bump"];
    let cfg = ExperimentConfig::new(WeightBlock::hermite(1), Operator::Interp1d, &funcs, 2.0, 2.0, 2, (5..=11).collect());
    let r = run_experiment(&cfg, cache).unwrap();
    let ns: Vec<usize> = r.rows.iter().filter(|x| x.function == "gaussian").map(|x| x.n).collect();
    let ok = conclusive_pass(&r) && r.predicted_exponent == 1.0 && r.tolerance == 0.15;
    ensure(ok, format!("slope ≤ −0.85 at n = {ns:?}: {}", verdicts(&r)))
}

fn c07_smolyak(cache: &TableCache) -> Check {
    let cfg = ExperimentConfig::new(
        WeightBlock::hermite(2),
        Operator::Smolyak,
        &["gaussian", "bump_product", "spline_bump"],
        2.0,
        2.0,
        2,
        (4..=9).collect(),
    );
    let r = run_experiment(&cfg, cache).unwrap();
    let spec1 = WeightSpec::hermite(1);
    let table = cache.get(&spec1.density_v(), level_degree(9)).unwrap();
    let fam = Arc::new(freud::interp::DyadicFamily::new(table, &spec1, 9, 0.9).unwrap());
    let ratios: Vec<f64> = (4..=9)
        .map(|m| SparsePlan::new(&[fam.clone(), fam.clone()], m).unwrap().cardinality() as f64 / ((1usize << m) * m) as f64)
        .collect();
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let ok = conclusive_pass(&r) && r.predicted_exponent == 1.0 && r.tolerance == 0.3 && spread < 4.0;
    ensure(ok, format!("slope ≤ −0.70: {}; |H(m)|/(2^m m) spread {spread:.2} (tol 4)", verdicts(&r)))
}

fn c08_bspline() -> Check {
    let mask = BSplineMask::minimal(4).unwrap();
    let cubic = |t: f64| 0.3 - 1.2 * t + 2.5 * t * t - 1.7 * t * t * t;
    let mut repro: f64 = 0.0;
    for k in 2..=6usize {
        let n = 4usize << k;
        let s = quasi_interpolate(&mask, cubic, k).unwrap();
        // stay clear of the wrap where the periodized cubic jumps
        let margin = (8 + mask.half_width()) as f64 / n as f64;
        for i in 0..=200 {
            let x = margin + (1.0 - 2.0 * margin) * i as f64 / 200.0;
            repro = repro.max((s.eval(x) - cubic(x)).abs());
        }
    }
    let mut pou: f64 = 0.0;
    for order in [2usize, 4, 6, 8] {
        for i in 0..=1000 {
            let x = 10.0 + 5.0 * i as f64 / 1000.0;
            let s: f64 = (0..=30).map(|j| cardinal(order, x - j as f64)).sum();
            pou = pou.max((s - 1.0).abs());
        }
    }
    ensure(repro < 1e-10 && pou < 1e-13, format!("cubic reproduction {repro:.1e} (tol 1e-10), shift partition {pou:.1e} (tol 1e-13)"))
}

fn c09_budget_partition() -> Check {
    let mut worst_excess = 0i64;
    let mut feasible = 0;
    for n in [64usize, 100, 256, 1000, 4096, 10_000, 65_536] {
        for d in 1..=3 {
            for (alpha, delta) in [(1.0, 0.125), (2.0, 0.125), (2.0, 0.25), (3.0, 0.05)] {
                for (lambda, a) in [(2.0, 0.5), (4.0, 1.0), (1.5, 1.0)] {
                    if let Ok(b) = BudgetAllocation::new(n, alpha, delta, lambda, a, d) {
                        feasible += 1;
                        worst_excess = worst_excess.max(b.total() as i64 - n as i64);
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pu: f64 = 0.0;
    for i in 0..100_000 {
        let d = 1 + i % 3;
        let theta = 1.1 + 0.8 * unit(&mut rng);
        let p = PartitionOfUnity::new(theta, d).unwrap();
        let x: Vec<f64> = (0..d).map(|_| 8.0 * unit(&mut rng) - 4.0).collect();
        // every cell within one step of round(x), independent of the support filter
        let base: Vec<i64> = x.iter().map(|v| v.round() as i64).collect();
        let mut s = 0.0;
        for off in 0..3usize.pow(d as u32) {
            let mut o = off;
            let k: Vec<i64> = base
                .iter()
                .map(|&b| {
                    let v = b + (o % 3) as i64 - 1;
                    o /= 3;
                    v
                })
                .collect();
            s += p.phi(&k, &x);
        }
        pu = pu.max((s - 1.0).abs());
    }
    ensure(
        worst_excess <= 0 && feasible > 100 && pu < 1e-12,
        format!("Σn_k − n ≤ {worst_excess} over {feasible} feasible configs, partition identity {pu:.1e} (tol 1e-12)"),
    )
}

fn c10_assembled(cache: &TableCache) -> Check {
    let mut cfg = ExperimentConfig::new(
        WeightBlock::hermite(1),
        Operator::AssembledSample,
        &["gaussian", "spline_bump"],
        4.0,
        2.0,
        2,
        (6..=12).map(|e| 1usize << e).collect(),
    );
    cfg.delta = Some(0.125);
    let r = run_experiment(&cfg, cache).unwrap();
    let ok = conclusive_pass(&r) && r.fits.iter().all(|f| f.slope.is_some_and(|s| s <= -1.7));
    ensure(ok, format!("slope ≤ −1.70 with samples ≤ n: {}", verdicts(&r)))
}

fn c11_fooling() -> Check {
    let spec = WeightSpec::hermite(1);
    let table = Arc::new(RecurrenceTable::build(&spec.density_v(), 600, &BuildOptions::with_cap(600)).unwrap());
    let mut details = Vec::new();
    let mut ok = true;
    for (p, q) in [(2.0, 2.0), (2.0, 4.0)] {
        let (np, nq) = (NormIndex::Finite(p), NormIndex::Finite(q));
        let beta = spec.rate_exponents(np, nq, 2).r_lpq;
        let mut scaled = Vec::new();
        for n in [64usize, 128, 256] {
            // smallest ladder degree whose rule has at least n nodes
            let rule = (1..)
                .map(|k| InterpolationRule::new(table.clone(), &spec, 2 * k, 0.9).unwrap())
                .find(|r| r.len() >= n)
                .unwrap();
            let nodes: Vec<Vec<f64>> = rule.nodes().iter().map(|&x| vec![x]).collect();
            let h = FoolingFunction::new(&spec, &nodes, 2, np).unwrap();
            let lo = h.delta * (h.cell[0] - 1) as f64;
            let lib = h.weighted_norm(nq);
            let tol = 1e-12 * lib.powf(q);
            let norm = adaptive(&|x: f64| h.eval_weighted(&[x]).abs().powf(q), lo, lo + h.delta, tol, 40).powf(1.0 / q);
            ok &= (norm - lib).abs() <= 1e-8 * norm && nodes.iter().all(|x| h.eval(x) == 0.0);
            scaled.push(norm * (rule.len() as f64).powf(beta));
        }
        let spread = scaled.iter().cloned().fold(0.0, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= spread <= 2.0;
        details.push(format!("(p,q)=({p},{q}) spread {spread:.2}"));
    }
    ensure(ok, format!("‖h̄‖·n^β over n ∈ {{64,128,256}}: {} (tol 2)", details.join(", ")))
}

fn c12_cross() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut coeff_err: f64 = 0.0;
    for (d, m) in [(1usize, 5usize), (2, 4), (3, 3)] {
        let h = HyperbolicCross::new(d, m);
        let c: Vec<Complex64> = h.modes.iter().map(|_| Complex64::new(unit(&mut rng) - 0.5, unit(&mut rng) - 0.5)).collect();
        let f = |x: &[f64]| {
            h.modes
                .iter()
                .zip(&c)
                .map(|(s, cs)| {
                    let ph: f64 = s.iter().zip(x).map(|(&si, &xi)| si as f64 * xi).sum();
                    cs * Complex64::from_polar(1.0, std::f64::consts::TAU * ph)
                })
                .sum::<Complex64>()
        };
        let t = h.project_complex(f, h.min_resolution()).unwrap();
        coeff_err = t.coeffs.iter().zip(&c).map(|(a, b)| (a - b).norm()).fold(coeff_err, f64::max);
    }
    let mut counts_ok = true;
    for m in 0..=6usize {
        let top = 1i64 << m;
        let block = |s: i64| if s == 0 { 0 } else { 64 - s.unsigned_abs().leading_zeros() as usize };
        let brute = (-top..top).flat_map(|a| (-top..top).map(move |b| (a, b))).filter(|&(a, b)| block(a) + block(b) <= m).count();
        counts_ok &= HyperbolicCross::new(2, m).rank() == brute;
    }
    ensure(coeff_err < 1e-12 && counts_ok, format!("mode coefficients err {coeff_err:.1e} (tol 1e-12), |Δ(m)| brute force d=2 m ≤ 6: {counts_ok}"))
}

fn main() {
    let cache = TableCache::new(None);
    let checks: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("orthonormality of p_0..p_30", Box::new(c01_gram)),
        ("Hermite reference values", Box::new(c02_hermite_reference)),
        ("string equation and derivative recurrence", Box::new(c03_freud_identities)),
        ("interpolation reproduces fundamentals", Box::new(c04_interpolation)),
        ("Marcinkiewicz spread is bounded", Box::new(c05_marcinkiewicz)),
        ("1-D interpolation rate", Box::new(|| c06_interp_rate(&cache))),
        ("2-D Smolyak rate and grid size", Box::new(|| c07_smolyak(&cache))),
        ("B-spline reproduction and partition", Box::new(c08_bspline)),
        ("budget and partition of unity", Box::new(c09_budget_partition)),
        ("assembled sampler rate", Box::new(|| c10_assembled(&cache))),
        ("fooling function lower bound", Box::new(c11_fooling)),
        ("hyperbolic cross projection", Box::new(c12_cross)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let (tag, detail) = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(check)) {
            Ok(Ok(d)) => ("PASS", d),
            Ok(Err(d)) => ("FAIL", d),
            Err(_) => ("FAIL", "panicked".to_string()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {:02} {name}: {detail}", i + 1);
    }
    println!("acceptance: {} of {} passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
