use std::sync::Arc;

use freud::assemble::{BudgetAllocation, HyperbolicCross, PartitionOfUnity};
use freud::bspline::{cardinal, BSplineMask};
use freud::fooling::{gamma_count, gamma_set, FoolingFunction};
use freud::interp::InterpolationRule;
use freud::ortho::RecurrenceTable;
use freud::rate::fit_rate;
use freud::spectral::{kernel_eval, RkhsWeights};
use freud::sparse::level_set;
use freud::weight::{NormIndex, WeightSpec};
use proptest::prelude::*;

fn hermite_table() -> Arc<RecurrenceTable> {
    static T: std::sync::OnceLock<Arc<RecurrenceTable>> = std::sync::OnceLock::new();
    T.get_or_init(|| Arc::new(RecurrenceTable::for_v(&WeightSpec::hermite(1), 128).unwrap())).clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn budget_never_exceeds_n(
        n in 50usize..200_000,
        alpha in 0.5f64..4.0,
        delta in 0.02f64..0.5,
        lambda in 1.2f64..5.0,
        a in 0.2f64..2.0,
        d in 1usize..=3,
    ) {
        match BudgetAllocation::new(n, alpha, delta, lambda, a, d) {
            Ok(b) => {
                prop_assert!(b.total() <= n);
                prop_assert!(b.cells.iter().all(|c| c.1 >= 1));
                let peak = b.budget(&vec![0; d]);
                prop_assert!(b.cells.iter().all(|c| c.1 <= peak));
            }
            Err(freud::Error::BudgetInfeasible { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn partition_sums_to_one(x in prop::collection::vec(-6.0f64..6.0, 1..=3), theta in 1.05f64..1.95) {
        let p = PartitionOfUnity::new(theta, x.len()).unwrap();
        let cells = p.cells_at(&x);
        prop_assert!(cells.len() <= 1 << x.len());
        let s: f64 = cells.iter().map(|k| p.phi(k, &x)).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        for k in &cells {
            let v = p.phi(k, &x);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(k.iter().zip(&x).all(|(&ki, &xi)| (xi - ki as f64).abs() < theta / 2.0));
        }
    }

    #[test]
    fn interpolant_matches_data(m in prop::sample::select(vec![8usize, 16, 32]), seed in any::<u64>()) {
        let spec = WeightSpec::hermite(1);
        let rule = InterpolationRule::new(hermite_table(), &spec, m, 0.9).unwrap();
        let mut s = seed;
        let values: Vec<f64> = rule.nodes().iter().map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }).collect();
        let ip = rule.interpolant(values.clone()).unwrap();
        for (&x, &v) in rule.nodes().iter().zip(&values) {
            prop_assert!((ip.eval(x) - v).abs() < 1e-9 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn rkhs_weights_multiply(k in prop::collection::vec(0usize..50, 1..4), l in prop::collection::vec(0usize..50, 1..4), r in 0.1f64..3.0) {
        let w = RkhsWeights::from_exponent(r);
        let kl: Vec<usize> = k.iter().chain(&l).copied().collect();
        prop_assert!(w.weight(&k) >= 1.0);
        prop_assert!((w.weight(&kl) - w.weight(&k) * w.weight(&l)).abs() <= 1e-12 * w.weight(&kl));
    }

    #[test]
    fn exact_power_laws_fit(slope in -4.0f64..-0.1, c in 0.01f64..100.0) {
        let rows: Vec<(f64, f64)> = (6..=12).map(|e| {
            let n = (1u64 << e) as f64;
            (n, c * n.powf(slope))
        }).collect();
        let fit = fit_rate(&rows).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn spline_shifts_sum_to_one(x in 0.0f64..20.0, half in 1usize..=4) {
        let order = 2 * half;
        let s: f64 = (-(order as i64)..=25).map(|j| cardinal(order, x - j as f64)).sum();
        prop_assert!((s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn quasi_interpolation_reproduces_cubics(c in prop::collection::vec(-2.0f64..2.0, 4), x in 10.0f64..20.0) {
        let mask = BSplineMask::minimal(4).unwrap();
        let f = |t: f64| c[0] + t * (c[1] + t * (c[2] + t * c[3]));
        let q = mask.apply_on_line(f, x);
        prop_assert!((q - f(x)).abs() < 1e-10 * (1.0 + f(x).abs()));
    }

    #[test]
    fn gamma_count_matches_enumeration(d in 1usize..=3, m in 1u64..60) {
        let set = gamma_set(d, m);
        prop_assert_eq!(set.len() as u64, gamma_count(d, m));
        let lo = (m as f64).powf(1.0 / d as f64).ceil() as u64;
        for s in &set {
            prop_assert!(s.iter().product::<u64>() <= 2 * m);
            prop_assert!(s.iter().all(|&v| v + 1 >= lo));
        }
    }

    #[test]
    fn kernel_is_symmetric(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let spec = WeightSpec::hermite(1);
        let t = RecurrenceTable::for_w(&spec, 64).unwrap();
        let w = RkhsWeights::from_exponent(1.5);
        let a = kernel_eval(&w, &t, &[x], &[y], 20, 1.0).unwrap();
        let b = kernel_eval(&w, &t, &[y], &[x], 20, 1.0).unwrap();
        prop_assert_eq!(a.value, b.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fooling_vanishes_on_nodes(pts in prop::collection::vec(0.0f64..6.0, 8..40)) {
        let spec = WeightSpec::hermite(1);
        let nodes: Vec<Vec<f64>> = pts.iter().map(|&x| vec![x]).collect();
        let h = FoolingFunction::new(&spec, &nodes, 2, NormIndex::Finite(2.0)).unwrap();
        for x in &nodes {
            prop_assert_eq!(h.eval(x), 0.0);
        }
        prop_assert!(h.weighted_norm(NormIndex::Finite(2.0)) > 0.0);
    }
}

#[test]
fn cross_sizes_match_brute_force() {
    for m in 0..=6usize {
        let h = HyperbolicCross::new(2, m);
        let top = 1i64 << m;
        let mut count = 0;
        for s1 in -top..top {
            for s2 in -top..top {
                let block = |s: i64| if s == 0 { 0 } else { 64 - s.unsigned_abs().leading_zeros() as usize };
                if block(s1) + block(s2) <= m {
                    count += 1;
                }
            }
        }
        assert_eq!(h.rank(), count, "m={m}");
    }
}

#[test]
fn level_sets_have_binomial_size() {
    for d in 1..=4usize {
        for m in 0..=8usize {
            // |{k ∈ ℕ₀^d : |k|₁ ≤ m}| = C(m + d, d)
            let mut c = 1usize;
            for i in 1..=d {
                c = c * (m + i) / i;
            }
            assert_eq!(level_set(d, m).len(), c);
        }
    }
}
