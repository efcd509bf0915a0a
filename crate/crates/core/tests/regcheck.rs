use std::sync::Arc;

use heatlab::graph_ops::{discretize_graph, GraphDiscretization, MetricGraph};
use heatlab::kernel::{heat_kernel, SpectralData};
use heatlab::linalg::DenseMatrix;
use heatlab::regcheck::*;
use heatlab::space::SampledSpace;
use proptest::prelude::*;

fn interval(h: f64) -> (GraphDiscretization, SpectralData, Arc<SampledSpace>) {
    let mut g = MetricGraph::interval(1.0).unwrap();
    g.set_dirichlet(0).unwrap();
    g.set_dirichlet(1).unwrap();
    let d = discretize_graph(&g, h).unwrap();
    let spec = SpectralData::from_operator(&d.op).unwrap();
    let space = Arc::new(d.space.clone());
    (d, spec, space)
}

fn rows(t: &[f64], c: impl Fn(f64) -> f64, exponents: &[f64]) -> Vec<PerTime> {
    t.iter()
        .zip(exponents.iter().cycle())
        .map(|(&t, &e)| PerTime {
            t,
            c: c(t),
            seminorm: c(t),
            exponent: Some(e),
        })
        .collect()
}

fn prediction(exponent: f64, power: f64) -> Prediction {
    Prediction {
        exponent,
        blow_up_power: power,
        source: "synthetic".into(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_power_is_recovered(a in 0.1f64..10.0, p in 0.2f64..3.0, n in 6usize..12) {
        let t = log_grid(0.01, 1.0, n);
        let c: Vec<f64> = t.iter().map(|t| a * t.powf(-p)).collect();
        prop_assert!((small_t_power(&t, &c).unwrap() - p).abs() < 1e-9);
    }

    #[test]
    fn two_term_fit_is_exact_on_model_data(a in 0.0f64..10.0, b in 0.0f64..10.0, n in 6usize..12) {
        let t = log_grid(0.01, 1.0, n);
        let c: Vec<f64> = t.iter().map(|t| a + b * t.powi(-2)).collect();
        let (fa, fb, res) = fit_two_term(&t, &c, 0.0, 2.0).unwrap();
        prop_assert!((fa - a).abs() < 1e-7 * (1.0 + a + b));
        prop_assert!((fb - b).abs() < 1e-9 * (1.0 + a + b));
        prop_assert!(res < 1e-10);
    }

    #[test]
    fn verdict_follows_the_band_maximum(low in 0.0f64..1.0, high in 0.0f64..1.0, star in 0.3f64..1.0) {
        let (lo, hi) = (low.min(high), low.max(high));
        let t = log_grid(0.01, 1.0, 8);
        let v = assess(&rows(&t, |t| 1.0 / t, &[lo, hi]), &prediction(star, 2.0)).1;
        prop_assert_eq!(v.exponent_band, Some([lo, hi]));
        prop_assert_eq!(v.measured_exponent, Some(hi));
        let expected = if hi < star - EXPONENT_MARGIN { Status::Fail } else { Status::Pass };
        prop_assert_eq!(v.status, expected);
    }

    #[test]
    fn blow_up_power_is_judged_with_its_margin(p in 0.5f64..3.5) {
        let t = log_grid(0.01, 1.0, 8);
        let v = assess(&rows(&t, |t| t.powf(-p), &[1.0]), &prediction(1.0, 2.0)).1;
        let expected = if p <= 2.0 + POWER_MARGIN { Status::Pass } else { Status::Fail };
        prop_assert_eq!(v.status, expected);
    }

    #[test]
    fn joint_seminorm_is_symmetric_under_swap(vals in prop::collection::vec(-1.0f64..1.0, 144), alpha in 0.2f64..1.0) {
        let s = SampledSpace::uniform_interval(0.0, 1.0, 12).unwrap();
        let v = DenseMatrix::from_fn(12, 12, |i, j| vals[i * 12 + j]);
        let (a, _, _) = joint_estimate(&v, &s, alpha, JOINT_BASE_CAP).unwrap();
        let (b, _, _) = joint_estimate(&v.transpose(), &s, alpha, JOINT_BASE_CAP).unwrap();
        prop_assert!((a.seminorm_at_alpha - b.seminorm_at_alpha).abs() <= 1e-12 * a.seminorm_at_alpha);
    }
}

#[test]
fn hoelder_constant_decreases_in_time() {
    let (_, spec, space) = interval(0.02);
    let cfg = ScanConfig {
        t_grid: log_grid(0.01, 1.0, 9),
        alpha: 1.0,
        norm: NormChoice::Lr { r: 2.0 },
        prediction: prediction(1.0, 2.0),
    };
    let report = scan_constants("interval", |t| heat_kernel(&spec, space.clone(), t, None), &cfg, None).unwrap();
    assert!(monotonicity_defect(&report.per_t) <= 1e-12);
    assert_eq!(report.verdict.status, Status::Pass);
}

#[test]
fn scan_grid_is_validated() {
    let (_, spec, space) = interval(0.1);
    let cfg = ScanConfig {
        t_grid: vec![0.1, 0.2, 0.3],
        alpha: 1.0,
        norm: NormChoice::Sup,
        prediction: prediction(1.0, 2.0),
    };
    assert!(scan_constants("interval", |t| heat_kernel(&spec, space.clone(), t, None), &cfg, None).is_err());
}

#[test]
fn sup_norm_constant_matches_sup_norm_scan() {
    let (_, spec, space) = interval(0.05);
    let k = heat_kernel(&spec, space, 0.1, None).unwrap();
    let scan = coordinate_scan(&k, NormChoice::Sup, 1.0, None).unwrap();
    assert!((scan.sup_constant - scan.estimate.seminorm_at_alpha).abs() <= 1e-12 * scan.sup_constant);
    assert!(coordinate_scan(&k, NormChoice::Graph, 1.0, None).is_err());
}

#[test]
fn factorized_bound_holds_on_the_interval() {
    let (_, spec, space) = interval(0.02);
    for t in [0.02, 0.1, 0.5] {
        let k = heat_kernel(&spec, space.clone(), t, None).unwrap();
        let half = heat_kernel(&spec, space.clone(), t / 2.0, None).unwrap();
        for alpha in [0.5, 1.0] {
            let j = joint_scan(&k, &half, alpha).unwrap();
            assert!(j.bound_holds, "t = {t}, α = {alpha}");
            assert!(j.estimate.seminorm_at_alpha <= j.m_t * j.c_half * (1.0 + 1e-6));
        }
    }
}

#[test]
fn single_mode_second_order_kernel() {
    // one mode: A_xA_y p_t = λ² e^{−λt} φ ⊗ φ
    let (d, spec, space) = interval(0.05);
    let t = 0.2;
    let k = heat_kernel(&spec, space.clone(), t, Some(1)).unwrap();
    let half = heat_kernel(&spec, space.clone(), t / 2.0, Some(1)).unwrap();
    let so = second_order_scan(&k, &half, &d.op, 0.5).unwrap();
    assert!(so.cross_check <= 1e-10);
    let lam = spec.eigenvalues()[0];
    let phi = spec.mode(0);
    let n = phi.len();
    let outer = DenseMatrix::from_fn(n, n, |i, j| lam * lam * (-lam * t).exp() * phi[i] * phi[j]);
    let (expected, _, _) = joint_estimate(&outer, &space, 0.5, JOINT_BASE_CAP).unwrap();
    let rel = (so.estimate.seminorm_at_alpha - expected.seminorm_at_alpha).abs() / expected.seminorm_at_alpha;
    assert!(rel <= 1e-8, "relative gap {rel}");
}

#[test]
fn second_order_needs_a_self_adjoint_kernel() {
    let (d, spec, space) = interval(0.1);
    let mut k = heat_kernel(&spec, space.clone(), 0.1, None).unwrap();
    let half = heat_kernel(&spec, space, 0.05, None).unwrap();
    k.self_adjoint = false;
    assert!(second_order_scan(&k, &half, &d.op, 0.5).is_err());
}
