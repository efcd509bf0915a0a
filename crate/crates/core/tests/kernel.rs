use std::f64::consts::PI;
use std::sync::Arc;

use heatlab::graph_ops::{discretize_graph, GraphDiscretization, MetricGraph};
use heatlab::kernel::*;
use heatlab::linalg::expm_oracle;
use heatlab::space::NormSpec;
use proptest::prelude::*;

fn star(lengths: &[f64], dirichlet_leaves: usize, h: f64) -> (GraphDiscretization, SpectralData, Arc<heatlab::space::SampledSpace>) {
    let mut g = MetricGraph::new(std::iter::once("c".to_string()).chain((0..lengths.len()).map(|i| format!("l{i}"))));
    for (i, l) in lengths.iter().enumerate() {
        g.add_edge(0, i + 1, *l).unwrap();
    }
    for leaf in 1..=dirichlet_leaves.min(lengths.len()) {
        g.set_dirichlet(leaf).unwrap();
    }
    let d = discretize_graph(&g, h).unwrap();
    let spec = SpectralData::from_operator(&d.op).unwrap();
    let space = Arc::new(d.space.clone());
    (d, spec, space)
}

#[test]
fn dirichlet_interval_kernel_matches_sine_series() {
    let mut g = MetricGraph::interval(1.0).unwrap();
    g.set_dirichlet(0).unwrap();
    g.set_dirichlet(1).unwrap();
    let h = 1.0 / 200.0;
    let d = discretize_graph(&g, h).unwrap();
    let spec = SpectralData::from_operator(&d.op).unwrap();
    let k = heat_kernel(&spec, Arc::new(d.space.clone()), 0.1, None).unwrap();
    let series = |x: f64, y: f64| {
        (1..200)
            .map(|n| {
                let n = n as f64;
                2.0 * (-n * n * PI * PI * 0.1).exp() * (n * PI * x).sin() * (n * PI * y).sin()
            })
            .sum::<f64>()
    };
    let mut worst = 0.0f64;
    for i in (0..k.dim()).step_by(17) {
        for j in (0..k.dim()).step_by(13) {
            let (x, y) = ((i + 1) as f64 * h, (j + 1) as f64 * h);
            worst = worst.max((k.values[(i, j)] - series(x, y)).abs());
        }
    }
    assert!(worst < 1e-4 * k.values.max_abs(), "worst deviation {worst}");
}

#[test]
fn spectral_kernel_agrees_with_matrix_exponential() {
    let (d, spec, space) = star(&[1.0, 0.7, 1.3], 1, 0.1);
    let generator = d.op.generator_matrix().unwrap();
    let inv: Vec<f64> = d.op.mass_weights().iter().map(|w| 1.0 / w).collect();
    for t in [0.01, 0.1, 1.0] {
        let k = heat_kernel(&spec, space.clone(), t, None).unwrap();
        let reference = expm_oracle(&generator, t).unwrap().scale_cols(&inv);
        assert!(k.values.max_abs_diff(&reference) <= 1e-9 * reference.max_abs(), "t = {t}");
    }
}

#[test]
fn small_times_are_refused() {
    let (_, spec, space) = star(&[1.0], 1, 0.1);
    assert!(heat_kernel(&spec, space.clone(), MIN_TIME / 2.0, None).is_err());
    assert!(heat_kernel(&spec, space, MIN_TIME, None).is_ok());
}

#[test]
fn truncation_bound_covers_dropped_modes() {
    let (_, spec, space) = star(&[1.0, 1.0], 0, 0.05);
    let full = heat_kernel(&spec, space.clone(), 0.05, None).unwrap();
    let cut = heat_kernel(&spec, space, 0.05, Some(5)).unwrap();
    assert_eq!(cut.modes_used, 5);
    assert!(full.values.max_abs_diff(&cut.values) <= cut.truncation_bound * (1.0 + 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kernel_axioms_hold(
        lengths in prop::collection::vec(0.4f64..1.5, 1..4),
        leaves in 0usize..3,
        s in 0.01f64..0.5,
        t in 0.01f64..0.5,
    ) {
        let (d, spec, space) = star(&lengths, leaves, 0.1);
        let ks = heat_kernel(&spec, space.clone(), s, None).unwrap();
        let kt = heat_kernel(&spec, space.clone(), t, None).unwrap();
        let kst = heat_kernel(&spec, space.clone(), s + t, None).unwrap();
        prop_assert!(chapman_kolmogorov_residual(&ks, &kt, &kst).unwrap() <= 1e-8);
        prop_assert!(symmetry_residual(&kst).unwrap() <= 1e-9);
        // lumped masses give an M-matrix generator, hence a positive kernel
        prop_assert!(kst.positivity_ratio() > -1e-10);
        let mass: Vec<f64> = (0..kst.dim())
            .map(|i| kst.row(i).iter().zip(kst.weights()).map(|(p, w)| p * w).sum())
            .collect();
        if leaves == 0 {
            prop_assert!(kst.mass_defect() <= 1e-8);
        } else {
            prop_assert!(mass.iter().all(|m| *m <= 1.0 + 1e-10));
        }
        let delta = 1e-4;
        let td = time_derivative_check(&spec, space, &d.op, t, delta).unwrap();
        // per mode the central difference errs by e^{−λt}(sinh(λδ)/δ − λ)
        let bound: f64 = spec
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(k, &lam)| {
                let sup = spec.mode(k).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                (-lam * t).exp() * ((lam * delta).sinh() / delta - lam) * sup * sup
            })
            .sum();
        prop_assert!(td.max_deviation <= bound * (1.0 + 1e-6) + 1e-9, "{} > {bound}", td.max_deviation);
    }

    #[test]
    fn identity_surrogate_is_neutral(lengths in prop::collection::vec(0.4f64..1.5, 1..4), t in 0.01f64..0.5) {
        let (_, spec, space) = star(&lengths, 1, 0.1);
        let k = heat_kernel(&spec, space.clone(), t, None).unwrap();
        let id = KernelMatrix::identity_surrogate(space);
        prop_assert_eq!(compose(&id, &k).unwrap(), k.values.clone());
        prop_assert_eq!(compose(&k, &id).unwrap(), k.values.clone());
    }

    #[test]
    fn generator_acts_symmetrically(lengths in prop::collection::vec(0.4f64..1.5, 1..4), t in 0.01f64..0.5) {
        let (d, spec, space) = star(&lengths, 1, 0.1);
        let k = heat_kernel(&spec, space, t, None).unwrap();
        let ax = apply_generator_x(&k, &d.op).unwrap();
        let ay = apply_generator_y(&k, &d.op).unwrap();
        prop_assert!(ax.max_abs_diff(&ay.transpose()) <= 1e-9 * ax.max_abs());
        // the two coordinates commute on the kernel
        prop_assert!(ax.max_abs_diff(&ay) <= 1e-8 * ax.max_abs());
    }

    #[test]
    fn coordinate_distance_is_a_pseudometric(lengths in prop::collection::vec(0.4f64..1.5, 1..3), t in 0.01f64..0.5, r in 1.0f64..4.0) {
        let (_, spec, space) = star(&lengths, 1, 0.2);
        let k = heat_kernel(&spec, space, t, None).unwrap();
        let n = k.dim();
        let dist = |i, j| coordinate_map_distance(&k, NormSpec::Lr(r), i, j).unwrap();
        for i in 0..n {
            prop_assert_eq!(dist(i, i), 0.0);
            for j in 0..n {
                prop_assert!((dist(i, j) - dist(j, i)).abs() < 1e-12);
                for l in 0..n {
                    prop_assert!(dist(i, j) <= dist(i, l) + dist(l, j) + 1e-12);
                }
            }
        }
    }
}

#[test]
fn kernel_csv_has_one_row_per_entry() {
    let (_, spec, space) = star(&[1.0], 1, 0.25);
    let k = heat_kernel(&spec, space, 0.1, None).unwrap();
    let mut buf = Vec::new();
    k.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 1 + k.dim() * k.dim());
}
