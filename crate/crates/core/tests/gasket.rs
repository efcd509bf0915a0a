use heatlab::fractal_ops::*;
use heatlab::kernel::{heat_kernel, SpectralData};
use heatlab::linalg::{solve_spd, DenseMatrix};
use proptest::prelude::*;
use std::sync::Arc;

#[test]
fn corner_resistance_is_two_thirds_at_every_level() {
    for m in 0..=6 {
        let g = GasketApproximation::new(m).unwrap();
        let [a, b, c] = g.corner_ids();
        for (x, y) in [(a, b), (b, c), (c, a)] {
            let r = effective_resistance(&g, x, y).unwrap();
            assert!((r - 2.0 / 3.0).abs() <= 1e-9, "level {m}: R = {r}");
        }
    }
}

#[test]
fn counts_and_masses() {
    for m in 0..=5u32 {
        let g = GasketApproximation::new(m).unwrap();
        assert_eq!(g.vertex_count(), (3usize.pow(m + 1) + 3) / 2);
        assert_eq!(g.cells().len(), 3usize.pow(m));
        assert!((g.mass_weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((g.conductance() - (5.0f64 / 3.0).powi(m as i32)).abs() < 1e-12);
    }
}

#[test]
fn trace_reproduces_the_coarser_form() {
    for m in 1..=5 {
        let fine = GasketApproximation::new(m).unwrap();
        let coarse = GasketApproximation::new(m - 1).unwrap();
        let trace = trace_to_coarser(&fine).unwrap();
        let l = coarse.laplacian();
        assert!(trace.max_abs_diff(&l) <= 1e-9 * l.max_abs(), "level {m}");
    }
}

/// Harmonic function on the level-`m` approximation with given corner values.
fn harmonic(g: &GasketApproximation, corners: [f64; 3]) -> Vec<f64> {
    let l = g.laplacian();
    let n = g.vertex_count();
    let interior: Vec<usize> = (3..n).collect();
    let lii = DenseMatrix::from_fn(n - 3, n - 3, |i, j| l[(interior[i], interior[j])]);
    let rhs: Vec<f64> = interior
        .iter()
        .map(|&i| -(0..3).map(|c| l[(i, c)] * corners[c]).sum::<f64>())
        .collect();
    let u = solve_spd(&lii, &rhs).unwrap();
    corners.iter().copied().chain(u).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn harmonic_extension_follows_the_two_fifths_rule(m in 1u32..5, c in prop::array::uniform3(-2.0f64..2.0)) {
        let g = GasketApproximation::new(m).unwrap();
        let u = harmonic(&g, c);
        let half = 1i64 << (m - 1);
        let mid = |p| u[g.vertex_at(p).unwrap()];
        prop_assert!((mid((half, 0)) - (2.0 * c[0] + 2.0 * c[1] + c[2]) / 5.0).abs() < 1e-10);
        prop_assert!((mid((half, half)) - (c[0] + 2.0 * c[1] + 2.0 * c[2]) / 5.0).abs() < 1e-10);
        prop_assert!((mid((0, half)) - (2.0 * c[0] + c[1] + 2.0 * c[2]) / 5.0).abs() < 1e-10);
        // energy of a harmonic function does not depend on the level
        let e = |g: &GasketApproximation, u: &[f64]| {
            let lu = g.laplacian().mul_vec(u).unwrap();
            lu.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()
        };
        let g0 = GasketApproximation::new(0).unwrap();
        prop_assert!((e(&g, &u) - e(&g0, &c)).abs() < 1e-9 * (1.0 + e(&g0, &c)));
    }

    #[test]
    fn resistance_is_a_metric_comparable_to_euclidean_power(m in 1u32..4) {
        let b = build_gasket(m).unwrap();
        prop_assert!(b.resistance_space.check_triangle(1e-12).is_ok());
        let n = b.resistance_space.len();
        let theta = euclidean_exponent();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for x in 0..n {
            for y in x + 1..n {
                let q = b.resistance_space.dist(x, y) / b.euclidean_space.dist(x, y).powf(theta);
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
        prop_assert!(hi / lo < 10.0, "ratio spread {}", hi / lo);
    }
}

#[test]
fn neumann_gasket_conserves_mass() {
    let b = build_gasket(3).unwrap();
    let spec = SpectralData::from_operator(&b.op).unwrap();
    assert!(spec.eigenvalues()[0].abs() < 1e-9);
    let k = heat_kernel(&spec, Arc::new(b.euclidean_space.clone()), 0.1, None).unwrap();
    assert!(k.mass_defect() < 1e-10);
    assert!(k.positivity_ratio() > 0.0);
}

#[test]
fn document_carries_level_and_cells() {
    let b = build_gasket(2).unwrap();
    let value = serde_json::to_value(b.to_document()).unwrap();
    assert_eq!(value["gasket"]["level"], 2);
    assert_eq!(value["gasket"]["cells"].as_array().unwrap().len(), 9);
    assert_eq!(value["points"].as_array().unwrap().len(), 15);
    assert!(build_gasket(MAX_LEVEL + 1).is_err());
}
