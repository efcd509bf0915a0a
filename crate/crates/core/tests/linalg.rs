use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use heatlab::linalg::*;
use proptest::prelude::*;

#[test]
fn second_difference_matrix_has_sine_modes() {
    let n = 5;
    let t = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    let eig = symmetric_eigen(&t, DEFAULT_EIGEN_TOL).unwrap();
    for k in 0..n {
        let theta = (k + 1) as f64 * PI / (n + 1) as f64;
        assert_abs_diff_eq!(eig.eigenvalues[k], 2.0 - 2.0 * theta.cos(), epsilon = 1e-12);
        let exact: Vec<f64> = (0..n).map(|j| ((j + 1) as f64 * theta).sin()).collect();
        let norm = exact.iter().map(|v| v * v).sum::<f64>().sqrt();
        let v = eig.vector(k);
        let sign = exact.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().signum();
        for j in 0..n {
            assert_abs_diff_eq!(v[j], sign * exact[j] / norm, epsilon = 1e-10);
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct C(f64, f64);

impl C {
    fn add(self, o: C) -> C {
        C(self.0 + o.0, self.1 + o.1)
    }
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
}

/// Characteristic polynomial coefficients, lowest degree first, by
/// Faddeev–LeVerrier in complex arithmetic.
fn char_poly(a: &[Vec<C>]) -> Vec<f64> {
    let n = a.len();
    let mut coeff = vec![C(0.0, 0.0); n + 1];
    coeff[n] = C(1.0, 0.0);
    let mut m = vec![vec![C(0.0, 0.0); n]; n];
    for k in 1..=n {
        let mut next = vec![vec![C(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = C(0.0, 0.0);
                for l in 0..n {
                    s = s.add(a[i][l].mul(m[l][j]));
                }
                next[i][j] = s;
            }
            next[i][i] = next[i][i].add(coeff[n - k + 1]);
        }
        m = next;
        let mut tr = C(0.0, 0.0);
        for i in 0..n {
            for l in 0..n {
                tr = tr.add(a[i][l].mul(m[l][i]));
            }
        }
        coeff[n - k] = C(-tr.0 / k as f64, -tr.1 / k as f64);
    }
    coeff.iter().map(|c| c.0).collect()
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Real roots by sign changes on a fine grid, refined by bisection.
fn real_roots(c: &[f64], bound: f64) -> Vec<f64> {
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = poly(c, x0);
    for k in 1..=steps {
        let x1 = -bound + 2.0 * bound * k as f64 / steps as f64;
        let f1 = poly(c, x1);
        if f0 == 0.0 || f0.signum() != f1.signum() {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if poly(c, lo).signum() == poly(c, mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn hermitian_from(entries: &[f64]) -> (DenseMatrix, DenseMatrix, Vec<Vec<C>>) {
    let n = 4;
    let mut re = DenseMatrix::zeros(n, n);
    let mut im = DenseMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        re[(i, i)] = entries[k];
        k += 1;
        for j in i + 1..n {
            re[(i, j)] = entries[k];
            re[(j, i)] = entries[k];
            im[(i, j)] = entries[k + 1];
            im[(j, i)] = -entries[k + 1];
            k += 2;
        }
    }
    let c = (0..n)
        .map(|i| (0..n).map(|j| C(re[(i, j)], im[(i, j)])).collect())
        .collect();
    (re, im, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hermitian_spectrum_matches_characteristic_roots(entries in prop::collection::vec(-1.0f64..1.0, 16)) {
        let (re, im, c) = hermitian_from(&entries);
        let eig = hermitian_embed_eigen(&re, &im).unwrap();
        let coeffs = char_poly(&c);
        let roots = real_roots(&coeffs, 8.0);
        // a root pair closer than the grid spacing is missed; skip those draws
        prop_assume!(roots.len() == 4);
        for (k, r) in roots.iter().enumerate() {
            prop_assert!((eig.eigenvalues[2 * k] - r).abs() < 1e-8);
            prop_assert!((eig.eigenvalues[2 * k + 1] - r).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal_and_reconstruct(n in 1usize..9, seed in prop::collection::vec(-1.0f64..1.0, 64)) {
        let m = DenseMatrix::from_fn(n, n, |i, j| seed[i.min(j) * 8 + i.max(j)]);
        let eig = symmetric_eigen(&m, DEFAULT_EIGEN_TOL).unwrap();
        let v = &eig.eigenvectors;
        let gram = v.transpose().matmul(v).unwrap();
        prop_assert!(gram.max_abs_diff(&DenseMatrix::identity(n)) < 1e-10);
        prop_assert!(eig.reconstruct().max_abs_diff(&m) < 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn weighted_modes_are_mass_orthonormal(n in 2usize..8, seed in prop::collection::vec(-1.0f64..1.0, 64), w in prop::collection::vec(0.1f64..2.0, 8)) {
        let a = DenseMatrix::from_fn(n, n, |i, j| seed[i * 8 + j]);
        let k = a.transpose().matmul(&a).unwrap();
        let eig = weighted_symmetric_eigen(&k, &w[..n], DEFAULT_EIGEN_TOL).unwrap();
        let v = &eig.eigenvectors;
        let gram = v.transpose().matmul(&v.scale_rows(&w[..n])).unwrap();
        prop_assert!(gram.max_abs_diff(&DenseMatrix::identity(n)) < 1e-9);
        for j in 0..n {
            let kv = k.mul_vec(&eig.vector(j)).unwrap();
            for i in 0..n {
                prop_assert!((kv[i] - eig.eigenvalues[j] * w[i] * v[(i, j)]).abs() < 1e-8 * (1.0 + eig.eigenvalues[j].abs()));
            }
        }
    }

    #[test]
    fn exponential_is_a_semigroup(seed in prop::collection::vec(-1.0f64..1.0, 9), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let m = DenseMatrix::from_fn(3, 3, |i, j| seed[i * 3 + j]);
        let lhs = expm_oracle(&m, s + t).unwrap();
        let rhs = expm_oracle(&m, s).unwrap().matmul(&expm_oracle(&m, t).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * lhs.max_abs());
    }

    #[test]
    fn embedding_is_real_symmetric_with_doubled_spectrum(entries in prop::collection::vec(-1.0f64..1.0, 16)) {
        let (re, im, _) = hermitian_from(&entries);
        let e = hermitian_embedding(&re, &im).unwrap();
        prop_assert_eq!(e.asymmetry(), 0.0);
        let eig = symmetric_eigen(&e, DEFAULT_EIGEN_TOL).unwrap();
        for k in 0..4 {
            prop_assert!((eig.eigenvalues[2 * k] - eig.eigenvalues[2 * k + 1]).abs() < 1e-9);
        }
    }

    #[test]
    fn factorizations_solve(n in 1usize..7, seed in prop::collection::vec(-1.0f64..1.0, 49), b in prop::collection::vec(-1.0f64..1.0, 7)) {
        let a = DenseMatrix::from_fn(n, n, |i, j| seed[i * 7 + j]);
        let spd = a.transpose().matmul(&a).unwrap().add(&DenseMatrix::identity(n)).unwrap();
        let x = solve_spd(&spd, &b[..n]).unwrap();
        let r = spd.mul_vec(&x).unwrap();
        for i in 0..n {
            prop_assert!((r[i] - b[i]).abs() < 1e-10);
        }
        let general = a.add(&DenseMatrix::identity(n).scale(3.0)).unwrap();
        let y = LuFactor::new(&general).unwrap().solve(&b[..n]).unwrap();
        let r = general.mul_vec(&y).unwrap();
        for i in 0..n {
            prop_assert!((r[i] - b[i]).abs() < 1e-10);
        }
    }
}
