use heatlab::damped_wave::*;
use heatlab::kernel::chapman_kolmogorov_residual;
use heatlab::linalg::{expm_oracle, DenseMatrix};
use heatlab::regcheck::{log_grid, Status};
use proptest::prelude::*;

#[derive(Clone, Copy, Debug)]
struct C(f64, f64);

impl C {
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn exp(self) -> C {
        let r = self.0.exp();
        C(r * self.1.cos(), r * self.1.sin())
    }
    fn div(self, o: C) -> C {
        let d = o.0 * o.0 + o.1 * o.1;
        C((self.0 * o.0 + self.1 * o.1) / d, (self.1 * o.0 - self.0 * o.1) / d)
    }
}

/// Sylvester's formula on the roots of `μ² + ρλμ + λ² = 0`; the repeated
/// root at `ρ = 2` uses `e^{μt}(I + t(M − μI))`.
fn sylvester(lambda: f64, rho: f64, t: f64) -> [[f64; 2]; 2] {
    let m = [[0.0, lambda], [-lambda, -rho * lambda]];
    let disc = rho * rho - 4.0;
    let centre = -rho * lambda / 2.0;
    if disc == 0.0 {
        let e = (centre * t).exp();
        return [
            [e * (1.0 + t * (m[0][0] - centre)), e * t * m[0][1]],
            [e * t * m[1][0], e * (1.0 + t * (m[1][1] - centre))],
        ];
    }
    let root = if disc > 0.0 { C(lambda * disc.sqrt() / 2.0, 0.0) } else { C(0.0, lambda * (-disc).sqrt() / 2.0) };
    let mu1 = C(centre + root.0, root.1);
    let mu2 = C(centre - root.0, -root.1);
    let e1 = C(mu1.0 * t, mu1.1 * t).exp();
    let e2 = C(mu2.0 * t, mu2.1 * t).exp();
    let denom = C(mu1.0 - mu2.0, mu1.1 - mu2.1);
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            let a = e1.mul(C(m[i][j] - id * mu2.0, -id * mu2.1));
            let b = e2.mul(C(m[i][j] - id * mu1.0, -id * mu1.1));
            out[i][j] = C(a.0 - b.0, a.1 - b.1).div(denom).0;
        }
    }
    out
}

#[test]
fn mode_exponentials_match_both_oracles_on_the_lattice() {
    for lambda in [0.5, 1.0, 10.0, 100.0] {
        for rho in [0.5, 1.0, 2.0, 4.0] {
            for t in [0.01, 0.1, 1.0] {
                let m = mode_matrix(lambda, rho);
                let e = mode_exponential(&m, t);
                let dense = DenseMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()]).unwrap();
                let x = expm_oracle(&dense, t).unwrap();
                let s = sylvester(lambda, rho, t);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((e[i][j] - x[(i, j)]).abs() <= 1e-10, "λ={lambda} ρ={rho} t={t}");
                        assert!((e[i][j] - s[i][j]).abs() <= 1e-10, "λ={lambda} ρ={rho} t={t}");
                    }
                }
            }
        }
    }
}

fn dense_kernel(sys: &BlockModeSystem, t: f64) -> DenseMatrix {
    let g = sys.dense_generator().unwrap();
    let inv: Vec<f64> = sys.union_space.weights().iter().map(|w| 1.0 / w).collect();
    expm_oracle(&g, t).unwrap().scale_cols(&inv)
}

#[test]
fn block_kernel_matches_dense_exponential() {
    let sys = BlockModeSystem::interval(20, 1.5).unwrap();
    for t in [0.01, 0.1, 1.0] {
        let k = wave_kernel(&sys, t).unwrap();
        let d = dense_kernel(&sys, t);
        assert!(k.values.max_abs_diff(&d) <= 1e-9 * d.max_abs(), "t = {t}");
    }
}

#[test]
fn wave_constant_matches_dense_generator() {
    let sys = BlockModeSystem::interval(16, 2.0).unwrap();
    let n = sys.base_len();
    let g = sys.dense_generator().unwrap();
    let w = sys.union_space.weights().to_vec();
    for t in [0.02, 0.2] {
        let q = dense_kernel(&sys, t).matmul(&g.transpose()).unwrap();
        let mut best = 0.0f64;
        for copy in 0..2 {
            for i in 0..n {
                for j in i + 1..n {
                    let (x, y) = (copy * n + i, copy * n + j);
                    let s: f64 = (0..2 * n).map(|z| w[z] * (q[(x, z)] - q[(y, z)]).powi(2)).sum();
                    best = best.max(s.sqrt() / sys.union_space.dist(x, y));
                }
            }
        }
        let (c, excluded) = wave_constant(&sys, t).unwrap();
        assert!((c - best).abs() <= 1e-8 * best, "t = {t}: {c} vs {best}");
        assert_eq!(excluded, n * n);
    }
}

#[test]
fn bound_scan_power_stays_below_two() {
    let sys = BlockModeSystem::interval(200, 2.0).unwrap();
    let (report, fit) = wave_bound_scan(&sys, &log_grid(0.01, 1.0, 9)).unwrap();
    assert!(fit.small_t_power <= 2.2, "power {}", fit.small_t_power);
    assert_eq!(report.verdict.status, Status::Pass);
    assert_eq!(report.excluded_infinite_pairs, 200 * 200);
}

#[test]
fn nonpositive_damping_is_refused() {
    assert!(BlockModeSystem::interval(10, 0.0).is_err());
    assert!(BlockModeSystem::interval(10, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn block_kernel_is_a_semigroup(rho in 0.3f64..4.0, s in 0.005f64..0.5, t in 0.005f64..0.5) {
        let sys = BlockModeSystem::interval(24, rho).unwrap();
        let ks = wave_kernel(&sys, s).unwrap();
        let kt = wave_kernel(&sys, t).unwrap();
        let kst = wave_kernel(&sys, s + t).unwrap();
        prop_assert!(chapman_kolmogorov_residual(&ks, &kt, &kst).unwrap() <= 1e-8);
        prop_assert!(block_symmetry_residual(&kst).unwrap() <= 1e-10);
    }

    #[test]
    fn components_reassemble_the_kernel(rho in 0.3f64..4.0, t in 0.01f64..1.0) {
        let sys = BlockModeSystem::interval(12, rho).unwrap();
        let k = wave_kernel(&sys, t).unwrap();
        let n = sys.base_len();
        for a in 0..2 {
            for b in 0..2 {
                let c = component(&k, a, b).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        prop_assert_eq!(c[(i, j)], k.block(i, j)[a][b]);
                    }
                }
            }
        }
    }
}
