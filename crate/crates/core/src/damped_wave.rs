//! Structurally damped wave equation as a first-order block system.
//!
//! With `Δ` the positive Dirichlet Laplacian on `(0, 1)`, the generator is
//!
//! ```text
//! 𝒜 = [[ 0,  Δ ],
//!      [ −Δ, −ρΔ ]]
//! ```
//!
//! acting on pairs `(w₁, w₂)`. Both blocks are functions of `Δ`, so on the
//! eigenvector `φ_n` the system reduces to the `2×2` matrix
//! `M_n = [[0, λ_n], [−λ_n, −ρλ_n]]`. Sign conventions matter here: `Δ` is
//! positive definite and the damping block is `−ρΔ`.
//!
//! The kernel lives on `X ⊔ X` (first copy `w₁`, second copy `w₂`), where
//! points in different copies are at distance `+∞`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{KernelMatrix, SpectralData};
use crate::linalg::DenseMatrix;
use crate::operator::OperatorDiscretization;
use crate::regcheck::{
    fit_two_term, small_t_power, validate_grid, BlowUpFit, HoelderReport, PerTime, Prediction, Status, Verdict,
    EXPONENT_MARGIN, POWER_MARGIN,
};
use crate::space::{disjoint_union, SampledSpace};

pub type Mat2 = [[f64; 2]; 2];

/// Interval Dirichlet Laplacian with `n` interior points and the per-mode
/// block matrices.
#[derive(Debug, Clone)]
pub struct BlockModeSystem {
    pub rho: f64,
    pub base_op: OperatorDiscretization,
    pub base_spec: SpectralData,
    pub base_space: Arc<SampledSpace>,
    pub union_space: Arc<SampledSpace>,
    pub per_mode: Vec<Mat2>,
}

impl BlockModeSystem {
    pub fn interval(n: usize, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("need at least two interior points".into()));
        }
        let (op, space) = interval_dirichlet(n)?;
        let spec = SpectralData::from_operator(&op)?;
        Self::from_spectrum(op, spec, Arc::new(space), rho)
    }

    pub fn from_spectrum(op: OperatorDiscretization, spec: SpectralData, space: Arc<SampledSpace>, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("damping ρ = {rho} must be positive")));
        }
        if let Some(l) = spec.eigenvalues().iter().find(|l| **l <= 0.0) {
            return Err(Error::Domain(format!("Dirichlet spectrum must be positive, found {l}")));
        }
        let per_mode = spec.eigenvalues().iter().map(|&l| mode_matrix(l, rho)).collect();
        let union_space = Arc::new(disjoint_union(&space, &space));
        Ok(Self {
            rho,
            base_op: op,
            base_spec: spec,
            base_space: space,
            union_space,
            per_mode,
        })
    }

    pub fn base_len(&self) -> usize {
        self.base_space.len()
    }

    /// Dense `2n×2n` generator `[[0, Δ], [−Δ, −ρΔ]]` with `Δ = W⁻¹K`.
    pub fn dense_generator(&self) -> Result<DenseMatrix> {
        let lap = self.base_op.generator_matrix()?.scale(-1.0);
        let n = self.base_len();
        Ok(DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (bi, bj) = (i / n, j / n);
            let v = lap[(i % n, j % n)];
            match (bi, bj) {
                (0, 0) => 0.0,
                (0, 1) => v,
                (1, 0) => -v,
                _ => -self.rho * v,
            }
        }))
    }
}

/// Tridiagonal finite-element Dirichlet Laplacian on `(0, 1)` with `n`
/// interior nodes and lumped masses `h = 1/(n+1)`.
pub fn interval_dirichlet(n: usize) -> Result<(OperatorDiscretization, SampledSpace)> {
    let h = 1.0 / (n + 1) as f64;
    let k = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 / h
        } else if i.abs_diff(j) == 1 {
            -1.0 / h
        } else {
            0.0
        }
    });
    let op = OperatorDiscretization::new(k, vec![h; n], 1, 1.0)?;
    let coords = (1..=n).map(|i| vec![i as f64 * h]).collect();
    let ids = (1..=n).map(|i| format!("x{i}")).collect();
    let space = SampledSpace::from_coordinates(ids, coords, vec![h; n])?;
    Ok((op, space))
}

pub fn mode_matrix(lambda: f64, rho: f64) -> Mat2 {
    [[0.0, lambda], [-lambda, -rho * lambda]]
}

/// Exact exponential of a real `2×2` matrix,
/// `e^{tM} = e^{τt/2} [c(t) I + s(t) (M − τ/2 I)]` with `τ = tr M`,
/// `σ² = τ²/4 − det M`, `c = cosh(σt)`, `s = sinh(σt)/σ`. The trigonometric
/// branch covers `σ² < 0`, and a series covers `σ²t²` near zero, including
/// the defective case.
pub fn mode_exponential(m: &Mat2, t: f64) -> Mat2 {
    let tau = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let half = 0.5 * tau;
    let disc = half * half - det;
    let u = disc * t * t;
    // (e^{τt/2} c, e^{τt/2} s)
    let (ec, es) = if u.abs() < 1e-2 {
        let e = (half * t).exp();
        let c = 1.0 + u / 2.0 + u * u / 24.0 + u * u * u / 720.0 + u * u * u * u / 40320.0;
        let s = t * (1.0 + u / 6.0 + u * u / 120.0 + u * u * u / 5040.0 + u * u * u * u / 362880.0);
        (e * c, e * s)
    } else if disc > 0.0 {
        let sigma = disc.sqrt();
        let a = ((half + sigma) * t).exp();
        let b = ((half - sigma) * t).exp();
        (0.5 * (a + b), 0.5 * (a - b) / sigma)
    } else {
        let omega = (-disc).sqrt();
        let e = (half * t).exp();
        (e * (omega * t).cos(), e * (omega * t).sin() / omega)
    };
    [
        [ec + es * (m[0][0] - half), es * m[0][1]],
        [es * m[1][0], ec + es * (m[1][1] - half)],
    ]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Block kernel `p_t = Σ_n e^{tM_n} ⊗ φ_n φ_nᵀ` on `X ⊔ X`.
pub fn wave_kernel(sys: &BlockModeSystem, t: f64) -> Result<KernelMatrix> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("kernel time {t} must be positive")));
    }
    let n = sys.base_len();
    let phi = sys.base_spec.modes();
    let m = sys.base_spec.len();
    let exps: Vec<Mat2> = sys.per_mode.iter().map(|mm| mode_exponential(mm, t)).collect();
    let mut values = DenseMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 {
        for b in 0..2 {
            let scaled = DenseMatrix::from_fn(m, n, |k, j| exps[k][a][b] * phi[(j, k)]);
            let block = phi.matmul(&scaled)?;
            for i in 0..n {
                values.row_mut(a * n + i)[b * n..(b + 1) * n].copy_from_slice(block.row(i));
            }
        }
    }
    let mut k = KernelMatrix::new(t, values, sys.union_space.clone(), 2, false)?;
    k.modes_used = m;
    Ok(k)
}

/// `max |p_t(y, x) − U p_t(x, y)ᵀ U| / max |p_t|` with `U = diag(1, −1)`.
pub fn block_symmetry_residual(k: &KernelMatrix) -> Result<f64> {
    if k.block_size != 2 {
        return Err(Error::Contract("block symmetry applies to block kernels".into()));
    }
    let n = k.dim() / 2;
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let pxy = k.block(x, y);
            let pyx = k.block(y, x);
            for a in 0..2 {
                for b in 0..2 {
                    let sign = if a == b { 1.0 } else { -1.0 };
                    worst = worst.max((pyx[a][b] - sign * pxy[b][a]).abs());
                }
            }
        }
    }
    Ok(worst / k.values.max_abs())
}

/// Upper and lower component rows, as in the solution formula
/// `u(t, x) = ∫ p⁽²¹⁾_t(x, y) f(y) + p⁽²²⁾_t(x, y) g(y) dy`.
pub fn component(k: &KernelMatrix, a: usize, b: usize) -> Result<DenseMatrix> {
    if k.block_size != 2 || a > 1 || b > 1 {
        return Err(Error::Contract("component extraction needs a block kernel and indices in {0, 1}".into()));
    }
    let n = k.dim() / 2;
    Ok(DenseMatrix::from_fn(n, n, |i, j| k.values[(a * n + i, b * n + j)]))
}

/// Per-mode weights `g_{n,a} = Σ_b |(e^{tM_n} M_nᵀ)_{ab}|²` so that
/// `‖𝒜p_t(x,·) − 𝒜p_t(x′,·)‖² = Σ_n g_{n,a} (φ_n(x) − φ_n(x′))²` for `x, x′`
/// in copy `a`.
fn generator_row_weights(sys: &BlockModeSystem, t: f64) -> Vec<[f64; 2]> {
    sys.per_mode
        .iter()
        .map(|mm| {
            let em = mat_mul(&mode_exponential(mm, t), &transpose(mm));
            [
                em[0][0] * em[0][0] + em[0][1] * em[0][1],
                em[1][0] * em[1][0] + em[1][1] * em[1][1],
            ]
        })
        .collect()
}

/// `C(t) = sup ‖𝒜p_t(𝕩,·) − 𝒜p_t(𝕩′,·)‖_{L²(𝕏)} / d(𝕩, 𝕩′)` over pairs at
/// finite distance, and the number of cross-copy pairs skipped.
pub fn wave_constant(sys: &BlockModeSystem, t: f64) -> Result<(f64, usize)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("kernel time {t} must be positive")));
    }
    let g = generator_row_weights(sys, t);
    let n = sys.base_len();
    let phi = sys.base_spec.modes();
    let mut best = 0.0f64;
    let mut diff = vec![0.0; g.len()];
    for i in 0..n {
        for j in i + 1..n {
            let d = sys.base_space.dist(i, j);
            if !(d > 0.0 && d.is_finite()) {
                continue;
            }
            let (ri, rj) = (phi.row(i), phi.row(j));
            for ((dk, a), b) in diff.iter_mut().zip(ri).zip(rj) {
                *dk = a - b;
            }
            for copy in 0..2 {
                let s: f64 = g.iter().zip(&diff).map(|(w, dk)| w[copy] * dk * dk).sum();
                best = best.max(s.sqrt() / d);
            }
        }
    }
    // every (copy 1, copy 2) pair sits at infinite distance
    Ok((best, n * n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFit {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub residual: f64,
    pub small_t_power: f64,
}

/// Scans `C(t)`, fits `C₁t⁻¹ + C₂t⁻²`, and checks the small-t power against 2.
pub fn wave_bound_scan(sys: &BlockModeSystem, t_grid: &[f64]) -> Result<(HoelderReport, WaveFit)> {
    validate_grid(t_grid)?;
    let mut per_t = Vec::with_capacity(t_grid.len());
    let mut excluded = 0;
    for &t in t_grid {
        let (c, cross) = wave_constant(sys, t)?;
        excluded = cross;
        per_t.push(PerTime {
            t,
            c,
            seminorm: c,
            exponent: None,
        });
    }
    let cs: Vec<f64> = per_t.iter().map(|r| r.c).collect();
    let (c1, c2, residual) = fit_two_term(t_grid, &cs, 1.0, 2.0)?;
    let p = small_t_power(t_grid, &cs)?;
    let prediction = Prediction {
        exponent: 1.0,
        blow_up_power: 2.0,
        source: "damped wave: (C1/t + C2/t^2) Lipschitz bound".into(),
    };
    let ok = p <= prediction.blow_up_power + POWER_MARGIN;
    let verdict = Verdict {
        status: if ok { Status::Pass } else { Status::Fail },
        power_margin: POWER_MARGIN,
        exponent_margin: EXPONENT_MARGIN,
        measured_power: Some(p),
        measured_exponent: None,
        exponent_band: None,
        notes: vec![format!("{excluded} cross-copy pairs at infinite distance excluded")],
    };
    let report = HoelderReport {
        instance: format!("damped_wave(rho={}, n={})", sys.rho, sys.base_len()),
        prediction,
        alpha: 1.0,
        per_t,
        fit: Some(BlowUpFit { c1, c2, p, residual }),
        verdict,
        excluded_infinite_pairs: excluded,
    };
    Ok((
        report,
        WaveFit {
            c1,
            c2,
            residual,
            small_t_power: p,
        },
    ))
}
