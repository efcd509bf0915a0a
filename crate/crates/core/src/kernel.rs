//! Heat kernels from spectral data and numerical checks of the kernel axioms.
//!
//! With generator `A = −W⁻¹K` and `W`-orthonormal eigenpairs `(λ_n, φ_n)`,
//! the discrete kernel is
//!
//! ```text
//! p_t(x_i, x_j) = Σ_n e^{−λ_n t} φ_n(x_i) φ_n(x_j),
//! ```
//!
//! i.e. `e^{tA} W⁻¹`, so that `(e^{tA} f)_i = Σ_j p_t(x_i, x_j) w_j f_j` and the
//! semigroup law reads `p_{t+s} = p_t W p_s`.
//!
//! Only finite-dimensional shadows of the differentiability axioms are
//! checked: the time derivative is compared with `A_x p_t` by central
//! differences.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{weighted_symmetric_eigen, DenseMatrix, DEFAULT_EIGEN_TOL};
use crate::operator::OperatorDiscretization;
use crate::space::{NormSpec, SampledSpace};

/// Modes with `e^{−λt}·‖φ‖_∞² < TRUNCATION_THRESHOLD` are dropped.
pub const TRUNCATION_THRESHOLD: f64 = 1e-14;

/// Kernels are refused below this time; truncation error grows as `t → 0`.
pub const MIN_TIME: f64 = 1e-6;

/// Eigenvalues and `W`-orthonormal eigenvectors of a self-adjoint generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    /// Column `n` is `φ_n`.
    modes: DenseMatrix,
    weights: Vec<f64>,
    sup_norms: Vec<f64>,
}

impl SpectralData {
    /// Solves `K φ = λ W φ`. Magnetic operators are handled through their
    /// real embedding; the resulting data then lives on two copies of the
    /// sampled points.
    pub fn from_operator(op: &OperatorDiscretization) -> Result<Self> {
        if !op.self_adjoint() {
            return Err(Error::Contract("spectral data needs a self-adjoint generator".into()));
        }
        let embedded;
        let op = if op.is_magnetic() {
            embedded = op.real_embedding()?;
            &embedded
        } else {
            op
        };
        let eig = weighted_symmetric_eigen(op.stiffness(), op.mass_weights(), DEFAULT_EIGEN_TOL)?;
        Self::from_parts(eig.eigenvalues, eig.eigenvectors, op.mass_weights().to_vec())
    }

    pub fn from_parts(eigenvalues: Vec<f64>, modes: DenseMatrix, weights: Vec<f64>) -> Result<Self> {
        if modes.cols() != eigenvalues.len() || modes.rows() != weights.len() {
            return Err(Error::Dimension(format!(
                "{} eigenvalues, {}x{} modes, {} weights",
                eigenvalues.len(),
                modes.rows(),
                modes.cols(),
                weights.len()
            )));
        }
        let sup_norms = (0..modes.cols())
            .map(|k| (0..modes.rows()).fold(0.0f64, |m, i| m.max(modes[(i, k)].abs())))
            .collect();
        Ok(Self {
            eigenvalues,
            modes,
            weights,
            sup_norms,
        })
    }

    /// Number of sampled points.
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn modes(&self) -> &DenseMatrix {
        &self.modes
    }

    pub fn mode(&self, k: usize) -> Vec<f64> {
        self.modes.column(k)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sup_norm(&self, k: usize) -> f64 {
        self.sup_norms[k]
    }

    /// Largest deviation of `ΦᵀWΦ` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let wphi = self.modes.scale_rows(&self.weights);
        let gram = self.modes.transpose().matmul(&wphi).expect("shapes agree");
        gram.max_abs_diff(&DenseMatrix::identity(self.len()))
    }
}

/// `p_t` sampled on a space, scalar or with `2×2` blocks.
///
/// Block kernels (`block_size == 2`) live on two copies of `n` base points,
/// first copy first, so block `(x, y)` collects the entries at rows
/// `x, n + x` and columns `y, n + y`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub t: f64,
    pub values: DenseMatrix,
    pub space: Arc<SampledSpace>,
    pub block_size: usize,
    pub self_adjoint: bool,
    pub modes_used: usize,
    /// `Σ e^{−λt}‖φ‖_∞²` over the dropped modes.
    pub truncation_bound: f64,
    identity_surrogate: bool,
}

impl KernelMatrix {
    pub fn new(t: f64, values: DenseMatrix, space: Arc<SampledSpace>, block_size: usize, self_adjoint: bool) -> Result<Self> {
        if values.rows() != space.len() || values.cols() != space.len() {
            return Err(Error::Dimension(format!(
                "{}x{} kernel on {} points",
                values.rows(),
                values.cols(),
                space.len()
            )));
        }
        if block_size != 1 && block_size != 2 || space.len() % block_size != 0 {
            return Err(Error::Dimension(format!("block size {block_size} on {} points", space.len())));
        }
        Ok(Self {
            t,
            values,
            space,
            block_size,
            self_adjoint,
            modes_used: 0,
            truncation_bound: 0.0,
            identity_surrogate: false,
        })
    }

    /// The `s → 0` stand-in `W⁻¹`; composing with it is exact.
    pub fn identity_surrogate(space: Arc<SampledSpace>) -> Self {
        let inv: Vec<f64> = space.weights().iter().map(|w| 1.0 / w).collect();
        Self {
            t: 0.0,
            values: DenseMatrix::from_diag(&inv),
            space,
            block_size: 1,
            self_adjoint: true,
            modes_used: 0,
            truncation_bound: 0.0,
            identity_surrogate: true,
        }
    }

    pub fn is_identity_surrogate(&self) -> bool {
        self.identity_surrogate
    }

    pub fn dim(&self) -> usize {
        self.values.rows()
    }

    pub fn weights(&self) -> &[f64] {
        self.space.weights()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    /// `max_i |Σ_j p(x_i, x_j) w_j − 1|`.
    pub fn mass_defect(&self) -> f64 {
        let w = self.weights();
        (0..self.dim())
            .map(|i| (self.row(i).iter().zip(w).map(|(p, w)| p * w).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest entry divided by the largest one.
    pub fn positivity_ratio(&self) -> f64 {
        let s = self.values.as_slice();
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        min / max
    }

    /// `2×2` block at base points `(x, y)` of a block kernel.
    pub fn block(&self, x: usize, y: usize) -> [[f64; 2]; 2] {
        let n = self.dim() / 2;
        let v = &self.values;
        [[v[(x, y)], v[(x, n + y)]], [v[(n + x, y)], v[(n + x, n + y)]]]
    }

    /// Kernel export: `i,j,x_dist,value`, or four block columns for block kernels.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        if self.block_size == 1 {
            writeln!(out, "i,j,x_dist,value")?;
            for i in 0..self.dim() {
                for j in 0..self.dim() {
                    writeln!(out, "{i},{j},{},{}", self.space.dist(i, j), self.values[(i, j)])?;
                }
            }
        } else {
            writeln!(out, "i,j,x_dist,value_11,value_12,value_21,value_22")?;
            let n = self.dim() / 2;
            for i in 0..n {
                for j in 0..n {
                    let b = self.block(i, j);
                    writeln!(
                        out,
                        "{i},{j},{},{},{},{},{}",
                        self.space.dist(i, j),
                        b[0][0],
                        b[0][1],
                        b[1][0],
                        b[1][1]
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!("kernel time {t} must be positive")));
    }
    if t < MIN_TIME {
        return Err(Error::Domain(format!(
            "kernel time {t} below {MIN_TIME}: truncation error is uncontrolled"
        )));
    }
    Ok(())
}

/// Spectral sum `Σ e^{−λ_n t} φ_n ⊗ φ_n`, skipping negligible modes and
/// keeping at most `n_modes`.
pub fn heat_kernel(spec: &SpectralData, space: Arc<SampledSpace>, t: f64, n_modes: Option<usize>) -> Result<KernelMatrix> {
    check_time(t)?;
    if spec.is_empty() {
        return Err(Error::Contract("spectral data is empty".into()));
    }
    if space.len() != spec.dim() {
        return Err(Error::Dimension(format!(
            "spectral data on {} points, space has {}",
            spec.dim(),
            space.len()
        )));
    }
    if space.weights() != spec.weights() {
        return Err(Error::Dimension("space weights differ from the operator's mass weights".into()));
    }
    let limit = n_modes.unwrap_or(usize::MAX);
    let mut kept = Vec::new();
    let mut dropped = 0.0;
    for (k, &lam) in spec.eigenvalues.iter().enumerate() {
        let decay = (-lam * t).exp();
        let bound = decay * spec.sup_norms[k] * spec.sup_norms[k];
        if kept.len() < limit && bound >= TRUNCATION_THRESHOLD {
            kept.push((k, decay));
        } else {
            dropped += bound;
        }
    }
    let n = spec.dim();
    let phi = DenseMatrix::from_fn(n, kept.len(), |i, c| spec.modes[(i, kept[c].0)]);
    let scaled = DenseMatrix::from_fn(kept.len(), n, |c, j| kept[c].1 * spec.modes[(j, kept[c].0)]);
    let values = phi.matmul(&scaled)?;
    let mut k = KernelMatrix::new(t, values, space, 1, true)?;
    k.modes_used = kept.len();
    k.truncation_bound = dropped;
    Ok(k)
}

fn check_same_space(a: &KernelMatrix, b: &KernelMatrix) -> Result<()> {
    if a.dim() != b.dim() || a.block_size != b.block_size {
        return Err(Error::Dimension(format!("kernels of order {} and {}", a.dim(), b.dim())));
    }
    if !Arc::ptr_eq(&a.space, &b.space) && a.weights() != b.weights() {
        return Err(Error::Dimension("kernels live on different weighted spaces".into()));
    }
    Ok(())
}

/// `p_t W p_s`, the quadrature form of `∫ p_t(x, z) p_s(z, y) dμ(z)`.
pub fn compose(k1: &KernelMatrix, k2: &KernelMatrix) -> Result<DenseMatrix> {
    check_same_space(k1, k2)?;
    if k2.identity_surrogate {
        return Ok(k1.values.clone());
    }
    if k1.identity_surrogate {
        return Ok(k2.values.clone());
    }
    Ok(k1.values.scale_cols(k1.weights()).matmul(&k2.values)?)
}

/// `max |k3 − k1·W·k2| / max |k3|`.
pub fn chapman_kolmogorov_residual(k1: &KernelMatrix, k2: &KernelMatrix, k3: &KernelMatrix) -> Result<f64> {
    check_same_space(k1, k3)?;
    let product = compose(k1, k2)?;
    Ok(k3.values.max_abs_diff(&product) / k3.values.max_abs())
}

/// `max |p − pᵀ| / max |p|`; only meaningful for self-adjoint generators.
pub fn symmetry_residual(k: &KernelMatrix) -> Result<f64> {
    if !k.self_adjoint {
        return Err(Error::Contract("symmetry is only asserted for self-adjoint generators".into()));
    }
    Ok(k.values.asymmetry() / k.values.max_abs())
}

fn check_operator(k: &KernelMatrix, op: &OperatorDiscretization) -> Result<()> {
    if op.dim() != k.dim() {
        return Err(Error::Dimension(format!("operator of order {} on a kernel of order {}", op.dim(), k.dim())));
    }
    Ok(())
}

/// Generator in the second coordinate: `(A_y p)(x_i, ·) = A p(x_i, ·)`,
/// i.e. `−p K W⁻¹`.
pub fn apply_generator_y(k: &KernelMatrix, op: &OperatorDiscretization) -> Result<DenseMatrix> {
    check_operator(k, op)?;
    let inv: Vec<f64> = op.mass_weights().iter().map(|w| -1.0 / w).collect();
    // p K = (K pᵀ)ᵀ keeps the sparse factor on the left
    let kp = op.generator_stiffness()?.matmul(&k.values.transpose())?;
    Ok(kp.transpose().scale_cols(&inv))
}

/// Generator in the first coordinate: `−W⁻¹ K p`.
pub fn apply_generator_x(k: &KernelMatrix, op: &OperatorDiscretization) -> Result<DenseMatrix> {
    check_operator(k, op)?;
    let inv: Vec<f64> = op.mass_weights().iter().map(|w| -1.0 / w).collect();
    Ok(op.generator_stiffness()?.matmul(&k.values)?.scale_rows(&inv))
}

/// Central-difference comparison of `∂_t p_t` with `A_x p_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDerivativeCheck {
    pub t: f64,
    pub delta: f64,
    pub max_deviation: f64,
    pub max_derivative: f64,
}

pub fn time_derivative_check(
    spec: &SpectralData,
    space: Arc<SampledSpace>,
    op: &OperatorDiscretization,
    t: f64,
    delta: f64,
) -> Result<TimeDerivativeCheck> {
    if !(delta > 0.0 && delta < t) {
        return Err(Error::Domain(format!("difference step {delta} must lie in (0, {t})")));
    }
    let plus = heat_kernel(spec, space.clone(), t + delta, None)?;
    let minus = heat_kernel(spec, space.clone(), t - delta, None)?;
    let mid = heat_kernel(spec, space, t, None)?;
    let ax = apply_generator_x(&mid, op)?;
    let fd = plus.values.sub(&minus.values)?.scale(0.5 / delta);
    Ok(TimeDerivativeCheck {
        t,
        delta,
        max_deviation: fd.max_abs_diff(&ax),
        max_derivative: ax.max_abs(),
    })
}

/// `‖p_t(x_i, ·) − p_t(x_j, ·)‖` in the requested norm on the kernel's space.
pub fn coordinate_map_distance(k: &KernelMatrix, spec: NormSpec<'_>, i: usize, j: usize) -> Result<f64> {
    let n = k.dim();
    if i >= n || j >= n {
        return Err(Error::Dimension(format!("point index out of range for {n} points")));
    }
    let diff: Vec<f64> = k.row(i).iter().zip(k.row(j)).map(|(a, b)| a - b).collect();
    spec.norm(k.weights(), &diff)
}

impl OperatorDiscretization {
    /// Real stiffness, refusing complex Hermitian operators.
    pub fn generator_stiffness(&self) -> Result<&DenseMatrix> {
        if self.is_magnetic() {
            return Err(Error::Contract("generator action needs a real operator; use the real embedding".into()));
        }
        Ok(self.stiffness())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dirichlet_chain(n: usize) -> (OperatorDiscretization, Arc<SampledSpace>) {
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
        let op = OperatorDiscretization::new(k, vec![h; n], 1, 1.0).unwrap();
        let coords = (0..n).map(|i| vec![(i + 1) as f64 * h]).collect();
        let ids = (0..n).map(|i| i.to_string()).collect();
        let space = SampledSpace::from_coordinates(ids, coords, vec![h; n]).unwrap();
        (op, Arc::new(space))
    }

    #[test]
    fn time_domain() {
        let (op, space) = dirichlet_chain(5);
        let spec = SpectralData::from_operator(&op).unwrap();
        assert!(matches!(heat_kernel(&spec, space.clone(), 0.0, None), Err(Error::Domain(_))));
        assert!(matches!(heat_kernel(&spec, space.clone(), -1.0, None), Err(Error::Domain(_))));
        assert!(matches!(heat_kernel(&spec, space, 1e-7, None), Err(Error::Domain(_))));
    }

    #[test]
    fn single_mode_is_rank_one() {
        let (op, space) = dirichlet_chain(6);
        let spec = SpectralData::from_operator(&op).unwrap();
        let k = heat_kernel(&spec, space, 0.3, Some(1)).unwrap();
        assert_eq!(k.modes_used, 1);
        let phi = spec.mode(0);
        let decay = (-spec.eigenvalues()[0] * 0.3).exp();
        for i in 0..6 {
            for j in 0..6 {
                assert_abs_diff_eq!(k.values[(i, j)], decay * phi[i] * phi[j], epsilon = 1e-15);
            }
        }
        let ay = apply_generator_y(&k, &op).unwrap();
        let lam = spec.eigenvalues()[0];
        for i in 0..6 {
            for j in 0..6 {
                assert_abs_diff_eq!(ay[(i, j)], -lam * k.values[(i, j)], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn identity_surrogate_composes_exactly() {
        let (op, space) = dirichlet_chain(5);
        let spec = SpectralData::from_operator(&op).unwrap();
        let k = heat_kernel(&spec, space.clone(), 0.1, None).unwrap();
        let id = KernelMatrix::identity_surrogate(space);
        assert_eq!(chapman_kolmogorov_residual(&k, &id, &k).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_detects_perturbation() {
        let (op, space) = dirichlet_chain(5);
        let spec = SpectralData::from_operator(&op).unwrap();
        let mut k = heat_kernel(&spec, space, 0.1, None).unwrap();
        assert!(symmetry_residual(&k).unwrap() < 1e-12);
        let scale = k.values.max_abs();
        k.values[(0, 3)] += 1e-3 * scale;
        assert_abs_diff_eq!(symmetry_residual(&k).unwrap(), 1e-3, epsilon = 1e-9);
        k.self_adjoint = false;
        assert!(matches!(symmetry_residual(&k), Err(Error::Contract(_))));
    }

    #[test]
    fn distance_to_self_is_zero() {
        let (op, space) = dirichlet_chain(5);
        let spec = SpectralData::from_operator(&op).unwrap();
        let k = heat_kernel(&spec, space, 0.1, None).unwrap();
        assert_eq!(coordinate_map_distance(&k, NormSpec::Lr(2.0), 2, 2).unwrap(), 0.0);
        assert_eq!(coordinate_map_distance(&k, NormSpec::Graph(&op), 2, 2).unwrap(), 0.0);
    }

    #[test]
    fn csv_header() {
        let (op, space) = dirichlet_chain(2);
        let spec = SpectralData::from_operator(&op).unwrap();
        let k = heat_kernel(&spec, space, 0.1, None).unwrap();
        let mut buf = Vec::new();
        k.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("i,j,x_dist,value\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
