//! Discrete generators in weak form.
//!
//! A discretization carries a stiffness matrix `K` (symmetric, or a
//! Hermitian real/imaginary pair) and lumped mass weights `W`. The generator
//! is `A = −W⁻¹K`, so `e^{tA}` is dissipative for positive semi-definite `K`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_embedding, DenseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDiscretization {
    stiffness: DenseMatrix,
    stiffness_imag: Option<DenseMatrix>,
    mass_weights: Vec<f64>,
    self_adjoint: bool,
    morrey_order_k: u32,
    hoelder_alpha: f64,
}

impl OperatorDiscretization {
    /// Real symmetric stiffness with positive lumped masses.
    ///
    /// `morrey_order_k` and `hoelder_alpha` record the embedding
    /// `D(A^k) ↪ C^{0,α}` the instance is expected to satisfy.
    pub fn new(stiffness: DenseMatrix, mass_weights: Vec<f64>, morrey_order_k: u32, hoelder_alpha: f64) -> Result<Self> {
        if !stiffness.is_square() || stiffness.rows() != mass_weights.len() {
            return Err(Error::Dimension(format!(
                "stiffness {}x{} with {} mass weights",
                stiffness.rows(),
                stiffness.cols(),
                mass_weights.len()
            )));
        }
        if let Some(i) = mass_weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Domain(format!("mass weight {i} is not strictly positive")));
        }
        let scale = stiffness.max_abs().max(1.0);
        let asym = stiffness.asymmetry();
        if asym > 1e-12 * scale {
            return Err(crate::linalg::LinalgError::Symmetry { asymmetry: asym }.into());
        }
        Ok(Self {
            stiffness,
            stiffness_imag: None,
            mass_weights,
            self_adjoint: true,
            morrey_order_k,
            hoelder_alpha,
        })
    }

    /// Adds an antisymmetric imaginary part, making `K` complex Hermitian.
    pub fn with_imaginary_part(mut self, imag: DenseMatrix) -> Result<Self> {
        // the embedding constructor checks the structure
        hermitian_embedding(&self.stiffness, &imag)?;
        self.stiffness_imag = Some(imag);
        Ok(self)
    }

    /// Marks the generator as non-self-adjoint; symmetry checks then refuse it.
    pub fn with_self_adjoint(mut self, flag: bool) -> Self {
        self.self_adjoint = flag;
        self
    }

    pub fn dim(&self) -> usize {
        self.mass_weights.len()
    }

    pub fn stiffness(&self) -> &DenseMatrix {
        &self.stiffness
    }

    pub fn stiffness_imag(&self) -> Option<&DenseMatrix> {
        self.stiffness_imag.as_ref()
    }

    pub fn is_magnetic(&self) -> bool {
        self.stiffness_imag.is_some()
    }

    pub fn mass_weights(&self) -> &[f64] {
        &self.mass_weights
    }

    pub fn self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    pub fn morrey_order_k(&self) -> u32 {
        self.morrey_order_k
    }

    pub fn hoelder_alpha(&self) -> f64 {
        self.hoelder_alpha
    }

    fn require_real(&self) -> Result<()> {
        if self.is_magnetic() {
            return Err(Error::Contract(
                "complex Hermitian operator: use the real embedding for real-valued actions".into(),
            ));
        }
        Ok(())
    }

    /// `A f = −W⁻¹ K f`.
    pub fn apply_generator(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.require_real()?;
        if f.len() != self.dim() {
            return Err(Error::Dimension(format!("vector of length {} for order {}", f.len(), self.dim())));
        }
        let kf = self.stiffness.mul_vec(f)?;
        Ok(kf.iter().zip(&self.mass_weights).map(|(v, w)| -v / w).collect())
    }

    /// Dense generator matrix `−W⁻¹K`.
    pub fn generator_matrix(&self) -> Result<DenseMatrix> {
        self.require_real()?;
        let inv: Vec<f64> = self.mass_weights.iter().map(|w| -1.0 / w).collect();
        Ok(self.stiffness.scale_rows(&inv))
    }

    /// Real symmetric operator of order `2n` equivalent to the Hermitian one:
    /// stiffness `[[re, −im], [im, re]]`, masses duplicated.
    pub fn real_embedding(&self) -> Result<Self> {
        let stiffness = match &self.stiffness_imag {
            Some(im) => hermitian_embedding(&self.stiffness, im)?,
            None => hermitian_embedding(&self.stiffness, &DenseMatrix::zeros(self.dim(), self.dim()))?,
        };
        let mut mass = self.mass_weights.clone();
        mass.extend_from_slice(&self.mass_weights);
        Ok(Self {
            stiffness,
            stiffness_imag: None,
            mass_weights: mass,
            self_adjoint: self.self_adjoint,
            morrey_order_k: self.morrey_order_k,
            hoelder_alpha: self.hoelder_alpha,
        })
    }

    /// Total mass `Σ w_i`.
    pub fn total_mass(&self) -> f64 {
        self.mass_weights.iter().sum()
    }
}
