//! Dense linear algebra: symmetric eigensolver (cyclic Jacobi), Hermitian
//! problems through their real embedding, Cholesky and LU solves, and a
//! scaling-and-squaring matrix exponential used as an independent oracle.

use std::ops::{Index, IndexMut};

use thiserror::Error;

/// Largest matrix order any routine in this module accepts.
pub const MAX_DIM: usize = 4096;

/// Default relative tolerance on the off-diagonal Frobenius norm.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;

/// Sweep limit for the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    Symmetry { asymmetry: f64 },
    #[error("structure violation: {0}")]
    Structure(String),
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    Convergence { sweeps: usize, off_norm: f64 },
    #[error("matrix of order {n} exceeds the capacity {cap}")]
    Capacity { n: usize, cap: usize },
    #[error("singular or indefinite pivot at index {pivot} (value {value:e})")]
    Singular { pivot: usize, value: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Row-major dense matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(LinalgError::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `diag(d) * self`
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        for (i, &s) in d.iter().enumerate().take(self.rows) {
            out.row_mut(i).iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// `self * diag(d)`
    pub fn scale_cols(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for (v, &s) in out.row_mut(i).iter_mut().zip(d) {
                *v *= s;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest `|m_ij - m_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    fn check_symmetric(&self) -> Result<()> {
        self.check_square()?;
        let asym = self.asymmetry();
        if asym > SYMMETRY_TOL * self.max_abs().max(f64::MIN_POSITIVE) {
            return Err(LinalgError::Symmetry { asymmetry: asym });
        }
        Ok(())
    }

    fn check_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(LinalgError::Dimension(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.rows > MAX_DIM {
            return Err(LinalgError::Capacity {
                n: self.rows,
                cap: MAX_DIM,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(λ) Vᵀ`
    pub fn reconstruct(&self) -> DenseMatrix {
        let scaled = self.eigenvectors.scale_cols(&self.eigenvalues);
        scaled
            .matmul(&self.eigenvectors.transpose())
            .expect("square factors")
    }

    /// Applies the Moore–Penrose pseudoinverse of `V diag(λ) Vᵀ` (Euclidean
    /// orthonormal `V`), treating `|λ| <= cutoff * max|λ|` as zero.
    pub fn apply_pseudoinverse(&self, rhs: &[f64], cutoff: f64) -> Result<Vec<f64>> {
        let n = self.eigenvectors.rows();
        if rhs.len() != n {
            return Err(LinalgError::Dimension(format!(
                "rhs of length {} for order {n}",
                rhs.len()
            )));
        }
        let scale = self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut out = vec![0.0; n];
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            if lambda.abs() <= cutoff * scale {
                continue;
            }
            let coef: f64 = (0..n).map(|i| self.eigenvectors[(i, k)] * rhs[i]).sum::<f64>() / lambda;
            for (i, o) in out.iter_mut().enumerate() {
                *o += coef * self.eigenvectors[(i, k)];
            }
        }
        Ok(out)
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps visit the upper triangle in row-major order, so results are
/// bit-reproducible. Convergence is declared once the off-diagonal Frobenius
/// norm drops to `tol * ‖m‖_F`.
pub fn symmetric_eigen(m: &DenseMatrix, tol: f64) -> Result<EigenDecomposition> {
    m.check_symmetric()?;
    let n = m.rows();
    // symmetrize exactly so rotations act on a truly symmetric array
    let mut a = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    // rows of `vt` are the eigenvectors
    let mut vt = DenseMatrix::identity(n);
    let scale = a.frobenius();
    let target = tol * scale;

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || n < 2 {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(LinalgError::Convergence {
                sweeps: sweep,
                off_norm: off,
            });
        }
        // entries below target/n cannot keep the off-diagonal norm above target
        let floor = target / n as f64;
        let threshold = if sweep < 3 {
            (0.2 * off_diagonal_abs_sum(&a) / (n * n) as f64).max(floor)
        } else {
            floor
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let g = 100.0 * apq.abs();
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                rotate(&mut a, &mut vt, p, q);
            }
        }
        sweep += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = vt.row(k);
        // fix the sign: largest-magnitude component (lowest index on ties) positive
        let mut lead = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[lead].abs() {
                lead = i;
            }
        }
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        for (i, &x) in v.iter().enumerate() {
            vectors[(i, col)] = sign * x;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for (j, v) in a.row(i).iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

fn off_diagonal_abs_sum(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for v in &a.row(i)[i + 1..] {
            s += v.abs();
        }
    }
    s
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `vt`.
fn rotate(a: &mut DenseMatrix, vt: &mut DenseMatrix, p: usize, q: usize) {
    let n = a.rows();
    let apq = a[(p, q)];
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    {
        let (head, tail) = a.data.split_at_mut(q * n);
        let row_p = &mut head[p * n..(p + 1) * n];
        let row_q = &mut tail[..n];
        for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
            let xp = *x;
            let xq = *y;
            *x = c * xp - s * xq;
            *y = s * xp + c * xq;
        }
    }
    let data = &mut a.data;
    for k in 0..n {
        if k != p && k != q {
            data[k * n + p] = data[p * n + k];
            data[k * n + q] = data[q * n + k];
        }
    }
    a[(p, p)] = app - t * apq;
    a[(q, q)] = aqq + t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    let (head, tail) = vt.data.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Generalized problem `K φ = λ W φ` for diagonal positive `W`.
///
/// Eigenvector columns are orthonormal in `⟨u, v⟩_W = Σ w_i u_i v_i`.
pub fn weighted_symmetric_eigen(k: &DenseMatrix, weights: &[f64], tol: f64) -> Result<EigenDecomposition> {
    k.check_symmetric()?;
    if weights.len() != k.rows() {
        return Err(LinalgError::Dimension(format!(
            "{} weights for order {}",
            weights.len(),
            k.rows()
        )));
    }
    if let Some(i) = weights.iter().position(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(LinalgError::Structure(format!("weight {i} is not strictly positive")));
    }
    let inv_sqrt: Vec<f64> = weights.iter().map(|w| 1.0 / w.sqrt()).collect();
    let reduced = k.scale_rows(&inv_sqrt).scale_cols(&inv_sqrt);
    let mut eig = symmetric_eigen(&reduced, tol)?;
    eig.eigenvectors = eig.eigenvectors.scale_rows(&inv_sqrt);
    Ok(eig)
}

/// Real symmetric embedding `[[re, −im], [im, re]]` of the Hermitian matrix `re + i·im`.
pub fn hermitian_embedding(re: &DenseMatrix, im: &DenseMatrix) -> Result<DenseMatrix> {
    re.check_square()?;
    if im.rows() != re.rows() || im.cols() != re.cols() {
        return Err(LinalgError::Dimension("real and imaginary parts differ in size".into()));
    }
    let scale = re.max_abs().max(im.max_abs()).max(f64::MIN_POSITIVE);
    let n = re.rows();
    for i in 0..n {
        for j in i..n {
            if (re[(i, j)] - re[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(LinalgError::Structure(format!("real part not symmetric at ({i}, {j})")));
            }
            if (im[(i, j)] + im[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(LinalgError::Structure(format!(
                    "imaginary part not antisymmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(DenseMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => re[(i, j)],
        (true, false) => -im[(i, j - n)],
        (false, true) => im[(i - n, j)],
        (false, false) => re[(i - n, j - n)],
    }))
}

/// Eigendecomposition of a Hermitian matrix through its `2n × 2n` real embedding.
///
/// Every eigenvalue of `re + i·im` appears twice. Column `k` splits into
/// `(x, y)` halves giving the complex eigenvector `x + i·y`.
pub fn hermitian_embed_eigen(re: &DenseMatrix, im: &DenseMatrix) -> Result<EigenDecomposition> {
    symmetric_eigen(&hermitian_embedding(re, im)?, DEFAULT_EIGEN_TOL)
}

/// Scaling-and-squaring exponential `exp(t·m)` with a truncated Taylor core.
pub fn expm_oracle(m: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    m.check_square()?;
    let n = m.rows();
    let a = m.scale(t);
    let norm = a.norm1();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a.scale(0.5f64.powi(squarings as i32));
    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=40 {
        term = term.matmul(&b)?.scale(1.0 / k as f64);
        sum = sum.add(&term)?;
        if term.max_abs() <= 1e-20 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum)?;
    }
    Ok(sum)
}

/// Cholesky factor `m = L Lᵀ` of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: DenseMatrix,
}

impl Cholesky {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        m.check_symmetric()?;
        let n = m.rows();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(LinalgError::Singular { pivot: j, value: d });
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = m[(i, j)];
                let (ri, rj) = (l.row(i), l.row(j));
                for k in 0..j {
                    s -= ri[k] * rj[k];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn order(&self) -> usize {
        self.lower.rows()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        if rhs.len() != n {
            return Err(LinalgError::Dimension(format!(
                "rhs of length {} for order {n}",
                rhs.len()
            )));
        }
        let l = &self.lower;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let s: f64 = l.row(i)[..i].iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - s) / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        Ok(y)
    }
}

/// Solves `m x = rhs` for symmetric positive-definite `m`.
pub fn solve_spd(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    Cholesky::new(m)?.solve(rhs)
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactor {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        m.check_square()?;
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs();
        for k in 0..n {
            let mut piv = k;
            for i in k + 1..n {
                if lu[(i, k)].abs() > lu[(piv, k)].abs() {
                    piv = i;
                }
            }
            let pv = lu[(piv, k)];
            if pv.abs() <= f64::EPSILON * scale * n as f64 || pv == 0.0 {
                return Err(LinalgError::Singular { pivot: k, value: pv });
            }
            if piv != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let (head, tail) = lu.data.split_at_mut((k + 1) * n);
            let row_k = &head[k * n..];
            for row_i in tail.chunks_mut(n) {
                let f = row_i[k] / pv;
                row_i[k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        row_i[j] -= f * row_k[j];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows();
        if rhs.len() != n {
            return Err(LinalgError::Dimension(format!(
                "rhs of length {} for order {n}",
                rhs.len()
            )));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let s: f64 = self.lu.row(i)[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = self.lu.row(i)[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Solves for every column of `rhs`.
    pub fn solve_matrix(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.lu.rows();
        if rhs.rows() != n {
            return Err(LinalgError::Dimension("right-hand side rows".into()));
        }
        // work on the transpose so each system is a contiguous row
        let mut t = rhs.transpose();
        for j in 0..t.rows() {
            let x = self.solve(t.row(j))?;
            t.row_mut(j).copy_from_slice(&x);
        }
        Ok(t.transpose())
    }
}
