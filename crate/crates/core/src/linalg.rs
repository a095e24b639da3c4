//! Dense complex matrices and a Hermitian eigensolver sized for desk-scale
//! quantum calculations (dimension ≤ 64).
//!
//! The eigensolver is a cyclic Jacobi iteration with complex plane rotations.
//! At these sizes it is simpler and more predictable than a LAPACK binding:
//! accuracy is controlled by a single off-diagonal threshold, there are no
//! blocking heuristics, and the accumulated rotations give eigenvectors that
//! are orthonormal by construction.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest matrix dimension the library accepts (four qubits tensored with a
/// four-qubit ancilla would already be past anything this crate simulates).
pub const MAX_DIM: usize = 64;

/// Absolute tolerance on `max |M - M†|` before a matrix is rejected as
/// non-Hermitian. All matrices in this crate have entries of order one, so an
/// absolute threshold is appropriate.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Sweep budget for the Jacobi iteration. Convergence is quadratic once the
/// off-diagonal mass is small; well-conditioned 64×64 inputs need fewer than
/// ten sweeps, so hitting this limit signals broken input (NaN entries etc.).
const MAX_JACOBI_SWEEPS: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix dimensions {0}x{1} are invalid (zero or above {MAX_DIM})")]
    InvalidDimensions(usize, usize),
    #[error("data length {got} does not match a {rows}x{cols} matrix")]
    DataLength {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("operation needs a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian: max |M - M†| entry is {0:.3e}")]
    NotHermitian(f64),
    #[error("eigensolver did not converge within {MAX_JACOBI_SWEEPS} sweeps")]
    NoConvergence,
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting empty or oversized
    /// shapes and mismatched data lengths.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(LinalgError::InvalidDimensions(rows, cols));
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DataLength {
                rows,
                cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0 && rows <= MAX_DIM && cols <= MAX_DIM);
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix entry by entry from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Matrix product. Panics on inner-dimension mismatch, which is a
    /// programming error here — user-facing entry points validate shapes
    /// before any arithmetic.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul inner dimensions {} vs {}",
            self.cols, other.rows
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude (the max norm used by most tolerances here).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entry magnitude of `M - M†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_deviation() <= tol
    }

    /// Hermitian part (M + M†)/2; used to scrub roundoff asymmetry before
    /// eigensolving.
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i).conj())
        })
    }

    /// Kronecker product, with the left factor owning the most significant
    /// index block: `kron(A, B)[(i1*rb + i2, j1*cb + j2)] = A[i1,j1] B[i2,j2]`.
    pub fn kron(&self, other: &Self) -> Result<Self, LinalgError> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(LinalgError::InvalidDimensions(rows, cols));
        }
        Ok(Self::from_fn(rows, cols, |i, j| {
            let (i1, i2) = (i / other.rows, i % other.rows);
            let (j1, j2) = (j / other.cols, j % other.cols);
            self.get(i1, j1) * other.get(i2, j2)
        }))
    }

    /// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi
    /// rotations.
    ///
    /// The input may carry roundoff asymmetry up to [`HERMITICITY_TOL`]; its
    /// Hermitian part is what gets diagonalised. Iteration stops once the
    /// off-diagonal Frobenius mass drops below `tol` times the largest entry
    /// magnitude of the input. Eigenvalues come back sorted ascending with
    /// matching eigenvector columns.
    pub fn hermitian_eig(&self, tol: f64) -> Result<EigenDecomposition, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let dev = self.hermiticity_deviation();
        if dev.is_nan() || dev > HERMITICITY_TOL {
            return Err(LinalgError::NotHermitian(dev));
        }
        let n = self.rows;
        let mut h = self.symmetrized();
        let mut v = Self::identity(n);

        let scale = h.max_abs();
        if scale == 0.0 || n == 1 {
            return Ok(EigenDecomposition {
                eigenvalues: (0..n).map(|i| h.get(i, i).re).collect(),
                eigenvectors: v,
            });
        }
        let threshold = tol.max(f64::EPSILON) * scale;

        for _sweep in 0..MAX_JACOBI_SWEEPS {
            if off_diagonal_mass(&h) <= threshold {
                return Ok(sorted_decomposition(&h, v));
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    // Pivots this small cannot push the off-diagonal mass
                    // above the threshold even if every entry were this size.
                    if h.get(p, q).norm() * (n as f64) <= threshold {
                        continue;
                    }
                    rotate(&mut h, &mut v, p, q);
                }
            }
        }
        if off_diagonal_mass(&h) <= threshold {
            return Ok(sorted_decomposition(&h, v));
        }
        Err(LinalgError::NoConvergence)
    }

    /// Trace norm (sum of singular values), computed from the spectrum of
    /// M†M. For Hermitian input this is the sum of eigenvalue magnitudes.
    pub fn trace_norm(&self) -> Result<f64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let gram = self.adjoint().matmul(self);
        let eig = gram.hermitian_eig(1e-13)?;
        Ok(eig
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .sum())
    }
}

/// Max entry-wise difference between two same-shaped matrices.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Frobenius norm of the strictly off-diagonal part of a square matrix.
pub fn off_diagonal_mass(h: &ComplexMatrix) -> f64 {
    let n = h.rows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += 2.0 * h.get(p, q).norm_sqr();
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation zeroing the (p, q) entry of the Hermitian
/// working matrix `h`, with the same rotation accumulated into `v`.
///
/// The rotation is the unitary that is the identity outside rows/columns
/// p and q and acts there as [[c, -s̄], [s, c]] with real c ≥ 0,
/// c² + |s|² = 1. Writing the pivot as a_pq = |a_pq| e^{iφ} and
/// τ = (a_qq - a_pp) / (2 |a_pq|), taking s = t·c·e^{-iφ} with t the
/// smaller-magnitude root of t² - 2τt - 1 = 0 makes the transformed (p, q)
/// entry vanish exactly.
fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = h.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let tau = (h.get(q, q).re - h.get(p, p).re) / (2.0 * mag);
    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
    let t = -sign / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = phase.conj() * (t * c);

    let n = h.rows();
    // h ← h · R
    for k in 0..n {
        let x = h.get(k, p);
        let y = h.get(k, q);
        h.set(k, p, c * x + s * y);
        h.set(k, q, -s.conj() * x + c * y);
    }
    // h ← R† · h
    for k in 0..n {
        let x = h.get(p, k);
        let y = h.get(q, k);
        h.set(p, k, c * x + s.conj() * y);
        h.set(q, k, -s * x + c * y);
    }
    // The pivot is zero analytically; scrub the roundoff remainder and keep
    // the diagonal exactly real so later sweeps see clean Hermitian data.
    h.set(p, q, Complex64::new(0.0, 0.0));
    h.set(q, p, Complex64::new(0.0, 0.0));
    let dpp = h.get(p, p).re;
    let dqq = h.get(q, q).re;
    h.set(p, p, Complex64::new(dpp, 0.0));
    h.set(q, q, Complex64::new(dqq, 0.0));
    // v ← v · R
    for k in 0..n {
        let x = v.get(k, p);
        let y = v.get(k, q);
        v.set(k, p, c * x + s * y);
        v.set(k, q, -s.conj() * x + c * y);
    }
}

fn sorted_decomposition(h: &ComplexMatrix, v: ComplexMatrix) -> EigenDecomposition {
    let n = h.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| h.get(a, a).re.total_cmp(&h.get(b, b).re));
    let eigenvalues = order.iter().map(|&i| h.get(i, i).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Result of [`ComplexMatrix::hermitian_eig`]: eigenvalues ascending,
/// eigenvector `k` in column `k`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Column `k` as a vector.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// Rebuilds V f(Λ) V†. With the identity function this reconstructs the
    /// original matrix; with `sqrt` it gives the PSD square root, etc.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v.get(i, k) * f(self.eigenvalues[k]) * v.get(j, k).conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| l)
    }
}

// Wire format: {"rows": n, "cols": m, "data": [[re, im], ...]} row-major.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<(f64, f64)>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| (z.re, z.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        let data = wire
            .data
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(wire.rows, wire.cols, data).map_err(D::Error::custom)
    }
}
