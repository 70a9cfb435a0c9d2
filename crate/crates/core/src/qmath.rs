//! Dense complex linear algebra and quantum-state primitives.
//!
//! Everything here is sized for the problem at hand: single-qubit states,
//! the three-qubit dilation space, and the 4x4 objects in between. Matrices
//! are row-major `Vec<C64>`, eigenproblems go through a self-contained cyclic
//! Jacobi routine, and density matrices are validated on construction.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Validity tolerance for state checks (Hermiticity, trace, positivity).
pub const VALIDITY_TOL: f64 = 1e-10;
/// Tolerance for algebraic identities between exact routes.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Panics if the length does not
    /// match `rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![C64::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    /// Real diagonal matrix.
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::ZERO
            }
        })
    }

    /// Outer product |ket><bra| of two complex vectors.
    pub fn outer(ket: &[C64], bra: &[C64]) -> Self {
        Self::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj())
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
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Tr(A B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        assert_eq!(self.rows, other.cols, "product must be square for a trace");
        let mut acc = C64::ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::ZERO {
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

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Kronecker product: block (i, j) of the result equals `self[i,j] * other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..=i {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let product = self.adjoint().matmul(self);
        product.max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// `(M + M†)/2`.
    pub fn symmetrize(&self) -> Self {
        assert!(self.is_square(), "symmetrize requires a square matrix");
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + adj.get(i, j)) * 0.5
        })
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(other)
    }
}

/// Eigendecomposition of a Hermitian matrix: `a = vectors * diag(values) * vectors†`.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose k-th column is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Sweeps the strict upper triangle in row-major order with a fixed schedule,
/// which makes the decomposition deterministic. Sized for dims <= 8; there is
/// no pivoting and no blocking.
pub fn eigh(m: &ComplexMatrix) -> Eigh {
    assert!(m.is_square(), "eigh requires a square matrix");
    let n = m.rows();
    let mut a = m.symmetrize();
    let mut q = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(1.0);
    let off_tol = 1e-15 * scale;
    const MAX_SWEEPS: usize = 64;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off += a.get(p, r).norm_sqr();
            }
        }
        if off.sqrt() <= off_tol {
            break;
        }

        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a.get(p, r);
                let mag = apr.norm();
                if mag <= off_tol / (n as f64) {
                    continue;
                }
                // Unitary 2x2 rotation annihilating a[p][r]. With
                // a[p][r] = mag * phase, the rotation acting on columns is
                //   col_p' =  c*col_p + s*conj(phase)*col_r
                //   col_r' = -s*phase*col_p + c*col_r
                let phase = apr / mag;
                let app = a.get(p, p).re;
                let arr = a.get(r, r).re;
                // smaller root of t^2 - 2*tau*t - 1 = 0
                let tau = (arr - app) / (2.0 * mag);
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akr = a.get(k, r);
                    a.set(k, p, akp * c + akr * s * phase.conj());
                    a.set(k, r, akr * c - akp * s * phase);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let ark = a.get(r, k);
                    a.set(p, k, apk * c + ark * s * phase);
                    a.set(r, k, ark * c - apk * s * phase.conj());
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, qkp * c + qkr * s * phase.conj());
                    q.set(k, r, qkr * c - qkp * s * phase);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| q.get(i, order[j]));
    Eigh { values, vectors }
}

/// Euclidean projection of a real vector onto the probability simplex.
fn project_to_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("values are finite"));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        prefix += v;
        let candidate = (prefix - 1.0) / (j + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    values.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Hermitian, trace-one, positive-semidefinite matrix of dimension 2 or 8.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a matrix. Checks dimension, Hermiticity, unit
    /// trace, and positivity, each within [`VALIDITY_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, VALIDITY_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        let dim = matrix.rows();
        if dim != 2 && dim != 8 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !matrix.is_hermitian(tol) {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        let min_eig = eigh(&matrix).values[0];
        if min_eig < -tol {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min_eig} is negative"
            )));
        }
        Ok(Self { matrix })
    }

    /// Computational basis state |k><k|.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {k} out of range for dim {dim}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m.set(k, k, C64::ONE);
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)))
    }

    /// Normalized pure state |psi><psi| from amplitudes.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm_sq: f64 = ket.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let outer = ComplexMatrix::outer(ket, ket).scale(C64::new(1.0 / norm_sq, 0.0));
        Self::new(outer)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Bloch components (r1, r2, r3) of a single-qubit state.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: self.dim(),
            });
        }
        let m = &self.matrix;
        BlochVector::new(
            2.0 * m.get(0, 1).re,
            -2.0 * m.get(0, 1).im,
            (m.get(0, 0) - m.get(1, 1)).re,
        )
    }

    /// Single-qubit state `(I + r . sigma)/2`.
    pub fn from_bloch(b: &BlochVector) -> Result<Self> {
        let half = 0.5;
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(half * (1.0 + b.r3), 0.0),
                C64::new(half * b.r1, -half * b.r2),
                C64::new(half * b.r1, half * b.r2),
                C64::new(half * (1.0 - b.r3), 0.0),
            ],
        );
        Self::new(m)
    }
}

/// Bloch-sphere coordinates of a single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl BlochVector {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let norm_sq = r1 * r1 + r2 * r2 + r3 * r3;
        if norm_sq > 1.0 + VALIDITY_TOL {
            return Err(Error::InvalidState(format!(
                "Bloch vector norm^2 = {norm_sq} exceeds 1"
            )));
        }
        Ok(Self { r1, r2, r3 })
    }

    pub fn norm(&self) -> f64 {
        (self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3).sqrt()
    }
}

/// Traces out the two ancilla qubits of a three-qubit state.
///
/// Basis ordering is system (x) ancilla1 (x) ancilla2, i.e. index
/// `b = 4s + 2a1 + a2` with the system as the most significant bit, so
/// `rho_s[i,j] = sum_k rho[4i + k, 4j + k]`.
pub fn partial_trace_ancilla(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            actual: rho.dim(),
        });
    }
    let m = rho.matrix();
    let reduced = ComplexMatrix::from_fn(2, 2, |i, j| {
        (0..4).map(|k| m.get(4 * i + k, 4 * j + k)).sum()
    });
    DensityMatrix::new(reduced)
}

/// Normalized overlap between two matrices:
/// `|Tr(a b†)| / sqrt(Tr(a† a) Tr(b† b))`.
///
/// Symmetric in its arguments and invariant under positive rescaling of
/// either; equals 1 exactly when the arguments are proportional.
pub fn fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.rows(),
        });
    }
    let na = a.trace_product(&a.adjoint()).re;
    let nb = b.trace_product(&b.adjoint()).re;
    if na <= 0.0 || nb <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let overlap = a.trace_product(&b.adjoint()).norm();
    Ok((overlap / (na * nb).sqrt()).clamp(0.0, 1.0))
}

/// Trace distance `1/2 * sum |eig(rho1 - rho2)|`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            actual: rho2.dim(),
        });
    }
    let diff = rho1.matrix() - rho2.matrix();
    let eig = eigh(&diff);
    Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
}

/// Closest density matrix in Frobenius norm.
///
/// Symmetrizes, eigendecomposes, projects the spectrum onto the probability
/// simplex, and reassembles. Idempotent on valid density matrices.
pub fn nearest_density_matrix(h: &ComplexMatrix) -> Result<DensityMatrix> {
    if !h.is_square() {
        return Err(Error::InvalidState("matrix is not square".into()));
    }
    let sym = h.symmetrize();
    let Eigh { values, vectors } = eigh(&sym);
    let projected = project_to_simplex(&values);
    let diag = ComplexMatrix::diagonal(&projected);
    let out = vectors.matmul(&diag).matmul(&vectors.adjoint());
    // Rounding in the reassembly can leave the result a hair outside the
    // strict validity tolerance; re-symmetrizing keeps the constructor happy.
    DensityMatrix::with_tolerance(out.symmetrize(), VALIDITY_TOL * 10.0)
}
