//! Dense real matrices and the small amount of symmetric eigen-analysis the
//! erasure computations need.
//!
//! Everything here targets orders up to a few dozen. Eigenvalues come from
//! cyclic Jacobi rotations, which are slow asymptotically but deterministic
//! and accurate to a few ulps of the spectral radius at these sizes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Maximum number of Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius mass falls below this fraction of `‖A‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
/// Eigenvalues below `-PSD_SLACK` mark a matrix as not positive semidefinite.
pub const PSD_SLACK: f64 = 1e-8;
/// Smallest eigenvalue accepted by [`spd_inverse_sqrt`].
pub const SINGULAR_FLOOR: f64 = 1e-10;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity of the given order.
    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, order);
        for i in 0..order {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Wraps row-major data; fails if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Raw row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · self`, always symmetric.
    pub fn gram_of_columns(&self) -> SymmetricMatrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..self.cols {
                for j in i..self.cols {
                    g[(i, j)] += row[i] * row[j];
                }
            }
        }
        for i in 0..self.cols {
            for j in 0..i {
                g[(i, j)] = g[(j, i)];
            }
        }
        SymmetricMatrix(g)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Spectral norm (largest singular value), computed as the square root
    /// of the largest eigenvalue of `selfᵀ · self`.
    pub fn spectral_norm(&self) -> Result<f64> {
        let gram = self.gram_of_columns();
        let top = symmetric_eigenvalues(&gram)?.last().copied().unwrap_or(0.0);
        Ok(libm::sqrt(top.max(0.0)))
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix with exact logical symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(Matrix);

impl SymmetricMatrix {
    /// Symmetrizes `(A + Aᵀ)/2`; fails on non-square input.
    pub fn new(a: Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::LengthMismatch {
                expected: a.rows,
                found: a.cols,
            });
        }
        let n = a.rows;
        let mut s = a;
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        Ok(SymmetricMatrix(s))
    }

    pub fn identity(order: usize) -> Self {
        SymmetricMatrix(Matrix::identity(order))
    }

    pub fn order(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// `self - c·I`.
    pub fn shifted(&self, c: f64) -> SymmetricMatrix {
        let mut m = self.0.clone();
        for i in 0..m.rows {
            m[(i, i)] -= c;
        }
        SymmetricMatrix(m)
    }
}

impl core::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Eigenvalues ascending, with matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    /// Rebuilds `V · diag(g(λ)) · Vᵀ`.
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let n = self.values.len();
        let weights: Vec<f64> = self.values.iter().map(|&l| g(l)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    acc += self.vectors[(i, k)] * w * self.vectors[(j, k)];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc;
            }
        }
        SymmetricMatrix(out)
    }
}

/// Cyclic Jacobi eigen-decomposition.
pub fn symmetric_eigen(a: &SymmetricMatrix) -> Result<SymmetricEigen> {
    let n = a.order();
    let mut w = a.0.clone();
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * w.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = if libm::fabs(theta) > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                rotate(&mut w, &mut v, p, q, c, s);
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].total_cmp(&w[(j, j)]));
    let values = order.iter().map(|&i| w[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

fn off_diagonal_norm(w: &Matrix) -> f64 {
    let n = w.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += w[(i, j)] * w[(i, j)];
            }
        }
    }
    libm::sqrt(acc)
}

// W <- Jᵀ W J and V <- V J for the rotation J in the (p, q) plane.
fn rotate(w: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = w.rows;
    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = c * wkp - s * wkq;
        w[(k, q)] = s * wkp + c * wkq;
    }
    for k in 0..n {
        let wpk = w[(p, k)];
        let wqk = w[(q, k)];
        w[(p, k)] = c * wpk - s * wqk;
        w[(q, k)] = s * wpk + c * wqk;
    }
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(a)?.values)
}

/// Largest eigenvalue of a positive semidefinite matrix, i.e. its operator norm.
pub fn psd_operator_norm(a: &SymmetricMatrix) -> Result<f64> {
    let values = symmetric_eigenvalues(a)?;
    let (Some(&lo), Some(&hi)) = (values.first(), values.last()) else {
        return Ok(0.0);
    };
    if lo < -PSD_SLACK {
        return Err(Error::NotPsd { min_eigenvalue: lo });
    }
    Ok(hi.max(0.0))
}

/// Operator norm of the 2×2 Gram matrix `[[a, c], [c, b]]`:
/// `½(a + b + √((a − b)² + 4c²))`.
pub fn two_by_two_gram_norm(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0 && c.is_finite() && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(
            "squared norms must be finite and non-negative",
        ));
    }
    if c * c > a * b * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::InvalidArgument(
            "inner product violates Cauchy-Schwarz",
        ));
    }
    Ok(0.5 * (a + b + libm::hypot(a - b, 2.0 * c)))
}

/// `A^{-1/2}` for a symmetric positive definite `A`.
pub fn spd_inverse_sqrt(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let eig = symmetric_eigen(a)?;
    let lo = eig.values.first().copied().unwrap_or(0.0);
    if lo <= SINGULAR_FLOOR {
        return Err(Error::NearSingular { min_eigenvalue: lo });
    }
    Ok(eig.map_spectrum(|l| 1.0 / libm::sqrt(l)))
}

/// `A^{1/2}` for a positive semidefinite `A`; tiny negative eigenvalues are clamped.
pub fn psd_sqrt(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let eig = symmetric_eigen(a)?;
    if let Some(&lo) = eig.values.first() {
        if lo < -PSD_SLACK {
            return Err(Error::NotPsd { min_eigenvalue: lo });
        }
    }
    Ok(eig.map_spectrum(|l| libm::sqrt(l.max(0.0))))
}
