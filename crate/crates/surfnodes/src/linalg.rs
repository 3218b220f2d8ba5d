//! Dense row-major matrices and the few decompositions the crate needs.
//!
//! Matrices here are tiny (Jacobians are `d × d_Ξ` with `d ≤ 3` for the
//! gallery, Hessians `d_Ξ × d_Ξ`), so a simple cyclic Jacobi eigensolver is
//! both adequate and easy to validate. Numerical contract: symmetric
//! eigenvalues to relative accuracy 1e-10 or better.

use crate::real::{cast, Real};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Real> Mat<R> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    /// Builds a matrix from a row-major slice of `rows * cols` values.
    pub fn from_row_major(rows: usize, cols: usize, values: &[R]) -> Self {
        assert_eq!(values.len(), rows * cols, "value count must match the shape");
        Mat { rows, cols, data: values.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Raw row-major storage.
    pub fn as_slice(&self) -> &[R] {
        &self.data
    }

    /// Mutable raw storage (row-major). Used by writer-style evaluators.
    pub fn as_mut_slice(&mut self) -> &mut [R] {
        &mut self.data
    }

    /// Sets every entry to zero.
    pub fn fill_zero(&mut self) {
        for v in &mut self.data {
            *v = R::zero();
        }
    }

    /// `out = self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[R], out: &mut [R]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = R::zero();
            for (a, b) in row.iter().zip(x) {
                acc += *a * *b;
            }
            out[r] = acc;
        }
    }

    /// Gram matrix `selfᵀ · self` (`cols × cols`, symmetric).
    pub fn gram(&self) -> Mat<R> {
        let n = self.cols;
        let mut g = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = R::zero();
                for r in 0..self.rows {
                    acc += self[(r, i)] * self[(r, j)];
                }
                g[(i, j)] = acc;
                g[(j, i)] = acc;
            }
        }
        g
    }

    /// Quadratic form `xᵀ · self · x` for a square matrix.
    pub fn quadratic_form(&self, x: &[R]) -> R {
        assert_eq!(self.rows, self.cols);
        assert_eq!(x.len(), self.cols);
        let mut acc = R::zero();
        for i in 0..self.rows {
            let mut row = R::zero();
            for j in 0..self.cols {
                row += self[(i, j)] * x[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> R {
        self.data.iter().map(|v| *v * *v).sum::<R>().sqrt()
    }

    /// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations,
    /// unsorted. Input must be symmetric; the solver converges
    /// unconditionally for symmetric matrices.
    pub fn sym_eigenvalues(&self) -> Vec<R> {
        assert_eq!(self.rows, self.cols, "eigenvalues need a square matrix");
        let n = self.rows;
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![self[(0, 0)]];
        }
        let mut a = self.clone();
        let tol = cast::<R>(1e-30) * a.frobenius().max(R::one());
        // Each sweep zeroes every off-diagonal pair once; quadratic
        // convergence makes a handful of sweeps plenty for n ≤ 4.
        for _ in 0..64 {
            let mut off = R::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq == R::zero() {
                        continue;
                    }
                    let app = a[(p, p)];
                    let aqq = a[(q, q)];
                    let theta = (aqq - app) / (cast::<R>(2.0) * apq);
                    // Stable tangent of the rotation angle.
                    let t = {
                        let sign = if theta >= R::zero() { R::one() } else { -R::one() };
                        sign / (theta.abs() + (theta * theta + R::one()).sqrt())
                    };
                    let c = R::one() / (t * t + R::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[(i, i)]).collect()
    }

    /// Largest singular value of a symmetric matrix (= max |eigenvalue|).
    pub fn sym_spectral_norm(&self) -> R {
        self.sym_eigenvalues()
            .into_iter()
            .map(|l| l.abs())
            .fold(R::zero(), R::max)
    }
}

impl<R: Real> std::ops::Index<(usize, usize)> for Mat<R> {
    type Output = R;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &R {
        &self.data[r * self.cols + c]
    }
}

impl<R: Real> std::ops::IndexMut<(usize, usize)> for Mat<R> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut R {
        &mut self.data[r * self.cols + c]
    }
}

/// Smallest singular value of a (generally rectangular, full-height) matrix,
/// computed as the square root of the smallest eigenvalue of its Gram matrix.
pub fn min_singular_value<R: Real>(m: &Mat<R>) -> R {
    m.gram()
        .sym_eigenvalues()
        .into_iter()
        .fold(R::infinity(), R::min)
        .max(R::zero())
        .sqrt()
}

/// Largest singular value, likewise via the Gram matrix.
pub fn max_singular_value<R: Real>(m: &Mat<R>) -> R {
    m.gram()
        .sym_eigenvalues()
        .into_iter()
        .fold(R::zero(), R::max)
        .max(R::zero())
        .sqrt()
}
