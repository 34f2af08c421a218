// Copyright 2026 The qsvd Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense complex matrices, norms and the exact classical baselines
//! (eigendecomposition, SVD, unitary evolution) every simulated result is
//! checked against.
//!
//! Storage is row-major. Eigendecompositions and QR go through `nalgebra`;
//! everything on the simulation hot paths works on the raw row-major buffer
//! instead.

use std::ops::{Add, Deref, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::state::{l2_norm, DensityMatrix};

pub type C64 = Complex64;

/// Elementwise tolerance for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for decomposition residuals.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes,
    /// length mismatches and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix shape must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(i) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(i / cols, i % cols));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Real matrix from row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |j, k| if j == k { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for k in 0..cols {
                data.push(f(j, k));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |j, k| if j == k { values[j] } else { ZERO })
    }

    /// `u v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |j, k| u[j] * v[k].conj())
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, j: usize) -> &[C64] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.rows).map(|j| self[(j, k)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |j, k| self[(k, j)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |j, k| self[(k, j)])
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Submatrix of shape `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(rows, cols, |j, k| self[(r0 + j, c0 + k)])
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|j| self.row(j).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = vec![ZERO; self.rows * other.cols];
        for j in 0..self.rows {
            let dst = &mut out[j * other.cols..(j + 1) * other.cols];
            for (l, a) in self.row(j).iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(other.row(l)) {
                    *d += a * b;
                }
            }
        }
        Ok(Self::from_raw(self.rows, other.cols, out))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|j| self[(j, j)]).sum()
    }

    /// `max_{j,k} |A_jk|`.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s = svd(self).singular_values;
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Sum of singular values (trace norm).
    pub fn nuclear_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    /// Largest `|A_jk - conj(A_kj)|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for j in 0..self.rows {
            for k in j..self.cols {
                worst = worst.max((self[(j, k)] - self[(k, j)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |j, k| m[(j, k)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (j, k): (usize, usize)) -> &C64 {
        &self.data[j * self.cols + k]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.cols + k]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix::from_raw(self.rows, self.cols, data)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix::from_raw(self.rows, self.cols, data)
    }
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |j, k| {
        a[(j / br, k / bc)] * b[(j % br, k % bc)]
    })
}

/// A square matrix with `A_jk = conj(A_kj)` to within [`EXACT_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare(m.rows, m.cols));
        }
        let dev = m.hermitian_deviation();
        if dev > EXACT_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self(m))
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare(m.rows, m.cols));
        }
        Ok(Self((m + &m.adjoint()).scale_real(0.5)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormReport {
    pub max_norm: f64,
    pub frobenius: f64,
    pub nuclear: f64,
}

pub fn norms(a: &ComplexMatrix) -> NormReport {
    NormReport {
        max_norm: a.max_norm(),
        frobenius: a.frobenius_norm(),
        nuclear: a.nuclear_norm(),
    }
}

/// Eigenpairs of a Hermitian matrix, ordered by descending `|λ|` (ties by
/// descending `λ`). Each eigenvector has its largest-magnitude component
/// real and positive.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ λ_j u_j u_j†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, u) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for j in 0..n {
                for k in 0..n {
                    out[(j, k)] += *lambda * u[j] * u[k].conj();
                }
            }
        }
        out
    }

    /// `Σ f(λ_j) u_j u_j†`.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, u) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            for j in 0..n {
                let uj = w * u[j];
                for k in 0..n {
                    out[(j, k)] += uj * u[k].conj();
                }
            }
        }
        out
    }

    /// Largest `‖A u_j − λ_j u_j‖ / max(‖A‖_F, 1)`.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        let scale = a.frobenius_norm().max(1.0);
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(lambda, u)| {
                let au = a.mul_vec(u);
                au.iter()
                    .zip(u)
                    .map(|(x, y)| (x - *lambda * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
                    / scale
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the Gram matrix of the eigenvectors from identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, u) in self.eigenvectors.iter().enumerate() {
            for (j, v) in self.eigenvectors.iter().enumerate() {
                let dot: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

/// Rotates `v` so its largest-magnitude component is real and positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    let Some(pivot) = v
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(_, z)| z)
    else {
        return;
    };
    if pivot.norm() == 0.0 {
        return;
    }
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

pub fn exact_eig(a: &HermitianMatrix) -> EigenDecomposition {
    let eig = nalgebra::SymmetricEigen::new(a.to_nalgebra());
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (li, lj) = (eig.eigenvalues[i], eig.eigenvalues[j]);
        lj.abs().total_cmp(&li.abs()).then(lj.total_cmp(&li))
    });
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| {
            let mut v: Vec<C64> = eig.eigenvectors.column(i).iter().copied().collect();
            fix_phase(&mut v);
            v
        })
        .collect();
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// `e^{-i A τ}` from the eigendecomposition.
pub fn evolution_operator(a: &HermitianMatrix, tau: f64) -> ComplexMatrix {
    exact_eig(a).apply_function(|lambda| C64::from_polar(1.0, -lambda * tau))
}

/// `e^{-i (A/N) t} σ e^{+i (A/N) t}`.
pub fn exact_evolution(a: &HermitianMatrix, t: f64, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    let n = a.dim();
    if sigma.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sigma.dim(),
        });
    }
    let u = evolution_operator(a, t / n as f64);
    let out = &(&u * sigma.as_matrix()) * &u.adjoint();
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Thin SVD `A = U Σ V†` with singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `M x k`, columns are left singular vectors.
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    /// `N x k`, columns are right singular vectors.
    pub v: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above `rel_tol * σ_max`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * top && s > 0.0)
            .count()
    }

    pub fn truncate(&self, r: usize) -> Svd {
        Svd {
            u: self.u.block(0, 0, self.u.rows(), r),
            singular_values: self.singular_values[..r].to_vec(),
            v: self.v.block(0, 0, self.v.rows(), r),
        }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let s = ComplexMatrix::diagonal(
            &self
                .singular_values
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect::<Vec<_>>(),
        );
        debug_assert_eq!(s.rows(), k);
        &(&self.u * &s) * &self.v.adjoint()
    }
}

/// One-sided Jacobi SVD. Accurate for rank-deficient complex input, where
/// bidiagonalization-based routines lose orthogonality of the vectors.
pub fn svd(a: &ComplexMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (m, n) = (a.rows(), a.cols());
    // Columns of `w` converge to `σ_j u_j`; `v` accumulates the rotations.
    let mut w: Vec<Vec<C64>> = (0..n).map(|k| a.column(k)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|k| (0..n).map(|j| if j == k { ONE } else { ZERO }).collect())
        .collect();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut w, &mut v] {
                    for i in 0..cols[p].len() {
                        let x = cols[p][i];
                        let y = cols[q][i] * phase.conj();
                        cols[p][i] = x * c - y * s;
                        cols[q][i] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigmas: Vec<f64> = w.iter().map(|col| l2_norm(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigmas[j].total_cmp(&sigmas[i]));
    let top = order.first().map_or(0.0, |&k| sigmas[k]);
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &k in &order {
        let candidate = if sigmas[k] > 1e-300 && sigmas[k] > 1e-14 * top {
            w[k].iter().map(|z| z / sigmas[k]).collect()
        } else {
            vec![ZERO; m]
        };
        left.push(candidate);
    }
    complete_orthonormal(&mut left, m);
    Svd {
        u: ComplexMatrix::from_fn(m, n, |r, c| left[c][r]),
        singular_values: order.iter().map(|&k| sigmas[k]).collect(),
        v: ComplexMatrix::from_fn(n, n, |r, c| v[order[c]][r]),
    }
}

/// Replaces zero columns by unit vectors orthogonal to all others.
fn complete_orthonormal(cols: &mut [Vec<C64>], dim: usize) {
    let mut basis = 0;
    for j in 0..cols.len() {
        if l2_norm(&cols[j]) > 0.5 {
            continue;
        }
        while basis < dim {
            let mut e = vec![ZERO; dim];
            e[basis] = ONE;
            basis += 1;
            for _ in 0..2 {
                for other in cols.iter().filter(|c| l2_norm(c) > 0.5) {
                    let proj: C64 = other.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                    for (ei, oi) in e.iter_mut().zip(other) {
                        *ei -= proj * oi;
                    }
                }
            }
            let norm = l2_norm(&e);
            if norm > 1e-6 {
                cols[j] = e.into_iter().map(|z| z / norm).collect();
                break;
            }
        }
    }
}

/// Standard complex Gaussian `(x + iy)/√2` with `x, y ~ N(0, 1)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Hermitian part of a complex Gaussian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&random_complex(n, n, rng)).expect("square by construction")
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = random_complex(n, n, rng).to_nalgebra().qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = ComplexMatrix::from_nalgebra(&q);
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for j in 0..n {
            out[(j, k)] *= phase;
        }
    }
    out
}

/// `A = U diag_r(λ) U†` with Haar `U` and `r` eigenvalues of Rademacher
/// sign and magnitude uniform in `[0.5, 1] · scale · n`.
pub fn random_low_rank<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    scale: f64,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    if n == 0 || r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "rank {r} must lie in 1..={n}"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    let u = haar_unitary(n, rng);
    let mut a = ComplexMatrix::zeros(n, n);
    for col in 0..r {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let magnitude = rng.random_range(0.5..=1.0);
        let lambda = sign * magnitude * scale * n as f64;
        let v = u.column(col);
        for j in 0..n {
            for k in 0..n {
                a[(j, k)] += lambda * v[j] * v[k].conj();
            }
        }
    }
    HermitianMatrix::hermitian_part(&a)
}

/// `A = Σ_j σ_j u_j v_j†` (`M x N`, rank `r`) with Haar singular vectors and
/// `σ_j` uniform in `[0.5, 1] · scale · √(MN)`, sorted descending.
pub fn random_low_rank_rect<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    r: usize,
    scale: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if m == 0 || n == 0 || r == 0 || r > m.min(n) {
        return Err(Error::InvalidArgument(format!(
            "rank {r} must lie in 1..={}",
            m.min(n)
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    let u = haar_unitary(m, rng);
    let v = haar_unitary(n, rng);
    let mut sigmas: Vec<f64> = (0..r)
        .map(|_| rng.random_range(0.5..=1.0) * scale * ((m * n) as f64).sqrt())
        .collect();
    sigmas.sort_by(|a, b| b.total_cmp(a));
    let mut a = ComplexMatrix::zeros(m, n);
    for (col, sigma) in sigmas.iter().enumerate() {
        for j in 0..m {
            for k in 0..n {
                a[(j, k)] += *sigma * u[(j, col)] * v[(k, col)].conj();
            }
        }
    }
    Ok(a)
}
