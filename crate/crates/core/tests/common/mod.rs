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


//! Dense reference constructions used as independent oracles by the
//! integration tests. Nothing here calls the library's decompositions.

#![allow(dead_code)]

use qsvd_core::matrix::{ComplexMatrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `exp(M)` by Taylor series with scaling and squaring.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let norm1 = (0..n)
        .map(|k| (0..n).map(|j| m[(j, k)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm1 * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = m.scale_real(scale);
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &x).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i t H)`.
pub fn expm_herm(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    expm(&h.scale(c(0.0, -t)))
}

/// Explicit `N²×N²` matrix `Σ A_jk |k⟩⟨j| ⊗ |j⟩⟨k|`: column `(j,k)` holds
/// `A_jk` at row `(k,j)`.
pub fn dense_swap(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut s = ComplexMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            s[(k * n + j, j * n + k)] = a[(j, k)];
        }
    }
    s
}

/// Trace over the first tensor factor of an `(d1·d2)²` operator.
pub fn trace_first(rho: &ComplexMatrix, d1: usize, d2: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d2, d2, |x, y| (0..d1).map(|a| rho[(a * d2 + x, a * d2 + y)]).sum())
}

/// `tr₁{e^{-iSΔt} (|u⟩⟨u| ⊗ σ) e^{iSΔt}}` with full dense matrices.
pub fn dense_channel_step(a: &ComplexMatrix, sigma: &ComplexMatrix, dt: f64) -> ComplexMatrix {
    let n = a.rows();
    let uniform = ComplexMatrix::from_fn(n, n, |_, _| c(1.0 / n as f64, 0.0));
    let joint = kron_dense(&uniform, sigma);
    let u = expm_herm(&dense_swap(a), dt);
    trace_first(&(&(&u * &joint) * &u.adjoint()), n, n)
}

/// `e^{-iAt/N} σ e^{iAt/N}` through the Taylor exponential.
pub fn dense_exact_evolution(a: &ComplexMatrix, sigma: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let u = expm_herm(a, t / a.rows() as f64);
    &(&u * sigma) * &u.adjoint()
}

pub fn kron_dense(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |r, s| a[(r / rb, s / cb)] * b[(r % rb, s % cb)])
}

/// `diag(I, U)`: control qubit is the most significant factor.
pub fn controlled(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    ComplexMatrix::from_fn(2 * d, 2 * d, |r, s| match (r < d, s < d) {
        (true, true) => {
            if r == s {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }
        (false, false) => u[(r - d, s - d)],
        _ => c(0.0, 0.0),
    })
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi on the
/// real `2n×2n` embedding `[[Re, -Im], [Im, Re]]` (each eigenvalue doubled).
pub fn jacobi_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let d = 2 * n;
    let mut m = vec![0.0; d * d];
    for j in 0..n {
        for k in 0..n {
            let z = h[(j, k)];
            m[j * d + k] = z.re;
            m[(j + n) * d + k + n] = z.re;
            m[j * d + k + n] = -z.im;
            m[(j + n) * d + k] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|p| (0..d).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m[p * d + q] * m[p * d + q])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * d + q] - m[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..d {
                    let akp = m[k * d + p];
                    let akq = m[k * d + q];
                    m[k * d + p] = cs * akp - sn * akq;
                    m[k * d + q] = sn * akp + cs * akq;
                }
                for k in 0..d {
                    let apk = m[p * d + k];
                    let aqk = m[q * d + k];
                    m[p * d + k] = cs * apk - sn * aqk;
                    m[q * d + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut all: Vec<f64> = (0..d).map(|k| m[k * d + k]).collect();
    all.sort_by(f64::total_cmp);
    all.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Singular values, descending, read off the Jacobi spectrum of the block
/// matrix `[[0, A], [A†, 0]]`.
pub fn dense_singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let (m, n) = (a.rows(), a.cols());
    let block = ComplexMatrix::from_fn(m + n, m + n, |r, s| match (r < m, s < m) {
        (true, false) => a[(r, s - m)],
        (false, true) => a[(s, r - m)].conj(),
        _ => c(0.0, 0.0),
    });
    let mut s = jacobi_eigenvalues(&block);
    s.reverse();
    s.truncate(m.min(n));
    s.iter().map(|x| x.max(0.0)).collect()
}

/// Nuclear norm of a Hermitian matrix from its Jacobi spectrum.
pub fn hermitian_nuclear(h: &ComplexMatrix) -> f64 {
    jacobi_eigenvalues(h).iter().map(|l| l.abs()).sum()
}

pub fn max_sorted_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
