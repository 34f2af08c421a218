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

//! The modified swap operator `S_A = Σ A_jk |k⟩⟨j| ⊗ |j⟩⟨k|` on the doubled
//! space, kept implicit.
//!
//! Basis state `|j,k⟩` lives at index `j*N + k`. `S_A` maps it to
//! `A_jk |k,j⟩`, so the space splits into invariant 1-dim blocks `{|j,j⟩}`
//! and 2-dim blocks `{|j,k⟩, |k,j⟩}` that are exponentiated in closed form.

use log::warn;

use crate::error::{Error, Result};
use crate::matrix::{C64, EXACT_TOL, ZERO};
use crate::oracle::MatrixOracle;
use crate::state::l2_norm;

#[derive(Debug, Clone, Copy)]
pub struct ModifiedSwapOperator<'a> {
    oracle: &'a MatrixOracle,
}

/// Eigenvalues of `S_A`: every diagonal element once, and `±|A_jk|` for
/// each `j < k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapSpectrum {
    pub diagonal_values: Vec<f64>,
    pub pair_values: Vec<f64>,
}

impl SwapSpectrum {
    /// All `N²` eigenvalues, ascending.
    pub fn values(&self) -> Vec<f64> {
        let mut all = self.diagonal_values.clone();
        for &p in &self.pair_values {
            all.push(p);
            all.push(-p);
        }
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn max_abs(&self) -> f64 {
        self.diagonal_values
            .iter()
            .chain(&self.pair_values)
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl<'a> ModifiedSwapOperator<'a> {
    pub fn new(oracle: &'a MatrixOracle) -> Result<Self> {
        if !oracle.is_square() {
            return Err(Error::NotSquare(oracle.rows(), oracle.cols()));
        }
        if !oracle.is_hermitian() {
            return Err(Error::NotHermitian(oracle.reference_matrix().hermitian_deviation()));
        }
        Ok(Self { oracle })
    }

    pub fn dim(&self) -> usize {
        self.oracle.rows()
    }

    pub fn oracle(&self) -> &'a MatrixOracle {
        self.oracle
    }

    /// Reads every element once through `sparse_query` and returns the
    /// Hermitian-symmetrized values `h[j*N+k] = (A_jk + conj A_kj)/2`.
    fn read_elements(&self) -> Result<Vec<C64>> {
        let n = self.dim();
        let mut raw = vec![ZERO; n * n];
        for j in 0..n {
            for k in 0..n {
                raw[j * n + k] = self.oracle.sparse_query((j, k))?.value;
            }
        }
        let mut h = raw.clone();
        for j in 0..n {
            for k in 0..n {
                h[j * n + k] = (raw[j * n + k] + raw[k * n + j].conj()) * 0.5;
            }
        }
        Ok(h)
    }

    /// `e^{-i S_A t}` in block form. Costs `N²` oracle queries.
    pub fn propagator(&self, t: f64) -> Result<SwapPropagator> {
        let n = self.dim();
        let h = self.read_elements()?;
        let mut stay = vec![ZERO; n * n];
        let mut cross = vec![ZERO; n * n];
        for j in 0..n {
            for k in 0..n {
                let p = j * n + k;
                let a = h[p];
                if j == k {
                    stay[p] = C64::from_polar(1.0, -a.re * t);
                    continue;
                }
                let mag = a.norm();
                stay[p] = C64::new((mag * t).cos(), 0.0);
                if mag > 0.0 {
                    cross[p] = C64::new(0.0, -(mag * t).sin()) * (a / mag);
                }
            }
        }
        Ok(SwapPropagator { n, stay, cross })
    }

    /// `e^{-i S_A t} ψ` for a state on the `N²`-dim doubled space.
    pub fn apply_exp(&self, t: f64, psi: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        check_len(psi.len(), n * n)?;
        warn_if_unnormalized(psi);
        let mut out = psi.to_vec();
        self.propagator(t)?.apply(&mut out);
        Ok(out)
    }

    /// `e^{-i |1⟩⟨1| ⊗ S_A t} ψ` with the control qubit as the leading factor.
    pub fn controlled_apply_exp(&self, t: f64, psi: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        check_len(psi.len(), 2 * n * n)?;
        warn_if_unnormalized(psi);
        let mut out = psi.to_vec();
        self.propagator(t)?.apply_controlled(&mut out);
        Ok(out)
    }

    pub fn spectrum(&self) -> Result<SwapSpectrum> {
        let n = self.dim();
        let h = self.read_elements()?;
        let diagonal_values = (0..n).map(|j| h[j * n + j].re).collect();
        let mut pair_values = Vec::with_capacity(n * (n - 1) / 2);
        for j in 0..n {
            for k in j + 1..n {
                pair_values.push(h[j * n + k].norm());
            }
        }
        Ok(SwapSpectrum {
            diagonal_values,
            pair_values,
        })
    }

    /// Diagonal of `(S_A)² = Σ |A_jk|² |k⟩⟨k| ⊗ |j⟩⟨j|`, indexed like the
    /// doubled space.
    pub fn square_diagonal(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let h = self.read_elements()?;
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                out[k * n + j] = h[j * n + k].norm_sqr();
            }
        }
        Ok(out)
    }
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn warn_if_unnormalized(psi: &[C64]) {
    let norm = l2_norm(psi);
    if (norm - 1.0).abs() > EXACT_TOL {
        warn!("input state has norm {norm}, applying exponential anyway");
    }
}

/// Closed-form `e^{-i S_A t}` for one fixed `t`.
///
/// For `p = |j,k⟩`, `stay[p] = ⟨p|U|p⟩` and `cross[p] = ⟨k,j|U|p⟩`
/// (zero on the diagonal `j = k`).
#[derive(Debug, Clone)]
pub struct SwapPropagator {
    n: usize,
    stay: Vec<C64>,
    cross: Vec<C64>,
}

impl SwapPropagator {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn stay(&self, j: usize, k: usize) -> C64 {
        self.stay[j * self.n + k]
    }

    pub fn cross(&self, j: usize, k: usize) -> C64 {
        self.cross[j * self.n + k]
    }

    /// In-place on a length-`N²` vector.
    pub fn apply(&self, psi: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(psi.len(), n * n);
        for j in 0..n {
            psi[j * n + j] *= self.stay[j * n + j];
            for k in j + 1..n {
                let p = j * n + k;
                let q = k * n + j;
                let (xp, xq) = (psi[p], psi[q]);
                psi[p] = self.stay[p] * xp + self.cross[q] * xq;
                psi[q] = self.stay[q] * xq + self.cross[p] * xp;
            }
        }
    }

    /// In-place on a length-`2N²` vector; the upper half is the control-1 block.
    pub fn apply_controlled(&self, psi: &mut [C64]) {
        let half = self.n * self.n;
        self.apply(&mut psi[half..]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ComplexMatrix, ONE};

    fn oracle(rows: &[Vec<C64>]) -> MatrixOracle {
        MatrixOracle::from_matrix(ComplexMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn all_ones_quarter_period_is_swap() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::from_fn(3, 3, |_, _| ONE));
        let op = ModifiedSwapOperator::new(&o).unwrap();
        let mut psi = vec![ZERO; 9];
        psi[1] = ONE;
        let out = op.apply_exp(std::f64::consts::FRAC_PI_2, &psi).unwrap();
        assert!((out[3] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(out[1].norm() < 1e-15);
    }

    #[test]
    fn zero_matrix_is_identity() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::zeros(2, 2));
        let op = ModifiedSwapOperator::new(&o).unwrap();
        let psi = vec![C64::new(0.5, 0.0); 4];
        assert_eq!(op.apply_exp(1.3, &psi).unwrap(), psi);
    }

    #[test]
    fn spectra_of_small_cases() {
        let d = oracle(&[vec![C64::new(2.0, 0.0), ZERO], vec![ZERO, C64::new(-1.0, 0.0)]]);
        let s = ModifiedSwapOperator::new(&d).unwrap().spectrum().unwrap();
        assert_eq!(s.values(), vec![-1.0, 0.0, 0.0, 2.0]);
        let ones = MatrixOracle::from_matrix(ComplexMatrix::from_fn(2, 2, |_, _| ONE));
        let s = ModifiedSwapOperator::new(&ones).unwrap().spectrum().unwrap();
        assert_eq!(s.values(), vec![-1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn square_diagonal_of_identity() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::identity(2));
        let d = ModifiedSwapOperator::new(&o).unwrap().square_diagonal().unwrap();
        assert_eq!(d, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn controlled_leaves_control_zero_alone() {
        let o = oracle(&[vec![ONE, C64::new(0.3, 0.4)], vec![C64::new(0.3, -0.4), -ONE]]);
        let op = ModifiedSwapOperator::new(&o).unwrap();
        let mut psi = vec![ZERO; 8];
        psi[2] = ONE;
        assert_eq!(op.controlled_apply_exp(0.9, &psi).unwrap(), psi);
        let mut lifted = vec![ZERO; 8];
        lifted[6] = ONE;
        let out = op.controlled_apply_exp(0.9, &lifted).unwrap();
        let direct = op.apply_exp(0.9, &psi[..4]).unwrap();
        assert_eq!(&out[4..], &direct[..]);
    }

    #[test]
    fn propagator_costs_n_squared_queries() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::identity(4));
        ModifiedSwapOperator::new(&o).unwrap().propagator(0.1).unwrap();
        assert_eq!(o.report_calls(), 16);
    }

    #[test]
    fn rejects_rectangular_and_non_hermitian() {
        let r = MatrixOracle::from_matrix(ComplexMatrix::zeros(2, 3));
        assert!(ModifiedSwapOperator::new(&r).is_err());
        let nh = oracle(&[vec![ZERO, ONE], vec![ZERO, ZERO]]);
        assert!(matches!(ModifiedSwapOperator::new(&nh), Err(Error::NotHermitian(_))));
    }
}
