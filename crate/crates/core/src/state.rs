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

//! Pure states and density operators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{exact_eig, ComplexMatrix, HermitianMatrix, C64, DECOMPOSITION_TOL, EXACT_TOL, ONE, ZERO};

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Accepts amplitudes whose 2-norm is 1 within [`EXACT_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state".into()));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite vector".into()));
        }
        for z in amplitudes.iter_mut() {
            *z /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Self { amplitudes }
    }

    /// `(1/√N) Σ_k |k⟩`.
    pub fn uniform(dim: usize) -> Self {
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![a; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
    }
}

pub(crate) fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), trace (1 ± 1e-12) and positivity
    /// (eigenvalues ≥ −1e-10).
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let d = Self(m);
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if !m.is_square() {
            return Err(Error::NotSquare(m.rows(), m.cols()));
        }
        let dev = m.hermitian_deviation();
        if dev > EXACT_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -DECOMPOSITION_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.0.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues of the Hermitian part, descending by magnitude.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = HermitianMatrix::hermitian_part(&self.0).expect("square");
        exact_eig(&h).eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `‖self − other‖_*`.
    pub fn trace_distance_nuclear(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).nuclear_norm()
    }
}
