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

//! Nearest partial isometry `W = UV†` of a low-rank matrix, classically and
//! as a state map built from phase estimation on `Ã`.

use std::sync::Arc;

use log::warn;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{exact_eig, fix_phase, svd, ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::oracle::MatrixOracle;
use crate::qpe::{extract_peaks, sign_flip, EigenEstimate, QpeCircuit, QpeConfig};
use crate::state::{l2_norm, QuantumState};
use crate::svd::{embed, pair_branches, skew_warning};

/// `W = U V†` from the numerically nonzero part of the SVD.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialIsometry {
    w: ComplexMatrix,
    v: ComplexMatrix,
}

impl PartialIsometry {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn rank(&self) -> usize {
        self.v.cols()
    }

    /// Right singular vectors as columns (`N×r`).
    pub fn right_basis(&self) -> &ComplexMatrix {
        &self.v
    }

    /// `V V†`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.v * &self.v.adjoint()
    }

    /// `‖W†W − VV†‖_F`.
    pub fn gram_deviation(&self) -> f64 {
        (&(&self.w.adjoint() * &self.w) - &self.projector()).frobenius_norm()
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.w.mul_vec(x)
    }
}

pub fn classical_nearest_isometry(a: &ComplexMatrix) -> Result<PartialIsometry> {
    let dec = svd(a);
    let r = dec.numerical_rank(1e-10);
    if r == 0 {
        return Err(Error::ZeroMatrix);
    }
    let t = dec.truncate(r);
    Ok(PartialIsometry {
        w: &t.u * &t.v.adjoint(),
        v: t.v,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub shots: u64,
    pub successes: u64,
    pub success_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcrustesResult {
    pub output_state: QuantumState,
    /// Squared norm of the first-`M` block after uncompute.
    pub success_probability: f64,
    pub fidelity_vs_oracle: f64,
    pub retained_pairs: usize,
    /// Squared norm of the first-`M` block right after phase estimation.
    pub u_block_weight_before_uncompute: f64,
    /// Register probability of returning to `|0⟩` after uncompute.
    pub register_return: f64,
    pub estimates: Vec<EigenEstimate>,
    pub shots: Option<ShotEstimate>,
    pub warnings: Vec<String>,
    pub oracle_calls: u64,
}

/// Applies `UV†` to `|ψ⟩` up to normalization: phase estimation of
/// `Ã/(M+N)` on `|0,ψ⟩`, `σ_z` on the sign bit, inverse phase estimation,
/// projection onto the first `M` coordinates.
///
/// With `shots`, the projection outcome is also sampled that many times.
pub fn quantum_procrustes_apply<R: Rng + ?Sized>(
    a: Arc<MatrixOracle>,
    psi: &QuantumState,
    config: &QpeConfig,
    threshold: f64,
    shots: Option<(u64, &mut R)>,
) -> Result<ProcrustesResult> {
    let before = a.report_calls();
    let ext = embed(a.clone());
    let (m, n) = (ext.m_rows(), ext.n_cols());
    if psi.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi.dim(),
        });
    }
    let mut warnings = Vec::new();
    if let Some(w) = skew_warning(m, n) {
        warn!("{w}");
        warnings.push(w);
    }
    let config = QpeConfig { threshold, ..*config };
    let circuit = QpeCircuit::new(ext.oracle(), config)?;

    let mut lifted = vec![ZERO; m];
    lifted.extend_from_slice(psi.amplitudes());
    let mut state = circuit.forward(&QuantumState::new(lifted)?)?;

    let estimates: Vec<EigenEstimate> = extract_peaks(&state.distribution(), &config)
        .into_iter()
        .filter(|e| e.register_value != 0)
        .collect();
    let retained_pairs = pair_branches(&estimates, config.resolution())?.len();
    if retained_pairs == 0 {
        return Err(Error::NothingRetained(threshold));
    }
    let u_block_weight_before_uncompute = u_block(&state.reduced_system(), m).trace().re;

    sign_flip(&mut state);
    let state = circuit.inverse(state)?;
    let register_return = state.block(0, 0).trace().re;
    let rho_u = u_block(&state.reduced_system(), m);
    let success_probability = rho_u.trace().re;
    if success_probability <= 0.0 {
        return Err(Error::NothingRetained(threshold));
    }

    let dec = exact_eig(&HermitianMatrix::hermitian_part(&rho_u)?);
    let top = dec
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut out = dec.eigenvectors[top].clone();
    fix_phase(&mut out);
    let output_state = QuantumState::normalized(out)?;

    let w = classical_nearest_isometry(&a.reference_matrix())?;
    let target = w.apply(psi.amplitudes());
    let norm = l2_norm(&target);
    let fidelity_vs_oracle = if norm > 0.0 {
        let t: Vec<C64> = target.iter().map(|z| z / norm).collect();
        let rt = rho_u.mul_vec(&t);
        t.iter().zip(&rt).map(|(x, y)| x.conj() * y).sum::<C64>().re / success_probability
    } else {
        warnings.push("input is orthogonal to the row space of A; fidelity undefined".into());
        0.0
    };

    let shots = shots.map(|(k, rng)| {
        let p = success_probability.clamp(0.0, 1.0);
        let successes = Binomial::new(k, p).expect("valid probability").sample(rng);
        ShotEstimate {
            shots: k,
            successes,
            success_probability: if k > 0 { successes as f64 / k as f64 } else { 0.0 },
        }
    });

    Ok(ProcrustesResult {
        output_state,
        success_probability,
        fidelity_vs_oracle,
        retained_pairs,
        u_block_weight_before_uncompute,
        register_return,
        estimates,
        shots,
        warnings,
        oracle_calls: a.report_calls() - before,
    })
}

fn u_block(rho: &ComplexMatrix, m: usize) -> ComplexMatrix {
    rho.block(0, 0, m, m)
}
