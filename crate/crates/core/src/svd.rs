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

//! Singular value decomposition through the Hermitian embedding
//! `Ã = [0 A; A† 0]`.
//!
//! Eigenvectors of `Ã` for `±σ_j` are `(u_j, ±v_j)/√2`, so one eigenvector
//! carries a left and right singular vector with their relative phase
//! locked. The Gram route through `AA†` loses that phase, which
//! [`phase_ambiguity_demo`] makes visible.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{exact_eig, svd, ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::oracle::MatrixOracle;
use crate::qpe::{extract_peaks, EigenEstimate, QpeCircuit, QpeConfig};
use crate::state::{l2_norm, QuantumState};

/// Aspect ratio above which `quantum_svd` warns.
pub const SKEW_LIMIT: f64 = 4.0;

/// `Ã` as an oracle view over the oracle of `A`.
#[derive(Debug)]
pub struct ExtendedMatrix {
    m_rows: usize,
    n_cols: usize,
    inner: Arc<MatrixOracle>,
    oracle: MatrixOracle,
}

pub fn embed(a: Arc<MatrixOracle>) -> ExtendedMatrix {
    ExtendedMatrix {
        m_rows: a.rows(),
        n_cols: a.cols(),
        oracle: MatrixOracle::extended(a.clone()),
        inner: a,
    }
}

impl ExtendedMatrix {
    pub fn m_rows(&self) -> usize {
        self.m_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn total_dim(&self) -> usize {
        self.m_rows + self.n_cols
    }

    pub fn oracle(&self) -> &MatrixOracle {
        &self.oracle
    }

    pub fn inner(&self) -> &MatrixOracle {
        &self.inner
    }

    /// Uncounted dense `Ã`.
    pub fn materialize(&self) -> ComplexMatrix {
        self.oracle.reference_matrix()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCheck {
    /// Eigenvalues of `Ã`, ascending.
    pub eigenvalues: Vec<f64>,
    /// `{±σ_j} ∪ {0}` from a classical SVD of `A`, ascending.
    pub expected: Vec<f64>,
    pub rank: usize,
    pub spectrum_error: f64,
    /// Largest `|‖u-part‖ − 1/√2|` or `|‖v-part‖ − 1/√2|` over nonzero
    /// eigenvalues.
    pub subvector_norm_error: f64,
    /// Largest `1 − |⟨(u_j, ±v_j)/√2, e⟩|` over simple nonzero eigenvalues.
    pub pairing_error: f64,
}

/// Classical check of the eigenstructure of `Ã` against the SVD of `A`.
pub fn extended_spectrum_check(ext: &ExtendedMatrix) -> Result<SpectrumCheck> {
    let (m, n) = (ext.m_rows, ext.n_cols);
    let a = ext.inner.reference_matrix();
    let big = HermitianMatrix::new(ext.materialize())?;
    let eig = exact_eig(&big);
    let dec = svd(&a);
    let rank = dec.numerical_rank(1e-10);
    let scale = dec.singular_values.first().copied().unwrap_or(0.0).max(1.0);

    let mut expected = vec![0.0; m + n - 2 * rank];
    for &s in &dec.singular_values[..rank] {
        expected.push(s);
        expected.push(-s);
    }
    expected.sort_by(f64::total_cmp);
    let mut eigenvalues = eig.eigenvalues.clone();
    eigenvalues.sort_by(f64::total_cmp);
    let spectrum_error = eigenvalues
        .iter()
        .zip(&expected)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let mut subvector_norm_error = 0.0f64;
    for (lambda, e) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if lambda.abs() <= 1e-8 * scale {
            continue;
        }
        subvector_norm_error = subvector_norm_error
            .max((l2_norm(&e[..m]) - FRAC_1_SQRT_2).abs())
            .max((l2_norm(&e[m..]) - FRAC_1_SQRT_2).abs());
    }

    let mut pairing_error = 0.0f64;
    let sv = &dec.singular_values[..rank];
    for j in 0..rank {
        let simple = sv
            .iter()
            .enumerate()
            .all(|(i, s)| i == j || (s - sv[j]).abs() > 1e-6 * scale);
        if !simple {
            continue;
        }
        for sign in [1.0, -1.0] {
            let mut target: Vec<C64> = dec.u.column(j);
            target.extend(dec.v.column(j).into_iter().map(|z| z * sign));
            let (k, _) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - sign * sv[j]).abs().total_cmp(&(b.1 - sign * sv[j]).abs()))
                .expect("nonempty");
            let overlap: C64 = target
                .iter()
                .zip(&eig.eigenvectors[k])
                .map(|(t, e)| t.conj() * e)
                .sum::<C64>()
                * FRAC_1_SQRT_2;
            pairing_error = pairing_error.max(1.0 - overlap.norm());
        }
    }

    Ok(SpectrumCheck {
        eigenvalues,
        expected,
        rank,
        spectrum_error,
        subvector_norm_error,
        pairing_error,
    })
}

/// `‖Ã(u, v) − σ(u, v)‖` evaluated classically.
pub fn extended_eigen_residual(a: &ComplexMatrix, sigma: f64, u: &[C64], v: &[C64]) -> f64 {
    let av = a.mul_vec(v);
    let ahu = a.adjoint().mul_vec(u);
    let top: f64 = av.iter().zip(u).map(|(x, y)| (x - sigma * y).norm_sqr()).sum();
    let bottom: f64 = ahu.iter().zip(v).map(|(x, y)| (x - sigma * y).norm_sqr()).sum();
    (top + bottom).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdResult {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Register-grid estimates `|decoded| · (M+N)` the triplets came from.
    pub grid_singular_values: Vec<f64>,
    pub left_vectors: Vec<Vec<C64>>,
    pub right_vectors: Vec<Vec<C64>>,
    /// Set for triplets that share a singular value within one register unit.
    pub degenerate: Vec<bool>,
    pub warnings: Vec<String>,
    pub oracle_calls: u64,
}

impl SvdResult {
    pub fn reconstruct(&self, rows: usize, cols: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rows, cols);
        for ((s, u), v) in self.singular_values.iter().zip(&self.left_vectors).zip(&self.right_vectors) {
            for j in 0..rows {
                for k in 0..cols {
                    out[(j, k)] += *s * u[j] * v[k].conj();
                }
            }
        }
        out
    }

    /// `‖A − Σ σ_j u_j v_j†‖_F`.
    pub fn reconstruction_residual(&self, a: &ComplexMatrix) -> f64 {
        (a - &self.reconstruct(a.rows(), a.cols())).frobenius_norm()
    }

    /// Largest `‖A v_j − σ_j u_j‖ / σ_j`.
    pub fn max_pairing_residual(&self, a: &ComplexMatrix) -> f64 {
        self.singular_values
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
            .map(|((s, u), v)| {
                let av = a.mul_vec(v);
                av.iter().zip(u).map(|(x, y)| (x - *s * y).norm_sqr()).sum::<f64>().sqrt() / s
            })
            .fold(0.0, f64::max)
    }
}

/// Warning text when `max(M,N) > 4·min(M,N)`.
pub fn skew_warning(m: usize, n: usize) -> Option<String> {
    let (lo, hi) = (m.min(n) as f64, m.max(n) as f64);
    (hi > SKEW_LIMIT * lo).then(|| {
        format!("matrix is {m}x{n}; aspect ratio above {SKEW_LIMIT} makes singular values small relative to M+N")
    })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Pairs each positive estimate with a negative one of equal magnitude
/// within one register unit.
pub(crate) fn pair_branches(estimates: &[EigenEstimate], unit: f64) -> Result<Vec<EigenEstimate>> {
    let (pos, neg): (Vec<&EigenEstimate>, Vec<&EigenEstimate>) = estimates.iter().partition(|e| e.sign > 0);
    let mut used = vec![false; neg.len()];
    let mut pairs = Vec::with_capacity(pos.len());
    for p in &pos {
        let hit = neg.iter().enumerate().find(|(i, n)| {
            !used[*i] && (n.decoded_lambda_over_n.abs() - p.decoded_lambda_over_n).abs() <= unit * (1.0 + 1e-9)
        });
        match hit {
            Some((i, _)) => {
                used[i] = true;
                pairs.push(**p);
            }
            None => return Err(Error::UnpairedBranch(p.register_value)),
        }
    }
    if let Some((i, _)) = used.iter().enumerate().find(|(_, u)| !**u) {
        return Err(Error::UnpairedBranch(neg[i].register_value));
    }
    Ok(pairs)
}

/// SVD of `A` by phase estimation on `Ã/(M+N)`.
///
/// Every column of the identity on `C^{M+N}` is used as a probe. The summed
/// register distribution gives each `±σ_j` total weight one; its peaks are
/// paired into `±` branches. For each positive peak the register-conditioned
/// system states within two units are summed over probes, which equals
/// `Σ_j w_j e_j e_j†` over eigenvectors of `Ã`; eigenvectors with `w ≥ 1/2`
/// are read off (simulated tomography) and the singular values are refined
/// by a Rayleigh–Ritz step through the oracle.
pub fn quantum_svd(a: Arc<MatrixOracle>, config: &QpeConfig, threshold: f64) -> Result<SvdResult> {
    let before = a.report_calls();
    let ext = embed(a.clone());
    let (m, n) = (ext.m_rows, ext.n_cols);
    let l = m + n;
    let mut warnings = Vec::new();
    if let Some(w) = skew_warning(m, n) {
        warn!("{w}");
        warnings.push(w);
    }
    let config = QpeConfig { threshold, ..*config };
    let circuit = QpeCircuit::new(ext.oracle(), config)?;
    let d = config.register_dim();

    let mut total = vec![0.0; d];
    let mut conditional = vec![ComplexMatrix::zeros(l, l); d];
    for p in 0..l {
        let state = circuit.forward(&QuantumState::basis(l, p))?;
        for (mv, slot) in conditional.iter_mut().enumerate() {
            let b = state.block(mv, mv);
            total[mv] += b.trace().re;
            *slot = &*slot + &b;
        }
    }

    let mut estimates: Vec<EigenEstimate> = extract_peaks(&total, &config)
        .into_iter()
        .filter(|e| e.register_value != 0)
        .collect();
    estimates.sort_by(|x, y| y.weight.total_cmp(&x.weight).then(x.register_value.cmp(&y.register_value)));
    let positives = pair_branches(&estimates, config.resolution())?;
    if positives.is_empty() {
        return Err(Error::NothingRetained(threshold));
    }

    let mut accepted: Vec<(Vec<C64>, f64)> = Vec::new();
    for peak in &positives {
        let mut h = ComplexMatrix::zeros(l, l);
        for off in -2i64..=2 {
            let mv = (peak.register_value as i64 + off).rem_euclid(d as i64) as usize;
            h = &h + &conditional[mv];
        }
        let dec = exact_eig(&HermitianMatrix::hermitian_part(&h)?);
        for (w, e) in dec.eigenvalues.iter().zip(&dec.eigenvectors) {
            if *w < 0.5 {
                continue;
            }
            if accepted.iter().any(|(f, _)| dot(f, e).norm_sqr() > 0.5) {
                continue;
            }
            accepted.push((e.clone(), peak.decoded_lambda_over_n * l as f64));
        }
    }

    // Rayleigh–Ritz on the span of the accepted vectors, one oracle product each.
    let k = accepted.len();
    let images: Vec<Vec<C64>> = accepted
        .iter()
        .map(|(e, _)| apply_oracle(ext.oracle(), e))
        .collect::<Result<_>>()?;
    let projected = ComplexMatrix::from_fn(k, k, |i, j| dot(&accepted[i].0, &images[j]));
    let ritz = exact_eig(&HermitianMatrix::hermitian_part(&projected)?);

    let unit = config.resolution() * l as f64;
    let mut triplets: Vec<(f64, f64, Vec<C64>, Vec<C64>)> = Vec::new();
    for (sigma, y) in ritz.eigenvalues.iter().zip(&ritz.eigenvectors) {
        if *sigma <= 0.0 {
            continue;
        }
        let mut e = vec![ZERO; l];
        for (coef, (basis, _)) in y.iter().zip(&accepted) {
            for (t, b) in e.iter_mut().zip(basis) {
                *t += coef * b;
            }
        }
        let mut u: Vec<C64> = e[..m].to_vec();
        let mut v: Vec<C64> = e[m..].to_vec();
        let (nu, nv) = (l2_norm(&u), l2_norm(&v));
        if nu == 0.0 || nv == 0.0 {
            continue;
        }
        u.iter_mut().for_each(|z| *z /= nu);
        v.iter_mut().for_each(|z| *z /= nv);
        let pivot = u
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("nonempty");
        let phase = pivot.conj() / pivot.norm();
        u.iter_mut().for_each(|z| *z *= phase);
        v.iter_mut().for_each(|z| *z *= phase);
        let grid = accepted
            .iter()
            .zip(y)
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .map(|(a, _)| a.1)
            .unwrap_or(*sigma);
        triplets.push((*sigma, grid, u, v));
    }
    triplets.sort_by(|x, y| y.0.total_cmp(&x.0));
    if triplets.is_empty() {
        return Err(Error::NothingRetained(threshold));
    }
    let degenerate = (0..triplets.len())
        .map(|i| {
            triplets
                .iter()
                .enumerate()
                .any(|(j, t)| j != i && (t.0 - triplets[i].0).abs() <= unit)
        })
        .collect();

    Ok(SvdResult {
        rank: triplets.len(),
        singular_values: triplets.iter().map(|t| t.0).collect(),
        grid_singular_values: triplets.iter().map(|t| t.1).collect(),
        left_vectors: triplets.iter().map(|t| t.2.clone()).collect(),
        right_vectors: triplets.iter().map(|t| t.3.clone()).collect(),
        degenerate,
        warnings,
        oracle_calls: a.report_calls() - before,
    })
}

/// `A x` with one counted query per element.
fn apply_oracle(oracle: &MatrixOracle, x: &[C64]) -> Result<Vec<C64>> {
    let mut out = vec![ZERO; oracle.rows()];
    for (j, o) in out.iter_mut().enumerate() {
        for (k, xk) in x.iter().enumerate() {
            *o += oracle.query(j, k)? * xk;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseAmbiguity {
    pub thetas: Vec<f64>,
    /// `‖A − Â‖_F`.
    pub distance: f64,
    pub relative_distance: f64,
    /// `max |ÂÂ† − AA†|`.
    pub gram_deviation: f64,
    /// Largest `‖Â v_j − σ_j e^{iθ_j} u_j‖`.
    pub rotated_pairing_residual: f64,
    pub singular_values: Vec<f64>,
    pub singular_values_hat: Vec<f64>,
}

/// `Â = U Σ D† V†` with `D = diag(e^{-iθ_j})`: same `AA†`, different matrix.
pub fn phase_ambiguity_demo(a: &ComplexMatrix, thetas: &[f64]) -> Result<PhaseAmbiguity> {
    let dec = svd(a);
    let r = dec.numerical_rank(1e-10);
    if r == 0 {
        return Err(Error::ZeroMatrix);
    }
    if thetas.len() < r {
        return Err(Error::InvalidArgument(format!("need {r} phases, got {}", thetas.len())));
    }
    let t = dec.truncate(r);
    let rotated = ComplexMatrix::from_fn(a.rows(), r, |i, j| t.u[(i, j)] * C64::from_polar(1.0, thetas[j]));
    let a_hat = &(&rotated * &ComplexMatrix::diagonal(&t.singular_values.iter().map(|&s| C64::new(s, 0.0)).collect::<Vec<_>>()))
        * &t.v.adjoint();
    let gram = a * &a.adjoint();
    let gram_hat = &a_hat * &a_hat.adjoint();
    let mut rotated_pairing_residual = 0.0f64;
    for j in 0..r {
        let lhs = a_hat.mul_vec(&t.v.column(j));
        let res: f64 = lhs
            .iter()
            .zip(rotated.column(j))
            .map(|(x, y)| (x - t.singular_values[j] * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        rotated_pairing_residual = rotated_pairing_residual.max(res);
    }
    let distance = (a - &a_hat).frobenius_norm();
    Ok(PhaseAmbiguity {
        thetas: thetas[..r].to_vec(),
        distance,
        relative_distance: distance / a.frobenius_norm(),
        gram_deviation: gram.max_abs_diff(&gram_hat),
        rotated_pairing_residual,
        singular_values: t.singular_values.clone(),
        singular_values_hat: a_hat.singular_values()[..r].to_vec(),
    })
}
