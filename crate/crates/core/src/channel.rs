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

//! The evolution channel `σ ↦ tr₁{e^{-iS_AΔt} (ρ⊗σ) e^{iS_AΔt}}` with
//! `ρ = |1⃗⟩⟨1⃗|`, its repetition, and error measurement.
//!
//! Because `ρ` is pure the step is evaluated in Kraus form,
//! `σ' = Σ_a K_a σ K_a†` with `K_a[x,b] = ⟨a,x|U|1⃗,b⟩`. Each `K_a` is a
//! diagonal plus a single column, so one step costs `O(N³)` and never forms
//! the `N²`-dimensional joint state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{exact_eig, exact_evolution, ComplexMatrix, C64};
use crate::oracle::MatrixOracle;
use crate::state::DensityMatrix;
use crate::swap::{ModifiedSwapOperator, SwapPropagator};

pub const DEFAULT_MAX_DIM: usize = 64;
pub const MAX_DIM_ENV: &str = "QSVD_MAX_DIM";

/// Largest `N` a channel step accepts: `QSVD_MAX_DIM` if set, else 64.
pub fn max_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

fn guard(n: usize) -> Result<()> {
    let cap = max_dim();
    if n > cap {
        return Err(Error::MemoryGuard { dim: n, cap });
    }
    Ok(())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `ρ = |1⃗⟩⟨1⃗|`, `|1⃗⟩ = N^{-1/2} Σ_k |k⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformAncilla {
    dim: usize,
}

impl UniformAncilla {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn density(&self) -> DensityMatrix {
        let v = 1.0 / self.dim as f64;
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_fn(self.dim, self.dim, |_, _| C64::new(v, 0.0)))
    }

    pub fn purity(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub t: f64,
    pub epsilon: f64,
    pub n: usize,
    pub delta_t: f64,
}

impl EvolutionConfig {
    /// `n = ceil(2 ‖A‖²_max t² / ε)`, at least one step.
    pub fn new(t: f64, epsilon: f64, max_norm: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
        }
        let n = (2.0 * max_norm * max_norm * t * t / epsilon).ceil().max(1.0) as usize;
        Self::with_steps(t, epsilon, n)
    }

    pub fn with_steps(t: f64, epsilon: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("step count must be at least 1".into()));
        }
        Ok(Self {
            t,
            epsilon,
            n,
            delta_t: t / n as f64,
        })
    }

    /// `2 ‖A‖²_max Δt²`.
    pub fn per_step_bound(&self, max_norm: f64) -> f64 {
        2.0 * max_norm * max_norm * self.delta_t * self.delta_t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub per_step_bound: f64,
    pub measured_step_error: f64,
    pub total_measured: f64,
    pub total_bound: f64,
    pub steps: usize,
    pub oracle_calls: u64,
    /// Eigenvalues with `|λ|/N ≥ 1/t`; reported only.
    pub effective_rank: usize,
}

/// `(A/N) σ` through `Σ_jk A_jk ⟨j|ρ|k⟩ |j⟩⟨k| σ`.
pub fn first_order_generator(oracle: &MatrixOracle, sigma: &DensityMatrix) -> Result<ComplexMatrix> {
    let n = oracle.rows();
    if !oracle.is_square() {
        return Err(Error::NotSquare(n, oracle.cols()));
    }
    check_dim(n, sigma.dim())?;
    let rho = 1.0 / n as f64;
    let mut weighted = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            weighted[(j, k)] = oracle.query(j, k)? * rho;
        }
    }
    weighted.try_matmul(sigma.as_matrix())
}

/// Kraus operators of one step, `K_a = N^{-1/2}(diag_x stay(a,x) + col_a cross(x,a))`.
struct KrausStep {
    prop: SwapPropagator,
}

impl KrausStep {
    fn new(oracle: &MatrixOracle, delta_t: f64) -> Result<Self> {
        let prop = ModifiedSwapOperator::new(oracle)?.propagator(delta_t)?;
        Ok(Self { prop })
    }

    fn dim(&self) -> usize {
        self.prop.dim()
    }

    /// `Σ_a K_a X K_a†` for any square `X`.
    fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let p = &self.prop;
        let mut out = ComplexMatrix::zeros(n, n);
        let mut left = ComplexMatrix::zeros(n, n);
        for a in 0..n {
            for r in 0..n {
                let s = p.stay(a, r);
                let c = p.cross(r, a);
                for col in 0..n {
                    left[(r, col)] = s * x[(r, col)] + c * x[(a, col)];
                }
            }
            for i in 0..n {
                let la = left[(i, a)];
                for y in 0..n {
                    out[(i, y)] += left[(i, y)] * p.stay(a, y).conj() + la * p.cross(y, a).conj();
                }
            }
        }
        out.scale_real(1.0 / n as f64)
    }

    /// `G = N^{-1} Σ_a K_a`, the control-1/control-0 coherence map `X ↦ G X`.
    fn coherence(&self) -> ComplexMatrix {
        let n = self.dim();
        let p = &self.prop;
        ComplexMatrix::from_fn(n, n, |x, b| {
            let mut v = p.cross(x, b);
            if x == b {
                v += (0..n).map(|a| p.stay(a, x)).sum::<C64>();
            }
            v / n as f64
        })
    }

    /// Row-major transfer matrix of `apply`.
    fn transfer(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut s = ComplexMatrix::zeros(n * n, n * n);
        for b in 0..n {
            for d in 0..n {
                let mut e = ComplexMatrix::zeros(n, n);
                e[(b, d)] = C64::new(1.0, 0.0);
                let img = self.apply(&e);
                for (idx, v) in img.as_slice().iter().enumerate() {
                    s[(idx, b * n + d)] = *v;
                }
            }
        }
        s
    }
}

/// One channel step. Costs `N²` oracle queries.
pub fn channel_step(oracle: &MatrixOracle, sigma: &DensityMatrix, delta_t: f64) -> Result<DensityMatrix> {
    let n = oracle.rows();
    check_dim(n, sigma.dim())?;
    guard(n)?;
    let step = KrausStep::new(oracle, delta_t)?;
    Ok(DensityMatrix::from_matrix_unchecked(step.apply(sigma.as_matrix())))
}

fn effective_rank(oracle: &MatrixOracle, t: f64) -> Result<usize> {
    if t == 0.0 {
        return Ok(0);
    }
    let a = oracle.reference_hermitian()?;
    let n = a.dim() as f64;
    Ok(exact_eig(&a).eigenvalues.iter().filter(|l| l.abs() / n >= 1.0 / t.abs()).count())
}

/// `n` channel steps of `t/n`, compared with exact evolution.
pub fn evolve(
    oracle: &MatrixOracle,
    sigma: &DensityMatrix,
    config: &EvolutionConfig,
) -> Result<(DensityMatrix, ErrorReport)> {
    if config.n == 0 {
        return Err(Error::InvalidArgument("step count must be at least 1".into()));
    }
    let before = oracle.report_calls();
    let mut state = sigma.clone();
    for _ in 0..config.n {
        state = channel_step(oracle, &state, config.delta_t)?;
    }
    let oracle_calls = oracle.report_calls() - before;

    let a = oracle.reference_hermitian()?;
    let max_norm = oracle.max_norm();
    let exact = exact_evolution(&a, config.t, sigma)?;
    let one = channel_step(&oracle.fresh(), sigma, config.delta_t)?;
    let exact_one = exact_evolution(&a, config.delta_t, sigma)?;
    let per_step_bound = config.per_step_bound(max_norm);
    let report = ErrorReport {
        per_step_bound,
        measured_step_error: one.trace_distance_nuclear(&exact_one),
        total_measured: state.trace_distance_nuclear(&exact),
        total_bound: per_step_bound * config.n as f64,
        steps: config.n,
        oracle_calls,
        effective_rank: effective_rank(oracle, config.t)?,
    };
    Ok((state, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta_t: f64,
    pub measured_error: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSweep {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln ε₀` against `ln Δt`; `None` with fewer
    /// than two nonzero errors.
    pub slope: Option<f64>,
}

/// Single-step error against exact evolution for each `Δt`.
pub fn error_sweep(oracle: &MatrixOracle, sigma: &DensityMatrix, delta_ts: &[f64]) -> Result<ErrorSweep> {
    if delta_ts.is_empty() {
        return Err(Error::InvalidArgument("empty time-step list".into()));
    }
    if delta_ts.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidArgument("time steps must be positive".into()));
    }
    if delta_ts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("time steps must be strictly descending".into()));
    }
    let a = oracle.reference_hermitian()?;
    let m = oracle.max_norm();
    let mut rows = Vec::with_capacity(delta_ts.len());
    for &dt in delta_ts {
        let step = channel_step(oracle, sigma, dt)?;
        let measured_error = step.trace_distance_nuclear(&exact_evolution(&a, dt, sigma)?);
        let bound = 2.0 * m * m * dt * dt;
        rows.push(SweepRow {
            delta_t: dt,
            measured_error,
            bound,
            ratio: if bound > 0.0 { measured_error / bound } else { 0.0 },
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.measured_error > 0.0)
        .map(|r| (r.delta_t.ln(), r.measured_error.ln()))
        .collect();
    Ok(ErrorSweep {
        slope: log_log_slope(&points),
        rows,
    })
}

/// Ordinary least-squares slope through `(x, y)` points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `steps` repetitions of the controlled channel, as maps on the blocks
/// `X_cd` of a density operator with control values `c, d`.
///
/// With `K⁰_a = N^{-1/2} 𝟙` and `K¹_a` the step's Kraus operators, block
/// `(1,1)` evolves under the channel, `(1,0)` under `X ↦ G X`, `(0,1)` under
/// `X ↦ X G†`, and `(0,0)` is untouched. The power is formed by repeated
/// squaring; the oracle is charged for all `steps` sequential steps.
#[derive(Debug, Clone)]
pub struct ControlledChannel {
    dim: usize,
    coherence: ComplexMatrix,
    transfer: ComplexMatrix,
}

impl ControlledChannel {
    pub fn new(oracle: &MatrixOracle, delta_t: f64, steps: u64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("step count must be at least 1".into()));
        }
        let n = oracle.rows();
        guard(n)?;
        let step = KrausStep::new(oracle, delta_t)?;
        oracle.charge_replay((steps - 1) * (n * n) as u64);
        Ok(Self {
            dim: n,
            coherence: matrix_power(&step.coherence(), steps),
            transfer: matrix_power(&step.transfer(), steps),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply_block(&self, control_row: bool, control_col: bool, x: &ComplexMatrix) -> ComplexMatrix {
        match (control_row, control_col) {
            (false, false) => x.clone(),
            (true, false) => &self.coherence * x,
            (false, true) => x * &self.coherence.adjoint(),
            (true, true) => {
                let v = self.transfer.mul_vec(x.as_slice());
                ComplexMatrix::from_raw(self.dim, self.dim, v)
            }
        }
    }
}

fn matrix_power(m: &ComplexMatrix, mut e: u64) -> ComplexMatrix {
    let mut base = m.clone();
    let mut acc = ComplexMatrix::identity(m.rows());
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}
