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

//! Phase estimation of `e^{-i(A/N)t}` with a `b`-bit register.
//!
//! The register `|x⟩` controls `e^{-i(A/N) 2^k t₀}` on bit `k` and is read
//! out with `R[m,x] = e^{2πimx/D}/√D`, `D = 2^b`, so eigenvalue `λ` peaks at
//! `m ≈ (λ/N) t₀ D / 2π (mod D)`. Values `m ≥ D/2` decode to negative
//! eigenvalues.
//!
//! Two backends share the circuit. `ExactUnitary` keeps a pure joint state
//! and applies the exact controlled unitary. `TrotterChannel` keeps the joint
//! density operator as `D²` system blocks and applies the controlled
//! evolution channel with fresh uniform ancillas.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::channel::{log_log_slope, ControlledChannel};
use crate::error::{Error, Result};
use crate::matrix::{exact_eig, ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::oracle::MatrixOracle;
use crate::state::QuantumState;

/// Largest joint density the trotter backend will allocate, in complex entries.
pub const TROTTER_ENTRY_BUDGET: usize = 1 << 24;
/// Default cap on the total number of channel steps of one trotter run.
pub const DEFAULT_STEP_BUDGET: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    ExactUnitary,
    TrotterChannel,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::ExactUnitary => "exact-unitary",
            Backend::TrotterChannel => "trotter-channel",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-unitary" => Ok(Backend::ExactUnitary),
            "trotter" | "trotter-channel" => Ok(Backend::TrotterChannel),
            other => Err(Error::InvalidArgument(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    pub bits: u32,
    pub base_time: f64,
    pub backend: Backend,
    /// Channel error budget per controlled `e^{-i(A/N)2^k t₀}`.
    pub trotter_epsilon: f64,
    /// Estimates with `|λ/N|` below this are dropped from the estimate list.
    pub threshold: f64,
    pub step_budget: u64,
}

impl QpeConfig {
    pub fn new(bits: u32, base_time: f64, backend: Backend) -> Self {
        Self {
            bits,
            base_time,
            backend,
            trotter_epsilon: 0.01,
            threshold: 0.0,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    /// `t₀ = π / (‖A‖_max (1 + 1e-9))`, or `π` for the zero matrix.
    pub fn default_base_time(max_norm: f64) -> f64 {
        if max_norm > 0.0 {
            PI / (max_norm * (1.0 + 1e-9))
        } else {
            PI
        }
    }

    pub fn register_dim(&self) -> usize {
        1 << self.bits
    }

    /// One register unit in `λ/N`.
    pub fn resolution(&self) -> f64 {
        2.0 * PI / (self.register_dim() as f64 * self.base_time)
    }

    pub fn validate(&self, max_norm: f64) -> Result<()> {
        if !(1..=20).contains(&self.bits) {
            return Err(Error::InvalidArgument(format!("bits must be in 1..=20, got {}", self.bits)));
        }
        if !(self.base_time > 0.0 && self.base_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("base time must be positive, got {}", self.base_time)));
        }
        if !(self.trotter_epsilon > 0.0 && self.trotter_epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "trotter epsilon must be positive, got {}",
                self.trotter_epsilon
            )));
        }
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return Err(Error::InvalidArgument(format!("threshold must be nonnegative, got {}", self.threshold)));
        }
        let product = self.base_time * max_norm;
        if product > PI * (1.0 + 1e-12) {
            return Err(Error::Aliasing(product));
        }
        Ok(())
    }
}

/// `wrap(m/D) · 2π/t₀`.
pub fn decode_register(m: usize, config: &QpeConfig) -> Result<f64> {
    let d = config.register_dim();
    if m >= d {
        return Err(Error::InvalidArgument(format!("register value {m} outside [0, {d})")));
    }
    let mut phase = m as f64 / d as f64;
    if phase >= 0.5 {
        phase -= 1.0;
    }
    Ok(phase * 2.0 * PI / config.base_time)
}

/// Nearest register value for `λ/N`.
pub fn encode(lambda_over_n: f64, config: &QpeConfig) -> usize {
    let d = config.register_dim() as i64;
    let m = (lambda_over_n * config.base_time / (2.0 * PI) * d as f64).round() as i64;
    m.rem_euclid(d) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub register_value: usize,
    pub decoded_lambda_over_n: f64,
    /// Probability in a one-unit window around the peak.
    pub weight: f64,
    pub sign: i8,
}

pub const PEAK_WEIGHT_FLOOR: f64 = 0.01;

/// Circular local maxima of `dist` whose ±1 window holds at least 0.01.
pub fn extract_peaks(dist: &[f64], config: &QpeConfig) -> Vec<EigenEstimate> {
    let d = dist.len();
    let mut out = Vec::new();
    for m in 0..d {
        let p = dist[m];
        let (l, r) = ((m + d - 1) % d, (m + 1) % d);
        let is_peak = if d == 1 { true } else { p > dist[l] && p >= dist[r] };
        if !is_peak {
            continue;
        }
        let mut window = vec![m, l, r];
        window.sort_unstable();
        window.dedup();
        let weight: f64 = window.iter().map(|&i| dist[i]).sum();
        if weight < PEAK_WEIGHT_FLOOR {
            continue;
        }
        let decoded = decode_register(m, config).expect("in range");
        if decoded.abs() < config.threshold {
            continue;
        }
        out.push(EigenEstimate {
            register_value: m,
            decoded_lambda_over_n: decoded,
            weight,
            sign: if decoded < 0.0 { -1 } else { 1 },
        });
    }
    out
}

/// Pure register⊗system amplitudes, index `x*L + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    register_dim: usize,
    system_dim: usize,
    amplitudes: Vec<C64>,
}

impl JointState {
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn branch(&self, x: usize) -> &[C64] {
        &self.amplitudes[x * self.system_dim..(x + 1) * self.system_dim]
    }
}

/// Register⊗system density operator as `D²` blocks `⟨x|Ψ|y⟩` of size
/// `L×L`, index `((x*D + y)*L + s)*L + s'`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDensity {
    register_dim: usize,
    system_dim: usize,
    data: Vec<C64>,
}

impl BlockDensity {
    fn offset(&self, x: usize, y: usize) -> usize {
        (x * self.register_dim + y) * self.system_dim * self.system_dim
    }

    fn block_slice(&self, x: usize, y: usize) -> &[C64] {
        let o = self.offset(x, y);
        &self.data[o..o + self.system_dim * self.system_dim]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegisterState {
    Pure(JointState),
    Mixed(BlockDensity),
}

impl RegisterState {
    pub fn register_dim(&self) -> usize {
        match self {
            RegisterState::Pure(s) => s.register_dim,
            RegisterState::Mixed(s) => s.register_dim,
        }
    }

    pub fn system_dim(&self) -> usize {
        match self {
            RegisterState::Pure(s) => s.system_dim,
            RegisterState::Mixed(s) => s.system_dim,
        }
    }

    /// Probability of each register outcome.
    pub fn distribution(&self) -> Vec<f64> {
        (0..self.register_dim()).map(|m| self.block(m, m).trace().re).collect()
    }

    /// System operator `⟨x|Ψ|y⟩`.
    pub fn block(&self, x: usize, y: usize) -> ComplexMatrix {
        match self {
            RegisterState::Pure(s) => ComplexMatrix::outer(s.branch(x), s.branch(y)),
            RegisterState::Mixed(s) => {
                ComplexMatrix::new(s.system_dim, s.system_dim, s.block_slice(x, y).to_vec()).expect("finite")
            }
        }
    }

    /// System state with the register traced out.
    pub fn reduced_system(&self) -> ComplexMatrix {
        let l = self.system_dim();
        (0..self.register_dim()).fold(ComplexMatrix::zeros(l, l), |acc, x| &acc + &self.block(x, x))
    }

    /// Total squared norm (trace).
    pub fn norm_sqr(&self) -> f64 {
        self.distribution().iter().sum()
    }

    fn for_each_register_column(&mut self, left: &RegisterKernel, right: &RegisterKernel) {
        match self {
            RegisterState::Pure(s) => {
                let (d, l) = (s.register_dim, s.system_dim);
                let mut buf = vec![ZERO; d];
                for j in 0..l {
                    for (x, b) in buf.iter_mut().enumerate() {
                        *b = s.amplitudes[x * l + j];
                    }
                    left.apply(&mut buf);
                    for (x, b) in buf.iter().enumerate() {
                        s.amplitudes[x * l + j] = *b;
                    }
                }
            }
            RegisterState::Mixed(s) => {
                let (d, l) = (s.register_dim, s.system_dim);
                let ll = l * l;
                let mut buf = vec![ZERO; d];
                for y in 0..d {
                    for e in 0..ll {
                        for (x, b) in buf.iter_mut().enumerate() {
                            *b = s.data[(x * d + y) * ll + e];
                        }
                        left.apply(&mut buf);
                        for (x, b) in buf.iter().enumerate() {
                            s.data[(x * d + y) * ll + e] = *b;
                        }
                    }
                }
                for x in 0..d {
                    for e in 0..ll {
                        for (y, b) in buf.iter_mut().enumerate() {
                            *b = s.data[(x * d + y) * ll + e];
                        }
                        right.apply(&mut buf);
                        for (y, b) in buf.iter().enumerate() {
                            s.data[(x * d + y) * ll + e] = *b;
                        }
                    }
                }
            }
        }
    }
}

/// `σ_z` on the register's most significant bit: negates every component
/// whose register value decodes to a negative eigenvalue.
pub fn sign_flip(state: &mut RegisterState) {
    match state {
        RegisterState::Pure(s) => {
            let half = s.register_dim / 2;
            for a in &mut s.amplitudes[half * s.system_dim..] {
                *a = -*a;
            }
        }
        RegisterState::Mixed(s) => {
            let d = s.register_dim;
            let ll = s.system_dim * s.system_dim;
            for x in 0..d {
                for y in 0..d {
                    if (x >= d / 2) != (y >= d / 2) {
                        let o = (x * d + y) * ll;
                        for a in &mut s.data[o..o + ll] {
                            *a = -*a;
                        }
                    }
                }
            }
        }
    }
}

enum RegisterKernel {
    Hadamard,
    Fourier(Arc<dyn Fft<f64>>, f64),
}

impl RegisterKernel {
    fn fourier(d: usize, direction: FftDirection) -> Self {
        let plan = FftPlanner::new().plan_fft(d, direction);
        RegisterKernel::Fourier(plan, 1.0 / (d as f64).sqrt())
    }

    fn apply(&self, v: &mut [C64]) {
        match self {
            RegisterKernel::Hadamard => walsh_hadamard(v),
            RegisterKernel::Fourier(plan, scale) => {
                plan.process(v);
                for z in v.iter_mut() {
                    *z *= *scale;
                }
            }
        }
    }
}

/// Normalized Walsh–Hadamard transform, in place.
fn walsh_hadamard(v: &mut [C64]) {
    let d = v.len();
    let mut h = 1;
    while h < d {
        for start in (0..d).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let s = 1.0 / (d as f64).sqrt();
    for z in v.iter_mut() {
        *z *= s;
    }
}

enum Controlled {
    Exact(Vec<ComplexMatrix>),
    Trotter,
}

/// Prepared phase-estimation circuit for one oracle and configuration.
pub struct QpeCircuit<'a> {
    oracle: &'a MatrixOracle,
    config: QpeConfig,
    controlled: Controlled,
}

impl<'a> QpeCircuit<'a> {
    pub fn new(oracle: &'a MatrixOracle, config: QpeConfig) -> Result<Self> {
        if !oracle.is_square() {
            return Err(Error::NotSquare(oracle.rows(), oracle.cols()));
        }
        if !oracle.is_hermitian() {
            return Err(Error::NotHermitian(oracle.reference_matrix().hermitian_deviation()));
        }
        config.validate(oracle.max_norm())?;
        let controlled = match config.backend {
            Backend::ExactUnitary => Controlled::Exact(Self::exact_powers(oracle, &config)?),
            Backend::TrotterChannel => {
                let (d, l) = (config.register_dim(), oracle.rows());
                let entries = d.saturating_mul(d).saturating_mul(l * l);
                if entries > TROTTER_ENTRY_BUDGET {
                    return Err(Error::BudgetExceeded(format!(
                        "trotter backend needs {entries} density entries (limit {TROTTER_ENTRY_BUDGET})"
                    )));
                }
                let steps: u64 = (0..config.bits).map(|k| Self::trotter_steps(oracle, &config, k)).sum();
                if steps > config.step_budget {
                    return Err(Error::BudgetExceeded(format!(
                        "{steps} channel steps exceed the budget of {}",
                        config.step_budget
                    )));
                }
                Controlled::Trotter
            }
        };
        Ok(Self {
            oracle,
            config,
            controlled,
        })
    }

    pub fn config(&self) -> &QpeConfig {
        &self.config
    }

    /// `e^{-i(A/N)2^k t₀}` for every bit, from `N²` counted queries.
    fn exact_powers(oracle: &MatrixOracle, config: &QpeConfig) -> Result<Vec<ComplexMatrix>> {
        let n = oracle.rows();
        let mut a = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                a[(j, k)] = oracle.query(j, k)?;
            }
        }
        let eig = exact_eig(&HermitianMatrix::hermitian_part(&a)?);
        Ok((0..config.bits)
            .map(|k| {
                let tau = config.base_time * (1u64 << k) as f64 / n as f64;
                eig.apply_function(|lambda| C64::from_polar(1.0, -lambda * tau))
            })
            .collect())
    }

    /// `n_k = ceil(2 ‖A‖²_max (2^k t₀)² / ε)`.
    pub fn trotter_steps(oracle: &MatrixOracle, config: &QpeConfig, k: u32) -> u64 {
        let m = oracle.max_norm();
        let tau = config.base_time * (1u64 << k) as f64;
        (2.0 * m * m * tau * tau / config.trotter_epsilon).ceil().max(1.0) as u64
    }

    fn prepare(&self, psi: &QuantumState) -> Result<RegisterState> {
        let l = self.oracle.rows();
        if psi.dim() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: psi.dim(),
            });
        }
        let d = self.config.register_dim();
        Ok(match self.config.backend {
            Backend::ExactUnitary => {
                let mut amplitudes = vec![ZERO; d * l];
                amplitudes[..l].copy_from_slice(psi.amplitudes());
                RegisterState::Pure(JointState {
                    register_dim: d,
                    system_dim: l,
                    amplitudes,
                })
            }
            Backend::TrotterChannel => {
                let mut data = vec![ZERO; d * d * l * l];
                let rho = psi.to_density();
                data[..l * l].copy_from_slice(rho.as_matrix().as_slice());
                RegisterState::Mixed(BlockDensity {
                    register_dim: d,
                    system_dim: l,
                    data,
                })
            }
        })
    }

    fn check_state(&self, state: &RegisterState) -> Result<()> {
        let ok = state.register_dim() == self.config.register_dim()
            && state.system_dim() == self.oracle.rows()
            && matches!(
                (state, self.config.backend),
                (RegisterState::Pure(_), Backend::ExactUnitary) | (RegisterState::Mixed(_), Backend::TrotterChannel)
            );
        if !ok {
            return Err(Error::InvalidArgument("register state does not match the circuit".into()));
        }
        Ok(())
    }

    fn controlled_powers(&self, state: &mut RegisterState, inverse: bool) -> Result<()> {
        let bits: Vec<u32> = if inverse {
            (0..self.config.bits).rev().collect()
        } else {
            (0..self.config.bits).collect()
        };
        match (&self.controlled, state) {
            (Controlled::Exact(powers), RegisterState::Pure(s)) => {
                let l = s.system_dim;
                for k in bits {
                    let u = if inverse {
                        powers[k as usize].adjoint()
                    } else {
                        powers[k as usize].clone()
                    };
                    for x in (0..s.register_dim).filter(|x| x >> k & 1 == 1) {
                        let out = u.mul_vec(&s.amplitudes[x * l..(x + 1) * l]);
                        s.amplitudes[x * l..(x + 1) * l].copy_from_slice(&out);
                    }
                }
            }
            (Controlled::Trotter, RegisterState::Mixed(s)) => {
                let (d, l) = (s.register_dim, s.system_dim);
                let ll = l * l;
                for k in bits {
                    let steps = Self::trotter_steps(self.oracle, &self.config, k);
                    let tau = self.config.base_time * (1u64 << k) as f64;
                    let dt = if inverse { -tau } else { tau } / steps as f64;
                    let channel = ControlledChannel::new(self.oracle, dt, steps)?;
                    for x in 0..d {
                        for y in 0..d {
                            let (cx, cy) = (x >> k & 1 == 1, y >> k & 1 == 1);
                            if !cx && !cy {
                                continue;
                            }
                            let o = (x * d + y) * ll;
                            let block = ComplexMatrix::new(l, l, s.data[o..o + ll].to_vec())?;
                            let out = channel.apply_block(cx, cy, &block);
                            s.data[o..o + ll].copy_from_slice(out.as_slice());
                        }
                    }
                }
            }
            _ => unreachable!("state checked against backend"),
        }
        Ok(())
    }

    /// Hadamards, controlled powers, Fourier readout.
    pub fn forward(&self, psi: &QuantumState) -> Result<RegisterState> {
        let mut state = self.prepare(psi)?;
        let d = self.config.register_dim();
        state.for_each_register_column(&RegisterKernel::Hadamard, &RegisterKernel::Hadamard);
        self.controlled_powers(&mut state, false)?;
        state.for_each_register_column(
            &RegisterKernel::fourier(d, FftDirection::Inverse),
            &RegisterKernel::fourier(d, FftDirection::Forward),
        );
        Ok(state)
    }

    /// Inverse readout, inverse controlled powers in reverse order, Hadamards.
    /// Exact for the unitary backend; the trotter backend runs the channel
    /// with negated time steps.
    pub fn inverse(&self, mut state: RegisterState) -> Result<RegisterState> {
        self.check_state(&state)?;
        let d = self.config.register_dim();
        state.for_each_register_column(
            &RegisterKernel::fourier(d, FftDirection::Forward),
            &RegisterKernel::fourier(d, FftDirection::Inverse),
        );
        self.controlled_powers(&mut state, true)?;
        state.for_each_register_column(&RegisterKernel::Hadamard, &RegisterKernel::Hadamard);
        Ok(state)
    }
}

#[derive(Debug, Clone)]
pub struct QpeOutcome {
    pub state: RegisterState,
    pub distribution: Vec<f64>,
    pub estimates: Vec<EigenEstimate>,
    pub oracle_calls: u64,
}

/// Phase estimation of `A/N` on `|ψ⟩|0⟩`.
pub fn qpe(oracle: &MatrixOracle, psi: &QuantumState, config: &QpeConfig) -> Result<QpeOutcome> {
    let before = oracle.report_calls();
    let circuit = QpeCircuit::new(oracle, *config)?;
    let state = circuit.forward(psi)?;
    let distribution = state.distribution();
    let estimates = extract_peaks(&distribution, config);
    Ok(QpeOutcome {
        state,
        distribution,
        estimates,
        oracle_calls: oracle.report_calls() - before,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendAgreement {
    pub tv_distance: f64,
    pub exact_distribution: Vec<f64>,
    pub trotter_distribution: Vec<f64>,
    pub trotter_oracle_calls: u64,
}

/// Total-variation distance between the register distributions of the two
/// backends. Intended for `N ≤ 4`, `b ≤ 4`.
pub fn backend_agreement(oracle: &MatrixOracle, psi: &QuantumState, config: &QpeConfig) -> Result<BackendAgreement> {
    let exact = qpe(
        &oracle.fresh(),
        psi,
        &QpeConfig {
            backend: Backend::ExactUnitary,
            ..*config
        },
    )?;
    let trotter = qpe(
        oracle,
        psi,
        &QpeConfig {
            backend: Backend::TrotterChannel,
            ..*config
        },
    )?;
    let tv_distance = 0.5
        * exact
            .distribution
            .iter()
            .zip(&trotter.distribution)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    Ok(BackendAgreement {
        tv_distance,
        exact_distribution: exact.distribution,
        trotter_distribution: trotter.distribution,
        trotter_oracle_calls: trotter.oracle_calls,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryPoint {
    pub epsilon: f64,
    pub bits: u32,
    pub oracle_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryScaling {
    pub points: Vec<QueryPoint>,
    /// Slope of `ln calls` against `ln(1/ε)`.
    pub slope: Option<f64>,
}

/// Trotter-backend oracle calls at accuracy `ε`, with `b = ceil(log2 1/ε)`
/// register bits and per-application channel budget `ε`.
pub fn query_scaling(oracle: &MatrixOracle, psi: &QuantumState, epsilons: &[f64]) -> Result<QueryScaling> {
    let base_time = QpeConfig::default_base_time(oracle.max_norm());
    let mut points = Vec::with_capacity(epsilons.len());
    for &epsilon in epsilons {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("accuracy must be in (0, 1), got {epsilon}")));
        }
        let bits = (1.0 / epsilon).log2().ceil() as u32;
        let config = QpeConfig {
            trotter_epsilon: epsilon,
            ..QpeConfig::new(bits, base_time, Backend::TrotterChannel)
        };
        let run = oracle.fresh();
        let out = qpe(&run, psi, &config)?;
        points.push(QueryPoint {
            epsilon,
            bits,
            oracle_calls: out.oracle_calls,
        });
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((1.0 / p.epsilon).ln(), (p.oracle_calls as f64).ln()))
        .collect();
    Ok(QueryScaling {
        slope: log_log_slope(&fit),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    fn exchange() -> MatrixOracle {
        MatrixOracle::from_matrix(ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap())
    }

    #[test]
    fn decode_examples() {
        let c = QpeConfig::new(3, PI, Backend::ExactUnitary);
        assert_eq!(decode_register(0, &c).unwrap(), 0.0);
        assert!((decode_register(6, &c).unwrap() + 0.5).abs() < 1e-15);
        assert!((decode_register(2, &c).unwrap() - 0.5).abs() < 1e-15);
        assert!(decode_register(8, &c).is_err());
        assert_eq!(encode(-0.5, &c), 6);
    }

    #[test]
    fn aliasing_rejected() {
        let c = QpeConfig::new(3, 4.0, Backend::ExactUnitary);
        assert!(matches!(QpeCircuit::new(&exchange(), c), Err(Error::Aliasing(_))));
    }

    #[test]
    fn exchange_peaks_at_two_and_six() {
        let c = QpeConfig::new(3, PI, Backend::ExactUnitary);
        let out = qpe(&exchange(), &QuantumState::basis(2, 0), &c).unwrap();
        assert!((out.distribution[2] - 0.5).abs() < 1e-12);
        assert!((out.distribution[6] - 0.5).abs() < 1e-12);
        let m: Vec<_> = out.estimates.iter().map(|e| e.register_value).collect();
        assert_eq!(m, vec![2, 6]);
    }

    #[test]
    fn exact_inverse_restores_input() {
        let c = QpeConfig::new(4, 2.0, Backend::ExactUnitary);
        let o = exchange();
        let psi = QuantumState::normalized(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.7)]).unwrap();
        let circuit = QpeCircuit::new(&o, c).unwrap();
        let back = circuit.inverse(circuit.forward(&psi).unwrap()).unwrap();
        let RegisterState::Pure(s) = back else { panic!() };
        for (a, b) in s.branch(0).iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(s.amplitudes()[2..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn sign_flip_is_involution() {
        let c = QpeConfig::new(3, PI, Backend::ExactUnitary);
        let out = qpe(&exchange(), &QuantumState::basis(2, 0), &c).unwrap();
        let mut s = out.state.clone();
        sign_flip(&mut s);
        assert_ne!(s, out.state);
        sign_flip(&mut s);
        assert_eq!(s, out.state);
    }

    #[test]
    fn walsh_hadamard_is_self_inverse() {
        let mut v: Vec<C64> = (0..8).map(|i| C64::new(i as f64, -(i as f64) / 2.0)).collect();
        let orig = v.clone();
        walsh_hadamard(&mut v);
        walsh_hadamard(&mut v);
        assert!(v.iter().zip(&orig).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn backends_agree_on_zero_matrix() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::zeros(2, 2));
        let c = QpeConfig::new(3, PI, Backend::ExactUnitary);
        let ag = backend_agreement(&o, &QuantumState::basis(2, 1), &c).unwrap();
        assert!(ag.tv_distance < 1e-12);
        assert!((ag.trotter_distribution[0] - 1.0).abs() < 1e-12);
    }
}
