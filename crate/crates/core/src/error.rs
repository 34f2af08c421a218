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

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("dimension {dim} exceeds the configured cap {cap} (set QSVD_MAX_DIM to override)")]
    MemoryGuard { dim: usize, cap: usize },

    #[error("phase estimation would alias: t0 * max|A| = {0} > pi")]
    Aliasing(f64),

    #[error("trotter backend budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("zero matrix has no nearest isometry")]
    ZeroMatrix,

    #[error("no eigenvalue branch above threshold {0}")]
    NothingRetained(f64),

    #[error("unpaired eigenvalue branch at register value {0}")]
    UnpairedBranch(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot read input {0}")]
    Input(String),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Input or configuration problems, as opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::BudgetExceeded(_) | Error::NothingRetained(_) | Error::UnpairedBranch(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
