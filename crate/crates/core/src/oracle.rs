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

//! Call-counted element access to a matrix.
//!
//! A [`MatrixOracle`] stands in for quantum RAM or an efficiently computable
//! element function: every `query` returns one element `A_jk` and bumps the
//! call counter by exactly one, so simulated query complexity can be read off
//! [`MatrixOracle::report_calls`]. Classical verification code reads the
//! backing data through [`MatrixOracle::reference_matrix`], which is not
//! counted.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64, EXACT_TOL, ZERO};

pub type ElementFn = dyn Fn(usize, usize) -> C64 + Send + Sync;

#[derive(Clone)]
enum Source {
    Dense(Arc<ComplexMatrix>),
    Function(Arc<ElementFn>),
    /// `[0 A; A† 0]` routed to the oracle of `A`.
    Extended(Arc<MatrixOracle>),
}

pub struct MatrixOracle {
    rows: usize,
    cols: usize,
    hermitian: bool,
    source: Source,
    calls: AtomicU64,
}

/// One answer of the one-sparse oracle: column `label = (j,k)` of the
/// modified swap matrix holds its only nonzero `value = A_jk` at row
/// `location = (k,j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseOracleRecord {
    pub label: (usize, usize),
    pub location: (usize, usize),
    pub value: C64,
}

impl MatrixOracle {
    pub fn from_matrix(m: ComplexMatrix) -> Self {
        let hermitian = m.is_square() && m.hermitian_deviation() <= EXACT_TOL;
        Self {
            rows: m.rows(),
            cols: m.cols(),
            hermitian,
            source: Source::Dense(Arc::new(m)),
            calls: AtomicU64::new(0),
        }
    }

    pub fn from_hermitian(a: HermitianMatrix) -> Self {
        Self::from_matrix(a.into_matrix())
    }

    /// Element function with no Hermiticity guarantee.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            rows,
            cols,
            hermitian: false,
            source: Source::Function(Arc::new(f)),
            calls: AtomicU64::new(0),
        }
    }

    /// Element function the caller asserts is Hermitian (`f(j,k) = conj f(k,j)`).
    pub fn from_hermitian_fn(n: usize, f: impl Fn(usize, usize) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            hermitian: true,
            ..Self::from_fn(n, n, f)
        }
    }

    /// Oracle view of `[0 A; A† 0]`: off-diagonal blocks route one query to
    /// `inner` (conjugated for the lower-left block); diagonal blocks answer 0
    /// without touching `inner`.
    pub fn extended(inner: Arc<MatrixOracle>) -> Self {
        let dim = inner.rows + inner.cols;
        Self {
            rows: dim,
            cols: dim,
            hermitian: true,
            source: Source::Extended(inner),
            calls: AtomicU64::new(0),
        }
    }

    /// Same source, counter reset to zero.
    pub fn fresh(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            hermitian: self.hermitian,
            source: self.source.clone(),
            calls: AtomicU64::new(0),
        }
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

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    fn check(&self, j: usize, k: usize) -> Result<()> {
        if j >= self.rows || k >= self.cols {
            return Err(Error::OutOfRange {
                row: j,
                col: k,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// `|j k⟩|0⟩ ↦ |j k⟩|A_jk⟩`.
    pub fn query(&self, j: usize, k: usize) -> Result<C64> {
        self.check(j, k)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.element(j, k, true)
    }

    /// `|(j,k)⟩|0⟩ ↦ |(j,k)⟩|(k,j), (S_A)_{(k,j),(j,k)}⟩` with one underlying query.
    pub fn sparse_query(&self, (j, k): (usize, usize)) -> Result<SparseOracleRecord> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let value = self.query(j, k)?;
        Ok(SparseOracleRecord {
            label: (j, k),
            location: (k, j),
            value,
        })
    }

    pub fn report_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Records `count` queries that a sequential execution would have issued
    /// but that the simulator reproduced from an already-queried step.
    pub fn charge_replay(&self, count: u64) {
        self.calls.fetch_add(count, Ordering::Relaxed);
    }

    fn element(&self, j: usize, k: usize, counted: bool) -> Result<C64> {
        Ok(match &self.source {
            Source::Dense(m) => m[(j, k)],
            Source::Function(f) => f(j, k),
            Source::Extended(inner) => {
                let m = inner.rows;
                let read = |r, c| {
                    if counted {
                        inner.query(r, c)
                    } else {
                        inner.element(r, c, false)
                    }
                };
                match (j < m, k < m) {
                    (true, false) => read(j, k - m)?,
                    (false, true) => read(k, j - m)?.conj(),
                    _ => ZERO,
                }
            }
        })
    }

    /// Uncounted dense copy of the backing matrix, for classical baselines.
    pub fn reference_matrix(&self) -> ComplexMatrix {
        if let Source::Dense(m) = &self.source {
            return (**m).clone();
        }
        ComplexMatrix::from_fn(self.rows, self.cols, |j, k| {
            self.element(j, k, false).expect("in range")
        })
    }

    pub fn reference_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.reference_matrix())
    }

    /// Uncounted `‖A‖_max`; the algorithm takes this bound as known.
    pub fn max_norm(&self) -> f64 {
        match &self.source {
            Source::Dense(m) => m.max_norm(),
            Source::Extended(inner) => inner.max_norm(),
            Source::Function(_) => self.reference_matrix().max_norm(),
        }
    }
}

impl fmt::Debug for MatrixOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.source {
            Source::Dense(_) => "dense",
            Source::Function(_) => "function",
            Source::Extended(_) => "extended",
        };
        f.debug_struct("MatrixOracle")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("source", &kind)
            .field("calls", &self.report_calls())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    #[test]
    fn identity_queries_and_counts() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::identity(3));
        assert_eq!(o.report_calls(), 0);
        assert_eq!(o.query(0, 0).unwrap(), ONE);
        assert_eq!(o.query(0, 1).unwrap(), ZERO);
        for _ in 0..3 {
            o.query(2, 2).unwrap();
        }
        assert_eq!(o.report_calls(), 5);
    }

    #[test]
    fn out_of_range_not_counted() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::identity(2));
        assert!(matches!(o.query(2, 0), Err(Error::OutOfRange { .. })));
        assert!(o.sparse_query((0, 5)).is_err());
        assert_eq!(o.report_calls(), 0);
    }

    #[test]
    fn sparse_query_on_all_ones() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::from_fn(2, 2, |_, _| ONE));
        let r = o.sparse_query((0, 1)).unwrap();
        assert_eq!(r.location, (1, 0));
        assert_eq!(r.value, ONE);
        assert_eq!(o.report_calls(), 1);
    }

    #[test]
    fn sparse_query_on_diagonal() {
        let a = ComplexMatrix::diagonal(&[C64::new(2.0, 0.0), C64::new(-3.0, 0.0)]);
        let o = MatrixOracle::from_matrix(a);
        let r = o.sparse_query((0, 1)).unwrap();
        assert_eq!((r.location, r.value), ((1, 0), ZERO));
    }

    #[test]
    fn function_backed_shares_counting() {
        let o = MatrixOracle::from_hermitian_fn(4, |j, k| C64::new((j + k) as f64, 0.0));
        assert!(o.is_hermitian());
        assert_eq!(o.query(1, 2).unwrap(), C64::new(3.0, 0.0));
        assert_eq!(o.report_calls(), 1);
        let _ = o.reference_matrix();
        assert_eq!(o.report_calls(), 1);
    }

    #[test]
    fn extended_view_routes_queries() {
        let a = ComplexMatrix::new(1, 2, vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)]).unwrap();
        let inner = Arc::new(MatrixOracle::from_matrix(a));
        let ext = MatrixOracle::extended(inner.clone());
        assert_eq!((ext.rows(), ext.cols()), (3, 3));
        assert_eq!(ext.query(0, 1).unwrap(), C64::new(1.0, 2.0));
        assert_eq!(ext.query(2, 0).unwrap(), C64::new(0.0, 1.0));
        assert_eq!(ext.query(1, 2).unwrap(), ZERO);
        assert_eq!(ext.query(0, 0).unwrap(), ZERO);
        assert_eq!(ext.report_calls(), 4);
        assert_eq!(inner.report_calls(), 2);
    }

    #[test]
    fn fresh_resets_counter() {
        let o = MatrixOracle::from_matrix(ComplexMatrix::identity(2));
        o.query(0, 0).unwrap();
        let f = o.fresh();
        assert_eq!(f.report_calls(), 0);
        assert_eq!(f.query(1, 1).unwrap(), ONE);
    }
}
