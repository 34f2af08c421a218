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

//! Classical simulator for exponentiating dense low-rank Hermitian matrices
//! with a modified swap operator, and for the phase estimation, SVD and
//! Procrustes pipelines built on top of it.

pub mod channel;
pub mod error;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod procrustes;
pub mod qpe;
pub mod state;
pub mod svd;
pub mod swap;

pub use error::{Error, Result};
