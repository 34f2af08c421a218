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

//! Experiment configuration, matrix sources, result envelopes and the
//! per-command pipelines behind the `qsvd` binary.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{error_sweep, evolve, EvolutionConfig};
use crate::error::{Error, Result};
use crate::io::{read_density, read_matrix, read_state, MatrixFile};
use crate::matrix::{complex_gaussian, random_low_rank, random_low_rank_rect, svd, ComplexMatrix, C64};
use crate::oracle::MatrixOracle;
use crate::procrustes::{classical_nearest_isometry, quantum_procrustes_apply};
use crate::qpe::{qpe, Backend, QpeConfig};
use crate::state::{DensityMatrix, QuantumState};
use crate::svd::{embed, extended_spectrum_check, phase_ambiguity_demo, quantum_svd};

pub const ARTIFACT: &str = "qsvd";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const FORMAT_VERSION: u32 = 1;

/// Independent RNG streams derived from the one experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Matrix = 0,
    Phases = 1,
    Shots = 2,
    States = 3,
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixSource {
    File(PathBuf),
    Generator(String),
}

/// Built-in matrix generators, written `name:params`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `random-lowrank:n=8,r=2,scale=1`; with `m=..` a general `M×N` matrix.
    RandomLowRank {
        m: Option<usize>,
        n: usize,
        rank: usize,
        scale: f64,
    },
    /// `all-ones:n=4`
    AllOnes { n: usize },
    /// `diagonal:1,-2,3`
    Diagonal(Vec<f64>),
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
        let bad = |msg: String| Error::InvalidArgument(format!("generator '{spec}': {msg}"));
        match name {
            "diagonal" => {
                let values = params
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                if values.is_empty() {
                    return Err(bad("needs at least one value".into()));
                }
                Ok(Generator::Diagonal(values))
            }
            "all-ones" | "random-lowrank" => {
                let (mut m, mut n, mut rank, mut scale) = (None, None, None, 1.0);
                for kv in params.split(',').filter(|s| !s.trim().is_empty()) {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{kv}'")))?;
                    let int = || v.trim().parse::<usize>().map_err(|e| bad(format!("{k}: {e}")));
                    match k.trim() {
                        "m" => m = Some(int()?),
                        "n" => n = Some(int()?),
                        "r" | "rank" => rank = Some(int()?),
                        "scale" => scale = v.trim().parse::<f64>().map_err(|e| bad(format!("scale: {e}")))?,
                        other => return Err(bad(format!("unknown parameter '{other}'"))),
                    }
                }
                let n = n.ok_or_else(|| bad("missing n".into()))?;
                if n == 0 {
                    return Err(bad("n must be positive".into()));
                }
                if name == "all-ones" {
                    return Ok(Generator::AllOnes { n });
                }
                Ok(Generator::RandomLowRank {
                    m,
                    n,
                    rank: rank.ok_or_else(|| bad("missing r".into()))?,
                    scale,
                })
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown generator '{other}' (expected random-lowrank, all-ones or diagonal)"
            ))),
        }
    }
}

impl Generator {
    pub fn generate(&self, seed: u64) -> Result<ComplexMatrix> {
        match self {
            Generator::AllOnes { n } => Ok(ComplexMatrix::from_fn(*n, *n, |_, _| C64::new(1.0, 0.0))),
            Generator::Diagonal(v) => Ok(ComplexMatrix::diagonal(
                &v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(),
            )),
            Generator::RandomLowRank { m, n, rank, scale } => {
                let mut rng = rng_for(seed, Stream::Matrix);
                match m {
                    Some(m) => random_low_rank_rect(*m, *n, *rank, *scale, &mut rng),
                    None => Ok(random_low_rank(*n, *rank, *scale, &mut rng)?.into_matrix()),
                }
            }
        }
    }
}

/// Phase-estimation parameters shared by `qpe`, `svd` and `procrustes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpeParams {
    pub bits: u32,
    pub backend: Backend,
    pub threshold: f64,
    /// Defaults to `π / (‖A‖_max (1 + 1e-9))`.
    pub base_time: Option<f64>,
    pub trotter_epsilon: f64,
}

impl QpeParams {
    fn config(&self, max_norm: f64) -> QpeConfig {
        let base = self.base_time.unwrap_or_else(|| QpeConfig::default_base_time(max_norm));
        QpeConfig {
            trotter_epsilon: self.trotter_epsilon,
            threshold: self.threshold,
            ..QpeConfig::new(self.bits, base, self.backend)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Evolve {
        state: Option<PathBuf>,
        time: f64,
        epsilon: f64,
        steps: Option<usize>,
    },
    ErrorSweep {
        state: Option<PathBuf>,
        dts: Vec<f64>,
    },
    Qpe {
        state: Option<PathBuf>,
        qpe: QpeParams,
    },
    Svd {
        qpe: QpeParams,
    },
    DemoPhaseAmbiguity {
        bits: u32,
    },
    Procrustes {
        state: Option<PathBuf>,
        qpe: QpeParams,
        shots: Option<u64>,
    },
    GenMatrix {
        m: Option<usize>,
        n: usize,
        rank: usize,
        scale: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Evolve { .. } => "evolve",
            Command::ErrorSweep { .. } => "error-sweep",
            Command::Qpe { .. } => "qpe",
            Command::Svd { .. } => "svd",
            Command::DemoPhaseAmbiguity { .. } => "demo-phase-ambiguity",
            Command::Procrustes { .. } => "procrustes",
            Command::GenMatrix { .. } => "gen-matrix",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default)]
    pub source: Option<MatrixSource>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub command: Command,
}

impl ExperimentConfig {
    /// Accepts a bare config or any output file that embeds one under `config`.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let inner = match value.get("config") {
            Some(c) => c.clone(),
            None => value,
        };
        Ok(serde_json::from_value(inner)?)
    }

    pub fn from_csv_header(text: &str) -> Result<Self> {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix("# config: "))
            .ok_or_else(|| Error::Format("no '# config:' line".into()))?;
        Self::from_json(line)
    }

    pub fn load_matrix(&self) -> Result<ComplexMatrix> {
        match &self.source {
            Some(MatrixSource::File(p)) => read_matrix(p),
            Some(MatrixSource::Generator(spec)) => spec.parse::<Generator>()?.generate(self.seed),
            None => Err(Error::InvalidArgument("no matrix given (use --matrix or --generator)".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub artifact: String,
    pub version: String,
    pub format_version: u32,
    pub config: ExperimentConfig,
    /// Element queries issued to the matrix oracle.
    pub oracle_calls: u64,
    /// `(log₂ dim)²`, the qRAM access-time factor the call count would be
    /// multiplied by; reported, never applied.
    pub qram_latency_factor: f64,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

/// What a run produced: the primary output text and any companion files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub primary: String,
    pub extra: Vec<(PathBuf, String)>,
}

fn qram_factor(dim: usize) -> f64 {
    let l = (dim.max(2) as f64).log2();
    l * l
}

fn random_state(dim: usize, seed: u64) -> QuantumState {
    let mut rng = rng_for(seed, Stream::States);
    QuantumState::normalized((0..dim).map(|_| complex_gaussian(&mut rng)).collect()).expect("nonzero draw")
}

fn density_input(path: &Option<PathBuf>, dim: usize, seed: u64) -> Result<DensityMatrix> {
    match path {
        Some(p) => read_density(p),
        None => Ok(random_state(dim, seed).to_density()),
    }
}

fn state_input(path: &Option<PathBuf>, dim: usize, seed: u64) -> Result<QuantumState> {
    match path {
        Some(p) => read_state(p),
        None => Ok(random_state(dim, seed)),
    }
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixFile::from_matrix(m, None)).expect("serializable")
}

fn state_value(psi: &QuantumState) -> Value {
    Value::Array(psi.amplitudes().iter().map(|z| json!([z.re, z.im])).collect())
}

fn envelope(config: &ExperimentConfig, dim: usize, calls: u64, result: Value, start: Option<Instant>) -> Result<String> {
    let env = ResultEnvelope {
        artifact: ARTIFACT.into(),
        version: VERSION.into(),
        format_version: FORMAT_VERSION,
        config: config.clone(),
        oracle_calls: calls,
        qram_latency_factor: qram_factor(dim),
        result,
        wall_ms: start.map(|s| s.elapsed().as_secs_f64() * 1e3),
    };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    Ok(text)
}

/// Path of the `Ã` companion file: `dir/stem.extended.json`.
pub fn extended_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("matrix");
    out.with_file_name(format!("{stem}.extended.json"))
}

/// Runs one experiment. With `timing`, the envelope carries wall-clock time
/// and is no longer byte-reproducible.
pub fn execute(config: &ExperimentConfig, timing: bool) -> Result<RunOutput> {
    let start = timing.then(Instant::now);
    let config_value = serde_json::to_value(config)?;
    let single = |primary| {
        Ok(RunOutput {
            primary,
            extra: Vec::new(),
        })
    };
    match &config.command {
        Command::GenMatrix { m, n, rank, scale } => {
            let gen = Generator::RandomLowRank {
                m: *m,
                n: *n,
                rank: *rank,
                scale: *scale,
            };
            let a = gen.generate(config.seed)?;
            let csv = config
                .output
                .as_deref()
                .is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")));
            let primary = if csv {
                format!("# config: {}\n{}", serde_json::to_string(config)?, crate::io::matrix_to_csv(&a))
            } else {
                let mut s = crate::io::matrix_to_json(&a, Some(config_value.clone()))?;
                s.push('\n');
                s
            };
            let mut extra = Vec::new();
            if m.is_some() {
                if let Some(out) = &config.output {
                    let ext = embed(Arc::new(MatrixOracle::from_matrix(a))).materialize();
                    let mut s = crate::io::matrix_to_json(&ext, Some(config_value))?;
                    s.push('\n');
                    extra.push((extended_path(out), s));
                }
            }
            Ok(RunOutput { primary, extra })
        }
        Command::Evolve {
            state,
            time,
            epsilon,
            steps,
        } => {
            let a = config.load_matrix()?;
            let n = a.rows();
            let oracle = MatrixOracle::from_matrix(a);
            let sigma = density_input(state, n, config.seed)?;
            let evo = match steps {
                Some(k) => EvolutionConfig::with_steps(*time, *epsilon, *k)?,
                None => EvolutionConfig::new(*time, *epsilon, oracle.max_norm())?,
            };
            let (out, report) = evolve(&oracle, &sigma, &evo)?;
            let result = json!({
                "evolution": evo,
                "report": report,
                "initial_state": matrix_value(sigma.as_matrix()),
                "final_state": matrix_value(out.as_matrix()),
            });
            single(envelope(config, n, oracle.report_calls(), result, start)?)
        }
        Command::ErrorSweep { state, dts } => {
            let a = config.load_matrix()?;
            let n = a.rows();
            let oracle = MatrixOracle::from_matrix(a);
            let sigma = density_input(state, n, config.seed)?;
            let sweep = error_sweep(&oracle, &sigma, dts)?;
            let mut csv = String::new();
            writeln!(csv, "# config: {}", serde_json::to_string(config)?).expect("string write");
            match sweep.slope {
                Some(s) => writeln!(csv, "# slope: {s}"),
                None => writeln!(csv, "# slope: none"),
            }
            .expect("string write");
            writeln!(csv, "# oracle_calls: {}", oracle.report_calls()).expect("string write");
            if let Some(s) = start {
                writeln!(csv, "# wall_ms: {}", s.elapsed().as_secs_f64() * 1e3).expect("string write");
            }
            writeln!(csv, "delta_t,measured_error,bound,ratio").expect("string write");
            for r in &sweep.rows {
                writeln!(csv, "{},{},{},{}", r.delta_t, r.measured_error, r.bound, r.ratio).expect("string write");
            }
            single(csv)
        }
        Command::Qpe { state, qpe: params } => {
            let a = config.load_matrix()?;
            let n = a.rows();
            let oracle = MatrixOracle::from_matrix(a);
            let psi = state_input(state, n, config.seed)?;
            let qc = params.config(oracle.max_norm());
            let out = qpe(&oracle, &psi, &qc)?;
            let result = json!({
                "qpe_config": qc,
                "input_state": state_value(&psi),
                "distribution": out.distribution,
                "estimates": out.estimates,
            });
            single(envelope(config, n, oracle.report_calls(), result, start)?)
        }
        Command::Svd { qpe: params } => {
            let a = config.load_matrix()?;
            let dim = a.rows() + a.cols();
            let oracle = Arc::new(MatrixOracle::from_matrix(a.clone()));
            let qc = params.config(oracle.max_norm());
            let out = quantum_svd(oracle.clone(), &qc, params.threshold)?;
            let residual = out.reconstruction_residual(&a);
            let check = if dim <= 128 {
                Some(extended_spectrum_check(&embed(Arc::new(oracle.fresh())))?)
            } else {
                None
            };
            let triplets: Vec<Value> = (0..out.rank)
                .map(|j| {
                    json!({
                        "sigma": out.singular_values[j],
                        "grid_sigma": out.grid_singular_values[j],
                        "u": out.left_vectors[j].iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                        "v": out.right_vectors[j].iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                        "degenerate": out.degenerate[j],
                    })
                })
                .collect();
            let result = json!({
                "qpe_config": qc,
                "rank": out.rank,
                "triplets": triplets,
                "reconstruction_residual": residual,
                "relative_residual": residual / a.frobenius_norm(),
                "max_pairing_residual": out.max_pairing_residual(&a),
                "classical_singular_values": svd(&a).singular_values,
                "subvector_norm_error": check.as_ref().map(|c| c.subvector_norm_error),
                "extended_spectrum_error": check.as_ref().map(|c| c.spectrum_error),
                "warnings": out.warnings,
            });
            single(envelope(config, dim, oracle.report_calls(), result, start)?)
        }
        Command::DemoPhaseAmbiguity { bits } => {
            let a = config.load_matrix()?;
            let dim = a.rows() + a.cols();
            let r = svd(&a).numerical_rank(1e-10);
            let mut rng = rng_for(config.seed, Stream::Phases);
            let thetas: Vec<f64> = (0..r).map(|_| rng.random_range(0.5..TAU - 0.5)).collect();
            let demo = phase_ambiguity_demo(&a, &thetas)?;
            let oracle = Arc::new(MatrixOracle::from_matrix(a.clone()));
            let qc = QpeConfig::new(*bits, QpeConfig::default_base_time(oracle.max_norm()), Backend::ExactUnitary);
            let q = quantum_svd(oracle.clone(), &qc, 0.0)?;
            let residual = q.reconstruction_residual(&a);
            let result = json!({
                "ambiguity": demo,
                "quantum_svd_residual": residual,
                "quantum_svd_relative_residual": residual / a.frobenius_norm(),
            });
            single(envelope(config, dim, oracle.report_calls(), result, start)?)
        }
        Command::Procrustes {
            state,
            qpe: params,
            shots,
        } => {
            let a = config.load_matrix()?;
            let dim = a.rows() + a.cols();
            let psi = match state {
                Some(p) => read_state(p)?,
                None => {
                    let w = classical_nearest_isometry(&a)?;
                    let g = random_state(a.cols(), config.seed);
                    QuantumState::normalized(w.projector().mul_vec(g.amplitudes()))?
                }
            };
            let oracle = Arc::new(MatrixOracle::from_matrix(a));
            let qc = params.config(oracle.max_norm());
            let mut rng = rng_for(config.seed, Stream::Shots);
            let out = quantum_procrustes_apply(
                oracle.clone(),
                &psi,
                &qc,
                params.threshold,
                shots.map(|k| (k, &mut rng)),
            )?;
            let result = json!({
                "qpe_config": qc,
                "input_state": state_value(&psi),
                "procrustes": out,
            });
            single(envelope(config, dim, oracle.report_calls(), result, start)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs() {
        assert_eq!(
            "random-lowrank:n=8,r=2,scale=1".parse::<Generator>().unwrap(),
            Generator::RandomLowRank {
                m: None,
                n: 8,
                rank: 2,
                scale: 1.0
            }
        );
        assert_eq!("all-ones:n=3".parse::<Generator>().unwrap(), Generator::AllOnes { n: 3 });
        assert_eq!(
            "diagonal:1,-2.5".parse::<Generator>().unwrap(),
            Generator::Diagonal(vec![1.0, -2.5])
        );
        assert!("random-lowrank:n=8".parse::<Generator>().is_err());
        assert!("bogus:n=2".parse::<Generator>().is_err());
        assert!("all-ones:n=2,q=1".parse::<Generator>().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = ExperimentConfig {
            seed: 7,
            source: Some(MatrixSource::Generator("all-ones:n=2".into())),
            output: None,
            command: Command::Qpe {
                state: None,
                qpe: QpeParams {
                    bits: 3,
                    backend: Backend::ExactUnitary,
                    threshold: 0.0,
                    base_time: Some(0.1 + 0.2),
                    trotter_epsilon: 0.01,
                },
            },
        };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = rng_for(1, Stream::Matrix).random();
        let b: u64 = rng_for(1, Stream::States).random();
        assert_ne!(a, b);
    }
}
