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

//! `qsvd`: command-line front end to the simulator.
//!
//! Exit status is 0 on success, 2 for invalid input or usage, 1 when a run
//! fails.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsvd_core::harness::{execute, Command, ExperimentConfig, MatrixSource, QpeParams, FORMAT_VERSION, VERSION};
use qsvd_core::qpe::Backend;

fn version_text() -> &'static str {
    Box::leak(format!("{VERSION} (result format {FORMAT_VERSION})").into_boxed_str())
}

#[derive(Parser, Debug)]
#[command(name = "qsvd", version = version_text(), about = "Modified-swap matrix exponentiation, phase estimation, SVD and Procrustes simulator")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    /// Re-run the experiment embedded in an earlier output file; prints to stdout.
    #[arg(long, value_name = "FILE")]
    replay: Option<PathBuf>,

    /// Record wall-clock time in the output (breaks byte-reproducibility).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args, Debug)]
struct Source {
    /// Matrix file (JSON, or CSV by extension).
    #[arg(long, value_name = "FILE", conflicts_with = "generator")]
    matrix: Option<PathBuf>,
    /// Built-in matrix: random-lowrank:n=..,r=..[,m=..][,scale=..], all-ones:n=.., diagonal:v1,v2,..
    #[arg(long, value_name = "SPEC")]
    generator: Option<String>,
}

impl Source {
    fn into_source(self) -> Option<MatrixSource> {
        self.matrix
            .map(MatrixSource::File)
            .or(self.generator.map(MatrixSource::Generator))
    }
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QpeArgs {
    /// exact | trotter
    #[arg(long, default_value = "exact", value_parser = parse_backend)]
    backend: Backend,
    /// Drop estimates with |λ/N| below this.
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Evolution time of the least significant control (default π/‖A‖_max).
    #[arg(long)]
    base_time: Option<f64>,
    /// Channel error budget per controlled evolution (trotter backend).
    #[arg(long, default_value_t = 0.01)]
    trotter_epsilon: f64,
}

impl QpeArgs {
    fn params(self, bits: u32) -> QpeParams {
        QpeParams {
            bits,
            backend: self.backend,
            threshold: self.threshold,
            base_time: self.base_time,
            trotter_epsilon: self.trotter_epsilon,
        }
    }
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: qsvd_core::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evolve a state under e^{-i(A/N)t} with the channel and compare with exact evolution.
    Evolve {
        #[command(flatten)]
        source: Source,
        /// State (amplitudes) or density-matrix file; seeded random pure state when omitted.
        #[arg(long, value_name = "FILE")]
        state: Option<PathBuf>,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        epsilon: f64,
        /// Override the step count.
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Single-step channel error against exact evolution for several time steps (CSV).
    ErrorSweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "FILE")]
        state: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025, 0.0125])]
        dts: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Phase estimation of A/N on a state.
    Qpe {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "FILE")]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        bits: u32,
        #[command(flatten)]
        qpe: QpeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Singular value decomposition through the extended matrix.
    Svd {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 12)]
        bits: u32,
        #[command(flatten)]
        qpe: QpeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Show that AA† does not fix the relative phases of singular vectors.
    DemoPhaseAmbiguity {
        #[command(flatten)]
        source: Source,
        /// Register size of the comparison quantum SVD.
        #[arg(long, default_value_t = 12)]
        bits: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Apply the nearest partial isometry UV† to a state.
    Procrustes {
        #[command(flatten)]
        source: Source,
        /// Input state; seeded random state in the row space of A when omitted.
        #[arg(long, value_name = "FILE")]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        bits: u32,
        #[command(flatten)]
        qpe: QpeArgs,
        /// Also sample the projection this many times.
        #[arg(long)]
        shots: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded random low-rank matrix (Hermitian, or M×N with --m).
    GenMatrix {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        common: Common,
    },
}

impl Cmd {
    fn into_config(self) -> ExperimentConfig {
        let (source, common, command) = match self {
            Cmd::Evolve {
                source,
                state,
                time,
                epsilon,
                steps,
                common,
            } => (
                source.into_source(),
                common,
                Command::Evolve {
                    state,
                    time,
                    epsilon,
                    steps,
                },
            ),
            Cmd::ErrorSweep {
                source,
                state,
                dts,
                common,
            } => (source.into_source(), common, Command::ErrorSweep { state, dts }),
            Cmd::Qpe {
                source,
                state,
                bits,
                qpe,
                common,
            } => (
                source.into_source(),
                common,
                Command::Qpe {
                    state,
                    qpe: qpe.params(bits),
                },
            ),
            Cmd::Svd {
                source,
                bits,
                qpe,
                common,
            } => (source.into_source(), common, Command::Svd { qpe: qpe.params(bits) }),
            Cmd::DemoPhaseAmbiguity { source, bits, common } => {
                (source.into_source(), common, Command::DemoPhaseAmbiguity { bits })
            }
            Cmd::Procrustes {
                source,
                state,
                bits,
                qpe,
                shots,
                common,
            } => (
                source.into_source(),
                common,
                Command::Procrustes {
                    state,
                    qpe: qpe.params(bits),
                    shots,
                },
            ),
            Cmd::GenMatrix {
                n,
                m,
                rank,
                scale,
                common,
            } => (None, common, Command::GenMatrix { m, n, rank, scale }),
        };
        ExperimentConfig {
            seed: common.seed,
            source,
            output: common.out,
            command,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<qsvd_core::Error> for Failure {
    fn from(e: qsvd_core::Error) -> Self {
        Failure {
            code: if e.is_validation() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(path) = cli.replay {
        let text = fs::read_to_string(&path).map_err(|e| Failure {
            code: 2,
            message: format!("{}: {e}", path.display()),
        })?;
        let config = if text.starts_with('#') {
            ExperimentConfig::from_csv_header(&text)?
        } else {
            ExperimentConfig::from_json(&text)?
        };
        print!("{}", execute(&config, cli.timing)?.primary);
        return Ok(());
    }
    let Some(cmd) = cli.command else {
        return Err(Failure {
            code: 2,
            message: "a subcommand or --replay is required (see --help)".into(),
        });
    };
    let config = cmd.into_config();
    let out = execute(&config, cli.timing)?;
    match &config.output {
        Some(path) => fs::write(path, &out.primary).map_err(|e| io_failure(path, e))?,
        None => print!("{}", out.primary),
    }
    for (path, text) in &out.extra {
        fs::write(path, text).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qsvd: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
