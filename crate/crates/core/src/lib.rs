//! Simulation and verification of localisable, multifractional and
//! multistable stochastic processes.

pub mod analysis;
pub mod error;
pub mod kernels;
pub mod poisson;
pub mod processes;
pub mod rng;

pub use error::{Error, Result};
pub use kernels::{c_alpha, fbm_normalizer, series_normalizer, FuncTable, KernelSpec, NormResult, QuadConfig};
pub use rng::{seed_stream, RngStream, StableParams};
pub use processes::{apply_amplitude, simulate, ProcessSpec, SamplePath, SimulationConfig, Simulator, TimeGrid};
pub use analysis::{CheckResult, DiagnosticReport, ScalingProbeResult};
