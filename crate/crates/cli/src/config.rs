//! Run configuration file.

use std::path::Path;

use multistable::{ProcessSpec, SimulationConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn schema() -> u32 {
    SCHEMA_VERSION
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema")]
    pub schema_version: u32,
    pub process: ProcessSpec,
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub estimate: EstimateConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// One CSV with a column per path instead of a file per path.
    pub wide: bool,
    /// Write a gnuplot script next to the data.
    #[serde(default = "yes")]
    pub plot_script: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            wide: false,
            plot_script: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Samples per check.
    pub n: usize,
    /// Seed for the checks; the simulation seed when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Probe point; the window midpoint when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    pub r_list: Vec<f64>,
    pub t_probe: f64,
    /// Transfer-probe exponent; halfway between h(u) and 1 when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Offsets v - u for the transfer probe.
    pub v_offsets: Vec<f64>,
    /// Moment order for moment-scaling.
    pub p: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n: 5000,
            seed: None,
            u: None,
            r_list: vec![0.4, 0.1, 0.02],
            t_probe: 1.0,
            eta: None,
            v_offsets: vec![0.2, 0.1, 0.05],
            p: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    /// Probe points; a quarter and three quarters into the grid when empty.
    pub probes: Vec<f64>,
    /// Largest lag; smaller lags halve it while they stay on the grid.
    pub window: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            probes: vec![],
            window: 0.125,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "config schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_idempotent() {
        let text = r#"{
            "process": {"kind": "mbm", "h": {"kind": "linear", "intercept": 0.3, "slope": 0.4}},
            "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 11}, "n_paths": 2, "seed": 4},
            "verify": {"n": 100}
        }"#;
        let a = RunConfig::parse(text).unwrap();
        let s1 = a.to_json();
        let b = RunConfig::parse(&s1).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_json(), s1);
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let base = r#""process": {"kind": "fbm", "h": 0.5}, "simulation": {"t_grid": [0, 1]}"#;
        assert!(RunConfig::parse(&format!("{{{base}}}")).is_ok());
        assert!(RunConfig::parse(&format!("{{{base}, \"bogus\": 1}}")).is_err());
        assert!(RunConfig::parse(&format!("{{{base}, \"schema_version\": 9}}")).is_err());
    }
}
