use std::path::Path;

use multistable::analysis::{estimate_h, HEstimate, Table};
use multistable::{SamplePath, Simulator};
use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::{write_all, CliError};

#[derive(Serialize)]
struct Estimates<'a> {
    schema_version: u32,
    source: String,
    n_paths: usize,
    window: f64,
    probes: &'a [HEstimate],
}

fn read_paths(pattern: &str) -> Result<Vec<SamplePath>, CliError> {
    let mut files: Vec<_> = glob::glob(pattern)
        .map_err(|e| CliError::Config(format!("bad glob '{pattern}': {e}")))?
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    files.sort();
    if files.is_empty() {
        return Err(CliError::Config(format!("no files match '{pattern}'")));
    }
    files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).map_err(|e| CliError::Config(format!("{}: {e}", f.display())))?;
            SamplePath::from_csv(&text).map_err(|e| CliError::Config(format!("{}: {e}", f.display())))
        })
        .collect()
}

fn nearest(t: &[f64], x: f64) -> f64 {
    *t.iter()
        .min_by(|a, b| (*a - x).abs().total_cmp(&(*b - x).abs()))
        .expect("grid is nonempty")
}

pub fn run_estimate(cfg: &RunConfig, pattern: Option<&str>, out: &Path) -> Result<(), CliError> {
    let (paths, source) = match pattern {
        Some(p) => (read_paths(p)?, format!("files: {p}")),
        None => {
            let sim = Simulator::new(&cfg.process, &cfg.simulation)?;
            let paths = sim.paths().map_err(|e| CliError::Run(e.to_string()))?;
            (paths, format!("simulated {}", cfg.process.kind()))
        }
    };
    if paths.is_empty() {
        return Err(CliError::Config("no input paths".into()));
    }
    let t = &paths[0].t;
    if paths.iter().any(|p| p.t != *t) {
        return Err(CliError::Config("input paths do not share a time grid".into()));
    }
    let (lo, hi) = (t[0], t[t.len() - 1]);
    let probes: Vec<f64> = if cfg.estimate.probes.is_empty() {
        vec![nearest(t, lo + 0.25 * (hi - lo)), nearest(t, lo + 0.75 * (hi - lo))]
    } else {
        cfg.estimate.probes.clone()
    };
    let ests: Vec<HEstimate> = probes
        .iter()
        .map(|&u| estimate_h(&paths, u, cfg.estimate.window))
        .collect::<multistable::Result<_>>()?;
    let mut table = Table::new(&["u", "h", "h_se", "alpha", "alpha_se"]);
    for e in &ests {
        table.push(vec![e.u, e.h, e.se, e.alpha, e.alpha_se]);
    }
    let doc = Estimates {
        schema_version: SCHEMA_VERSION,
        source,
        n_paths: paths.len(),
        window: cfg.estimate.window,
        probes: &ests,
    };
    let json = serde_json::to_string_pretty(&doc).expect("estimates serialize");
    write_all(
        out,
        &[
            ("estimates.json".to_string(), json.into_bytes()),
            ("estimates.csv".to_string(), table.to_csv().into_bytes()),
        ],
    )
}
