use std::fmt::Write as _;
use std::path::Path;

use multistable::{SamplePath, Simulator};
use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::{sha256_hex, write_all, CliError};

#[derive(Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    version: &'static str,
    kind: &'static str,
    seed: u64,
    n_paths: usize,
    process: &'a multistable::ProcessSpec,
    simulation: &'a multistable::SimulationConfig,
    truncation: &'a multistable::processes::TruncationRecord,
    files: Vec<FileEntry>,
    /// SHA-256 over the `name sha256` lines of all data files.
    digest: String,
}

fn wide_csv(paths: &[SamplePath]) -> String {
    let mut s = String::new();
    let first = &paths[0];
    let _ = writeln!(s, "# kind={}", first.meta.kind);
    let _ = writeln!(s, "# seed={}", first.meta.seed);
    let _ = writeln!(s, "# paths={}", paths.len());
    if let Some(spec) = &first.meta.spec {
        let _ = writeln!(s, "# spec={}", serde_json::to_string(spec).unwrap_or_default());
    }
    s.push('t');
    for i in 0..paths.len() {
        let _ = write!(s, ",y{i}");
    }
    s.push('\n');
    for (k, t) in first.t.iter().enumerate() {
        let _ = write!(s, "{t}");
        for p in paths {
            let _ = write!(s, ",{}", p.y[k]);
        }
        s.push('\n');
    }
    s
}

fn plot_script(names: &[String], wide_cols: usize) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n");
    let plots: Vec<String> = if wide_cols > 0 {
        (0..wide_cols.min(10))
            .map(|i| format!("'{}' using 1:{} with lines", names[0], i + 2))
            .collect()
    } else {
        names.iter().take(10).map(|n| format!("'{n}' using 1:2 with lines")).collect()
    };
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let sim = Simulator::new(&cfg.process, &cfg.simulation)?;
    let paths = sim.paths().map_err(|e| CliError::Run(e.to_string()))?;
    let mut files: Vec<(String, Vec<u8>)> = if cfg.output.wide {
        vec![("paths.csv".to_string(), wide_csv(&paths).into_bytes())]
    } else {
        paths
            .iter()
            .map(|p| (format!("path_{:05}.csv", p.meta.path_index), p.to_csv().into_bytes()))
            .collect()
    };
    if cfg.output.plot_script {
        let names: Vec<String> = files.iter().map(|f| f.0.clone()).collect();
        let cols = if cfg.output.wide { paths.len() } else { 0 };
        files.push(("plot.gp".to_string(), plot_script(&names, cols).into_bytes()));
    }
    let entries: Vec<FileEntry> = files
        .iter()
        .map(|(name, bytes)| FileEntry {
            name: name.clone(),
            sha256: sha256_hex(bytes),
        })
        .collect();
    let listing: String = entries.iter().map(|e| format!("{} {}\n", e.name, e.sha256)).collect();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        kind: cfg.process.kind(),
        seed: cfg.simulation.seed,
        n_paths: paths.len(),
        process: &cfg.process,
        simulation: &cfg.simulation,
        truncation: sim.truncation(),
        files: entries,
        digest: sha256_hex(listing.as_bytes()),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    files.push(("manifest.json".to_string(), json.into_bytes()));
    write_all(out, &files)
}
