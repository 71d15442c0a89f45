//! Shared fixtures for the benchmarks under `benches/`.

use multistable::{FuncTable, ProcessSpec, SimulationConfig};

/// `n + 1` equally spaced points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

pub fn config(n_points: usize, y_max: f64) -> SimulationConfig {
    SimulationConfig::new(unit_grid(n_points), 1, 1).with_y_max(y_max)
}

/// One representative spec per noise and kernel family.
pub fn representative_specs() -> Vec<(&'static str, ProcessSpec)> {
    vec![
        ("fbm", ProcessSpec::Fbm { h: 0.7 }),
        ("stable_levy", ProcessSpec::StableLevy { alpha: 1.5 }),
        (
            "lmmm",
            ProcessSpec::Lmmm {
                alpha: FuncTable::linear(1.5, 0.3),
                h: FuncTable::linear(0.5, 0.2),
                amplitude: FuncTable::constant(1.0),
            },
        ),
        (
            "multistable_rou",
            ProcessSpec::MultistableRou {
                alpha: FuncTable::linear(1.3, 0.4),
                lambda: 1.0,
            },
        ),
    ]
}
