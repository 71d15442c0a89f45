//! Sample-path simulators.
//!
//! Every kind is a diagonal `Y(t) = X(t, t)` of a field
//! `X(t, v) = scale(v) * ∫ f(t, v, x) N(dx)` where the noise `N` is either a
//! Wiener measure (Gaussian kinds) or the Poisson series
//! `Σ f(t, v, X) Y^<-1/alpha(v)>` (stable kinds). All kinds go through the
//! same [`Simulator`], so constant-parameter reductions hold bit for bit.
//!
//! One noise realization serves all evaluation points of a path. Its
//! geometry (cloud rectangles, cell grid) depends only on the kernel and the
//! simulation window, never on the individual grid points.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    fbm_normalizer_with, series_normalizer, FuncTable, KernelAt, KernelSpec, QuadConfig,
};
use crate::poisson::{
    choose_truncation, expected_draws, generate_regions, small_jump_variance, CompensatedSum,
    Envelope, PoissonCloud, Rectangle, DEFAULT_MEMORY_CAP,
};
use crate::rng::RngStream;

fn unit() -> FuncTable {
    FuncTable::constant(1.0)
}

fn half() -> FuncTable {
    FuncTable::constant(0.5)
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// Which process to simulate, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    Fbm {
        h: f64,
    },
    Mbm {
        h: FuncTable,
        #[serde(default = "unit")]
        amplitude: FuncTable,
    },
    StableLevy {
        alpha: f64,
    },
    Lsfm {
        alpha: f64,
        h: f64,
        #[serde(default = "one")]
        a_coef: f64,
        #[serde(default = "one")]
        b_coef: f64,
    },
    Lmsm {
        alpha: f64,
        h: FuncTable,
        #[serde(default = "one")]
        a_coef: f64,
        #[serde(default = "one")]
        b_coef: f64,
    },
    MovingAverage {
        alpha: f64,
        g: FuncTable,
    },
    ReverseOu {
        alpha: f64,
        lambda: f64,
    },
    MultistableLevy {
        alpha: FuncTable,
        #[serde(default = "unit")]
        amplitude: FuncTable,
    },
    Lmmm {
        alpha: FuncTable,
        h: FuncTable,
        #[serde(default = "unit")]
        amplitude: FuncTable,
    },
    LogFractionalMsm {
        alpha: FuncTable,
        #[serde(default = "unit")]
        amplitude: FuncTable,
    },
    MultistableRou {
        alpha: FuncTable,
        lambda: f64,
    },
    MultistableDiagonal {
        kernel: KernelSpec,
        #[serde(default = "half")]
        h: FuncTable,
        alpha: FuncTable,
        #[serde(default = "unit")]
        amplitude: FuncTable,
        /// Multiply by the series normalizer of `alpha(t)`.
        #[serde(default)]
        normalize: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Noise {
    Wiener,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Norm {
    One,
    Series,
    InverseFbm,
}

#[derive(Debug, Clone)]
struct Model {
    noise: Noise,
    kernel: KernelSpec,
    h: FuncTable,
    alpha: FuncTable,
    amp: FuncTable,
    norm: Norm,
    // open interval alpha(t) must stay in
    alpha_range: (f64, f64),
    needs_h: bool,
}

impl ProcessSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProcessSpec::Fbm { .. } => "fbm",
            ProcessSpec::Mbm { .. } => "mbm",
            ProcessSpec::StableLevy { .. } => "stable_levy",
            ProcessSpec::Lsfm { .. } => "lsfm",
            ProcessSpec::Lmsm { .. } => "lmsm",
            ProcessSpec::MovingAverage { .. } => "moving_average",
            ProcessSpec::ReverseOu { .. } => "reverse_ou",
            ProcessSpec::MultistableLevy { .. } => "multistable_levy",
            ProcessSpec::Lmmm { .. } => "lmmm",
            ProcessSpec::LogFractionalMsm { .. } => "log_fractional_msm",
            ProcessSpec::MultistableRou { .. } => "multistable_rou",
            ProcessSpec::MultistableDiagonal { .. } => "multistable_diagonal",
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, ProcessSpec::Fbm { .. } | ProcessSpec::Mbm { .. })
    }

    fn model(&self) -> Model {
        use ProcessSpec as P;
        let c = FuncTable::constant;
        let stable = |kernel, h, alpha, amp, norm| Model {
            noise: Noise::Poisson,
            kernel,
            h,
            alpha,
            amp,
            norm,
            alpha_range: (0.0, 2.0),
            needs_h: false,
        };
        match self.clone() {
            P::Fbm { h } => Model {
                noise: Noise::Wiener,
                kernel: KernelSpec::FbmKernel,
                h: c(h),
                alpha: c(2.0),
                amp: unit(),
                norm: Norm::InverseFbm,
                alpha_range: (0.0, 2.0),
                needs_h: true,
            },
            P::Mbm { h, amplitude } => Model {
                noise: Noise::Wiener,
                kernel: KernelSpec::FbmKernel,
                h,
                alpha: c(2.0),
                amp: amplitude,
                norm: Norm::InverseFbm,
                alpha_range: (0.0, 2.0),
                needs_h: true,
            },
            P::StableLevy { alpha } => stable(KernelSpec::Indicator, half(), c(alpha), unit(), Norm::Series),
            P::Lsfm {
                alpha,
                h,
                a_coef,
                b_coef,
            } => Model {
                needs_h: true,
                ..stable(KernelSpec::LsfmKernel { a_coef, b_coef }, c(h), c(alpha), unit(), Norm::Series)
            },
            P::Lmsm {
                alpha,
                h,
                a_coef,
                b_coef,
            } => Model {
                needs_h: true,
                ..stable(KernelSpec::LsfmKernel { a_coef, b_coef }, h, c(alpha), unit(), Norm::Series)
            },
            P::MovingAverage { alpha, g } => {
                stable(KernelSpec::UserTable { table: g }, half(), c(alpha), unit(), Norm::Series)
            }
            P::ReverseOu { alpha, lambda } => {
                stable(KernelSpec::ExpOuKernel { lambda }, half(), c(alpha), unit(), Norm::One)
            }
            P::MultistableLevy { alpha, amplitude } => {
                stable(KernelSpec::Indicator, half(), alpha, amplitude, Norm::Series)
            }
            P::Lmmm { alpha, h, amplitude } => Model {
                needs_h: true,
                ..stable(
                    KernelSpec::LsfmKernel {
                        a_coef: 1.0,
                        b_coef: 1.0,
                    },
                    h,
                    alpha,
                    amplitude,
                    Norm::Series,
                )
            },
            P::LogFractionalMsm { alpha, amplitude } => Model {
                alpha_range: (1.0, 2.0),
                ..stable(KernelSpec::LogKernel, half(), alpha, amplitude, Norm::One)
            },
            P::MultistableRou { alpha, lambda } => Model {
                alpha_range: (1.0, 2.0),
                ..stable(KernelSpec::ExpOuKernel { lambda }, half(), alpha, unit(), Norm::One)
            },
            P::MultistableDiagonal {
                kernel,
                h,
                alpha,
                amplitude,
                normalize,
            } => Model {
                needs_h: kernel.uses_exponent(),
                ..stable(
                    kernel,
                    h,
                    alpha,
                    amplitude,
                    if normalize { Norm::Series } else { Norm::One },
                )
            },
        }
    }

    /// Range checks over the time window `[lo, hi]`.
    pub fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        let m = self.model();
        m.kernel.validate()?;
        let covers = |f: &FuncTable, what: &str| -> Result<()> {
            f.validate()?;
            if !(f.contains(lo) && f.contains(hi)) {
                let (dlo, dhi) = f.domain();
                return Err(Error::InvalidParameter(format!(
                    "{what} is defined on [{dlo}, {dhi}], which does not cover the window [{lo}, {hi}]"
                )));
            }
            Ok(())
        };
        if m.needs_h {
            covers(&m.h, "h")?;
            let (a, b) = m.h.bounds_on(lo, hi);
            for v in [a, b] {
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::OutOfRange {
                        name: "h",
                        value: v,
                        range: "(0, 1)",
                    });
                }
            }
        }
        if m.noise == Noise::Poisson {
            covers(&m.alpha, "alpha")?;
            let (a, b) = m.alpha.bounds_on(lo, hi);
            let (rlo, rhi) = m.alpha_range;
            let range = if rlo == 1.0 { "(1, 2)" } else { "(0, 2)" };
            for v in [a, b] {
                if !(v > rlo && v < rhi) {
                    return Err(Error::OutOfRange {
                        name: "alpha",
                        value: v,
                        range,
                    });
                }
            }
        }
        covers(&m.amp, "amplitude")?;
        let (a, b) = m.amp.bounds_on(lo, hi);
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        if let KernelSpec::UserTable { table } = &m.kernel {
            let (dlo, dhi) = table.domain();
            if !(dlo.is_finite() && dhi.is_finite()) {
                return Err(Error::InvalidParameter(
                    "moving-average kernel table needs a bounded domain".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Time points, either listed or as a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    Points(Vec<f64>),
    Uniform { start: f64, stop: f64, n: usize },
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            TimeGrid::Points(p) => p.clone(),
            TimeGrid::Uniform { start, stop, n } => match n {
                0 => vec![],
                1 => vec![*start],
                _ => (0..*n)
                    .map(|i| {
                        if i + 1 == *n {
                            *stop
                        } else {
                            start + (stop - start) * i as f64 / (*n - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }
}

impl From<Vec<f64>> for TimeGrid {
    fn from(p: Vec<f64>) -> Self {
        TimeGrid::Points(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationConfig {
    /// Core `|y|` cutoff of the Poisson cloud.
    pub y_max: f64,
    /// When set, `y_max` comes from the moment bound for this tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Moment order for `tolerance`; defaults to half the smallest alpha.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_order: Option<f64>,
    /// Margin added around the window for kernels with unbounded support.
    pub pad: f64,
    /// Distance beyond which power-law tails are dropped.
    pub x_cutoff: f64,
    pub memory_cap: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            y_max: 1000.0,
            tolerance: None,
            moment_order: None,
            pad: 1.0,
            x_cutoff: 1e6,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WienerConfig {
    /// Cell width near the window.
    pub step: f64,
    /// Cells grow to `growth * distance` away from the window.
    pub growth: f64,
}

impl Default for WienerConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            growth: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_grid: TimeGrid,
    #[serde(default = "one_path")]
    pub n_paths: usize,
    #[serde(default)]
    pub seed: u64,
    /// Time window fixing the noise geometry; defaults to the hull of 0 and
    /// the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub wiener: WienerConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    /// Gaussian stand-in for the jumps with `|y| > y_max`.
    #[serde(default = "yes")]
    pub small_jumps: bool,
}

fn one_path() -> usize {
    1
}

impl SimulationConfig {
    pub fn new(t_grid: Vec<f64>, n_paths: usize, seed: u64) -> Self {
        Self {
            t_grid: TimeGrid::Points(t_grid),
            n_paths,
            seed,
            window: None,
            truncation: TruncationConfig::default(),
            wiener: WienerConfig::default(),
            quad: QuadConfig::default(),
            small_jumps: true,
        }
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some([lo, hi]);
        self
    }

    pub fn with_y_max(mut self, y_max: f64) -> Self {
        self.truncation.y_max = y_max;
        self
    }

    pub fn validate(&self) -> Result<Vec<f64>> {
        let t = self.t_grid.points();
        if t.is_empty() {
            return Err(Error::InvalidParameter("t_grid is empty".into()));
        }
        if t.iter().any(|v| !v.is_finite()) || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "t_grid must be finite and strictly increasing".into(),
            ));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be at least 1".into()));
        }
        let tr = &self.truncation;
        for (name, v) in [
            ("truncation.y_max", tr.y_max),
            ("truncation.pad", tr.pad),
            ("truncation.x_cutoff", tr.x_cutoff),
            ("truncation.memory_cap", tr.memory_cap),
            ("wiener.step", self.wiener.step),
            ("wiener.growth", self.wiener.growth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(tol) = tr.tolerance {
            if !(tol > 0.0) {
                return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
            }
        }
        let (lo, hi) = self.window_for(&t);
        if !(lo <= t[0] && t[t.len() - 1] <= hi) {
            return Err(Error::InvalidParameter(format!(
                "t_grid leaves the window [{lo}, {hi}]"
            )));
        }
        Ok(t)
    }

    fn window_for(&self, t: &[f64]) -> (f64, f64) {
        match self.window {
            Some([lo, hi]) => (lo, hi),
            None => (t[0].min(0.0), t[t.len() - 1].max(0.0)),
        }
    }
}

/// What the noise geometry ended up being; recorded with every path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub y_max: f64,
    pub core: [f64; 2],
    pub x_extent: [f64; 2],
    pub regions: usize,
    pub expected_points: f64,
    pub cells: usize,
    pub small_jumps: bool,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: f64,
    hi: f64,
    region: usize,
}

#[derive(Debug, Clone)]
struct Geometry {
    regions: Vec<Rectangle>,
    cells: Vec<Cell>,
    core: (f64, f64),
}

/// Uniform cells of width `step` on `[lo, hi]`.
fn uniform_cells(lo: f64, hi: f64, step: f64, region: usize, out: &mut Vec<Cell>) {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    for i in 0..n {
        let a = lo + (hi - lo) * i as f64 / n as f64;
        let b = if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * (i + 1) as f64 / n as f64
        };
        out.push(Cell { lo: a, hi: b, region });
    }
}

/// Cells on `[lo, hi]` that widen with distance from `anchor`.
fn graded_cells(lo: f64, hi: f64, anchor: f64, step: f64, growth: f64, region: usize, out: &mut Vec<Cell>) {
    let mut v = Vec::new();
    if anchor <= lo {
        let mut x = lo;
        while x < hi {
            let w = step.max(growth * (x - anchor));
            let nx = if x + w >= hi - 1e-12 * w { hi } else { x + w };
            v.push(Cell { lo: x, hi: nx, region });
            x = nx;
        }
    } else {
        let mut x = hi;
        while x > lo {
            let w = step.max(growth * (anchor - x));
            let nx = if x - w <= lo + 1e-12 * w { lo } else { x - w };
            v.push(Cell { lo: nx, hi: x, region });
            x = nx;
        }
        v.reverse();
    }
    out.extend(v);
}

#[derive(Debug, Clone, Copy)]
enum Decay {
    None,
    Power(f64),
    Exp(f64),
}

impl Model {
    fn alpha_bounds(&self, lo: f64, hi: f64) -> (f64, f64) {
        self.alpha.bounds_on(lo, hi)
    }

    /// Kernel support hull over the window and the tail behaviour outside.
    fn support_plan(&self, lo: f64, hi: f64, pad: f64) -> Result<((f64, f64), bool, bool, Decay)> {
        let (alo, ahi) = self.alpha_bounds(lo, hi);
        Ok(match &self.kernel {
            KernelSpec::Indicator => ((lo.min(0.0), hi.max(0.0)), false, false, Decay::None),
            KernelSpec::FbmKernel | KernelSpec::LsfmKernel { .. } => {
                // |x|^(e-1) with e = h - 1/alpha: alpha (1 - e) = alpha (1 - h) + 1
                let (_, hhi) = self.h.bounds_on(lo, hi);
                let _ = ahi;
                let kappa = alo * (1.0 - hhi) + 1.0;
                if self.noise == Noise::Poisson && kappa <= 1.0 {
                    return Err(Error::Divergent(format!(
                        "kernel tail is not alpha-integrable for h up to {hhi}"
                    )));
                }
                let left_only = self.noise == Noise::Wiener;
                (
                    (lo.min(0.0) - pad, if left_only { hi.max(0.0) } else { hi.max(0.0) + pad }),
                    true,
                    !left_only,
                    Decay::Power(kappa),
                )
            }
            KernelSpec::LogKernel => (
                (lo.min(0.0) - pad, hi.max(0.0) + pad),
                true,
                true,
                Decay::Power(alo),
            ),
            KernelSpec::ExpOuKernel { lambda } => ((lo, hi + pad), false, true, Decay::Exp(alo * lambda)),
            KernelSpec::UserTable { table } => {
                let (dlo, dhi) = table.domain();
                ((lo - dhi, hi - dlo), false, false, Decay::None)
            }
        })
    }
}

fn build_geometry(model: &Model, cfg: &SimulationConfig, window: (f64, f64), y_max: f64) -> Result<Geometry> {
    let tr = &cfg.truncation;
    let step = cfg.wiener.step;
    let growth = cfg.wiener.growth;
    let ((clo, chi), left, right, decay) = model.support_plan(window.0, window.1, tr.pad)?;
    let mut regions = Vec::new();
    let mut cells = Vec::new();
    if !(clo < chi) {
        return Ok(Geometry {
            regions,
            cells,
            core: (clo, chi),
        });
    }
    regions.push(Rectangle::new(clo, chi, y_max)?);
    uniform_cells(clo, chi, step, 0, &mut cells);

    let mut shell = |lo: f64, hi: f64, ym: f64, anchor: f64| -> Result<()> {
        let idx = regions.len();
        regions.push(Rectangle::new(lo, hi, ym)?);
        graded_cells(lo, hi, anchor, step, growth, idx, &mut cells);
        Ok(())
    };
    match decay {
        Decay::None => {}
        Decay::Power(kappa) => {
            let c = 0.5 * (clo + chi);
            let r0 = 0.5 * (chi - clo);
            let mut k = 1;
            loop {
                let (ra, rb) = (r0 * 2f64.powi(k - 1), r0 * 2f64.powi(k));
                let ym = y_max * 2f64.powf(-(k - 1) as f64 * kappa);
                if left {
                    shell(c - rb, c - ra, ym, clo)?;
                }
                if right {
                    shell(c + ra, c + rb, ym, chi)?;
                }
                if rb >= tr.x_cutoff || k > 200 {
                    break;
                }
                k += 1;
            }
        }
        Decay::Exp(rate) => {
            let mut k = 1;
            loop {
                let da = tr.pad * (2f64.powi(k - 1) - 1.0);
                let db = tr.pad * (2f64.powi(k) - 1.0);
                let ym = y_max * (-rate * da).exp();
                if right {
                    shell(chi + da, chi + db, ym, chi)?;
                }
                if rate * db > 60.0 || chi + db >= chi + tr.x_cutoff {
                    break;
                }
                k += 1;
            }
        }
    }
    regions_sorted(&mut regions, &mut cells);
    Ok(Geometry {
        regions,
        cells,
        core: (clo, chi),
    })
}

// keep region indices in x order so the cloud layout is easy to read back
fn regions_sorted(regions: &mut Vec<Rectangle>, cells: &mut [Cell]) {
    let mut order: Vec<usize> = (0..regions.len()).collect();
    order.sort_by(|&a, &b| regions[a].x_lo.total_cmp(&regions[b].x_lo));
    let mut remap = vec![0; regions.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let sorted: Vec<Rectangle> = order.iter().map(|&i| regions[i]).collect();
    *regions = sorted;
    for c in cells.iter_mut() {
        c.region = remap[c.region];
    }
    cells.sort_by(|a, b| a.lo.total_cmp(&b.lo));
}

fn wiener_geometry(model: &Model, cfg: &SimulationConfig, window: (f64, f64)) -> Result<Geometry> {
    let ((clo, chi), _, _, _) = model.support_plan(window.0, window.1, cfg.truncation.pad)?;
    let mut cells = Vec::new();
    graded_cells(-cfg.truncation.x_cutoff, clo, clo, cfg.wiener.step, cfg.wiener.growth, 0, &mut cells);
    uniform_cells(clo, chi, cfg.wiener.step, 0, &mut cells);
    Ok(Geometry {
        regions: vec![],
        cells,
        core: (clo, chi),
    })
}

/// Precomputed per-point data for a set of `(t, v)` evaluation points.
#[derive(Debug, Clone)]
pub struct Plan {
    points: Vec<(f64, f64)>,
    scale: Vec<f64>,
    alpha: Vec<f64>,
    // compensation weights, row-major [point][cell]
    weights: Vec<f64>,
    n_cells: usize,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The simulation engine for one process spec and config.
#[derive(Debug, Clone)]
pub struct Simulator {
    spec: ProcessSpec,
    cfg: SimulationConfig,
    model: Model,
    t: Vec<f64>,
    window: (f64, f64),
    geometry: Geometry,
    record: TruncationRecord,
    diagonal: Plan,
}

impl Simulator {
    pub fn new(spec: &ProcessSpec, cfg: &SimulationConfig) -> Result<Self> {
        let t = cfg.validate()?;
        let window = cfg.window_for(&t);
        spec.validate(window.0, window.1)?;
        let model = spec.model();
        if model.noise == Noise::Wiener {
            let min_gap = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            if cfg.wiener.step > 0.5 * min_gap.min(window.1 - window.0).max(f64::MIN_POSITIVE)
                && window.1 > window.0
            {
                return Err(Error::InvalidParameter(format!(
                    "Wiener step {} is too coarse for the time grid",
                    cfg.wiener.step
                )));
            }
        }
        let y_max = match (model.noise, cfg.truncation.tolerance) {
            (Noise::Poisson, Some(tol)) => tolerance_y_max(&model, cfg, window, tol)?,
            _ => cfg.truncation.y_max,
        };
        let geometry = match model.noise {
            Noise::Wiener => wiener_geometry(&model, cfg, window)?,
            Noise::Poisson => build_geometry(&model, cfg, window, y_max)?,
        };
        let expected = expected_draws(&geometry.regions);
        if expected > cfg.truncation.memory_cap {
            return Err(Error::MemoryCap {
                expected,
                cap: cfg.truncation.memory_cap,
            });
        }
        let x_extent = match (geometry.cells.first(), geometry.cells.last()) {
            (Some(a), Some(b)) => [a.lo, b.hi],
            _ => [geometry.core.0, geometry.core.1],
        };
        let record = TruncationRecord {
            y_max: if model.noise == Noise::Poisson { y_max } else { f64::INFINITY },
            core: [geometry.core.0, geometry.core.1],
            x_extent,
            regions: geometry.regions.len(),
            expected_points: geometry.regions.iter().map(|r| r.area()).sum(),
            cells: if model.noise == Noise::Wiener || cfg.small_jumps {
                geometry.cells.len()
            } else {
                0
            },
            small_jumps: model.noise == Noise::Poisson && cfg.small_jumps,
        };
        let mut sim = Simulator {
            spec: spec.clone(),
            cfg: cfg.clone(),
            model,
            t: t.clone(),
            window,
            geometry,
            record,
            diagonal: Plan {
                points: vec![],
                scale: vec![],
                alpha: vec![],
                weights: vec![],
                n_cells: 0,
            },
        };
        let diag: Vec<(f64, f64)> = t.iter().map(|&s| (s, s)).collect();
        sim.diagonal = sim.plan(&diag)?;
        Ok(sim)
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.cfg
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    /// The time window the noise geometry was built for.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn truncation(&self) -> &TruncationRecord {
        &self.record
    }

    fn gaussian_cells(&self) -> usize {
        if self.model.noise == Noise::Wiener || self.cfg.small_jumps {
            self.geometry.cells.len()
        } else {
            0
        }
    }

    /// Builds the evaluation data for field points `(t, v)`.
    pub fn plan(&self, points: &[(f64, f64)]) -> Result<Plan> {
        let (lo, hi) = self.window;
        let m = &self.model;
        let n_cells = self.gaussian_cells();
        let mut scale = Vec::with_capacity(points.len());
        let mut alpha = Vec::with_capacity(points.len());
        let mut weights = Vec::with_capacity(points.len() * n_cells);
        let mut fbm_cache: HashMap<u64, f64> = HashMap::new();
        for &(t, v) in points {
            if !(t >= lo && t <= hi && v >= lo && v <= hi) {
                return Err(Error::InvalidParameter(format!(
                    "evaluation point ({t}, {v}) lies outside the window [{lo}, {hi}]"
                )));
            }
            let a = m.alpha.eval(v)?;
            let norm = match m.norm {
                Norm::One => 1.0,
                Norm::Series => series_normalizer(a)?,
                Norm::InverseFbm => {
                    let h = m.h.eval(v)?;
                    match fbm_cache.get(&h.to_bits()) {
                        Some(c) => 1.0 / c,
                        None => {
                            let c = fbm_normalizer_with(h, &self.cfg.quad)?;
                            fbm_cache.insert(h.to_bits(), c);
                            1.0 / c
                        }
                    }
                }
            };
            scale.push(m.amp.eval(v)? * norm);
            alpha.push(a);
            if n_cells > 0 {
                let k = m.kernel.at(t, v, &m.h, &m.alpha)?;
                let region_sd: Vec<f64> = match m.noise {
                    Noise::Wiener => vec![1.0],
                    Noise::Poisson => self
                        .geometry
                        .regions
                        .iter()
                        .map(|r| small_jump_variance(r.y_max, a).sqrt())
                        .collect(),
                };
                for c in &self.geometry.cells {
                    let w = k.cell_integral(c.lo, c.hi) / (c.hi - c.lo).sqrt() * region_sd[c.region];
                    weights.push(if w.is_finite() { w } else { 0.0 });
                }
            }
        }
        Ok(Plan {
            points: points.to_vec(),
            scale,
            alpha,
            weights,
            n_cells,
        })
    }

    /// The noise realization of replica `index`.
    pub fn noise(&self, index: u64) -> Result<NoiseDraw> {
        let mut s = RngStream::new(self.cfg.seed, index);
        let cloud = match self.model.noise {
            Noise::Poisson => generate_regions(&mut s, &self.geometry.regions, self.cfg.truncation.memory_cap)?,
            Noise::Wiener => PoissonCloud::empty(vec![]),
        };
        let z = s.gaussian(self.gaussian_cells());
        Ok(NoiseDraw { cloud, z })
    }

    /// Field values at the plan's points for replica `index`.
    pub fn evaluate(&self, plan: &Plan, index: u64) -> Result<Vec<f64>> {
        let noise = self.noise(index)?;
        self.evaluate_on(plan, &noise)
    }

    pub fn evaluate_on(&self, plan: &Plan, noise: &NoiseDraw) -> Result<Vec<f64>> {
        let m = &self.model;
        let pts = &noise.cloud.points;
        let mut out = Vec::with_capacity(plan.len());
        let mut yfac: Vec<f64> = Vec::new();
        let mut yfac_alpha = f64::NAN;
        for (j, &(t, v)) in plan.points.iter().enumerate() {
            let mut acc = CompensatedSum::default();
            if !pts.is_empty() {
                let a = plan.alpha[j];
                if a.to_bits() != yfac_alpha.to_bits() {
                    yfac.clear();
                    yfac.extend(pts.iter().map(|p| {
                        let r = p.y.abs().powf(-1.0 / a);
                        if p.y < 0.0 {
                            -r
                        } else {
                            r
                        }
                    }));
                    yfac_alpha = a;
                }
                let k = m.kernel.at(t, v, &m.h, &m.alpha)?;
                sum_kernel(&k, pts, &yfac, &mut acc)?;
            }
            if plan.n_cells > 0 {
                let w = &plan.weights[j * plan.n_cells..(j + 1) * plan.n_cells];
                let g: f64 = w.iter().zip(&noise.z).map(|(a, b)| a * b).sum();
                acc.add(g);
            }
            // + 0.0 turns a signed zero into 0
            out.push(plan.scale[j] * acc.value() + 0.0);
        }
        Ok(out)
    }

    /// Values of replica `index` on the time grid.
    pub fn values(&self, index: u64) -> Result<Vec<f64>> {
        self.evaluate(&self.diagonal, index)
    }

    pub fn path(&self, index: u64) -> Result<SamplePath> {
        let y = self.values(index)?;
        Ok(SamplePath {
            t: self.t.clone(),
            y,
            meta: PathMeta {
                kind: self.spec.kind().to_string(),
                seed: self.cfg.seed,
                path_index: index,
                spec: Some(self.spec.clone()),
                truncation: Some(self.record.clone()),
                notes: vec![],
            },
        })
    }

    /// Replicas `0..n_paths`, computed in parallel and returned in order.
    pub fn paths(&self) -> Result<Vec<SamplePath>> {
        (0..self.cfg.n_paths as u64).into_par_iter().map(|i| self.path(i)).collect()
    }

    /// Plan values for replicas `range`, in order.
    pub fn ensemble(&self, plan: &Plan, range: std::ops::Range<u64>) -> Result<Vec<Vec<f64>>> {
        range.into_par_iter().map(|i| self.evaluate(plan, i)).collect()
    }
}

fn sum_kernel(k: &KernelAt, pts: &[crate::poisson::Point], yfac: &[f64], acc: &mut CompensatedSum) -> Result<()> {
    match *k {
        KernelAt::Indicator { t } => {
            let (lo, hi, sign) = if t >= 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
            for (p, f) in pts.iter().zip(yfac) {
                if p.x >= lo && p.x <= hi {
                    acc.add(sign * f);
                }
            }
        }
        _ => {
            for (p, f) in pts.iter().zip(yfac) {
                let kv = k.value(p.x);
                if kv != 0.0 {
                    let v = kv * f;
                    if !v.is_finite() {
                        return Err(Error::NonFinite { x: p.x, y: p.y, value: v });
                    }
                    acc.add(v);
                }
            }
        }
    }
    Ok(())
}

/// One replica's noise: the cloud and the Gaussian cell draws.
#[derive(Debug, Clone)]
pub struct NoiseDraw {
    pub cloud: PoissonCloud,
    pub z: Vec<f64>,
}

fn tolerance_y_max(model: &Model, cfg: &SimulationConfig, window: (f64, f64), tol: f64) -> Result<f64> {
    let (alo, ahi) = model.alpha_bounds(window.0, window.1);
    let p = cfg.truncation.moment_order.unwrap_or(0.5 * alo);
    let probes: Vec<f64> = (0..9)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / 8.0)
        .collect();
    let kernels: Vec<KernelAt> = probes
        .iter()
        .map(|&t| model.kernel.at(t, t, &model.h, &model.alpha))
        .collect::<Result<_>>()?;
    let mut singular = Vec::new();
    let mut breaks = Vec::new();
    for k in &kernels {
        singular.extend(k.singular_points());
        breaks.extend(k.breakpoints());
    }
    let ((clo, chi), _, _, _) = model.support_plan(window.0, window.1, cfg.truncation.pad)?;
    let support = kernels.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), k| {
        let (lo, hi) = k.support();
        (a.min(lo), b.max(hi))
    });
    let env = Envelope::new(
        |x| kernels.iter().map(|k| k.value(x).abs()).fold(0.0, f64::max),
        support,
    )
    .with_points(breaks, singular);
    let b = ahi.max(alo);
    let rect = choose_truncation(&env, alo, b, p, tol, (clo, chi), &cfg.quad)?;
    Ok(rect.y_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PathMeta {
    pub kind: String,
    pub seed: u64,
    pub path_index: u64,
    pub spec: Option<ProcessSpec>,
    pub truncation: Option<TruncationRecord>,
    pub notes: Vec<String>,
}

/// A time grid with process values and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub meta: PathMeta,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Value at grid time `t`, if present.
    pub fn at(&self, t: f64) -> Option<f64> {
        self.t.iter().position(|&s| s == t).map(|i| self.y[i])
    }

    /// CSV with `#` metadata lines and a `t,y` header.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# kind={}", self.meta.kind);
        let _ = writeln!(s, "# seed={}", self.meta.seed);
        let _ = writeln!(s, "# path={}", self.meta.path_index);
        if let Some(spec) = &self.meta.spec {
            let _ = writeln!(s, "# spec={}", serde_json::to_string(spec).unwrap_or_default());
        }
        if let Some(tr) = &self.meta.truncation {
            let _ = writeln!(s, "# truncation={}", serde_json::to_string(tr).unwrap_or_default());
        }
        for n in &self.meta.notes {
            let _ = writeln!(s, "# note={n}");
        }
        s.push_str("t,y\n");
        for (t, y) in self.t.iter().zip(&self.y) {
            let _ = writeln!(s, "{t},{y}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<SamplePath> {
        let mut meta = PathMeta::default();
        let mut t = Vec::new();
        let mut y = Vec::new();
        let mut header = false;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(m) = line.strip_prefix('#') {
                let m = m.trim();
                if let Some((k, v)) = m.split_once('=') {
                    match k {
                        "kind" => meta.kind = v.to_string(),
                        "seed" => meta.seed = v.parse().map_err(|_| Error::Parse(format!("line {}: bad seed", ln + 1)))?,
                        "path" => {
                            meta.path_index =
                                v.parse().map_err(|_| Error::Parse(format!("line {}: bad path index", ln + 1)))?
                        }
                        "spec" => meta.spec = serde_json::from_str(v).ok(),
                        "truncation" => meta.truncation = serde_json::from_str(v).ok(),
                        "note" => meta.notes.push(v.to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            if !header {
                if line != "t,y" {
                    return Err(Error::Parse(format!("line {}: expected header t,y", ln + 1)));
                }
                header = true;
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected two columns", ln + 1)))?;
            let tv: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad t", ln + 1)))?;
            let yv: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad y", ln + 1)))?;
            if !yv.is_finite() || !tv.is_finite() {
                return Err(Error::Parse(format!("line {}: non-finite value", ln + 1)));
            }
            t.push(tv);
            y.push(yv);
        }
        if !header {
            return Err(Error::Parse("missing t,y header".into()));
        }
        if t.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(SamplePath { t, y, meta })
    }
}

/// `a(t) Y(t)` pointwise.
pub fn apply_amplitude(path: &SamplePath, amp: &FuncTable) -> Result<SamplePath> {
    let mut out = path.clone();
    for (t, y) in out.t.iter().zip(out.y.iter_mut()) {
        *y *= amp.eval(*t)?;
    }
    out.meta
        .notes
        .push(format!("amplitude={}", serde_json::to_string(amp).unwrap_or_default()));
    Ok(out)
}

/// All `n_paths` replicas of `spec`.
pub fn simulate(spec: &ProcessSpec, cfg: &SimulationConfig) -> Result<Vec<SamplePath>> {
    Simulator::new(spec, cfg)?.paths()
}

pub fn simulate_fbm(cfg: &SimulationConfig, h: f64) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::Fbm { h }, cfg)
}

pub fn simulate_mbm(cfg: &SimulationConfig, h: FuncTable, amplitude: FuncTable) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::Mbm { h, amplitude }, cfg)
}

pub fn simulate_stable_levy(cfg: &SimulationConfig, alpha: f64) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::StableLevy { alpha }, cfg)
}

pub fn simulate_lsfm(cfg: &SimulationConfig, alpha: f64, h: f64, a_coef: f64, b_coef: f64) -> Result<Vec<SamplePath>> {
    simulate(
        &ProcessSpec::Lsfm {
            alpha,
            h,
            a_coef,
            b_coef,
        },
        cfg,
    )
}

pub fn simulate_lmsm(
    cfg: &SimulationConfig,
    alpha: f64,
    h: FuncTable,
    a_coef: f64,
    b_coef: f64,
) -> Result<Vec<SamplePath>> {
    simulate(
        &ProcessSpec::Lmsm {
            alpha,
            h,
            a_coef,
            b_coef,
        },
        cfg,
    )
}

pub fn simulate_moving_average(cfg: &SimulationConfig, g: FuncTable, alpha: f64) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::MovingAverage { alpha, g }, cfg)
}

pub fn simulate_reverse_ou(cfg: &SimulationConfig, lambda: f64, alpha: f64) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::ReverseOu { alpha, lambda }, cfg)
}

pub fn simulate_multistable_diagonal(
    cfg: &SimulationConfig,
    kernel: KernelSpec,
    h: FuncTable,
    alpha: FuncTable,
) -> Result<Vec<SamplePath>> {
    simulate(
        &ProcessSpec::MultistableDiagonal {
            kernel,
            h,
            alpha,
            amplitude: unit(),
            normalize: true,
        },
        cfg,
    )
}

pub fn simulate_multistable_levy(cfg: &SimulationConfig, alpha: FuncTable, amplitude: FuncTable) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::MultistableLevy { alpha, amplitude }, cfg)
}

pub fn simulate_lmmm(
    cfg: &SimulationConfig,
    alpha: FuncTable,
    h: FuncTable,
    amplitude: FuncTable,
) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::Lmmm { alpha, h, amplitude }, cfg)
}

pub fn simulate_log_fractional_msm(
    cfg: &SimulationConfig,
    alpha: FuncTable,
    amplitude: FuncTable,
) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::LogFractionalMsm { alpha, amplitude }, cfg)
}

pub fn simulate_multistable_rou(cfg: &SimulationConfig, lambda: f64, alpha: FuncTable) -> Result<Vec<SamplePath>> {
    simulate(&ProcessSpec::MultistableRou { alpha, lambda }, cfg)
}
