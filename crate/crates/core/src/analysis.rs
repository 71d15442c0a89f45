//! Statistical checks: empirical characteristic functions, KS distances,
//! localisability and transfer probes, estimators and diagnostic reports.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::processes::{Plan, SamplePath, Simulator};

/// Empirical CF value at one `theta`, with its standard error `1/sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfEstimate {
    pub theta: f64,
    pub value: Complex64,
    pub se: f64,
}

pub fn empirical_cf(samples: &[f64], thetas: &[f64]) -> Result<Vec<CfEstimate>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = samples.len() as f64;
    Ok(thetas
        .iter()
        .map(|&theta| {
            let (mut re, mut im) = (0.0, 0.0);
            for &x in samples {
                let (s, c) = (theta * x).sin_cos();
                re += c;
                im += s;
            }
            CfEstimate {
                theta,
                value: Complex64::new(re / n, im / n),
                se: 1.0 / n.sqrt(),
            }
        })
        .collect())
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("sample contains NaN".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Asymptotic two-sample critical value at significance `level`.
pub fn ks_critical_value(n: usize, m: usize, level: f64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::EmptySample);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::OutOfRange {
            name: "level",
            value: level,
            range: "(0, 1)",
        });
    }
    let c = (-0.5 * (level / 2.0).ln()).sqrt();
    Ok(c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt())
}

/// Standard deviation of the KS statistic under the null (Kolmogorov law sd 0.2603).
pub fn ks_standard_error(n: usize, m: usize) -> f64 {
    0.2603 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let f = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    } else {
        sorted[i]
    }
}

/// Least-squares slope and intercept.
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Source of increments `Y(u + s) - Y(u)` from independent paths.
pub trait IncrementSource {
    /// `n` samples; `batch` selects a disjoint set of replicas.
    fn increments(&self, u: f64, s: f64, n: usize, batch: u64) -> Result<Vec<f64>>;
}

/// Source of field pairs `(X(v, v), X(v, u))` evaluated on one noise draw.
pub trait FieldSource {
    fn pairs(&self, v: f64, u: f64, n: usize, batch: u64) -> Result<Vec<(f64, f64)>>;
}

impl Simulator {
    fn rows(&self, plan: &Plan, n: usize, batch: u64, offset: u64) -> Result<Vec<Vec<f64>>> {
        let start = offset + batch * n as u64;
        self.ensemble(plan, start..start + n as u64)
    }
}

/// Simulator-backed source; `offset` shifts the replica indices used.
#[derive(Debug, Clone, Copy)]
pub struct SimSource<'a> {
    pub sim: &'a Simulator,
    pub offset: u64,
}

impl<'a> SimSource<'a> {
    pub fn new(sim: &'a Simulator) -> Self {
        Self { sim, offset: 0 }
    }

    pub fn with_offset(sim: &'a Simulator, offset: u64) -> Self {
        Self { sim, offset }
    }
}

impl IncrementSource for SimSource<'_> {
    fn increments(&self, u: f64, s: f64, n: usize, batch: u64) -> Result<Vec<f64>> {
        let plan = self.sim.plan(&[(u, u), (u + s, u + s)])?;
        Ok(self
            .sim
            .rows(&plan, n, batch, self.offset)?
            .into_iter()
            .map(|r| r[1] - r[0])
            .collect())
    }
}

impl FieldSource for SimSource<'_> {
    fn pairs(&self, v: f64, u: f64, n: usize, batch: u64) -> Result<Vec<(f64, f64)>> {
        let plan = self.sim.plan(&[(v, v), (v, u)])?;
        Ok(self
            .sim
            .rows(&plan, n, batch, self.offset)?
            .into_iter()
            .map(|r| (r[0], r[1]))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingProbeResult {
    pub u: f64,
    pub h_u: f64,
    pub t_probe: f64,
    pub n: usize,
    pub r_list: Vec<f64>,
    /// KS distance to the target increments, per r.
    pub ks: Vec<f64>,
    /// Interquartile range of the rescaled increments, per r.
    pub spread: Vec<f64>,
    pub se: f64,
    pub critical_1pct: f64,
    /// KS nonincreasing along `r_list` within `2 * se`.
    pub trend_pass: bool,
}

impl ScalingProbeResult {
    pub fn final_ks(&self) -> f64 {
        *self.ks.last().unwrap_or(&f64::NAN)
    }

    /// Slope of log spread against log r; near 0 when `h_u` is right.
    pub fn spread_slope(&self) -> f64 {
        let x: Vec<f64> = self.r_list.iter().map(|r| r.ln()).collect();
        let y: Vec<f64> = self.spread.iter().map(|s| s.ln()).collect();
        fit_line(&x, &y).0
    }

    /// True when the spread moves one way across every r step, a sign that
    /// `h_u` is mis-specified.
    pub fn spread_monotone(&self) -> bool {
        let d: Vec<f64> = self.spread.windows(2).map(|w| w[1] - w[0]).collect();
        d.iter().all(|&x| x > 0.0) || d.iter().all(|&x| x < 0.0)
    }
}

/// Compares `(Y(u + r t) - Y(u)) / r^h_u` with the local-form target
/// `target(n)` at each r in a strictly decreasing `r_list`.
pub fn scaling_probe<S, T>(
    source: &S,
    u: f64,
    h_u: f64,
    r_list: &[f64],
    t_probe: f64,
    target: T,
    n: usize,
) -> Result<ScalingProbeResult>
where
    S: IncrementSource + ?Sized,
    T: FnOnce(usize) -> Result<Vec<f64>>,
{
    if r_list.is_empty() || r_list.iter().any(|&r| !(r > 0.0)) || r_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "r_list must be positive and strictly decreasing".into(),
        ));
    }
    if n < 2 {
        return Err(Error::Insufficient(format!("scaling probe needs n >= 2, got {n}")));
    }
    let target = target(n)?;
    let mut ks = Vec::new();
    let mut spread = Vec::new();
    for (k, &r) in r_list.iter().enumerate() {
        let inc = source.increments(u, r * t_probe, n, k as u64)?;
        let scaled: Vec<f64> = inc.iter().map(|d| d / r.powf(h_u)).collect();
        ks.push(ks_distance(&scaled, &target)?);
        let s = sorted(&scaled)?;
        spread.push(quantile(&s, 0.75) - quantile(&s, 0.25));
    }
    let se = ks_standard_error(n, target.len());
    let trend_pass = ks.windows(2).all(|w| w[1] <= w[0] + 2.0 * se);
    Ok(ScalingProbeResult {
        u,
        h_u,
        t_probe,
        n,
        r_list: r_list.to_vec(),
        ks,
        spread,
        se,
        critical_1pct: ks_critical_value(n, target.len(), 0.01)?,
        trend_pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub v: f64,
    pub distance: f64,
    pub threshold: f64,
    pub probability: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferProbeResult {
    pub u: f64,
    pub eta: f64,
    pub n: usize,
    pub rows: Vec<TransferRow>,
}

impl TransferProbeResult {
    /// Probabilities do not grow as v approaches u (within 2 SE).
    pub fn decreasing_towards_u(&self) -> bool {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| b.distance.total_cmp(&a.distance));
        rows.windows(2)
            .all(|w| w[1].probability <= w[0].probability + 2.0 * w[0].se.max(w[1].se))
    }
}

/// Frequency of `|X(v,v) - X(v,u)| >= |v-u|^eta` per v.
pub fn transfer_condition_probe<F: FieldSource + ?Sized>(
    field: &F,
    u: f64,
    eta: f64,
    v_list: &[f64],
    n: usize,
) -> Result<TransferProbeResult> {
    if !(eta > 0.0) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            range: "(0, inf)",
        });
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rows = Vec::new();
    for (k, &v) in v_list.iter().enumerate() {
        if v == u {
            return Err(Error::InvalidParameter("transfer probe needs v != u".into()));
        }
        let d = (v - u).abs();
        let thr = d.powf(eta);
        let pairs = field.pairs(v, u, n, k as u64)?;
        let hits = pairs.iter().filter(|(a, b)| (a - b).abs() >= thr).count();
        let p = hits as f64 / n as f64;
        // floor the SE so an all-zero row is not treated as exact
        let se = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
        rows.push(TransferRow {
            v,
            distance: d,
            threshold: thr,
            probability: p,
            se,
        });
    }
    Ok(TransferProbeResult { u, eta, n, rows })
}

// ECF regression without the sample-size floor.
fn ecf_alpha(samples: &[f64]) -> Result<f64> {
    let s = sorted(samples)?;
    if s[0] == s[s.len() - 1] {
        return Err(Error::Degenerate("all samples are equal".into()));
    }
    let med = quantile(&s, 0.5);
    let mut dev: Vec<f64> = s.iter().map(|x| (x - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let mut scale = quantile(&dev, 0.5);
    if !(scale > 0.0) {
        scale = (s[s.len() - 1] - s[0]) / 2.0;
    }
    let thetas: Vec<f64> = (0..121).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 120.0) / scale).collect();
    let cf = empirical_cf(samples, &thetas)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for c in &cf {
        let m = c.value.norm();
        if (0.1..=0.9).contains(&m) {
            x.push(c.theta.ln());
            y.push((-m.ln()).ln());
        }
    }
    if x.len() < 3 {
        return Err(Error::Degenerate("too few CF points in [0.1, 0.9]".into()));
    }
    Ok(fit_line(&x, &y).0.min(2.0))
}

/// Stability index from the log-log slope of the empirical CF.
pub fn estimate_alpha(samples: &[f64]) -> Result<f64> {
    if samples.len() < 1000 {
        return Err(Error::Insufficient(format!(
            "estimate_alpha needs at least 1000 samples, got {}",
            samples.len()
        )));
    }
    ecf_alpha(samples)
}

/// Estimate with a standard error from 10 disjoint blocks.
pub fn estimate_alpha_se(samples: &[f64]) -> Result<(f64, f64)> {
    let est = estimate_alpha(samples)?;
    let b = samples.len() / 10;
    let parts: Vec<f64> = samples.chunks(b).take(10).filter_map(|c| ecf_alpha(c).ok()).collect();
    Ok((est, block_se(&parts)))
}

fn block_se(parts: &[f64]) -> f64 {
    if parts.len() < 2 {
        return f64::NAN;
    }
    let k = parts.len() as f64;
    let m = parts.iter().sum::<f64>() / k;
    (parts.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
}

/// Local index at `u` from dyadic lags `window / 2^k` that land on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HEstimate {
    pub u: f64,
    pub h: f64,
    pub se: f64,
    /// Stability index of the pooled increments.
    pub alpha: f64,
    pub alpha_se: f64,
    pub moment_order: f64,
    pub lags: Vec<f64>,
}

fn grid_index(t: &[f64], x: f64) -> Option<usize> {
    let tol = 1e-9 * (1.0 + x.abs());
    let i = t.partition_point(|&s| s < x - tol);
    (i < t.len() && (t[i] - x).abs() <= tol).then_some(i)
}

fn h_from(paths: &[&SamplePath], iu: usize, lags: &[(f64, usize)], p: f64) -> f64 {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &(r, j) in lags {
        let m = paths.iter().map(|q| (q.y[j] - q.y[iu]).abs().powf(p)).sum::<f64>() / paths.len() as f64;
        x.push(r.ln());
        y.push(m.ln());
    }
    fit_line(&x, &y).0 / p
}

// lag-normalized increments pooled over all lags, so the moment order
// stays finite
fn pooled_alpha(paths: &[&SamplePath], iu: usize, lags: &[(f64, usize)]) -> Result<f64> {
    let mut pooled = Vec::new();
    for &(_, j) in lags {
        let inc: Vec<f64> = paths.iter().map(|p| p.y[j] - p.y[iu]).collect();
        let mut a: Vec<f64> = inc.iter().map(|x| x.abs()).collect();
        a.sort_by(f64::total_cmp);
        let mad = quantile(&a, 0.5);
        if mad > 0.0 {
            pooled.extend(inc.iter().map(|x| x / mad));
        }
    }
    if pooled.is_empty() {
        return Err(Error::Degenerate("all increments are zero".into()));
    }
    ecf_alpha(&pooled)
}

pub fn estimate_h(ensemble: &[SamplePath], u: f64, window: f64) -> Result<HEstimate> {
    if ensemble.len() < 200 {
        return Err(Error::Insufficient(format!(
            "estimate_h needs at least 200 paths, got {}",
            ensemble.len()
        )));
    }
    if !(window > 0.0) {
        return Err(Error::OutOfRange {
            name: "window",
            value: window,
            range: "(0, inf)",
        });
    }
    let t = &ensemble[0].t;
    if ensemble.iter().any(|p| p.t != *t) {
        return Err(Error::InvalidParameter("paths do not share a time grid".into()));
    }
    let iu = grid_index(t, u).ok_or_else(|| Error::InvalidParameter(format!("u = {u} is not a grid point")))?;
    if t[t.len() - 1] < u + window * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!("u + window = {} leaves the grid", u + window)));
    }
    let mut lags = Vec::new();
    let mut r = window;
    while lags.len() < 30 {
        match grid_index(t, u + r) {
            Some(j) if j > iu => lags.push((r, j)),
            _ => break,
        }
        r /= 2.0;
    }
    if lags.len() < 2 {
        return Err(Error::Insufficient("fewer than two dyadic lags on the grid".into()));
    }
    let refs: Vec<&SamplePath> = ensemble.iter().collect();
    let alpha = pooled_alpha(&refs, iu, &lags)?;
    let p = (0.9 * alpha).min(1.0) / 2.0;
    let h = h_from(&refs, iu, &lags, p);
    let blocks: Vec<&[&SamplePath]> = refs.chunks(refs.len() / 10).take(10).collect();
    let parts: Vec<f64> = blocks.iter().map(|c| h_from(c, iu, &lags, p)).collect();
    let alpha_parts: Vec<f64> = blocks.iter().filter_map(|c| pooled_alpha(c, iu, &lags).ok()).collect();
    Ok(HEstimate {
        u,
        h,
        se: block_se(&parts),
        alpha,
        alpha_se: block_se(&alpha_parts),
        moment_order: p,
        lags: lags.iter().map(|l| l.0).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub lambda: f64,
    pub moment: f64,
    pub ratio: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentScalingResult {
    pub p: f64,
    pub n: usize,
    pub rows: Vec<MomentRow>,
    pub finite: bool,
    pub max_rel_error: f64,
}

/// Empirical `E|Σ(λ f)|^p` for each λ; `sampler(λ)` must reuse the same
/// clouds for every λ. `a` is the smallest stability index involved.
pub fn moment_scaling_check<F>(sampler: F, p: f64, a: f64, lambdas: &[f64]) -> Result<MomentScalingResult>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    if !(p >= 0.0 && p < a) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, a)",
        });
    }
    if lambdas.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut rows = Vec::new();
    let mut base = f64::NAN;
    let mut n = 0;
    let mut finite = true;
    for (k, &lam) in lambdas.iter().enumerate() {
        let s = sampler(lam)?;
        if s.is_empty() {
            return Err(Error::EmptySample);
        }
        n = s.len();
        finite &= s.iter().all(|x| x.is_finite());
        let m = s.iter().map(|x| x.abs().powf(p)).sum::<f64>() / s.len() as f64;
        finite &= m.is_finite();
        if k == 0 {
            base = m;
        }
        rows.push(MomentRow {
            lambda: lam,
            moment: m,
            ratio: m / base,
            expected: (lam / lambdas[0]).powf(p),
        });
    }
    let max_rel_error = rows
        .iter()
        .map(|r| ((r.ratio - r.expected) / r.expected).abs())
        .fold(0.0, f64::max);
    Ok(MomentScalingResult {
        p,
        n,
        rows,
        finite,
        max_rel_error,
    })
}

/// Column-named numeric table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub sample_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, statistic: f64, threshold: f64, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            statistic,
            threshold,
            pass,
            sample_sizes: vec![],
            seeds: vec![],
            table: None,
            detail: String::new(),
        }
    }

    pub fn sizes(mut self, n: &[usize]) -> Self {
        self.sample_sizes = n.to_vec();
        self
    }

    pub fn seeds(mut self, s: &[u64]) -> Self {
        self.seeds = s.to_vec();
        self
    }

    pub fn table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub schema_version: u32,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

impl Default for DiagnosticReport {
    fn default() -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            checks: vec![],
            notes: vec![],
        }
    }
}

impl DiagnosticReport {
    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {}: statistic {:.6} vs threshold {:.6} (n = {:?}, seeds = {:?})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.statistic,
                c.threshold,
                c.sample_sizes,
                c.seeds
            );
            if !c.detail.is_empty() {
                let _ = writeln!(s, "    {}", c.detail);
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "{passed}/{} checks passed", self.checks.len());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::FuncTable;
    use crate::processes::{ProcessSpec, SimulationConfig};
    use crate::rng::{RngStream, StableParams};

    fn stable(alpha: f64, n: usize, seed: u64) -> Vec<f64> {
        RngStream::new(seed, 0).stable(&StableParams::new(alpha, 1.0).unwrap(), n)
    }

    #[test]
    fn cf_trivial_cases() {
        let cf = empirical_cf(&[1.0, -2.0, 3.5], &[0.0]).unwrap();
        assert_eq!(cf[0].value, Complex64::new(1.0, 0.0));
        let z = empirical_cf(&[0.0; 10], &[0.3, 5.0]).unwrap();
        assert!(z.iter().all(|c| c.value == Complex64::new(1.0, 0.0)));
        assert!(empirical_cf(&[], &[1.0]).is_err());
        let s = stable(1.5, 20_000, 1);
        let c = empirical_cf(&s, &[1.0]).unwrap()[0];
        assert!((c.value.re - (-1f64).exp()).abs() < 3.0 * c.se);
        assert!(c.value.norm() <= 1.0);
    }

    #[test]
    fn ks_trivial_cases() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_distance(&a, &[10.0, 11.0]).unwrap(), 1.0);
        let b = [2.5, 0.5, 9.0, 1.0];
        assert_eq!(ks_distance(&a, &b).unwrap(), ks_distance(&b, &a).unwrap());
        assert!(ks_distance(&[], &a).is_err());
        // ties across samples
        assert_eq!(ks_distance(&[1.0, 1.0], &[1.0]).unwrap(), 0.0);
        assert!((ks_critical_value(10_000, 10_000, 0.01).unwrap() - 1.6276 * (2e-4f64).sqrt()).abs() < 1e-5);
        assert!((ks_critical_value(100, 100, 0.05).unwrap() - 1.3581 * 0.02f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn ks_null_rejection_rate() {
        let n = 2000;
        let crit = ks_critical_value(n, n, 0.01).unwrap();
        let over = (0..100)
            .filter(|&k| ks_distance(&stable(1.5, n, 2 * k + 100), &stable(1.5, n, 2 * k + 101)).unwrap() > crit)
            .count();
        assert!(over <= 4, "{over}");
    }

    #[test]
    fn alpha_estimates() {
        for (a, seed) in [(0.8, 1), (1.0, 2), (1.2, 3), (1.5, 4), (1.8, 5)] {
            let est = estimate_alpha(&stable(a, 50_000, seed)).unwrap();
            assert!((est - a).abs() < 0.05, "{a}: {est}");
        }
        let g = RngStream::new(7, 0).gaussian(50_000);
        assert!((estimate_alpha(&g).unwrap() - 2.0).abs() < 0.05);
        assert!(estimate_alpha(&[1.0; 2000]).is_err());
        assert!(estimate_alpha(&[1.0; 10]).is_err());
        let (e, se) = estimate_alpha_se(&stable(1.5, 20_000, 8)).unwrap();
        assert!(se > 0.0 && se < 0.05 && (e - 1.5).abs() < 0.1);
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn h_estimates() {
        let c = SimulationConfig::new(grid(64), 400, 3);
        let fbm = crate::processes::simulate(&ProcessSpec::Fbm { h: 0.7 }, &c).unwrap();
        let e = estimate_h(&fbm, 0.0, 0.5).unwrap();
        assert!((e.h - 0.7).abs() < 0.05, "{e:?}");
        let lev = crate::processes::simulate(&ProcessSpec::StableLevy { alpha: 1.5 }, &c.clone().with_y_max(200.0)).unwrap();
        let e = estimate_h(&lev, 0.0, 0.5).unwrap();
        assert!((e.h - 1.0 / 1.5).abs() < 0.07, "{e:?}");
        assert!(estimate_h(&fbm[..100], 0.0, 0.5).is_err());
        assert!(estimate_h(&fbm, 0.0, 2.0).is_err());
    }

    #[test]
    fn probes_on_fbm() {
        let c = SimulationConfig::new(grid(100), 1, 5).with_window(0.0, 1.0);
        let sim = Simulator::new(&ProcessSpec::Fbm { h: 0.7 }, &c).unwrap();
        let src = SimSource::new(&sim);
        let n = 1500;
        let tgt = |n: usize| Ok(RngStream::new(99, 0).gaussian(n));
        let r = scaling_probe(&src, 0.3, 0.7, &[0.5, 0.1, 0.02], 1.0, tgt, n).unwrap();
        assert!(r.ks.iter().all(|&k| k < r.critical_1pct), "{r:?}");
        assert!(r.trend_pass);
        assert!(r.spread_slope().abs() < 0.1);
        let wrong = scaling_probe(&src, 0.3, 0.9, &[0.5, 0.1, 0.02], 1.0, tgt, n).unwrap();
        assert!(wrong.spread_monotone());
        assert!((wrong.spread_slope() + 0.2).abs() < 0.1);
        assert!(scaling_probe(&src, 0.3, 0.7, &[0.1, 0.5], 1.0, tgt, n).is_err());
        assert!(scaling_probe(&src, 0.3, 0.7, &[2.0], 1.0, tgt, n).is_err());
    }

    #[test]
    fn transfer_probe_constant_field() {
        // fbm does not depend on v, so X(v,v) = X(v,u)
        let c = SimulationConfig::new(grid(10), 1, 1);
        let sim = Simulator::new(&ProcessSpec::Fbm { h: 0.6 }, &c).unwrap();
        let r = transfer_condition_probe(&SimSource::new(&sim), 0.5, 0.8, &[0.7, 0.6], 200).unwrap();
        assert!(r.rows.iter().all(|x| x.probability == 0.0));
        assert!(transfer_condition_probe(&SimSource::new(&sim), 0.5, 0.8, &[0.5], 10).is_err());
        let lm = Simulator::new(
            &ProcessSpec::Lmmm {
                alpha: FuncTable::linear(1.8, 0.0),
                h: FuncTable::linear(0.3, 0.6),
                amplitude: FuncTable::constant(1.0),
            },
            &c.clone().with_y_max(100.0),
        )
        .unwrap();
        let r = transfer_condition_probe(&SimSource::new(&lm), 0.5, 0.8, &[0.7, 0.6, 0.55], 400).unwrap();
        assert!(r.decreasing_towards_u(), "{r:?}");
    }

    #[test]
    fn moment_scaling() {
        let xs = stable(1.2, 5000, 3);
        let r = moment_scaling_check(|l| Ok(xs.iter().map(|x| l * x).collect()), 0.5, 1.2, &[1.0, 2.0, 4.0]).unwrap();
        assert!(r.max_rel_error < 1e-12 && r.finite);
        let r0 = moment_scaling_check(|l| Ok(xs.iter().map(|x| l * x).collect()), 0.0, 1.2, &[1.0, 2.0]).unwrap();
        assert_eq!(r0.rows[1].ratio, 1.0);
        assert!(moment_scaling_check(|_| Ok(xs.clone()), 1.2, 1.2, &[1.0]).is_err());
    }

    #[test]
    fn report_renders() {
        let mut rep = DiagnosticReport::default();
        rep.push(CheckResult::new("a", 0.1, 0.2, true).sizes(&[10]).seeds(&[1]));
        rep.push(CheckResult::new("b", 0.3, 0.2, false).detail("too big"));
        assert!(!rep.all_passed());
        let back: DiagnosticReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert!(rep.to_text().contains("[FAIL] b"));
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![1.0, 2.5]);
        assert_eq!(t.to_csv(), "x,y\n1,2.5\n");
    }
}
