//! Poisson clouds on `E x R` with Lebesgue mean measure, series sums over
//! them, the closed-form characteristic function and truncation selection.
//!
//! A cloud covers one or more rectangles with disjoint x-ranges. Each
//! rectangle is filled band by band in `|y|`, with band edges at powers of
//! two, and every band draws from its own keyed sub-stream. Raising `y_max`
//! therefore only appends points: the cloud for a smaller `y_max` is
//! exactly the subset with `|y| <= y_max`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::kernels::quad::{gl_cell, integrate_singular, Integral};
use crate::kernels::{lp_integral, FuncTable, KernelAt, QuadConfig};
use crate::rng::RngStream;

pub const DEFAULT_MEMORY_CAP: f64 = 1e8;

// bands are (0, 2^-60], (2^-60, 2^-59], ...
const BAND_FLOOR_EXP: i32 = -60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_max: f64,
}

impl Rectangle {
    pub fn new(x_lo: f64, x_hi: f64, y_max: f64) -> Result<Self> {
        let r = Self { x_lo, x_hi, y_max };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_lo < self.x_hi) || !self.x_lo.is_finite() || !self.x_hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rectangle needs finite x_lo < x_hi, got [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        if !(self.y_max > 0.0) || !self.y_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rectangle needs finite y_max > 0, got {}",
                self.y_max
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// Mean number of points, `(x_hi - x_lo) * 2 * y_max`.
    pub fn area(&self) -> f64 {
        self.width() * 2.0 * self.y_max
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y.abs() <= self.y_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// A realized Poisson point set, sorted by `|y|` descending so that the
/// smallest series terms come first.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonCloud {
    pub regions: Vec<Rectangle>,
    pub points: Vec<Point>,
    pub seed: u64,
    pub stream_id: u64,
    pub key: u64,
}

impl PoissonCloud {
    pub fn empty(regions: Vec<Rectangle>) -> Self {
        Self {
            regions,
            points: Vec::new(),
            seed: 0,
            stream_id: 0,
            key: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points whose x lies in `[lo, hi)`.
    pub fn restricted(&self, lo: f64, hi: f64) -> PoissonCloud {
        PoissonCloud {
            points: self.points.iter().copied().filter(|p| p.x >= lo && p.x < hi).collect(),
            ..self.clone()
        }
    }
}

fn band_upper(k: i32) -> f64 {
    2f64.powi(BAND_FLOOR_EXP + k)
}

fn band_count(y_max: f64) -> i32 {
    let mut k = 0;
    while band_upper(k) < y_max {
        k += 1;
    }
    k + 1
}

/// Expected number of points that will be drawn (full bands) for `regions`.
pub fn expected_draws(regions: &[Rectangle]) -> f64 {
    regions
        .iter()
        .map(|r| 2.0 * r.width() * band_upper(band_count(r.y_max) - 1))
        .sum()
}

pub fn generate_cloud(stream: &mut RngStream, rect: &Rectangle) -> Result<PoissonCloud> {
    generate_regions(stream, std::slice::from_ref(rect), DEFAULT_MEMORY_CAP)
}

/// Fills each rectangle with a Poisson process of intensity `dx dy`.
pub fn generate_regions(
    stream: &mut RngStream,
    regions: &[Rectangle],
    memory_cap: f64,
) -> Result<PoissonCloud> {
    for r in regions {
        r.validate()?;
    }
    let mut sorted: Vec<&Rectangle> = regions.iter().collect();
    sorted.sort_by(|a, b| a.x_lo.total_cmp(&b.x_lo));
    if sorted.windows(2).any(|w| w[1].x_lo < w[0].x_hi) {
        return Err(Error::InvalidParameter("cloud regions overlap in x".into()));
    }
    let expected = expected_draws(regions);
    if expected > memory_cap {
        return Err(Error::MemoryCap {
            expected,
            cap: memory_cap,
        });
    }
    let key = stream.next_u64();
    let mut points = Vec::with_capacity((1.05 * expected + 16.0) as usize);
    for (i, r) in regions.iter().enumerate() {
        let nb = band_count(r.y_max);
        for k in 0..nb {
            let lo = if k == 0 { 0.0 } else { band_upper(k - 1) };
            let hi = band_upper(k);
            let mut s = stream.keyed(key, ((i as u64) << 32) | k as u64);
            let n = s.poisson_count(2.0 * r.width() * (hi - lo))?;
            for _ in 0..n {
                let x = s.next_uniform(r.x_lo, r.x_hi);
                let a = s.next_uniform(lo, hi);
                let y = if s.next_bool() { a } else { -a };
                if a <= r.y_max {
                    points.push(Point { x, y });
                }
            }
        }
    }
    points.sort_unstable_by(|p, q| q.y.abs().total_cmp(&p.y.abs()).then(p.x.total_cmp(&q.x)));
    Ok(PoissonCloud {
        regions: regions.to_vec(),
        points,
        seed: stream.seed(),
        stream_id: stream.stream_id(),
        key,
    })
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// A function `g(x, y)` summed over cloud points.
pub trait PointFunctional: Sync {
    fn value(&self, x: f64, y: f64) -> f64;

    /// x-interval outside which `g` vanishes.
    fn x_support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Points where `g(., y)` is not smooth.
    fn x_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Points where `g(., y)` is unbounded.
    fn x_singular(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `∫∫ g(x, y)^2` over the x-range of `rect` and `|y| > rect.y_max`:
    /// the variance of the part of the series that `rect` drops.
    fn tail_variance(&self, rect: &Rectangle, quad: &QuadConfig) -> Result<f64>;
}

/// `scale * f(x) * sign(y) |y|^{-1/alpha}`, the series integrand of a stable
/// stochastic integral of `f`.
#[derive(Debug, Clone, Copy)]
pub struct StableIntegrand<'a> {
    pub kernel: KernelAt<'a>,
    pub alpha: f64,
    pub scale: f64,
}

impl<'a> StableIntegrand<'a> {
    pub fn new(kernel: KernelAt<'a>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "(0, 2)",
            });
        }
        Ok(Self {
            kernel,
            alpha,
            scale: 1.0,
        })
    }

    pub fn scaled(mut self, by: f64) -> Self {
        self.scale *= by;
        self
    }
}

/// `∫_n^inf y^{-2/alpha} dy` times two (both signs of y).
pub fn small_jump_variance(y_max: f64, alpha: f64) -> f64 {
    2.0 * y_max.powf(1.0 - 2.0 / alpha) / (2.0 / alpha - 1.0)
}

impl PointFunctional for StableIntegrand<'_> {
    #[inline]
    fn value(&self, x: f64, y: f64) -> f64 {
        let m = y.abs().powf(-1.0 / self.alpha);
        self.scale * self.kernel.value(x) * if y < 0.0 { -m } else { m }
    }

    fn x_support(&self) -> (f64, f64) {
        self.kernel.support()
    }

    fn x_breakpoints(&self) -> Vec<f64> {
        self.kernel.breakpoints()
    }

    fn x_singular(&self) -> Vec<f64> {
        self.kernel.singular_points()
    }

    fn tail_variance(&self, rect: &Rectangle, quad: &QuadConfig) -> Result<f64> {
        let f2 = lp_integral(&self.kernel, 2.0, rect.x_lo, rect.x_hi, quad)?.value;
        Ok(self.scale * self.scale * f2 * small_jump_variance(rect.y_max, self.alpha))
    }
}

/// Wraps a closure; the tail variance is unknown and reported as an error.
pub struct FnFunctional<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> PointFunctional for FnFunctional<F> {
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.0)(x, y)
    }

    fn tail_variance(&self, _rect: &Rectangle, _quad: &QuadConfig) -> Result<f64> {
        Err(Error::InvalidParameter("closure functional has no closed-form tail".into()))
    }
}

/// `Σ g(X, Y)` over the cloud, smallest terms first, compensated.
pub fn sum_functional<G: PointFunctional + ?Sized>(cloud: &PoissonCloud, g: &G) -> Result<f64> {
    let mut acc = CompensatedSum::default();
    for p in &cloud.points {
        let v = g.value(p.x, p.y);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                x: p.x,
                y: p.y,
                value: v,
            });
        }
        acc.add(v);
    }
    Ok(acc.value())
}

/// A tail envelope `h(x) >= 0` for truncation selection.
pub struct Envelope<'a> {
    f: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    support: (f64, f64),
    breakpoints: Vec<f64>,
    singular: Vec<f64>,
}

impl<'a> Envelope<'a> {
    pub fn new(f: impl Fn(f64) -> f64 + Sync + 'a, support: (f64, f64)) -> Self {
        Self {
            f: Box::new(f),
            support,
            breakpoints: Vec::new(),
            singular: Vec::new(),
        }
    }

    pub fn with_points(mut self, breakpoints: Vec<f64>, singular: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self.singular = singular;
        self
    }

    pub fn from_kernel(k: KernelAt<'a>) -> Self {
        Self {
            support: k.support(),
            breakpoints: k.breakpoints(),
            singular: k.singular_points(),
            f: Box::new(move |x| k.value(x).abs()),
        }
    }

    pub fn from_table(table: &'a FuncTable) -> Self {
        let (lo, hi) = table.domain();
        Self {
            f: Box::new(move |x| table.eval_unchecked(x).abs()),
            support: (lo, hi),
            breakpoints: [lo, hi].into_iter().filter(|v| v.is_finite()).collect(),
            singular: Vec::new(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// `∫ h^s` over `[lo, hi]` intersected with the support.
    pub fn power_integral(&self, s: f64, lo: f64, hi: f64, quad: &QuadConfig) -> Result<Integral> {
        let lo = lo.max(self.support.0);
        let hi = hi.min(self.support.1);
        if !(lo < hi) {
            return Ok(Integral::default());
        }
        let g = |x: f64| (self.f)(x).powf(s);
        let mut pts = self.breakpoints.clone();
        pts.extend(&self.singular);
        integrate_singular(&g, lo, hi, &pts, &self.singular, quad)
    }

    /// `∫ h^s` outside `[lo, hi]`.
    fn outer_integral(&self, s: f64, lo: f64, hi: f64, quad: &QuadConfig) -> Result<f64> {
        Ok(self.power_integral(s, f64::NEG_INFINITY, lo, quad)?.value
            + self.power_integral(s, hi, f64::INFINITY, quad)?.value)
    }
}

/// `Γ(1-p) cos(πp/2) / p = ∫_0^∞ (1 - cos u) u^{-1-p} du` for `0 < p < 2`.
fn one_minus_cos_moment(p: f64) -> f64 {
    if (1.0 - p).abs() < 1e-9 {
        PI / 2.0
    } else {
        gamma(2.0 - p) / (1.0 - p) * (0.5 * PI * p).cos() / p
    }
}

fn sin2_constant(s: f64) -> f64 {
    2f64.powf(2.0 - 0.5 * s) / (2.0 - s)
}

/// Explicit ceiling for `∫∫ sin²(θ g / 2) dx dy` when
/// `|g(x, y)| <= h(x) (|y|^{-1/a} + |y|^{-1/b})`.
///
/// With `(u + v)^2 <= 2(u^2 + v^2)`, `sin² z <= min(1, z^2)` and
/// `min(1, A + B) <= min(1, A) + min(1, B)`, each exponent `s` contributes
/// `2 ∫_0^∞ min(1, θ²h²y^{-2/s}/2) dy = 2^{2-s/2}/(2-s) θ^s h^s`, so the
/// bound is `Σ_s 2^{2-s/2}/(2-s) θ^s ∫ h^s` with `∫ h^s = norm_s^s`.
pub fn sin2_bound(envelope_norm_a: f64, envelope_norm_b: f64, a: f64, b: f64, theta: f64) -> f64 {
    let t = theta.abs();
    [(a, envelope_norm_a), (b, envelope_norm_b)]
        .iter()
        .map(|&(s, n)| sin2_constant(s) * t.powf(s) * n.powf(s))
        .sum()
}

/// Explicit `E|Σ|^p` ceiling for a series under the same envelope, given
/// `int_a = ∫h^a` and `int_b = ∫h^b`.
///
/// `E|Σ|^p = C_p^{-1} ∫_0^∞ (1 - Re φ(θ)) θ^{-1-p} dθ` with
/// `C_p = ∫(1 - cos u) u^{-1-p} du`, and `1 - φ <= min(1, 2 ∫∫ sin²)`.
/// Bounding `∫∫ sin²` by [`sin2_bound`] and integrating each
/// `min(1, A θ^s)` term exactly gives
/// `Σ_s s / (p (s - p) C_p) (2 c_s ∫h^s)^{p/s}`.
pub fn moment_bound(int_a: f64, int_b: f64, a: f64, b: f64, p: f64) -> f64 {
    let cp = one_minus_cos_moment(p);
    [(a, int_a), (b, int_b)]
        .iter()
        .map(|&(s, h)| {
            if h <= 0.0 {
                0.0
            } else {
                s / (p * (s - p) * cp) * (2.0 * sin2_constant(s) * h).powf(p / s)
            }
        })
        .sum()
}

/// `Σ_s n^{1-2/s} / (2/s - 1)`.
fn y_tail_factor(n: f64, a: f64, b: f64) -> f64 {
    [a, b].iter().map(|&s| n.powf(1.0 - 2.0 / s) / (2.0 / s - 1.0)).sum()
}

/// `E|R|^p` ceiling for the remainder `R` of the series over `|y| > n`:
/// `E|R|^p <= (E R²)^{p/2}` and
/// `E R² <= 2 ∫h² ∫_n^∞ (y^{-1/a} + y^{-1/b})² dy <= 4 ∫h² Σ_s n^{1-2/s}/(2/s-1)`.
pub fn y_tail_bound(int_2: f64, n: f64, a: f64, b: f64, p: f64) -> f64 {
    (4.0 * int_2 * y_tail_factor(n, a, b)).powf(0.5 * p)
}

/// Picks a rectangle so that the dropped parts of the series have `p`-th
/// moment below `tol`: half of `tol` for `|y| > y_max`, half for x outside
/// the rectangle.
pub fn choose_truncation(
    envelope: &Envelope,
    a: f64,
    b: f64,
    p: f64,
    tol: f64,
    x_support: (f64, f64),
    quad: &QuadConfig,
) -> Result<Rectangle> {
    if !(0.0 < p && p < a && a <= b && b < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < p < a <= b < 2, got p = {p}, a = {a}, b = {b}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if !(x_support.0 < x_support.1) || !x_support.0.is_finite() || !x_support.1.is_finite() {
        return Err(Error::InvalidParameter("x_support must be a finite interval".into()));
    }
    let full_a = envelope.power_integral(a, f64::NEG_INFINITY, f64::INFINITY, quad)?;
    let full_b = envelope.power_integral(b, f64::NEG_INFINITY, f64::INFINITY, quad)?;
    if !(full_a.value.is_finite() && full_b.value.is_finite()) {
        return Err(Error::Divergent("envelope has infinite (a, b)-quasinorm".into()));
    }
    let half = 0.5 * tol;

    // x-extent
    let x_bound = |ext: f64| -> Result<f64> {
        let lo = x_support.0 - ext;
        let hi = x_support.1 + ext;
        Ok(moment_bound(
            envelope.outer_integral(a, lo, hi, quad)?,
            envelope.outer_integral(b, lo, hi, quad)?,
            a,
            b,
            p,
        ))
    };
    let (slo, shi) = envelope.support;
    let ext = if slo >= x_support.0 && shi <= x_support.1 {
        0.0
    } else if x_bound(0.0)? <= half {
        0.0
    } else {
        let mut hi = 1.0f64.max(x_support.1 - x_support.0);
        while x_bound(hi)? > half {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Truncation(tol));
            }
        }
        let mut lo = 0.5 * hi;
        if x_bound(lo)? <= half {
            lo = 0.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if x_bound(mid)? > half {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-4 * hi {
                break;
            }
        }
        hi
    };
    let x_lo = (x_support.0 - ext).max(slo.min(x_support.0));
    let x_hi = (x_support.1 + ext).min(shi.max(x_support.1));

    // y_max
    let int_2 = envelope.power_integral(2.0, x_lo, x_hi, quad)?.value;
    if !int_2.is_finite() {
        return Err(Error::Divergent("remainder bound needs a square-integrable envelope".into()));
    }
    let y_max = if int_2 == 0.0 {
        f64::MIN_POSITIVE
    } else {
        invert_y_tail(int_2, a, b, p, half).ok_or(Error::Truncation(tol))?
    };
    Rectangle::new(x_lo, x_hi, y_max)
}

/// Smallest `n` with `y_tail_bound(n) <= target`, by bisection in `log n`.
fn invert_y_tail(int_2: f64, a: f64, b: f64, p: f64, target: f64) -> Option<f64> {
    let f = |ln: f64| y_tail_bound(int_2, ln.exp(), a, b, p) - target;
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    if f(hi) > 0.0 {
        return None;
    }
    if f(lo) <= 0.0 {
        return Some(lo.exp());
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Some(hi.exp())
}

/// Characteristic function of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfValue {
    /// `E exp(iθΣ)` for the series over `rect`.
    pub truncated: f64,
    /// `truncated` times the Gaussian factor of the dropped small jumps.
    pub with_tail: f64,
    /// Error estimate of `truncated`.
    pub error: f64,
}

// phase above which sin² is replaced by its mean 1/2
const PHASE_CUTOFF: f64 = 200.0;

/// `2 ∫_0^{y_max} sin²(θ g(x, y) / 2) dy`, for g odd in y and |g| decreasing
/// in |y|.
fn inner_sin2<G: PointFunctional + ?Sized>(g: &G, x: f64, theta: f64, y_max: f64) -> (f64, f64) {
    let k = |y: f64| 0.5 * theta * g.value(x, y).abs();
    let top = y_max.ln();
    if k(y_max) == 0.0 && k(1e-300_f64.max(y_max * 1e-12)) == 0.0 {
        return (0.0, 0.0);
    }
    if k(y_max) >= PHASE_CUTOFF {
        return (y_max, 0.0);
    }
    // walk down in log y until the phase is large
    let mut u_star = top;
    let floor = top - 1400.0;
    while u_star > floor && k(u_star.exp()) < PHASE_CUTOFF {
        u_star -= 1.0;
    }
    // refine the crossing so the oscillatory cells start near the cutoff
    let (mut lo, mut hi) = (u_star, (u_star + 1.0).min(top));
    if k(lo.exp()) >= PHASE_CUTOFF {
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if k(mid.exp()) >= PHASE_CUTOFF {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        u_star = lo;
    }
    let integrand = |u: f64| {
        let y = u.exp();
        let s = k(y).sin();
        s * s * y
    };
    let mut total = 0.5 * u_star.exp();
    let mut err = 0.0;
    let mut u = u_star;
    while u < top {
        // cells hold about one period of sin² at the local phase
        let ph = k(u.exp()).max(1e-300);
        let du = (PI / ph).clamp(1e-6, 0.5).min(top - u);
        let (v, e) = gl_cell(&integrand, u, u + du);
        total += v;
        err += e;
        u += du;
    }
    (2.0 * total, 2.0 * err)
}

/// `∫∫_rect sin²(θ g / 2) dx dy`.
pub fn sin2_integral<G: PointFunctional + ?Sized>(
    g: &G,
    theta: f64,
    rect: &Rectangle,
    quad: &QuadConfig,
) -> Result<Integral> {
    rect.validate()?;
    if theta == 0.0 {
        return Ok(Integral::default());
    }
    let (slo, shi) = g.x_support();
    let lo = rect.x_lo.max(slo);
    let hi = rect.x_hi.min(shi);
    if !(lo < hi) {
        return Ok(Integral::default());
    }
    let err = std::cell::Cell::new(0.0);
    let j = |x: f64| {
        let (v, e) = inner_sin2(g, x, theta, rect.y_max);
        err.set(err.get() + e);
        v
    };
    let mut pts = g.x_breakpoints();
    pts.extend(g.x_singular());
    let singular = g.x_singular();
    let out = integrate_singular(&j, lo, hi, &pts, &singular, quad)?;
    Ok(Integral {
        value: out.value,
        error: out.error + err.get() * (hi - lo) / 320.0,
    })
}

/// `E exp(iθΣ) = exp(-2 ∫∫ sin²(θg/2))` for the series over `rect`.
pub fn cf_closed_form<G: PointFunctional + ?Sized>(
    g: &G,
    theta: f64,
    rect: &Rectangle,
    quad: &QuadConfig,
) -> Result<CfValue> {
    if theta == 0.0 {
        return Ok(CfValue {
            truncated: 1.0,
            with_tail: 1.0,
            error: 0.0,
        });
    }
    let i = sin2_integral(g, theta, rect, quad)?;
    let truncated = (-2.0 * i.value).exp();
    let error = 2.0 * truncated * i.error;
    if !(error <= 1e-4_f64.max(quad.tol * 1e4)) {
        return Err(Error::Quadrature {
            tol: 1e-4,
            estimate: error,
        });
    }
    let tail = match g.tail_variance(rect, quad) {
        Ok(v) => (-0.5 * theta * theta * v).exp(),
        Err(_) => 1.0,
    };
    Ok(CfValue {
        truncated,
        with_tail: truncated * tail,
        error,
    })
}
