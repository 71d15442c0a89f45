//! Seedable random streams and the base samplers.
//!
//! A stream is a ChaCha8 generator keyed by `seed` with its 64-bit stream
//! counter set to `stream_id`. ChaCha output is specified word-for-word, so
//! a given `(seed, stream_id)` pair yields the same draws on every platform.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a symmetric stable law `S_alpha(sigma, 0, 0)` with
/// characteristic function `exp(-sigma^alpha |theta|^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    sigma: f64,
}

impl StableParams {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "(0, 2]",
            });
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::OutOfRange {
                name: "sigma",
                value: sigma,
                range: "[0, inf)",
            });
        }
        Ok(Self { alpha, sigma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Skewness; always zero here.
    pub fn beta(&self) -> f64 {
        0.0
    }

    /// Shift; always zero here.
    pub fn mu(&self) -> f64 {
        0.0
    }
}

/// A deterministic random stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

/// Creates the stream for `(seed, stream_id)`.
pub fn seed_stream(seed: u64, stream_id: u64) -> RngStream {
    RngStream::new(seed, stream_id)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// An independent stream keyed by `(key, tag)` on this stream's id.
    /// Callers draw `key` from a parent stream once and then address
    /// sub-streams by tag, so the draws for one tag never depend on how many
    /// other tags were used.
    pub fn keyed(&self, key: u64, tag: u64) -> RngStream {
        RngStream::new(splitmix64(key ^ splitmix64(tag)), self.stream_id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn gaussian(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_gaussian()).collect()
    }

    /// Fills `out` with standard normal draws.
    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.next_gaussian();
        }
    }

    /// Uniform on `[lo, hi)`; returns `lo` when the interval is degenerate.
    pub fn next_bool(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }

    pub fn next_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u: f64 = self.rng.random();
        if lo == hi {
            lo
        } else {
            lo + (hi - lo) * u
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "uniform bounds must satisfy lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok((0..n).map(|_| self.next_uniform(lo, hi)).collect())
    }

    /// One Poisson draw with the given mean.
    pub fn poisson_count(&mut self, mean: f64) -> Result<u64> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Poisson mean must be finite and non-negative, got {mean}"
            )));
        }
        if mean == 0.0 {
            return Ok(0);
        }
        let dist = Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let k: f64 = dist.sample(&mut self.rng);
        Ok(k as u64)
    }

    /// One draw from `S_alpha(sigma, 0, 0)` (Chambers–Mallows–Stuck).
    pub fn next_stable(&mut self, params: &StableParams) -> f64 {
        let alpha = params.alpha;
        let sigma = params.sigma;
        if alpha == 2.0 {
            return sigma * SQRT_2 * self.next_gaussian();
        }
        let v = PI * (self.next_open01() - 0.5);
        if alpha == 1.0 {
            return sigma * v.tan();
        }
        let w: f64 = Exp1.sample(&mut self.rng);
        let lead = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
        let tail = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
        sigma * lead * tail
    }

    pub fn stable(&mut self, params: &StableParams, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_stable(params)).collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard normal draws from a fresh stream.
pub fn sample_gaussian(stream: &mut RngStream, n: usize) -> Vec<f64> {
    stream.gaussian(n)
}

pub fn sample_stable(stream: &mut RngStream, params: &StableParams, n: usize) -> Vec<f64> {
    stream.stable(params, n)
}

pub fn sample_poisson_count(stream: &mut RngStream, mean: f64) -> Result<u64> {
    stream.poisson_count(mean)
}

pub fn sample_uniform(stream: &mut RngStream, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    stream.uniform(lo, hi, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn streams_are_reproducible_and_separated() {
        let a = seed_stream(42, 0).gaussian(1000);
        let b = seed_stream(42, 0).gaussian(1000);
        let c = seed_stream(42, 1).gaussian(1000);
        assert_eq!(a, b);
        assert_ne!(a[0], c[0]);
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let n = 1_000_000;
        let a = seed_stream(7, 0).gaussian(n);
        let b = seed_stream(7, 1).gaussian(n);
        let rho = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / n as f64;
        assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "rho = {rho}");
    }

    #[test]
    fn gaussian_moments() {
        let mut s = seed_stream(1, 0);
        assert!(s.gaussian(0).is_empty());
        let xs = s.gaussian(1_000_000);
        let (m, v) = mean_var(&xs);
        assert!(m.abs() < 4e-3, "mean {m}");
        assert!((v - 1.0).abs() < 0.006, "var {v}");
    }

    #[test]
    fn stable_alpha_two_is_gaussian_with_variance_two() {
        let p = StableParams::new(2.0, 1.0).unwrap();
        let xs = seed_stream(3, 0).stable(&p, 200_000);
        let (_, v) = mean_var(&xs);
        assert!((v - 2.0).abs() < 0.03, "var {v}");
    }

    #[test]
    fn cauchy_median_is_zero() {
        let p = StableParams::new(1.0, 1.0).unwrap();
        let mut xs = seed_stream(6, 0).stable(&p, 100_000);
        xs.sort_by(f64::total_cmp);
        let med = 0.5 * (xs[49_999] + xs[50_000]);
        assert!(med.abs() < 0.01, "median {med}");
    }

    #[test]
    fn stable_cf_at_one() {
        let p = StableParams::new(1.5, 1.0).unwrap();
        let n = 100_000;
        let xs = seed_stream(11, 0).stable(&p, n);
        let re = xs.iter().map(|x| x.cos()).sum::<f64>() / n as f64;
        assert!((re - (-1.0f64).exp()).abs() < 3.0 / (n as f64).sqrt(), "re {re}");
    }

    #[test]
    fn stable_rejects_bad_alpha() {
        assert!(StableParams::new(0.0, 1.0).is_err());
        assert!(StableParams::new(2.1, 1.0).is_err());
        assert!(StableParams::new(f64::NAN, 1.0).is_err());
        assert!(StableParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn stable_sign_symmetry() {
        for &alpha in &[0.5, 1.0, 1.5, 1.9] {
            let p = StableParams::new(alpha, 1.0).unwrap();
            let n = 40_000;
            let xs = seed_stream(13, 0).stable(&p, n);
            let frac = xs.iter().filter(|&&x| x > 0.0).count() as f64 / n as f64;
            assert!((frac - 0.5).abs() < 4.0 / (2.0 * (n as f64).sqrt()), "{alpha}: {frac}");
        }
    }

    #[test]
    fn poisson_draws() {
        let mut s = seed_stream(17, 0);
        assert_eq!(s.poisson_count(0.0).unwrap(), 0);
        assert!(s.poisson_count(-1.0).is_err());
        assert!(s.poisson_count(f64::INFINITY).is_err());
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| s.poisson_count(100.0).unwrap() as f64).collect();
        let (m, v) = mean_var(&xs);
        assert!((m - 100.0).abs() < 0.13, "mean {m}");
        assert!((v - 100.0).abs() < 2.0, "var {v}");
    }

    #[test]
    fn uniform_draws() {
        let mut s = seed_stream(19, 0);
        assert_eq!(s.uniform(3.0, 3.0, 5).unwrap(), vec![3.0; 5]);
        assert!(s.uniform(1.0, 0.0, 1).is_err());
        let xs = s.uniform(0.0, 1.0, 1_000_000).unwrap();
        let (m, _) = mean_var(&xs);
        assert!((m - 0.5).abs() < 0.0012);
        let ys = s.uniform(-1.0, 1.0, 1_000_000).unwrap();
        let pos = ys.iter().filter(|&&y| y > 0.0).count() as f64 / 1e6;
        assert!((pos - 0.5).abs() < 0.002);
    }
}
