use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A deterministic scalar function of time: `h(t)`, `alpha(t)` or an
/// amplitude `a(t)`. In config files a bare number means a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FuncRepr")]
pub struct FuncTable {
    #[serde(flatten)]
    pub shape: Shape,
    /// Optional restriction of the domain; knot tables are always limited to
    /// their first and last knot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Constant {
        value: f64,
    },
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// `offset + amplitude * sin(frequency * t + phase)`
    Sinusoid {
        offset: f64,
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FuncRepr {
    Number(f64),
    Full {
        #[serde(flatten)]
        shape: Shape,
        #[serde(default)]
        domain: Option<[f64; 2]>,
    },
}

impl TryFrom<FuncRepr> for FuncTable {
    type Error = Error;

    fn try_from(r: FuncRepr) -> Result<Self> {
        let t = match r {
            FuncRepr::Number(v) => FuncTable::constant(v),
            FuncRepr::Full { shape, domain } => FuncTable { shape, domain },
        };
        t.validate()?;
        Ok(t)
    }
}

fn one() -> f64 {
    1.0
}

impl From<f64> for FuncTable {
    fn from(value: f64) -> Self {
        FuncTable::constant(value)
    }
}

impl FuncTable {
    pub fn constant(value: f64) -> Self {
        Self {
            shape: Shape::Constant { value },
            domain: None,
        }
    }

    pub fn linear(intercept: f64, slope: f64) -> Self {
        Self {
            shape: Shape::Linear { intercept, slope },
            domain: None,
        }
    }

    /// The line through `(t0, v0)` and `(t1, v1)`.
    pub fn line_through(t0: f64, v0: f64, t1: f64, v1: f64) -> Self {
        let slope = (v1 - v0) / (t1 - t0);
        Self::linear(v0 - slope * t0, slope)
    }

    pub fn sinusoid(offset: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            shape: Shape::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            },
            domain: None,
        }
    }

    pub fn piecewise_linear(knots: Vec<[f64; 2]>) -> Result<Self> {
        let table = Self {
            shape: Shape::PiecewiseLinear { knots },
            domain: None,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some([lo, hi]);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be finite, got {v}")))
            }
        };
        match &self.shape {
            Shape::Constant { value } => finite(*value, "constant value")?,
            Shape::Linear { intercept, slope } => {
                finite(*intercept, "intercept")?;
                finite(*slope, "slope")?;
            }
            Shape::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => {
                for (v, w) in [
                    (offset, "offset"),
                    (amplitude, "amplitude"),
                    (frequency, "frequency"),
                    (phase, "phase"),
                ] {
                    finite(*v, w)?;
                }
            }
            Shape::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return Err(Error::InvalidParameter("knot table is empty".into()));
                }
                for k in knots {
                    finite(k[0], "knot time")?;
                    finite(k[1], "knot value")?;
                }
                if knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(Error::InvalidParameter(
                        "knot times must be strictly increasing".into(),
                    ));
                }
            }
        }
        if let Some([lo, hi]) = self.domain {
            if !(lo <= hi) {
                return Err(Error::InvalidParameter(format!(
                    "domain [{lo}, {hi}] is empty"
                )));
            }
        }
        Ok(())
    }

    /// The closed interval on which the function is defined.
    pub fn domain(&self) -> (f64, f64) {
        let (mut lo, mut hi) = match &self.shape {
            Shape::PiecewiseLinear { knots } if !knots.is_empty() => {
                (knots[0][0], knots[knots.len() - 1][0])
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        if let Some([dlo, dhi]) = self.domain {
            lo = lo.max(dlo);
            hi = hi.min(dhi);
        }
        (lo, hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.domain();
        t >= lo && t <= hi
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideDomain { t, lo, hi });
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluates without the domain check. Knot tables are held constant
    /// beyond their end knots.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Constant { value } => *value,
            Shape::Linear { intercept, slope } => intercept + slope * t,
            Shape::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (frequency * t + phase).sin(),
            Shape::PiecewiseLinear { knots } => interpolate(knots, t),
        }
    }

    /// True when the function takes one value everywhere.
    pub fn is_constant(&self) -> bool {
        match &self.shape {
            Shape::Constant { .. } => true,
            Shape::Linear { slope, .. } => *slope == 0.0,
            Shape::Sinusoid {
                amplitude,
                frequency,
                ..
            } => *amplitude == 0.0 || *frequency == 0.0,
            Shape::PiecewiseLinear { knots } => knots.windows(2).all(|w| w[0][1] == w[1][1]),
        }
    }

    /// Exact minimum and maximum over `[lo, hi]` (clipped to the domain).
    pub fn bounds_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (dlo, dhi) = self.domain();
        let lo = lo.max(dlo);
        let hi = hi.min(dhi);
        let mut candidates = vec![lo, hi];
        match &self.shape {
            Shape::Constant { .. } | Shape::Linear { .. } => {}
            Shape::Sinusoid {
                frequency, phase, ..
            } => {
                if *frequency != 0.0 {
                    // interior extrema of sin sit at phase arguments pi/2 + k pi
                    let w = *frequency;
                    let a = (w * lo + phase).min(w * hi + phase);
                    let b = (w * lo + phase).max(w * hi + phase);
                    let k0 = ((a - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).ceil();
                    let mut k = k0;
                    while std::f64::consts::FRAC_PI_2 + k * std::f64::consts::PI <= b {
                        let arg = std::f64::consts::FRAC_PI_2 + k * std::f64::consts::PI;
                        candidates.push((arg - phase) / w);
                        k += 1.0;
                        if candidates.len() > 10_000 {
                            break;
                        }
                    }
                }
            }
            Shape::PiecewiseLinear { knots } => {
                candidates.extend(knots.iter().map(|k| k[0]).filter(|&t| t > lo && t < hi));
            }
        }
        candidates
            .into_iter()
            .filter(|t| t.is_finite())
            .map(|t| self.eval_unchecked(t))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| {
                (mn.min(v), mx.max(v))
            })
    }

    /// Codomain bounds over the whole domain.
    pub fn codomain(&self) -> (f64, f64) {
        let (lo, hi) = self.domain();
        match &self.shape {
            Shape::Linear { slope, .. } if *slope != 0.0 && !(lo.is_finite() && hi.is_finite()) => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Shape::Sinusoid {
                offset, amplitude, ..
            } if !(lo.is_finite() && hi.is_finite()) => {
                (offset - amplitude.abs(), offset + amplitude.abs())
            }
            _ => self.bounds_on(lo, hi),
        }
    }
}

/// `FuncTable::eval` as a free function.
pub fn eval_func(table: &FuncTable, t: f64) -> Result<f64> {
    table.eval(t)
}

fn interpolate(knots: &[[f64; 2]], t: f64) -> f64 {
    let n = knots.len();
    if t <= knots[0][0] {
        return knots[0][1];
    }
    if t >= knots[n - 1][0] {
        return knots[n - 1][1];
    }
    let i = knots.partition_point(|k| k[0] <= t);
    let [t0, v0] = knots[i - 1];
    let [t1, v1] = knots[i];
    let w = (t - t0) / (t1 - t0);
    v0 + w * (v1 - v0)
}
