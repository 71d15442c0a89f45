use serde::{Deserialize, Serialize};

use super::func::FuncTable;
use crate::error::{Error, Result};

/// The integrand families `f(t, v, x)` used by the process constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `(t-x)_+^{h(v)-1/2} - (-x)_+^{h(v)-1/2}`
    FbmKernel,
    /// `a((t-x)_+^e - (-x)_+^e) + b((t-x)_-^e - (-x)_-^e)` with
    /// `e = h(v) - 1/alpha(v)`.
    LsfmKernel { a_coef: f64, b_coef: f64 },
    /// `1_[0,t](x)`, negated on `[t, 0]` when `t < 0`.
    Indicator,
    /// `log|t-x| - log|x|`
    LogKernel,
    /// `exp(-lambda (x - t)) 1_{x >= t}`
    ExpOuKernel { lambda: f64 },
    /// `g(t - x)` for a tabulated `g`, zero outside the table's domain.
    UserTable { table: FuncTable },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::LsfmKernel { a_coef, b_coef } => {
                if !(a_coef.is_finite() && b_coef.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "kernel coefficients must be finite".into(),
                    ));
                }
                if *a_coef == 0.0 && *b_coef == 0.0 {
                    return Err(Error::InvalidParameter(
                        "kernel coefficients a and b must not both be zero".into(),
                    ));
                }
            }
            KernelSpec::ExpOuKernel { lambda } => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::OutOfRange {
                        name: "lambda",
                        value: *lambda,
                        range: "(0, inf)",
                    });
                }
            }
            KernelSpec::UserTable { table } => table.validate()?,
            _ => {}
        }
        Ok(())
    }

    /// Whether the kernel carries an `h`-dependent exponent.
    pub fn uses_exponent(&self) -> bool {
        matches!(self, KernelSpec::FbmKernel | KernelSpec::LsfmKernel { .. })
    }

    /// Freezes the kernel at `(t, v)`.
    pub fn at<'a>(
        &'a self,
        t: f64,
        v: f64,
        h: &FuncTable,
        alpha: &FuncTable,
    ) -> Result<KernelAt<'a>> {
        Ok(match self {
            KernelSpec::FbmKernel => KernelAt::Power {
                t,
                e: h.eval(v)? - 0.5,
                a: 1.0,
                b: 0.0,
            },
            KernelSpec::LsfmKernel { a_coef, b_coef } => KernelAt::Power {
                t,
                e: h.eval(v)? - 1.0 / alpha.eval(v)?,
                a: *a_coef,
                b: *b_coef,
            },
            KernelSpec::Indicator => KernelAt::Indicator { t },
            KernelSpec::LogKernel => KernelAt::Log { t },
            KernelSpec::ExpOuKernel { lambda } => KernelAt::ExpOu { t, lambda: *lambda },
            KernelSpec::UserTable { table } => KernelAt::Table { t, table },
        })
    }
}

/// A kernel with `(t, v)` fixed, as a function of `x` alone.
#[derive(Debug, Clone, Copy)]
pub enum KernelAt<'a> {
    Power { t: f64, e: f64, a: f64, b: f64 },
    Indicator { t: f64 },
    Log { t: f64 },
    ExpOu { t: f64, lambda: f64 },
    Table { t: f64, table: &'a FuncTable },
}

#[inline]
fn pos_pow(z: f64, e: f64) -> f64 {
    if z > 0.0 {
        z.powf(e)
    } else {
        0.0
    }
}

// antiderivative helper: z_+^{e+1} / (e+1)
#[inline]
fn pos_pow_int(z: f64, e: f64) -> f64 {
    if z > 0.0 {
        z.powf(e + 1.0) / (e + 1.0)
    } else {
        0.0
    }
}

// z log|z| - z, the antiderivative of log|z|
#[inline]
fn xlogx(z: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        z * z.abs().ln() - z
    }
}

impl KernelAt<'_> {
    /// Raw value; infinite or NaN exactly at a singularity.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            KernelAt::Power { t, e, a, b } => {
                a * (pos_pow(t - x, e) - pos_pow(-x, e)) + b * (pos_pow(x - t, e) - pos_pow(x, e))
            }
            KernelAt::Indicator { t } => {
                if t >= 0.0 {
                    if x >= 0.0 && x <= t {
                        1.0
                    } else {
                        0.0
                    }
                } else if x >= t && x <= 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            KernelAt::Log { t } => (t - x).abs().ln() - x.abs().ln(),
            KernelAt::ExpOu { t, lambda } => {
                if x >= t {
                    (-lambda * (x - t)).exp()
                } else {
                    0.0
                }
            }
            KernelAt::Table { t, table } => {
                let z = t - x;
                if table.contains(z) {
                    table.eval_unchecked(z)
                } else {
                    0.0
                }
            }
        }
    }

    /// Points where `|f|` is unbounded.
    pub fn singular_points(&self) -> Vec<f64> {
        match *self {
            KernelAt::Power { t, e, .. } if e < 0.0 => {
                if t == 0.0 {
                    vec![]
                } else {
                    vec![0.0, t]
                }
            }
            KernelAt::Log { t } if t != 0.0 => vec![0.0, t],
            _ => vec![],
        }
    }

    /// Points where the kernel is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match *self {
            KernelAt::Power { t, .. } | KernelAt::Indicator { t } | KernelAt::Log { t } => {
                vec![0.0, t]
            }
            KernelAt::ExpOu { t, .. } => vec![t],
            KernelAt::Table { t, table } => match &table.shape {
                super::func::Shape::PiecewiseLinear { knots } => {
                    let (lo, hi) = table.domain();
                    knots
                        .iter()
                        .map(|k| k[0])
                        .filter(|&s| s >= lo && s <= hi)
                        .chain([lo, hi].into_iter().filter(|s| s.is_finite()))
                        .map(|s| t - s)
                        .collect()
                }
                _ => {
                    let (lo, hi) = table.domain();
                    [lo, hi]
                        .into_iter()
                        .filter(|s| s.is_finite())
                        .map(|s| t - s)
                        .collect()
                }
            },
        };
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Smallest interval outside which the kernel vanishes.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            KernelAt::Power { t, e, .. } if e == 0.0 => (t.min(0.0), t.max(0.0)),
            KernelAt::Power { t, .. } | KernelAt::Log { t } if t == 0.0 => (0.0, 0.0),
            KernelAt::Power { .. } | KernelAt::Log { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            KernelAt::Indicator { t } => (t.min(0.0), t.max(0.0)),
            KernelAt::ExpOu { t, .. } => (t, f64::INFINITY),
            KernelAt::Table { t, table } => {
                let (lo, hi) = table.domain();
                (t - hi, t - lo)
            }
        }
    }

    /// Value at `x`, rejecting evaluation at a singularity.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.singular_points().contains(&x) {
            return Err(Error::Singularity { x });
        }
        Ok(self.value(x))
    }

    /// `∫_{x0}^{x1} f(x) dx`, in closed form where one exists.
    pub fn cell_integral(&self, x0: f64, x1: f64) -> f64 {
        match *self {
            KernelAt::Power { t, e, a, b } if e > -1.0 => {
                let pos = (pos_pow_int(t - x0, e) - pos_pow_int(t - x1, e))
                    - (pos_pow_int(-x0, e) - pos_pow_int(-x1, e));
                let neg = (pos_pow_int(x1 - t, e) - pos_pow_int(x0 - t, e))
                    - (pos_pow_int(x1, e) - pos_pow_int(x0, e));
                a * pos + b * neg
            }
            KernelAt::Indicator { t } => {
                let (lo, hi, sign) = if t >= 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
                sign * (x1.min(hi) - x0.max(lo)).max(0.0)
            }
            KernelAt::Log { t } => {
                (xlogx(t - x0) - xlogx(t - x1)) - (xlogx(x1) - xlogx(x0))
            }
            KernelAt::ExpOu { t, lambda } => {
                let lo = x0.max(t);
                if x1 <= lo {
                    0.0
                } else {
                    ((-lambda * (lo - t)).exp() - (-lambda * (x1 - t)).exp()) / lambda
                }
            }
            _ => {
                // two-point Gauss rule
                let c = 0.5 * (x0 + x1);
                let d = 0.5 * (x1 - x0) / 3f64.sqrt();
                0.5 * (x1 - x0) * (self.value(c - d) + self.value(c + d))
            }
        }
    }
}

/// Evaluates `f(t, v, x)`, rejecting points on a singularity.
pub fn eval_kernel(
    spec: &KernelSpec,
    t: f64,
    v: f64,
    x: f64,
    h: &FuncTable,
    alpha: &FuncTable,
) -> Result<f64> {
    let k = spec.at(t, v, h, alpha)?;
    if let KernelAt::Power { e, .. } = k {
        if !e.is_finite() {
            return Err(Error::InvalidParameter(format!("kernel exponent {e} is not finite")));
        }
    }
    k.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> FuncTable {
        FuncTable::constant(v)
    }

    #[test]
    fn indicator_values() {
        let k = KernelSpec::Indicator;
        assert_eq!(eval_kernel(&k, 1.0, 1.0, 0.5, &c(0.5), &c(1.5)).unwrap(), 1.0);
        assert_eq!(eval_kernel(&k, 1.0, 1.0, 1.5, &c(0.5), &c(1.5)).unwrap(), 0.0);
    }

    #[test]
    fn zero_exponent_is_indicator() {
        let k = KernelSpec::LsfmKernel {
            a_coef: 1.0,
            b_coef: 0.0,
        };
        // h = 0.5, alpha = 2 gives exponent 0
        assert_eq!(eval_kernel(&k, 1.0, 1.0, 0.5, &c(0.5), &c(2.0)).unwrap(), 1.0);
        assert_eq!(eval_kernel(&k, 1.0, 1.0, 1.5, &c(0.5), &c(2.0)).unwrap(), 0.0);
        assert_eq!(eval_kernel(&k, 1.0, 1.0, -0.5, &c(0.5), &c(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn zero_exponent_agrees_with_indicator_on_grid() {
        let ind = KernelSpec::Indicator;
        let t = 1.3;
        for spec in [
            KernelSpec::FbmKernel,
            KernelSpec::LsfmKernel {
                a_coef: 1.0,
                b_coef: 0.0,
            },
        ] {
            for i in 0..1000 {
                let x = -1.0 + 3.0 * (i as f64 + 0.37) / 1000.0;
                if x == 0.0 || x == t {
                    continue;
                }
                let a = eval_kernel(&spec, t, t, x, &c(0.5), &c(2.0)).unwrap();
                let b = eval_kernel(&ind, t, t, x, &c(0.5), &c(2.0)).unwrap();
                assert_eq!(a, b, "x = {x}");
            }
        }
    }

    #[test]
    fn log_kernel_value() {
        let v = eval_kernel(&KernelSpec::LogKernel, 1.0, 1.0, -1.0, &c(0.5), &c(1.5)).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn singularities_rejected() {
        let k = KernelSpec::LsfmKernel {
            a_coef: 1.0,
            b_coef: 1.0,
        };
        // h = 0.3, alpha = 1.5 gives a negative exponent
        assert!(matches!(
            eval_kernel(&k, 1.0, 1.0, 0.0, &c(0.3), &c(1.5)),
            Err(Error::Singularity { .. })
        ));
        assert!(eval_kernel(&k, 1.0, 1.0, 1.0, &c(0.3), &c(1.5)).is_err());
        assert!(eval_kernel(&k, 1.0, 1.0, 0.5, &c(0.3), &c(1.5)).is_ok());
        // positive exponent: no singularity
        assert!(eval_kernel(&k, 1.0, 1.0, 0.0, &c(0.9), &c(1.5)).is_ok());
    }

    #[test]
    fn exp_ou_and_table() {
        let ou = KernelSpec::ExpOuKernel { lambda: 2.0 };
        let v = eval_kernel(&ou, 1.0, 1.0, 1.5, &c(0.5), &c(1.5)).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(eval_kernel(&ou, 1.0, 1.0, 0.5, &c(0.5), &c(1.5)).unwrap(), 0.0);

        let g = FuncTable::constant(1.0).with_domain(-1.0, 0.0);
        let ma = KernelSpec::UserTable { table: g };
        assert_eq!(eval_kernel(&ma, 2.0, 2.0, 2.5, &c(0.5), &c(1.5)).unwrap(), 1.0);
        assert_eq!(eval_kernel(&ma, 2.0, 2.0, 1.5, &c(0.5), &c(1.5)).unwrap(), 0.0);
    }

    #[test]
    fn cell_integrals_match_fine_sums() {
        let h = c(0.7);
        let al = c(1.6);
        let specs = [
            KernelSpec::FbmKernel,
            KernelSpec::LsfmKernel {
                a_coef: 1.0,
                b_coef: -0.5,
            },
            KernelSpec::Indicator,
            KernelSpec::LogKernel,
            KernelSpec::ExpOuKernel { lambda: 1.5 },
        ];
        for spec in &specs {
            let k = spec.at(0.8, 0.8, &h, &al).unwrap();
            for &(x0, x1) in &[(-2.0, -1.5), (0.1, 0.3), (0.85, 1.9), (-0.4, 0.4)] {
                let n = 200_000;
                let dx = (x1 - x0) / n as f64;
                let fine: f64 = (0..n).map(|i| k.value(x0 + (i as f64 + 0.5) * dx) * dx).sum();
                let exact = k.cell_integral(x0, x1);
                assert!(
                    (fine - exact).abs() < 1e-5 * (1.0 + exact.abs()),
                    "{spec:?} [{x0},{x1}]: {fine} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn both_coefficients_zero_rejected() {
        let k = KernelSpec::LsfmKernel {
            a_coef: 0.0,
            b_coef: 0.0,
        };
        assert!(k.validate().is_err());
    }
}
