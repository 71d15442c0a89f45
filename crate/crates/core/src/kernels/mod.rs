//! Kernel families, parameter functions, norms and normalizing constants.

mod constants;
mod func;
mod kernel;
pub mod quad;

use serde::{Deserialize, Serialize};

pub use constants::{c_alpha, fbm_normalizer, fbm_normalizer_with, series_normalizer};
pub use func::{eval_func, FuncTable, Shape};
pub use kernel::{eval_kernel, KernelAt, KernelSpec};
pub use quad::{Integral, QuadConfig};

use crate::error::{Error, Result};

/// The two integral terms of an `(a, b)`-quasinorm and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub a_part: f64,
    pub b_part: f64,
    pub combined: f64,
    pub quadrature_error_estimate: f64,
}

/// `∫_lo^hi |f(x)|^p dx` for a frozen kernel.
pub fn lp_integral(k: &KernelAt, p: f64, lo: f64, hi: f64, quad: &QuadConfig) -> Result<Integral> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("norm exponent {p} must be positive")));
    }
    let (slo, shi) = k.support();
    let lo = lo.max(slo);
    let hi = hi.min(shi);
    if !(lo < hi) {
        return Ok(Integral::default());
    }
    check_integrable(k, p, lo, hi)?;
    let g = |x: f64| k.value(x).abs().powf(p);
    let breaks = k.breakpoints();
    // fractional powers are not smooth at their branch points even when
    // bounded, so those get graded cells too
    let singular = match *k {
        KernelAt::Power { e, .. } if e != 0.0 && e.fract() != 0.0 => breaks.clone(),
        KernelAt::Log { .. } => breaks.clone(),
        _ => k.singular_points(),
    };
    quad::integrate_singular(&g, lo, hi, &breaks, &singular, quad)
}

fn check_integrable(k: &KernelAt, p: f64, lo: f64, hi: f64) -> Result<()> {
    let unbounded = !(lo.is_finite() && hi.is_finite());
    match *k {
        KernelAt::Power { e, .. } => {
            if !e.is_finite() {
                return Err(Error::InvalidParameter(format!("kernel exponent {e} is not finite")));
            }
            if e * p <= -1.0 {
                return Err(Error::Divergent(format!(
                    "|x|^({e:.4}) is not {p}-integrable at its singularity"
                )));
            }
            if unbounded && e != 0.0 && (e - 1.0) * p >= -1.0 {
                return Err(Error::Divergent(format!(
                    "tail |x|^({:.4}) is not {p}-integrable",
                    e - 1.0
                )));
            }
        }
        KernelAt::Log { t } if unbounded && t != 0.0 && p <= 1.0 => {
            return Err(Error::Divergent(format!(
                "log kernel tail |x|^-1 is not {p}-integrable"
            )));
        }
        _ => {}
    }
    Ok(())
}

fn validate_exponent(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: p,
            range: "(0, 2]",
        })
    }
}

fn norm_from(i: Integral, p: f64) -> (f64, f64) {
    let n = i.value.max(0.0).powf(1.0 / p);
    let err = if i.value > 0.0 {
        n / (p * i.value) * i.error
    } else {
        0.0
    };
    (n, err)
}

/// `||f(t, v, .)||_alpha` over `domain`, with the kernel exponent evaluated
/// at `alpha_val`.
pub fn alpha_norm(
    spec: &KernelSpec,
    t: f64,
    v: f64,
    alpha_val: f64,
    h: &FuncTable,
    domain: (f64, f64),
    quad: &QuadConfig,
) -> Result<NormResult> {
    validate_exponent("alpha", alpha_val)?;
    spec.validate()?;
    let alpha = FuncTable::constant(alpha_val);
    let k = spec.at(t, v, h, &alpha)?;
    let (n, err) = norm_from(lp_integral(&k, alpha_val, domain.0, domain.1, quad)?, alpha_val);
    Ok(NormResult {
        a_part: n,
        b_part: 0.0,
        combined: n,
        quadrature_error_estimate: err,
    })
}

/// `||f||_{a,b} = ||f||_a + ||f||_b`; the kernel exponent uses `alpha(v)`.
#[allow(clippy::too_many_arguments)]
pub fn ab_norm(
    spec: &KernelSpec,
    t: f64,
    v: f64,
    a: f64,
    b: f64,
    h: &FuncTable,
    alpha: &FuncTable,
    domain: (f64, f64),
    quad: &QuadConfig,
) -> Result<NormResult> {
    validate_exponent("a", a)?;
    validate_exponent("b", b)?;
    if a > b {
        return Err(Error::InvalidParameter(format!("need a <= b, got a = {a}, b = {b}")));
    }
    spec.validate()?;
    let k = spec.at(t, v, h, alpha)?;
    let (na, ea) = norm_from(lp_integral(&k, a, domain.0, domain.1, quad)?, a);
    let (nb, eb) = norm_from(lp_integral(&k, b, domain.0, domain.1, quad)?, b);
    Ok(NormResult {
        a_part: na,
        b_part: nb,
        combined: na + nb,
        quadrature_error_estimate: ea + eb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

    fn c(v: f64) -> FuncTable {
        FuncTable::constant(v)
    }

    #[test]
    fn indicator_norms() {
        let q = QuadConfig::default();
        let n = alpha_norm(&KernelSpec::Indicator, 2.0, 2.0, 1.5, &c(0.5), ALL, &q).unwrap();
        assert!((n.combined - 2f64.powf(1.0 / 1.5)).abs() < 1e-12);
        for al in [0.3, 1.0, 1.7, 2.0] {
            let n = alpha_norm(&KernelSpec::Indicator, 1.0, 1.0, al, &c(0.5), ALL, &q).unwrap();
            assert!((n.combined - 1.0).abs() < 1e-12);
        }
        let n = ab_norm(&KernelSpec::Indicator, 1.0, 1.0, 1.2, 1.8, &c(0.5), &c(1.5), ALL, &q).unwrap();
        assert!((n.combined - 2.0).abs() < 1e-12);
        let n = ab_norm(&KernelSpec::Indicator, 2.0, 2.0, 1.2, 1.8, &c(0.5), &c(1.5), ALL, &q).unwrap();
        let want = 2f64.powf(1.0 / 1.2) + 2f64.powf(1.0 / 1.8);
        assert!((n.combined - want).abs() < 1e-12);
        assert!((n.combined - 3.2515).abs() < 1e-4);
    }

    #[test]
    fn fbm_kernel_half_is_unit_indicator() {
        let n = alpha_norm(&KernelSpec::FbmKernel, 1.0, 1.0, 2.0, &c(0.5), ALL, &QuadConfig::default()).unwrap();
        assert!((n.combined - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ab_with_equal_exponents_doubles() {
        let q = QuadConfig::default();
        let k = KernelSpec::LsfmKernel {
            a_coef: 1.0,
            b_coef: 0.4,
        };
        let one = alpha_norm(&k, 1.0, 1.0, 1.6, &c(0.7), ALL, &q).unwrap();
        let two = ab_norm(&k, 1.0, 1.0, 1.6, 1.6, &c(0.7), &c(1.6), ALL, &q).unwrap();
        assert!((two.combined - 2.0 * one.combined).abs() < 1e-12 * one.combined);
        assert_eq!(two.a_part, two.b_part);
    }

    #[test]
    fn lsfm_norm_against_brute_force() {
        // ∫ |(1-x)_+^e - (-x)_+^e|^alpha with e = 0.7 - 1/1.6 = 0.075 > 0
        let q = QuadConfig::default();
        let k = KernelSpec::LsfmKernel {
            a_coef: 1.0,
            b_coef: 0.0,
        };
        let n = alpha_norm(&k, 1.0, 1.0, 1.6, &c(0.7), ALL, &q).unwrap();
        let e: f64 = 0.7 - 1.0 / 1.6;
        let f = |x: f64| {
            let p = if x < 1.0 { (1.0 - x).powf(e) } else { 0.0 };
            let m = if x < 0.0 { (-x).powf(e) } else { 0.0 };
            (p - m).abs().powf(1.6)
        };
        // substitution x = -u^3 on the far left keeps the fine sum honest
        let nseg = 2_000_000;
        let mut s = 0.0;
        let dx = 1.0 / nseg as f64;
        for i in 0..nseg {
            s += f((i as f64 + 0.5) * dx) * dx;
        }
        let umax = 2000f64;
        let du = umax / nseg as f64;
        for i in 0..nseg {
            let u = (i as f64 + 0.5) * du;
            s += f(-u * u * u) * 3.0 * u * u * du;
        }
        // analytic tail beyond -umax^3 with f ~ (e|x|^{e-1})^1.6
        let x0 = umax.powi(3);
        let pw = (e - 1.0) * 1.6;
        s += (e.powf(1.6)) * x0.powf(pw + 1.0) / -(pw + 1.0);
        let brute = s.powf(1.0 / 1.6);
        assert!((n.combined - brute).abs() < 1e-5 * brute, "{} vs {brute}", n.combined);
    }

    #[test]
    fn divergent_kernels_are_reported() {
        let q = QuadConfig::default();
        let k = KernelSpec::LsfmKernel {
            a_coef: 1.0,
            b_coef: 1.0,
        };
        // h - 1/alpha <= -1/alpha happens exactly when h <= 0
        let r = alpha_norm(&k, 1.0, 1.0, 1.5, &c(0.0), ALL, &q);
        assert!(matches!(r, Err(Error::Divergent(_))), "{r:?}");
        let r = alpha_norm(&KernelSpec::LogKernel, 1.0, 1.0, 0.9, &c(0.5), ALL, &q);
        assert!(matches!(r, Err(Error::Divergent(_))));
        let g = FuncTable::constant(1.0);
        let r = alpha_norm(&KernelSpec::UserTable { table: g }, 1.0, 1.0, 1.5, &c(0.5), ALL, &q);
        assert!(r.is_err());
    }

    #[test]
    fn homogeneity() {
        let q = QuadConfig::default();
        let base = alpha_norm(
            &KernelSpec::LsfmKernel {
                a_coef: 1.0,
                b_coef: -0.3,
            },
            1.0,
            1.0,
            1.4,
            &c(0.6),
            ALL,
            &q,
        )
        .unwrap()
        .combined;
        for lam in [-2.0, 0.5, 3.0] {
            let s = alpha_norm(
                &KernelSpec::LsfmKernel {
                    a_coef: lam,
                    b_coef: -0.3 * lam,
                },
                1.0,
                1.0,
                1.4,
                &c(0.6),
                ALL,
                &q,
            )
            .unwrap()
            .combined;
            assert!((s - f64::abs(lam) * base).abs() < 1e-12 * s, "{lam}");
        }
    }

    #[test]
    fn enlarging_the_domain_never_decreases_parts() {
        let q = QuadConfig::default();
        let k = KernelSpec::LogKernel;
        let mut last = (0.0, 0.0);
        for w in [0.5, 1.0, 3.0, 10.0, 100.0] {
            let n = ab_norm(&k, 1.0, 1.0, 1.2, 1.8, &c(0.5), &c(1.5), (-w, 1.0 + w), &q).unwrap();
            assert!(n.a_part >= last.0 && n.b_part >= last.1);
            last = (n.a_part, n.b_part);
        }
        let full = ab_norm(&k, 1.0, 1.0, 1.2, 1.8, &c(0.5), &c(1.5), ALL, &q).unwrap();
        assert!(full.a_part >= last.0 && full.b_part >= last.1);
    }

    #[test]
    fn exp_ou_norm() {
        // ∫_t^inf e^{-alpha lambda (x-t)} dx = 1 / (alpha lambda)
        let q = QuadConfig::default();
        let n = alpha_norm(&KernelSpec::ExpOuKernel { lambda: 2.0 }, 0.5, 0.5, 1.5, &c(0.5), ALL, &q).unwrap();
        assert!((n.combined - (1.0f64 / 3.0).powf(1.0 / 1.5)).abs() < 1e-9, "{}", n.combined);
    }
}
