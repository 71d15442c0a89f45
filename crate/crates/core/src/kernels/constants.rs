//! The normalizers `c(alpha)` of the Poisson series and `c(h)` of fBm.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::func::FuncTable;
use super::kernel::KernelSpec;
use super::quad::QuadConfig;
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ZETA3: f64 = 1.202_056_903_159_594_3;

/// `c(alpha) = (2 alpha^{-1} Gamma(1 - alpha) cos(pi alpha / 2))^{-1/alpha}`.
///
/// The bracket has a removable singularity at `alpha = 1` (limit `pi`).
/// Within `1e-4` of it the product `Gamma(eps) sin(pi eps / 2)`, with
/// `eps = 1 - alpha`, is replaced by its Taylor series through `eps^3`,
/// which leaves a truncation error below `1e-16`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, 2)",
        });
    }
    let bracket = if (1.0 - alpha).abs() < 1e-4 {
        bracket_series(alpha)
    } else {
        bracket_direct(alpha)
    };
    Ok(bracket.powf(-1.0 / alpha))
}

/// The constant that makes `series_normalizer(alpha) * Σ f(X) Y^<-1/alpha>`
/// over a Poisson process with mean measure `dx dy` equal in law to
/// `S_alpha(||f||_alpha, 0, 0)`.
///
/// The exponent of the characteristic function of the series is
/// `∫∫ (1 - cos(θ f(x) |y|^{-1/alpha})) dx dy = 2 Γ(1-alpha) cos(pi alpha/2) |θ|^alpha ||f||_alpha^alpha`,
/// so the constant is `(2 Γ(1-alpha) cos(pi alpha / 2))^{-1/alpha}`, which is
/// `alpha^{-1/alpha} c_alpha(alpha)`. The two agree at `alpha = 1`.
pub fn series_normalizer(alpha: f64) -> Result<f64> {
    let c = c_alpha(alpha)?;
    Ok(c * alpha.powf(-1.0 / alpha))
}

fn bracket_series(alpha: f64) -> f64 {
    let eps = 1.0 - alpha;
    let g = EULER_GAMMA;
    let c2 = 0.5 * g * g + PI * PI / 24.0;
    let c3 = -ZETA3 / 3.0 - g * PI * PI / 24.0 - g * g * g / 6.0;
    let s = 0.5 * PI * (1.0 + eps * (-g + eps * (c2 + eps * c3)));
    2.0 / alpha * s
}

fn bracket_direct(alpha: f64) -> f64 {
    // Gamma(1 - a) = Gamma(2 - a) / (1 - a) keeps the gamma argument in (0, 2)
    2.0 / alpha * gamma(2.0 - alpha) / (1.0 - alpha) * (0.5 * PI * alpha).cos()
}

/// `c(h) = ||(1-x)_+^{h-1/2} - (-x)_+^{h-1/2}||_2`, so that `Var B_h(1) = 1`.
pub fn fbm_normalizer(h: f64) -> Result<f64> {
    fbm_normalizer_with(h, &QuadConfig::default())
}

pub fn fbm_normalizer_with(h: f64, quad: &QuadConfig) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::OutOfRange {
            name: "h",
            value: h,
            range: "(0, 1)",
        });
    }
    let hh = FuncTable::constant(h);
    let k = KernelSpec::FbmKernel.at(1.0, 1.0, &hh, &hh)?;
    let i = super::lp_integral(&k, 2.0, f64::NEG_INFINITY, f64::INFINITY, quad)?;
    Ok(i.value.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    // 50-digit reference values computed with mpmath
    const C_ALPHA: [(f64, f64); 8] = [
        (0.5, 0.039_788_735_772_973_834),
        (0.8, 0.205_461_946_812_021_07),
        (1.2, 0.400_528_572_017_652_13),
        (1.5, 0.447_350_114_469_824_76),
        (1.7, 0.413_908_316_393_357_81),
        (1.8, 0.367_392_099_286_909_90),
        (0.99999, 0.318_304_896_591_263_31),
        (1.00001, 0.318_314_875_696_728_00),
    ];

    #[test]
    fn c_alpha_matches_reference() {
        for (a, want) in C_ALPHA {
            let got = c_alpha(a).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "c({a}) = {got}, want {want}");
        }
        assert!((c_alpha(1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn series_normalizer_matches_reference() {
        for (a, want) in [
            (0.5, 0.159_154_943_091_895_34),
            (0.8, 0.271_561_947_861_980_88),
            (1.2, 0.344_071_840_478_585_15),
            (1.5, 0.341_392_031_627_647_84),
            (1.7, 0.302_932_565_908_248_01),
            (1.8, 0.265_040_202_225_534_25),
            (0.99999, 0.318_308_079_703_891_31),
            (1.00001, 0.318_311_692_611_632_90),
        ] {
            let got = series_normalizer(a).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "{a}: {got} vs {want}");
        }
    }

    #[test]
    fn c_alpha_is_continuous_through_one() {
        let c1 = c_alpha(1.0).unwrap();
        for a in [1.0 - 1e-5, 1.0 + 1e-5, 1.0 - 0.99e-4, 1.0 + 0.99e-4, 1.0 - 1.01e-4, 1.0 + 1.01e-4] {
            assert!((c_alpha(a).unwrap() - c1).abs() < 1e-4, "{a}");
        }
        // both branches agree around the switch-over point
        for a in [1.0 - 1e-4, 1.0 + 1e-4, 1.0 - 3e-4, 1.0 + 3e-4] {
            let (s, d) = (bracket_series(a), bracket_direct(a));
            assert!((s / d - 1.0).abs() < 1e-11, "{a}: {s} vs {d}");
        }
    }

    #[test]
    fn c_alpha_rejects_out_of_range() {
        for a in [0.0, 2.0, -1.0, f64::NAN] {
            assert!(c_alpha(a).is_err());
        }
    }

    #[test]
    fn fbm_normalizer_reference() {
        // sqrt(Gamma(h+1/2)^2 / (Gamma(2h+1) sin(pi h))), 50 digits
        for (h, want) in [
            (0.3, 1.369_332_286_615_585_8),
            (0.5, 1.0),
            (0.6, 0.929_363_552_097_443_43),
            (0.7, 0.915_911_006_524_020_12),
        ] {
            let got = fbm_normalizer(h).unwrap();
            assert!((got / want - 1.0).abs() < 1e-6, "c({h}) = {got}, want {want}");
        }
        assert!(fbm_normalizer(1.0).is_err());
        assert!(fbm_normalizer(0.0).is_err());
    }
}
