//! Standard normal helpers shared by targets, proposals and the scaling integrals.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// ln(sqrt(2 pi))
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Phi(x), accurate in both tails.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Phi^{-1}(p) for p in (0, 1).
pub fn std_normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Phi(hi) - Phi(lo) without cancellation when both points sit in the upper tail.
pub fn std_normal_mass(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        std_normal_cdf(-lo) - std_normal_cdf(-hi)
    } else {
        std_normal_cdf(hi) - std_normal_cdf(lo)
    }
}

/// log(1 + e^x)
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// e^x / (1 + e^x)
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cdf_and_quantile_agree() {
        for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
            assert_relative_eq!(
                std_normal_cdf(std_normal_quantile(p)),
                p,
                max_relative = 1e-9
            );
        }
        assert_relative_eq!(
            std_normal_cdf(1.959_963_984_540_054),
            0.975,
            max_relative = 1e-14
        );
    }

    #[test]
    fn tail_mass_is_accurate() {
        // Phi(-10) - Phi(-11) through the survival branch
        let m = std_normal_mass(10.0, 11.0);
        assert_relative_eq!(
            m,
            7.619_853_024_160_47e-24 - 1.910_659_574_498_663e-28,
            max_relative = 1e-8
        );
    }

    #[test]
    fn softplus_and_logistic_are_stable() {
        assert_eq!(softplus(800.0), 800.0);
        assert!(softplus(-800.0) >= 0.0 && softplus(-800.0) < 1e-300);
        assert_relative_eq!(softplus(0.0), 2f64.ln());
        assert_eq!(logistic(800.0), 1.0);
        assert_eq!(logistic(-800.0), 0.0);
        assert_relative_eq!(logistic(3f64.ln()), 0.75, max_relative = 1e-15);
    }
}
