//! Diffusion speed, acceptance curves and optimal scaling.
//!
//! With `q` the symmetric increment density and `I` the Fisher information,
//!
//! ```text
//! g(l; I) = 4 l^2 int_0^inf u^2 Phi(-u l sqrt(I) / 2) q(u) du
//! a(l; I) = 4     int_0^inf     Phi(-u l sqrt(I) / 2) q(u) du
//! ```
//!
//! and `g*(l) = g(l; 1)`. Since `g(l; I) = g*(l sqrt(I)) / I`, the optimal
//! scale is `l* / sqrt(I)` and the optimal acceptance rate `a(l*; 1)` does not
//! depend on the target.

use crate::error::{Error, Result};
use crate::proposal::ProposalFamily;
use crate::quadrature::Quadrature;
use crate::special::std_normal_cdf;
use crate::target::TargetDensity;
use crate::transform::{fisher_information, FisherInfo, LogitMap};

/// Largest scale searched for an interior maximum of g*.
pub const ELL_MAX: f64 = 100.0;
const GOLDEN_WIDTH: f64 = 1e-6;
const UNIMODAL_GRID: usize = 50;

fn quad() -> Quadrature {
    Quadrature::with_tolerance(1e-12, 1e-13)
}

/// int_0^inf h(u) q(u) du, compactified when q has unbounded support.
fn positive_half_integral<H: Fn(f64) -> f64>(p: ProposalFamily, h: H) -> Result<f64> {
    let integrand = |u: f64| {
        let q = p.density_q(u);
        if q == 0.0 {
            0.0
        } else {
            h(u) * q
        }
    };
    let est = match p.positive_support_end() {
        Some(end) => quad().integrate(integrand, 0.0, end)?,
        None => quad().integrate_upper(integrand, 0.0)?,
    };
    Ok(est.value)
}

fn check_ell(ell: f64) -> Result<()> {
    if ell >= 0.0 && ell.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "scale l must be finite and >= 0, got {ell}"
        )))
    }
}

fn check_fisher(fisher: f64) -> Result<()> {
    if fisher > 0.0 && fisher.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Fisher information must be finite and > 0, got {fisher}"
        )))
    }
}

/// Proposal-only diffusion speed g*(l).
pub fn g_star(ell: f64, p: ProposalFamily) -> Result<f64> {
    check_ell(ell)?;
    if ell == 0.0 {
        return Ok(0.0);
    }
    let half = 0.5 * ell;
    let integral = positive_half_integral(p, |u| u * u * std_normal_cdf(-u * half))?;
    Ok(4.0 * ell * ell * integral)
}

/// Diffusion speed g(l) for a target with Fisher information `fisher`,
/// evaluated directly rather than through g*.
pub fn diffusion_speed(ell: f64, p: ProposalFamily, fisher: f64) -> Result<f64> {
    check_ell(ell)?;
    check_fisher(fisher)?;
    if ell == 0.0 {
        return Ok(0.0);
    }
    let half = 0.5 * ell * fisher.sqrt();
    let integral = positive_half_integral(p, |u| u * u * std_normal_cdf(-u * half))?;
    Ok(4.0 * ell * ell * integral)
}

/// Limiting acceptance rate at scale `ell`.
pub fn acceptance_curve(ell: f64, p: ProposalFamily, fisher: f64) -> Result<f64> {
    check_ell(ell)?;
    check_fisher(fisher)?;
    let half = 0.5 * ell * fisher.sqrt();
    let integral = positive_half_integral(p, |u| std_normal_cdf(-u * half))?;
    Ok(4.0 * integral)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximizer {
    pub ell_star: f64,
    pub g_max: f64,
    /// g* strictly increases on a grid below `ell_star` and strictly decreases above it.
    pub unimodal: bool,
}

fn golden_section_max<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > GOLDEN_WIDTH {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximizer l* of g*: doubling from 0.1 brackets the peak, golden-section
/// search narrows it to width 1e-6, and a grid check on either side records
/// whether g* is unimodal there.
pub fn optimize_ell_star(p: ProposalFamily) -> Result<Maximizer> {
    let g = |ell: f64| g_star(ell, p);

    let mut prev = 0.1;
    let mut g_prev = g(prev)?;
    let (lo, hi) = loop {
        let next = 2.0 * prev;
        if next > ELL_MAX {
            return Err(Error::NoInteriorMaximum { limit: ELL_MAX });
        }
        let g_next = g(next)?;
        if g_next < g_prev {
            break (0.5 * prev, next);
        }
        prev = next;
        g_prev = g_next;
    };

    let ell_star = golden_section_max(g, lo, hi)?;
    let g_max = g(ell_star)?;

    let mut unimodal = true;
    let mut last = 0.0;
    for k in 1..=UNIMODAL_GRID {
        let v = g(ell_star * k as f64 / (UNIMODAL_GRID + 1) as f64)?;
        unimodal &= v > last;
        last = v;
    }
    unimodal &= g_max > last;
    last = g_max;
    for k in 1..=UNIMODAL_GRID {
        let v = g(ell_star * (1.0 + k as f64 / UNIMODAL_GRID as f64))?;
        unimodal &= v < last;
        last = v;
    }

    Ok(Maximizer {
        ell_star,
        g_max,
        unimodal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingResult {
    pub proposal: ProposalFamily,
    pub ell_star: f64,
    pub fisher: FisherInfo,
    pub ell_opt: f64,
    pub alpha_opt: f64,
    pub g_at_opt: f64,
    pub conjecture_only: bool,
    pub unimodal: bool,
}

/// Optimal scale and acceptance rate for `p` on `target`. Bounded targets
/// need `map`; I_Y is then used in place of I_X.
pub fn optimal_scaling(
    p: ProposalFamily,
    target: &TargetDensity,
    map: Option<&LogitMap>,
) -> Result<ScalingResult> {
    let fisher = fisher_information(target, map)?;
    let max = optimize_ell_star(p)?;
    scaling_from_parts(p, max, fisher)
}

/// Assemble a result from a precomputed maximizer, for callers that share l*
/// across targets.
pub fn scaling_from_parts(
    p: ProposalFamily,
    max: Maximizer,
    fisher: FisherInfo,
) -> Result<ScalingResult> {
    let alpha_opt = acceptance_curve(max.ell_star, p, 1.0)?;
    Ok(ScalingResult {
        proposal: p,
        ell_star: max.ell_star,
        fisher,
        ell_opt: max.ell_star / fisher.value.sqrt(),
        alpha_opt,
        g_at_opt: max.g_max / fisher.value,
        conjecture_only: p.conjecture_only(),
        unimodal: max.unimodal,
    })
}
