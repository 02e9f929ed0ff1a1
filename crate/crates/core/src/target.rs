//! One-dimensional component densities and iid product targets.
//!
//! Log-densities return `-inf` at and beyond interval endpoints: the open
//! interval is the support and its closure's boundary counts as outside.

use crate::error::{Error, Result};
use crate::special::{std_normal_cdf, std_normal_mass, std_normal_quantile, LN_SQRT_2PI};
use crate::transform::LogitMap;
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Unbounded,
    Interval { a: f64, b: f64 },
}

impl Support {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Support::Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    /// Strict interior membership.
    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Support::Unbounded => x.is_finite(),
            Support::Interval { a, b } => a < x && x < b,
        }
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            Support::Unbounded => None,
            Support::Interval { a, b } => Some((a, b)),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Support::Interval { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    TruncatedNormal {
        mu: f64,
        sigma: f64,
        // log of sigma * (Phi(beta) - Phi(alpha)) + log sqrt(2 pi)
        log_norm: f64,
    },
    Uniform,
    Normal {
        mu: f64,
        sigma: f64,
    },
}

/// A component density `f_X` together with its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetDensity {
    kind: Kind,
    support: Support,
}

fn check_scale(mu: f64, sigma: f64) -> Result<()> {
    if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "normal location {mu} / scale {sigma} must be finite with scale > 0"
        )));
    }
    Ok(())
}

impl TargetDensity {
    /// N(mu, sigma^2) restricted to (a, b).
    pub fn truncated_normal(mu: f64, sigma: f64, a: f64, b: f64) -> Result<Self> {
        check_scale(mu, sigma)?;
        let support = Support::interval(a, b)?;
        let mass = std_normal_mass((a - mu) / sigma, (b - mu) / sigma);
        if mass.is_nan() || mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "interval ({a}, {b}) carries no normal mass"
            )));
        }
        Ok(TargetDensity {
            kind: Kind::TruncatedNormal {
                mu,
                sigma,
                log_norm: sigma.ln() + mass.ln() + LN_SQRT_2PI,
            },
            support,
        })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Ok(TargetDensity {
            kind: Kind::Uniform,
            support: Support::interval(a, b)?,
        })
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        check_scale(mu, sigma)?;
        Ok(TargetDensity {
            kind: Kind::Normal { mu, sigma },
            support: Support::Unbounded,
        })
    }

    pub fn standard_normal() -> Self {
        TargetDensity {
            kind: Kind::Normal {
                mu: 0.0,
                sigma: 1.0,
            },
            support: Support::Unbounded,
        }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// The logit map onto the real line, for bounded targets.
    pub fn logit_map(&self) -> Option<LogitMap> {
        self.support
            .bounds()
            .map(|(a, b)| LogitMap::new(a, b).expect("support interval is valid"))
    }

    /// log f_X(x); `-inf` outside the open support.
    #[inline]
    pub fn log_f(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            Kind::TruncatedNormal {
                mu,
                sigma,
                log_norm,
            } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - log_norm
            }
            Kind::Uniform => {
                let (a, b) = self.support.bounds().unwrap();
                -(b - a).ln()
            }
            Kind::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - sigma.ln() - LN_SQRT_2PI
            }
        }
    }

    /// (log f_X)'(x), without a support check.
    #[inline]
    pub fn dlog_f(&self, x: f64) -> f64 {
        match self.kind {
            Kind::TruncatedNormal { mu, sigma, .. } | Kind::Normal { mu, sigma } => {
                -(x - mu) / (sigma * sigma)
            }
            Kind::Uniform => 0.0,
        }
    }

    /// (log f_X)'(x), rejecting points on or beyond the boundary.
    pub fn grad_log(&self, x: f64) -> Result<f64> {
        if !self.support.contains(x) {
            let (a, b) = self
                .support
                .bounds()
                .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            return Err(Error::OutsideSupport { x, a, b });
        }
        Ok(self.dlog_f(x))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match (self.kind, self.support) {
            (Kind::Normal { mu, sigma }, _) => std_normal_cdf((x - mu) / sigma),
            (_, Support::Interval { a, .. }) if x <= a => 0.0,
            (_, Support::Interval { b, .. }) if x >= b => 1.0,
            (Kind::Uniform, Support::Interval { a, b }) => (x - a) / (b - a),
            (Kind::TruncatedNormal { mu, sigma, .. }, Support::Interval { a, b }) => {
                let lo = (a - mu) / sigma;
                let hi = (b - mu) / sigma;
                std_normal_mass(lo, (x - mu) / sigma) / std_normal_mass(lo, hi)
            }
            _ => unreachable!("bounded kinds always carry an interval"),
        }
    }

    /// One draw from f_X. Truncated normals use the inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match (self.kind, self.support) {
            (Kind::Normal { mu, sigma }, _) => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            (Kind::Uniform, Support::Interval { a, b }) => {
                let u: f64 = Open01.sample(rng);
                a + (b - a) * u
            }
            (Kind::TruncatedNormal { mu, sigma, .. }, Support::Interval { a, b }) => {
                let u: f64 = Open01.sample(rng);
                let lo = (a - mu) / sigma;
                let hi = (b - mu) / sigma;
                // Work in whichever tail keeps Phi away from 1.
                let z = if lo > 0.0 {
                    let (slo, shi) = (std_normal_cdf(-lo), std_normal_cdf(-hi));
                    -std_normal_quantile(slo - u * (slo - shi))
                } else {
                    let (clo, chi) = (std_normal_cdf(lo), std_normal_cdf(hi));
                    std_normal_quantile(clo + u * (chi - clo))
                };
                // Rounding can land on an endpoint; pull it back inside.
                (mu + sigma * z).clamp(a.next_up(), b.next_down())
            }
            _ => unreachable!("bounded kinds always carry an interval"),
        }
    }
}

impl fmt::Display for TargetDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.support) {
            (Kind::TruncatedNormal { mu, sigma, .. }, Support::Interval { a, b }) => {
                write!(f, "truncnormal({mu},{sigma},{a},{b})")
            }
            (Kind::Uniform, Support::Interval { a, b }) => write!(f, "uniform({a},{b})"),
            (Kind::Normal { mu, sigma }, _) => write!(f, "normal({mu},{sigma})"),
            _ => unreachable!(),
        }
    }
}

/// Parses `truncnormal(mu,sigma,a,b)`, `uniform(a,b)` or `normal(mu,sigma)`,
/// case-insensitively.
impl FromStr for TargetDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = s.trim().to_ascii_lowercase();
        let open = spec
            .find('(')
            .ok_or_else(|| Error::parse(s, "expected name(args)"))?;
        if !spec.ends_with(')') {
            return Err(Error::parse(s, "missing closing parenthesis"));
        }
        let name = spec[..open].trim();
        let args = spec[open + 1..spec.len() - 1]
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(s, format!("bad number {a:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;

        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::parse(
                    s,
                    format!("{name} takes {n} arguments, got {}", args.len()),
                ))
            }
        };
        match name {
            "truncnormal" => {
                arity(4)?;
                TargetDensity::truncated_normal(args[0], args[1], args[2], args[3])
            }
            "uniform" => {
                arity(2)?;
                TargetDensity::uniform(args[0], args[1])
            }
            "normal" => {
                arity(2)?;
                TargetDensity::normal(args[0], args[1])
            }
            other => Err(Error::parse(s, format!("unknown target {other:?}"))),
        }
    }
}

/// The iid product of `d` copies of a component density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTarget {
    pub component: TargetDensity,
    d: usize,
}

impl ProductTarget {
    pub fn new(component: TargetDensity, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
        }
        Ok(ProductTarget { component, d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Sum of component log-densities; `-inf` as soon as one coordinate leaves the support.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: x.len(),
            });
        }
        Ok(self.log_density_unchecked(x))
    }

    #[inline]
    pub(crate) fn log_density_unchecked(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for &xi in x {
            let l = self.component.log_f(xi);
            if l == f64::NEG_INFINITY {
                return l;
            }
            total += l;
        }
        total
    }

    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.d).map(|_| self.component.sample(rng)).collect()
    }
}
