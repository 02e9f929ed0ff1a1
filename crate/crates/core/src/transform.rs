//! The logit bijection between (a, b) and the real line, the density it
//! induces, and Fisher information in either coordinate system.

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::special::{logistic, softplus};
use crate::target::{Support, TargetDensity};

/// y = log((x - a) / (b - x)) and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitMap {
    a: f64,
    b: f64,
}

impl LogitMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Support::interval(a, b)?;
        Ok(LogitMap { a, b })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn forward(&self, x: f64) -> Result<f64> {
        if !(self.a < x && x < self.b) {
            return Err(Error::OutsideSupport {
                x,
                a: self.a,
                b: self.b,
            });
        }
        let (c, h) = self.center_half_width();
        let z = (x - c) / h;
        // Centered form near the midpoint, plain log-ratio near the ends.
        if z.abs() < 0.5 {
            Ok(2.0 * z.atanh())
        } else {
            Ok(((x - self.a) / (self.b - x)).ln())
        }
    }

    fn center_half_width(&self) -> (f64, f64) {
        (0.5 * (self.a + self.b), 0.5 * (self.b - self.a))
    }

    /// (a + b e^y) / (1 + e^y), saturating strictly inside (a, b) for large |y|.
    #[inline]
    pub fn inverse(&self, y: f64) -> f64 {
        let w = self.b - self.a;
        let x = if y.abs() < 3f64.ln() {
            let (c, h) = self.center_half_width();
            c + h * (0.5 * y).tanh()
        } else if y >= 0.0 {
            self.b - w * logistic(-y)
        } else {
            self.a + w * logistic(y)
        };
        x.clamp(self.a.next_up(), self.b.next_down())
    }

    /// log |dx/dy| = log(b - a) + y - 2 log(1 + e^y).
    #[inline]
    pub fn log_jacobian(&self, y: f64) -> f64 {
        (self.b - self.a).ln() - softplus(y) - softplus(-y)
    }

    /// log f_Y(y) for a target supported on this map's interval.
    #[inline]
    pub fn transformed_log_density(&self, target: &TargetDensity, y: f64) -> f64 {
        self.log_jacobian(y) + target.log_f(self.inverse(y))
    }

    /// d/dy log f_Y(y) = 1 - 2p + (log f_X)'(x) (b - a) p (1 - p), p = logistic(y).
    #[inline]
    pub fn transformed_score(&self, target: &TargetDensity, y: f64) -> f64 {
        let p = logistic(y);
        let q = logistic(-y);
        1.0 - 2.0 * p + target.dlog_f(self.inverse(y)) * (self.b - self.a) * p * q
    }

    /// Checks that `target` lives on exactly this map's interval.
    pub fn check_target(&self, target: &TargetDensity) -> Result<()> {
        match target.support() {
            Support::Interval { a, b } if a == self.a && b == self.b => Ok(()),
            Support::Interval { a, b } => Err(Error::SupportMismatch {
                map_a: self.a,
                map_b: self.b,
                a,
                b,
            }),
            Support::Unbounded => Err(Error::UnexpectedTransform),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoSpace {
    Original,
    Transformed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInfo {
    pub value: f64,
    pub space: InfoSpace,
}

/// Expected squared score of the target.
///
/// Bounded targets require `map` and yield I_Y, the information of the
/// logit-transformed density. Substituting p = e^y / (1 + e^y) gives
///
/// ```text
/// I_Y = (b - a) * int_0^1 [1 - 2p + s(x) (b - a) p (1 - p)]^2 f_X(x) dp,  x = a + (b - a) p
/// ```
///
/// with s = (log f_X)', a finite-interval integral. Unbounded targets take
/// no map and yield I_X = E[s(X)^2] over the real line.
pub fn fisher_information(target: &TargetDensity, map: Option<&LogitMap>) -> Result<FisherInfo> {
    let quad = Quadrature::with_tolerance(1e-11, 1e-13);
    let (value, space) = match (target.support(), map) {
        (Support::Interval { .. }, None) => return Err(Error::MissingTransform),
        (Support::Unbounded, Some(_)) => return Err(Error::UnexpectedTransform),
        (Support::Interval { .. }, Some(m)) => {
            m.check_target(target)?;
            let (a, b) = m.bounds();
            let w = b - a;
            let integrand = |p: f64| {
                let x = a + w * p;
                let score = 1.0 - 2.0 * p + target.dlog_f(x) * w * p * (1.0 - p);
                score * score * target.log_f(x).exp()
            };
            (
                w * quad.integrate(integrand, 0.0, 1.0)?.value,
                InfoSpace::Transformed,
            )
        }
        (Support::Unbounded, None) => {
            let integrand = |x: f64| {
                let lf = target.log_f(x);
                if lf == f64::NEG_INFINITY {
                    return 0.0;
                }
                let s = target.dlog_f(x);
                s * s * lf.exp()
            };
            (
                quad.integrate_real_line(integrand)?.value,
                InfoSpace::Original,
            )
        }
    };
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Fisher information {value} is not positive and finite"
        )));
    }
    Ok(FisherInfo { value, space })
}
