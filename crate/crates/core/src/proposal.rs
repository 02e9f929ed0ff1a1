//! Proposal families for the additive increment.
//!
//! `q` is always the full symmetric density of `b * eps*` on the real line, so
//! its mass on the positive half is exactly 1/2. The positive sampler draws
//! `eps*` from that half.

use crate::error::{Error, Result};
use crate::special::std_normal_pdf;
use libm::lgamma as ln_gamma;
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal, StudentT};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProposalFamily {
    Gaussian,
    /// Student t with `nu > 1` degrees of freedom; `nu = 1` is [`ProposalFamily::Cauchy`].
    StudentT {
        nu: f64,
    },
    Cauchy,
    /// eps* ~ Uniform(0, 1), so b * eps* ~ Uniform(-1, 1).
    UniformSym,
}

impl ProposalFamily {
    /// Student t with `nu` degrees of freedom (`nu >= 1`); `nu = 1` yields Cauchy.
    pub fn student_t(nu: f64) -> Result<Self> {
        if !(nu >= 1.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "degrees of freedom must be finite and >= 1, got {nu}"
            )));
        }
        Ok(if nu == 1.0 {
            ProposalFamily::Cauchy
        } else {
            ProposalFamily::StudentT { nu }
        })
    }

    /// The six proposals of the optimal-scaling table, in table order.
    pub fn table_families() -> [ProposalFamily; 6] {
        [
            ProposalFamily::Cauchy,
            ProposalFamily::StudentT { nu: 2.0 },
            ProposalFamily::StudentT { nu: 3.0 },
            ProposalFamily::StudentT { nu: 4.0 },
            ProposalFamily::StudentT { nu: 5.0 },
            ProposalFamily::UniformSym,
        ]
    }

    pub fn density_q(&self, u: f64) -> f64 {
        match *self {
            ProposalFamily::Gaussian => std_normal_pdf(u),
            ProposalFamily::Cauchy => 1.0 / (PI * (1.0 + u * u)),
            ProposalFamily::StudentT { nu } => {
                let log_c = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
                (log_c - 0.5 * (nu + 1.0) * (u * u / nu).ln_1p()).exp()
            }
            ProposalFamily::UniformSym => {
                if u.abs() < 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper end of the positive support of q, when finite.
    pub fn positive_support_end(&self) -> Option<f64> {
        match self {
            ProposalFamily::UniformSym => Some(1.0),
            _ => None,
        }
    }

    pub fn finite_second_moment(&self) -> bool {
        match *self {
            ProposalFamily::Gaussian | ProposalFamily::UniformSym => true,
            ProposalFamily::StudentT { nu } => nu > 2.0,
            ProposalFamily::Cauchy => false,
        }
    }

    /// True when the diffusion limit for this family is conjectured rather than proven.
    pub fn conjecture_only(&self) -> bool {
        matches!(self, ProposalFamily::Cauchy)
    }

    /// Draw eps* > 0 from the positive half of the family.
    pub fn sample_positive<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ProposalFamily::Gaussian => loop {
                let z: f64 = StandardNormal.sample(rng);
                if z != 0.0 {
                    return z.abs();
                }
            },
            ProposalFamily::StudentT { nu } => {
                let t = StudentT::new(nu).expect("nu validated at construction");
                loop {
                    let z: f64 = t.sample(rng);
                    if z != 0.0 {
                        return z.abs();
                    }
                }
            }
            ProposalFamily::Cauchy => {
                let u: f64 = Open01.sample(rng);
                (0.5 * PI * u).tan()
            }
            ProposalFamily::UniformSym => Open01.sample(rng),
        }
    }

    /// Draw from the full symmetric family (the RWM increment).
    pub fn sample_symmetric<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ProposalFamily::Gaussian => StandardNormal.sample(rng),
            ProposalFamily::StudentT { nu } => StudentT::new(nu)
                .expect("nu validated at construction")
                .sample(rng),
            ProposalFamily::Cauchy => {
                let u: f64 = Open01.sample(rng);
                (PI * (u - 0.5)).tan()
            }
            ProposalFamily::UniformSym => {
                let u: f64 = Open01.sample(rng);
                2.0 * u - 1.0
            }
        }
    }

    /// CDF of the positive half-distribution of eps*.
    pub fn positive_cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match *self {
            ProposalFamily::Gaussian => 2.0 * crate::special::std_normal_cdf(u) - 1.0,
            ProposalFamily::Cauchy => 2.0 * u.atan() / PI,
            ProposalFamily::StudentT { nu } => {
                use statrs::distribution::{ContinuousCDF, StudentsT};
                let t = StudentsT::new(0.0, 1.0, nu).expect("nu validated at construction");
                2.0 * t.cdf(u) - 1.0
            }
            ProposalFamily::UniformSym => u.min(1.0),
        }
    }
}

impl fmt::Display for ProposalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ProposalFamily::Gaussian => f.write_str("gaussian"),
            ProposalFamily::Cauchy => f.write_str("cauchy"),
            ProposalFamily::StudentT { nu } if nu.fract() == 0.0 => write!(f, "t{nu}"),
            ProposalFamily::StudentT { nu } => write!(f, "t({nu})"),
            ProposalFamily::UniformSym => f.write_str("uniform01"),
        }
    }
}

/// Parses `gaussian`, `cauchy`, `uniform01`, `t1`..`t5` (or any `t<nu>`,
/// `t(<nu>)` with nu >= 1); `t1` is the Cauchy family.
impl FromStr for ProposalFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = s.trim().to_ascii_lowercase();
        match name.as_str() {
            "gaussian" | "normal" => Ok(ProposalFamily::Gaussian),
            "cauchy" => Ok(ProposalFamily::Cauchy),
            "uniform01" | "uniform" => Ok(ProposalFamily::UniformSym),
            _ => {
                let nu = name
                    .strip_prefix('t')
                    .map(|rest| rest.trim_start_matches('(').trim_end_matches(')'))
                    .ok_or_else(|| Error::parse(s, "unknown proposal family"))?
                    .parse::<f64>()
                    .map_err(|_| Error::parse(s, "unknown proposal family"))?;
                ProposalFamily::student_t(nu)
            }
        }
    }
}
