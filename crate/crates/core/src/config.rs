//! Run configuration shared by the CLI subcommands.
//!
//! A config file is flat `key = value` text whose keys mirror the long CLI
//! flags (`rwm-ell` and `rwm_ell` are both accepted). Blank lines and lines
//! starting with `#` are ignored. Values given on the command line override
//! the file.

use crate::error::{Error, Result};
use crate::kernel::{Algorithm, ScheduleKind, Space};
use crate::proposal::ProposalFamily;
use crate::target::TargetDensity;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub algorithm: Option<Algorithm>,
    pub proposal: Option<ProposalFamily>,
    pub target: Option<TargetDensity>,
    pub d: Option<usize>,
    pub iters: Option<u64>,
    pub seed: Option<u64>,
    pub ell: Option<f64>,
    pub tmcmc_ell: Option<f64>,
    pub rwm_ell: Option<f64>,
    pub schedule: Option<ScheduleKind>,
    pub space: Option<Space>,
    pub max_lag: Option<usize>,
    pub out: Option<PathBuf>,
    pub out_prefix: Option<String>,
    pub csv: Option<PathBuf>,
}

fn parse_value<T>(key: &str, value: &str) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::parse(value, format!("invalid value for {key}: {e}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(raw, format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim().trim_matches('"');
            match key.as_str() {
                "algorithm" => cfg.algorithm = Some(parse_value(&key, value)?),
                "proposal" => cfg.proposal = Some(parse_value(&key, value)?),
                "target" => cfg.target = Some(parse_value(&key, value)?),
                "d" => cfg.d = Some(parse_value(&key, value)?),
                "iters" => cfg.iters = Some(parse_value(&key, value)?),
                "seed" => cfg.seed = Some(parse_value(&key, value)?),
                "ell" => cfg.ell = Some(parse_value(&key, value)?),
                "tmcmc-ell" => cfg.tmcmc_ell = Some(parse_value(&key, value)?),
                "rwm-ell" => cfg.rwm_ell = Some(parse_value(&key, value)?),
                "schedule" => cfg.schedule = Some(parse_value(&key, value)?),
                "space" => cfg.space = Some(parse_value(&key, value)?),
                "max-lag" => cfg.max_lag = Some(parse_value(&key, value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "out-prefix" => cfg.out_prefix = Some(value.to_string()),
                "csv" => cfg.csv = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::parse(
                        raw,
                        format!("line {}: unknown key {other:?}", lineno + 1),
                    ))
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `over` win; the rest come from `self`.
    pub fn overridden_by(self, over: RunConfig) -> RunConfig {
        RunConfig {
            algorithm: over.algorithm.or(self.algorithm),
            proposal: over.proposal.or(self.proposal),
            target: over.target.or(self.target),
            d: over.d.or(self.d),
            iters: over.iters.or(self.iters),
            seed: over.seed.or(self.seed),
            ell: over.ell.or(self.ell),
            tmcmc_ell: over.tmcmc_ell.or(self.tmcmc_ell),
            rwm_ell: over.rwm_ell.or(self.rwm_ell),
            schedule: over.schedule.or(self.schedule),
            space: over.space.or(self.space),
            max_lag: over.max_lag.or(self.max_lag),
            out: over.out.or(self.out),
            out_prefix: over.out_prefix.or(self.out_prefix),
            csv: over.csv.or(self.csv),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_key_values() {
        let text = r#"
            # comparison at d = 50
            d = 50
            iters=200000
            rwm_ell = 2.06
            target = "truncnormal(0,1,-1,1)"
            proposal = cauchy
            space = transformed
        "#;
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.d, Some(50));
        assert_eq!(cfg.iters, Some(200_000));
        assert_eq!(cfg.rwm_ell, Some(2.06));
        assert_eq!(cfg.proposal, Some(ProposalFamily::Cauchy));
        assert_eq!(cfg.space, Some(Space::Transformed));
        assert!(cfg.target.unwrap().support().is_bounded());
        assert_eq!(cfg.seed, None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(RunConfig::parse("d 10").is_err());
        assert!(RunConfig::parse("colour = blue").is_err());
        assert!(RunConfig::parse("d = ten").is_err());
        assert!(RunConfig::parse("proposal = laplace").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig::parse("d = 10\nseed = 1\niters = 5").unwrap();
        let flags = RunConfig {
            seed: Some(99),
            ..Default::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.d, Some(10));
        assert_eq!(merged.seed, Some(99));
        assert_eq!(merged.iters, Some(5));
    }
}
