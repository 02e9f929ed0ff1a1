//! The optimal-scaling table and the TMCMC vs RWM comparison runs.

use crate::diagnostics::{acf, ess, ks_distance};
use crate::error::{Error, Result};
use crate::kernel::{run_chain_into, Algorithm, KernelConfig, Space, TraceSink};
use crate::proposal::ProposalFamily;
use crate::scaling::{optimize_ell_star, scaling_from_parts, ScalingResult};
use crate::target::{ProductTarget, TargetDensity};
use crate::transform::fisher_information;
use rayon::prelude::*;
use std::io::Write;

pub const TRUNCATED_NORMAL: &str = "truncnormal(0,1,-1,1)";
pub const UNIFORM: &str = "uniform(-1,1)";

/// TMCMC scale used in the comparison runs (the Cauchy / truncated normal optimum).
pub const TMCMC_ELL: f64 = 2.934;

/// Hand-tuned RWM scales for d = 10, 50, 100.
pub fn default_rwm_ell(d: usize) -> Option<f64> {
    match d {
        10 => Some(1.6),
        50 => Some(2.06),
        100 => Some(2.26),
        _ => None,
    }
}

pub fn table_targets() -> [(&'static str, TargetDensity); 2] {
    [
        (
            "truncnormal",
            TRUNCATED_NORMAL.parse().expect("valid target"),
        ),
        ("uniform", UNIFORM.parse().expect("valid target")),
    ]
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub target_label: &'static str,
    pub target: TargetDensity,
    pub scaling: ScalingResult,
}

/// Optimal scaling for every proposal in the table against both targets,
/// ordered by proposal then target. l* is computed once per proposal.
pub fn optimal_scaling_table() -> Result<Vec<TableRow>> {
    let targets = table_targets();
    let fishers = targets
        .iter()
        .map(|(_, t)| fisher_information(t, t.logit_map().as_ref()))
        .collect::<Result<Vec<_>>>()?;

    let maxima = ProposalFamily::table_families()
        .par_iter()
        .map(|&p| optimize_ell_star(p).map(|m| (p, m)))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(maxima.len() * targets.len());
    for (p, max) in maxima {
        for ((label, target), fisher) in targets.iter().zip(&fishers) {
            rows.push(TableRow {
                target_label: label,
                target: *target,
                scaling: scaling_from_parts(p, max, *fisher)?,
            });
        }
    }
    Ok(rows)
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "proposal,target,ell_star,fisher,ell_opt,alpha_opt,conjecture_only"
    )?;
    for r in rows {
        let s = &r.scaling;
        writeln!(
            out,
            "{},{},{:?},{:?},{:?},{:?},{}",
            s.proposal,
            r.target_label,
            s.ell_star,
            s.fisher.value,
            s.ell_opt,
            s.alpha_opt,
            s.conjecture_only
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Accumulates acceptance, ESJD and the first-coordinate series without
/// keeping the full trace.
#[derive(Debug, Default)]
struct SummarySink {
    first: Vec<f64>,
    prev: Vec<f64>,
    sq_jumps: f64,
    accepted: u64,
    transitions: u64,
}

impl TraceSink for SummarySink {
    fn start(&mut self, d: usize, n_iter: u64, _seed: u64) -> Result<()> {
        self.first = Vec::with_capacity(n_iter as usize + 1);
        self.prev = vec![0.0; d];
        Ok(())
    }
    fn initial(&mut self, x: &[f64]) -> Result<()> {
        self.first.push(x[0]);
        self.prev.copy_from_slice(x);
        Ok(())
    }
    fn transition(&mut self, x: &[f64], accepted: bool) -> Result<()> {
        self.first.push(x[0]);
        self.transitions += 1;
        if accepted {
            self.accepted += 1;
            self.sq_jumps += x
                .iter()
                .zip(&self.prev)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
            self.prev.copy_from_slice(x);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub algorithm: Algorithm,
    pub space: Space,
    pub ell: f64,
    pub scale: f64,
    pub acceptance: f64,
    pub esjd: f64,
    pub ess: f64,
    pub ks: f64,
    pub acf: Vec<f64>,
}

/// Run one chain and reduce it to its diagnostics (first coordinate for ACF,
/// ESS and KS against the component CDF).
pub fn summarize_chain(
    cfg: &KernelConfig,
    n_iter: u64,
    seed: u64,
    stream: u64,
    max_lag: usize,
) -> Result<ChainSummary> {
    if n_iter == 0 {
        return Err(Error::EmptyTrace);
    }
    let mut sink = SummarySink::default();
    run_chain_into(cfg, n_iter, seed, stream, &mut sink)?;
    let component = cfg.target.component;
    Ok(ChainSummary {
        algorithm: cfg.algorithm,
        space: cfg.space,
        ell: cfg.schedule.ell,
        scale: cfg.scale(),
        acceptance: sink.accepted as f64 / sink.transitions as f64,
        esjd: sink.sq_jumps / sink.transitions as f64,
        ess: ess(&sink.first)?,
        ks: ks_distance(&sink.first, |x| component.cdf(x))?,
        acf: acf(&sink.first, max_lag)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub d: usize,
    pub n_iter: u64,
    pub seed: u64,
    pub tmcmc_ell: f64,
    pub rwm_ell: f64,
    pub max_lag: usize,
    pub proposal: ProposalFamily,
    pub target: TargetDensity,
}

impl CompareConfig {
    /// Cauchy proposals on the truncated normal, with the default scales for `d`.
    pub fn standard(d: usize, n_iter: u64, seed: u64) -> Result<Self> {
        let rwm_ell = default_rwm_ell(d).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "no default RWM scale for d = {d}; pass one explicitly"
            ))
        })?;
        Ok(CompareConfig {
            d,
            n_iter,
            seed,
            tmcmc_ell: TMCMC_ELL,
            rwm_ell,
            max_lag: 50,
            proposal: ProposalFamily::Cauchy,
            target: TRUNCATED_NORMAL.parse()?,
        })
    }

    pub fn kernel(&self, algorithm: Algorithm) -> Result<KernelConfig> {
        let target = ProductTarget::new(self.target, self.d)?;
        let ell = match algorithm {
            Algorithm::Tmcmc => self.tmcmc_ell,
            Algorithm::Rwm => self.rwm_ell,
        };
        KernelConfig::with_defaults(algorithm, self.proposal, target, ell)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub config: CompareConfig,
    pub tmcmc: ChainSummary,
    pub rwm: ChainSummary,
}

/// TMCMC on substream 0 and RWM on substream 1 of the same seed, run concurrently.
pub fn run_compare(cfg: &CompareConfig) -> Result<CompareReport> {
    let tmcmc_cfg = cfg.kernel(Algorithm::Tmcmc)?;
    let rwm_cfg = cfg.kernel(Algorithm::Rwm)?;
    let (tmcmc, rwm) = rayon::join(
        || summarize_chain(&tmcmc_cfg, cfg.n_iter, cfg.seed, 0, cfg.max_lag),
        || summarize_chain(&rwm_cfg, cfg.n_iter, cfg.seed, 1, cfg.max_lag),
    );
    Ok(CompareReport {
        config: cfg.clone(),
        tmcmc: tmcmc?,
        rwm: rwm?,
    })
}

pub fn write_compare_summary_csv<W: Write>(report: &CompareReport, mut out: W) -> Result<()> {
    writeln!(
        out,
        "algorithm,d,iters,seed,ell,scale,space,acceptance,esjd,ess,ks"
    )?;
    let c = &report.config;
    for s in [&report.tmcmc, &report.rwm] {
        writeln!(
            out,
            "{},{},{},{},{:?},{:?},{},{:?},{:?},{:?},{:?}",
            s.algorithm,
            c.d,
            c.n_iter,
            c.seed,
            s.ell,
            s.scale,
            s.space,
            s.acceptance,
            s.esjd,
            s.ess,
            s.ks
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_acf_csv<W: Write>(report: &CompareReport, mut out: W) -> Result<()> {
    writeln!(out, "lag,acf_tmcmc,acf_rwm")?;
    for (lag, (t, r)) in report.tmcmc.acf.iter().zip(&report.rwm.acf).enumerate() {
        writeln!(out, "{lag},{t:?},{r:?}")?;
    }
    out.flush()?;
    Ok(())
}
