//! Additive TMCMC and random walk Metropolis transitions.
//!
//! A TMCMC step draws a single `eps* > 0` and `d` fair signs and moves every
//! coordinate by `+- scale * eps*`. An RWM step draws `d` independent symmetric
//! increments. Both accept with `min(1, pi(x') / pi(x))`, computed in log space.
//!
//! A chain walks either on the original coordinates (proposals leaving the
//! support are rejected) or, for bounded targets, on the logit scale where the
//! target is the transformed density. Traces always record original-space
//! states.

use crate::error::{Error, Result};
use crate::proposal::ProposalFamily;
use crate::target::ProductTarget;
use crate::transform::LogitMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Open01};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Tmcmc,
    Rwm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// l / sqrt(d)
    TmcmcSqrt,
    /// l / (d ln d)
    RwmDLogD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Original,
    Transformed,
}

impl Algorithm {
    pub fn default_schedule(self) -> ScheduleKind {
        match self {
            Algorithm::Tmcmc => ScheduleKind::TmcmcSqrt,
            Algorithm::Rwm => ScheduleKind::RwmDLogD,
        }
    }

    /// TMCMC on a bounded target walks on the logit scale; everything else
    /// walks on the original coordinates.
    pub fn default_space(self, target: &ProductTarget) -> Space {
        match self {
            Algorithm::Tmcmc if target.component.support().is_bounded() => Space::Transformed,
            _ => Space::Original,
        }
    }
}

macro_rules! keyword_enum {
    ($ty:ty, $what:literal, { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($name => Ok($variant),)+
                    _ => Err(Error::parse(s, concat!("unknown ", $what))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

keyword_enum!(Algorithm, "algorithm", { "tmcmc" => Algorithm::Tmcmc, "rwm" => Algorithm::Rwm });
keyword_enum!(ScheduleKind, "schedule", {
    "tmcmc_sqrt" => ScheduleKind::TmcmcSqrt,
    "rwm_dlogd" => ScheduleKind::RwmDLogD,
});
keyword_enum!(Space, "space", { "original" => Space::Original, "transformed" => Space::Transformed });

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSchedule {
    pub kind: ScheduleKind,
    pub ell: f64,
    pub d: usize,
}

impl ScaleSchedule {
    pub fn new(kind: ScheduleKind, ell: f64, d: usize) -> Self {
        ScaleSchedule { kind, ell, d }
    }

    /// The per-step proposal scale.
    pub fn resolve(&self) -> Result<f64> {
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale l must be finite and > 0, got {}",
                self.ell
            )));
        }
        if self.d == 0 {
            return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
        }
        let d = self.d as f64;
        match self.kind {
            ScheduleKind::TmcmcSqrt => Ok(self.ell / d.sqrt()),
            ScheduleKind::RwmDLogD if self.d < 2 => Err(Error::DegenerateSchedule { d: self.d }),
            ScheduleKind::RwmDLogD => Ok(self.ell / (d * d.ln())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub algorithm: Algorithm,
    pub proposal: ProposalFamily,
    pub target: ProductTarget,
    pub schedule: ScaleSchedule,
    pub space: Space,
}

impl KernelConfig {
    pub fn new(
        algorithm: Algorithm,
        proposal: ProposalFamily,
        target: ProductTarget,
        schedule: ScaleSchedule,
        space: Space,
    ) -> Result<Self> {
        if schedule.d != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                found: schedule.d,
            });
        }
        schedule.resolve()?;
        if space == Space::Transformed && !target.component.support().is_bounded() {
            return Err(Error::TransformedSpaceUnbounded);
        }
        Ok(KernelConfig {
            algorithm,
            proposal,
            target,
            schedule,
            space,
        })
    }

    /// `algorithm`'s default schedule and space.
    pub fn with_defaults(
        algorithm: Algorithm,
        proposal: ProposalFamily,
        target: ProductTarget,
        ell: f64,
    ) -> Result<Self> {
        let schedule = ScaleSchedule::new(algorithm.default_schedule(), ell, target.dim());
        let space = algorithm.default_space(&target);
        KernelConfig::new(algorithm, proposal, target, schedule, space)
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn scale(&self) -> f64 {
        self.schedule.resolve().expect("validated at construction")
    }

    /// One-line summary used in trace metadata.
    pub fn describe(&self) -> String {
        format!(
            "algorithm={} proposal={} target={} d={} schedule={} ell={} scale={} space={}",
            self.algorithm,
            self.proposal,
            self.target.component,
            self.dim(),
            self.schedule.kind,
            self.schedule.ell,
            self.scale(),
            self.space
        )
    }
}

/// Source of the random quantities a transition consumes.
///
/// Every [`Rng`] is a `StepNoise`; tests substitute scripted or counting
/// implementations.
pub trait StepNoise {
    /// eps* > 0 from the positive half of `p`.
    fn positive_increment(&mut self, p: &ProposalFamily) -> f64;
    /// A fair sign; `true` means +1.
    fn sign(&mut self) -> bool;
    /// A draw from the full symmetric family `p`.
    fn symmetric_increment(&mut self, p: &ProposalFamily) -> f64;
    /// A uniform draw on (0, 1) for the accept/reject decision.
    fn uniform(&mut self) -> f64;
}

impl<R: Rng + ?Sized> StepNoise for R {
    fn positive_increment(&mut self, p: &ProposalFamily) -> f64 {
        p.sample_positive(self)
    }
    fn sign(&mut self) -> bool {
        self.random()
    }
    fn symmetric_increment(&mut self, p: &ProposalFamily) -> f64 {
        p.sample_symmetric(self)
    }
    fn uniform(&mut self) -> f64 {
        Open01.sample(self)
    }
}

/// RNG for chain `stream` under `seed`. Distinct streams are independent
/// ChaCha keystreams under the same key.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A configured transition, resolved once for repeated use.
#[derive(Debug, Clone)]
pub struct Kernel {
    cfg: KernelConfig,
    scale: f64,
    map: Option<LogitMap>,
}

impl Kernel {
    pub fn new(cfg: KernelConfig) -> Result<Self> {
        let scale = cfg.schedule.resolve()?;
        let map = match cfg.space {
            Space::Original => None,
            Space::Transformed => Some(
                cfg.target
                    .component
                    .logit_map()
                    .ok_or(Error::TransformedSpaceUnbounded)?,
            ),
        };
        Ok(Kernel { cfg, scale, map })
    }

    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Log target density at a working-space point.
    #[inline]
    pub fn log_target(&self, w: &[f64]) -> f64 {
        match &self.map {
            None => self.cfg.target.log_density_unchecked(w),
            Some(m) => {
                let t = &self.cfg.target.component;
                w.iter().map(|&y| m.transformed_log_density(t, y)).sum()
            }
        }
    }

    /// log pi(to) - log pi(from). Proposals are symmetric, so no Hastings term.
    pub fn log_acceptance_ratio(&self, from: &[f64], to: &[f64]) -> f64 {
        let lt = self.log_target(to);
        let lf = self.log_target(from);
        if lt == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lt - lf
    }

    pub fn to_working(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.map {
            None => Ok(x.to_vec()),
            Some(m) => x.iter().map(|&xi| m.forward(xi)).collect(),
        }
    }

    pub fn to_original_into(&self, w: &[f64], out: &mut [f64]) {
        match &self.map {
            None => out.copy_from_slice(w),
            Some(m) => {
                for (o, &y) in out.iter_mut().zip(w) {
                    *o = m.inverse(y);
                }
            }
        }
    }

    /// Write a TMCMC proposal from `current` into `out`.
    pub fn propose_tmcmc<N: StepNoise + ?Sized>(
        &self,
        current: &[f64],
        out: &mut [f64],
        noise: &mut N,
    ) {
        let step = self.scale * noise.positive_increment(&self.cfg.proposal);
        for (o, &c) in out.iter_mut().zip(current) {
            *o = if noise.sign() { c + step } else { c - step };
        }
    }

    /// Write an RWM proposal from `current` into `out`.
    pub fn propose_rwm<N: StepNoise + ?Sized>(
        &self,
        current: &[f64],
        out: &mut [f64],
        noise: &mut N,
    ) {
        for (o, &c) in out.iter_mut().zip(current) {
            *o = c + self.scale * noise.symmetric_increment(&self.cfg.proposal);
        }
    }

    /// Metropolis decision for a proposal with log density `proposed_lp`.
    #[inline]
    fn accept<N: StepNoise + ?Sized>(current_lp: f64, proposed_lp: f64, noise: &mut N) -> bool {
        if proposed_lp == f64::NEG_INFINITY {
            return false;
        }
        let delta = proposed_lp - current_lp;
        delta >= 0.0 || noise.uniform().ln() < delta
    }

    /// Advance `state` (working space) in place. `lp` caches its log density
    /// and `scratch` must have length d.
    pub fn advance<N: StepNoise + ?Sized>(
        &self,
        state: &mut Vec<f64>,
        lp: &mut f64,
        scratch: &mut Vec<f64>,
        noise: &mut N,
    ) -> bool {
        match self.cfg.algorithm {
            Algorithm::Tmcmc => self.propose_tmcmc(state, scratch, noise),
            Algorithm::Rwm => self.propose_rwm(state, scratch, noise),
        }
        let proposed_lp = self.log_target(scratch);
        if Self::accept(*lp, proposed_lp, noise) {
            std::mem::swap(state, scratch);
            *lp = proposed_lp;
            true
        } else {
            false
        }
    }
}

fn single_step<N: StepNoise + ?Sized>(
    x: &[f64],
    cfg: &KernelConfig,
    noise: &mut N,
    algorithm: Algorithm,
) -> Result<(Vec<f64>, bool)> {
    if x.len() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: x.len(),
        });
    }
    let kernel = Kernel::new(KernelConfig { algorithm, ..*cfg })?;
    let mut state = x.to_vec();
    let mut lp = kernel.log_target(x);
    let mut scratch = vec![0.0; x.len()];
    let accepted = kernel.advance(&mut state, &mut lp, &mut scratch, noise);
    Ok((state, accepted))
}

/// One additive TMCMC transition from the working-space point `x`.
pub fn tmcmc_step<N: StepNoise + ?Sized>(
    x: &[f64],
    cfg: &KernelConfig,
    noise: &mut N,
) -> Result<(Vec<f64>, bool)> {
    single_step(x, cfg, noise, Algorithm::Tmcmc)
}

/// One RWM transition from the working-space point `x`.
pub fn rwm_step<N: StepNoise + ?Sized>(
    x: &[f64],
    cfg: &KernelConfig,
    noise: &mut N,
) -> Result<(Vec<f64>, bool)> {
    single_step(x, cfg, noise, Algorithm::Rwm)
}

/// Receives a chain as it is produced.
pub trait TraceSink {
    fn start(&mut self, d: usize, n_iter: u64, seed: u64) -> Result<()>;
    fn initial(&mut self, x: &[f64]) -> Result<()>;
    fn transition(&mut self, x: &[f64], accepted: bool) -> Result<()>;
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

impl<A: TraceSink, B: TraceSink> TraceSink for (A, B) {
    fn start(&mut self, d: usize, n_iter: u64, seed: u64) -> Result<()> {
        self.0.start(d, n_iter, seed)?;
        self.1.start(d, n_iter, seed)
    }
    fn initial(&mut self, x: &[f64]) -> Result<()> {
        self.0.initial(x)?;
        self.1.initial(x)
    }
    fn transition(&mut self, x: &[f64], accepted: bool) -> Result<()> {
        self.0.transition(x, accepted)?;
        self.1.transition(x, accepted)
    }
    fn finish(&mut self) -> Result<()> {
        self.0.finish()?;
        self.1.finish()
    }
}

/// An in-memory chain: `n + 1` original-space states and `n` accept flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    d: usize,
    states: Vec<f64>,
    pub accepted: Vec<bool>,
    pub seed: u64,
    pub config: String,
}

impl ChainTrace {
    pub fn new(d: usize, seed: u64, config: impl Into<String>) -> Self {
        ChainTrace {
            d,
            states: Vec::new(),
            accepted: Vec::new(),
            seed,
            config: config.into(),
        }
    }

    /// Build from flat row-major states; validates the length relations.
    pub fn from_parts(d: usize, states: Vec<f64>, accepted: Vec<bool>, seed: u64) -> Result<Self> {
        if d == 0 || states.len() != d * (accepted.len() + 1) {
            return Err(Error::TraceFormat(format!(
                "{} state values do not form {} records of dimension {d}",
                states.len(),
                accepted.len() + 1
            )));
        }
        Ok(ChainTrace {
            d,
            states,
            accepted,
            seed,
            config: String::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_states(&self) -> usize {
        self.states.len().checked_div(self.d).unwrap_or(0)
    }

    pub fn n_transitions(&self) -> usize {
        self.accepted.len()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.d..(k + 1) * self.d]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.d)
    }

    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.states().map(|s| s[i]).collect()
    }

    /// Flat row-major state storage.
    pub fn raw_states(&self) -> &[f64] {
        &self.states
    }
}

impl TraceSink for ChainTrace {
    fn start(&mut self, d: usize, n_iter: u64, seed: u64) -> Result<()> {
        self.d = d;
        self.seed = seed;
        self.states.clear();
        self.accepted.clear();
        self.states.reserve((n_iter as usize + 1) * d);
        self.accepted.reserve(n_iter as usize);
        Ok(())
    }
    fn initial(&mut self, x: &[f64]) -> Result<()> {
        self.states.extend_from_slice(x);
        Ok(())
    }
    fn transition(&mut self, x: &[f64], accepted: bool) -> Result<()> {
        self.states.extend_from_slice(x);
        self.accepted.push(accepted);
        Ok(())
    }
}

/// Run `n_iter` steps from a stationary draw, feeding every state to `sink`.
/// Returns the number of accepted transitions.
pub fn run_chain_into<S: TraceSink + ?Sized>(
    cfg: &KernelConfig,
    n_iter: u64,
    seed: u64,
    stream: u64,
    sink: &mut S,
) -> Result<u64> {
    let kernel = Kernel::new(*cfg)?;
    let mut rng = chain_rng(seed, stream);
    let d = cfg.dim();

    let x0 = cfg.target.sample_stationary(&mut rng);
    let mut state = kernel.to_working(&x0)?;
    let mut lp = kernel.log_target(&state);
    let mut scratch = vec![0.0; d];
    let mut original = vec![0.0; d];

    sink.start(d, n_iter, seed)?;
    kernel.to_original_into(&state, &mut original);
    sink.initial(&original)?;

    let mut n_accepted = 0;
    for _ in 0..n_iter {
        let accepted = kernel.advance(&mut state, &mut lp, &mut scratch, &mut rng);
        if accepted {
            n_accepted += 1;
            kernel.to_original_into(&state, &mut original);
        }
        sink.transition(&original, accepted)?;
    }
    sink.finish()?;
    Ok(n_accepted)
}

/// Run a chain in memory on stream 0 of `seed`.
pub fn run_chain(cfg: &KernelConfig, n_iter: u64, seed: u64) -> Result<ChainTrace> {
    let mut trace = ChainTrace::new(cfg.dim(), seed, cfg.describe());
    run_chain_into(cfg, n_iter, seed, 0, &mut trace)?;
    Ok(trace)
}
