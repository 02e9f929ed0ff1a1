//! Diffusion-limit optimal scaling for additive TMCMC and random walk
//! Metropolis on iid product targets, including targets with bounded support.
//!
//! The crate is organised bottom-up:
//!
//! - [`target`]: one-dimensional component densities and their iid products.
//! - [`transform`]: the logit map onto the real line, the induced density and
//!   Fisher information.
//! - [`proposal`]: proposal families for the additive increment.
//! - [`scaling`]: the proposal-only speed `g*`, acceptance curves and the
//!   optimal scale / acceptance rate.
//! - [`kernel`]: the TMCMC and RWM transitions and seeded chain runner.
//! - [`trace_io`]: binary and CSV trace formats.
//! - [`diagnostics`]: acceptance, ESJD, ACF, ESS and KS measurements.
//! - [`experiments`]: optimal-scaling table and TMCMC-vs-RWM comparison.
//!
//! ```
//! use optscale::{proposal::ProposalFamily, scaling, target::TargetDensity};
//!
//! let target = TargetDensity::uniform(-1.0, 1.0).unwrap();
//! let map = target.logit_map();
//! let res = scaling::optimal_scaling(ProposalFamily::Cauchy, &target, map.as_ref()).unwrap();
//! assert!((res.alpha_opt - 0.380).abs() < 0.002);
//! ```

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod proposal;
pub mod quadrature;
pub mod scaling;
pub mod special;
pub mod target;
pub mod trace_io;
pub mod transform;

pub use error::{Error, Result};
