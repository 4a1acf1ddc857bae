//! Gini coefficient analysis for zero-truncated Poisson (ZTP) populations.
//!
//! * [`specfun`] special functions and quadrature,
//! * [`ztp`] the ZTP law, its sampler and the maximum-likelihood fit,
//! * [`gini`] population Gini, the sample estimator, its exact expectation
//!   and the plug-in bias-corrected estimator,
//! * [`simulation`] the reproducible Monte Carlo study,
//! * [`oracle`] brute-force reference implementations used for verification.

#![allow(clippy::excessive_precision)]

pub mod error;
pub mod gini;
pub mod oracle;
pub mod simulation;
pub mod specfun;
pub mod ztp;

pub use error::{Error, Result};
pub use gini::GiniReport;
pub use simulation::{SimCellSummary, SimConfig};
pub use specfun::QuadSpec;
pub use ztp::{Sample, ZtpParams};
