//! Reconstruction of accessible density matrices from count data.

mod data;
mod fidelity;
mod inversion;
mod likelihood;
mod mle;
mod report;

pub use fidelity::fidelity;
pub use inversion::{linear_inversion, linear_inversion_raw};
pub use likelihood::{log_likelihood, log_likelihood_detailed, LogLikelihood, PROBABILITY_FLOOR};
pub use mle::{mle_reconstruct, MleOptions, ReconstructionResult, SettingFit};
pub use report::{indistinguishability_report, IndistinguishabilityReport, Verdict, DEFAULT_VERDICT_TOL};
