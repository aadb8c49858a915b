use std::fmt;

use serde::{Deserialize, Serialize};

use crate::states::AccessibleDensityMatrix;
use crate::{Error, Real, Result};

pub const DEFAULT_VERDICT_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// All population symmetric and the polarization state pure.
    Indistinguishable,
    /// Population outside the symmetric sector.
    HiddenDifferencesDetected,
    /// Symmetric but mixed: polarization mixing and symmetric hidden
    /// correlations cannot be told apart.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Indistinguishable => "indistinguishable",
            Verdict::HiddenDifferencesDetected => "hidden-differences-detected",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndistinguishabilityReport {
    pub n_photons: usize,
    pub symmetric_population: f64,
    pub purity: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

pub fn indistinguishability_report<T: Real>(
    rho: &AccessibleDensityMatrix<T>,
    tol: f64,
) -> Result<IndistinguishabilityReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Invalid(format!("verdict tolerance {tol} must be positive")));
    }
    let s = rho.symmetric_population().as_f64();
    let p = rho.purity().as_f64();
    let verdict = if s >= 1.0 - tol && p >= 1.0 - tol {
        Verdict::Indistinguishable
    } else if s <= 1.0 - tol {
        Verdict::HiddenDifferencesDetected
    } else {
        Verdict::Inconclusive
    };
    Ok(IndistinguishabilityReport {
        n_photons: rho.n(),
        symmetric_population: s,
        purity: p,
        verdict,
        tolerance: tol,
    })
}
