//! Count records grouped by waveplate setting.

use crate::measurement::{outcomes, povm_elements, CountRecord, PovmElement, WaveplateSetting};
use crate::{Error, Real, Result};

pub(crate) struct SettingData<T: Real> {
    pub setting: WaveplateSetting,
    /// Counts in outcome order `(N, 0) … (0, N)`.
    pub counts: Vec<f64>,
    pub total: f64,
    pub elements: Vec<PovmElement<T>>,
}

pub(crate) struct Dataset<T: Real> {
    pub n: usize,
    pub settings: Vec<SettingData<T>>,
    pub total: f64,
}

pub(crate) fn photon_number(data: &[CountRecord]) -> Result<usize> {
    let first = data.first().ok_or(Error::NoData)?.outcome.n();
    if let Some(r) = data.iter().find(|r| r.outcome.n() != first) {
        return Err(Error::PhotonNumberMismatch {
            expected: first,
            found: r.outcome.n(),
        });
    }
    if first == 0 {
        return Err(Error::ZeroParticles);
    }
    Ok(first)
}

/// Groups records by physical setting in order of first appearance;
/// repeated `(setting, outcome)` rows are summed.
pub(crate) fn group<T: Real>(data: &[CountRecord]) -> Result<Dataset<T>> {
    let n = photon_number(data)?;
    let mut settings: Vec<SettingData<T>> = Vec::new();
    for r in data {
        if !(r.count.is_finite() && r.count >= 0.0) {
            return Err(Error::Invalid(format!("count {} must be finite and ≥ 0", r.count)));
        }
        let idx = match settings.iter().position(|s| s.setting.equivalent(&r.setting)) {
            Some(i) => i,
            None => {
                settings.push(SettingData {
                    setting: r.setting,
                    counts: vec![0.0; n + 1],
                    total: 0.0,
                    elements: povm_elements(&r.setting, n)?,
                });
                settings.len() - 1
            }
        };
        let k = n - r.outcome.n_h;
        settings[idx].counts[k] += r.count;
        settings[idx].total += r.count;
    }
    debug_assert!(settings.iter().all(|s| s.elements.len() == outcomes(n).len()));
    let total = settings.iter().map(|s| s.total).sum();
    Ok(Dataset { n, settings, total })
}
