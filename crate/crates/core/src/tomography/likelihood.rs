use super::data::photon_number;
use crate::measurement::{outcome_probabilities, CountRecord, WaveplateSetting};
use crate::states::AccessibleDensityMatrix;
use crate::{Error, Real, Result};

/// Probabilities below this are replaced by it inside the logarithm.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogLikelihood<T> {
    pub value: T,
    /// Records with a positive count whose probability hit the floor.
    pub floored: usize,
}

/// `Σ n_k ln max(p_k, 1e−12)` over all records.
pub fn log_likelihood<T: Real>(rho: &AccessibleDensityMatrix<T>, data: &[CountRecord]) -> Result<T> {
    Ok(log_likelihood_detailed(rho, data)?.value)
}

pub fn log_likelihood_detailed<T: Real>(
    rho: &AccessibleDensityMatrix<T>,
    data: &[CountRecord],
) -> Result<LogLikelihood<T>> {
    let n = photon_number(data)?;
    if n != rho.n() {
        return Err(Error::PhotonNumberMismatch {
            expected: rho.n(),
            found: n,
        });
    }
    let floor = T::lit(PROBABILITY_FLOOR);
    let mut value = T::zero();
    let mut floored = 0;
    let mut cache: Vec<(WaveplateSetting, Vec<T>)> = Vec::new();
    for r in data {
        if r.count == 0.0 {
            continue;
        }
        let p = match cache.iter().find(|(s, _)| s.equivalent(&r.setting)) {
            Some((_, p)) => p[n - r.outcome.n_h],
            None => {
                let p = outcome_probabilities(rho, &r.setting)?;
                let pk = p[n - r.outcome.n_h];
                cache.push((r.setting, p));
                pk
            }
        };
        if p < floor {
            floored += 1;
        }
        value += T::lit(r.count) * p.max(floor).ln();
    }
    Ok(LogLikelihood { value, floored })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::measurement::Outcome;

    fn rec(n_h: usize, n_v: usize, count: f64) -> CountRecord {
        CountRecord {
            setting: WaveplateSetting {
                qwp_deg: 0.0,
                hwp_deg: 0.0,
            },
            outcome: Outcome { n_h, n_v },
            count,
        }
    }

    #[test]
    fn zero_count_contributes_nothing() {
        let rho = AccessibleDensityMatrix::<f64>::maximally_mixed(3).unwrap();
        assert_eq!(log_likelihood(&rho, &[rec(3, 0, 0.0)]).unwrap(), 0.0);
    }

    #[test]
    fn floor_is_applied_and_reported() {
        let v = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let rho = AccessibleDensityMatrix::<f64>::pure_state(3, 3, &v).unwrap();
        let ll = log_likelihood_detailed(&rho, &[rec(0, 3, 2.0), rec(3, 0, 5.0)]).unwrap();
        assert_eq!(ll.floored, 1);
        assert!((ll.value - 2.0 * (1e-12f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn photon_number_checks() {
        let rho = AccessibleDensityMatrix::<f64>::maximally_mixed(3).unwrap();
        assert!(matches!(
            log_likelihood(&rho, &[rec(2, 0, 1.0)]),
            Err(Error::PhotonNumberMismatch { .. })
        ));
        assert!(matches!(
            log_likelihood(&rho, &[rec(3, 0, 1.0), rec(1, 0, 1.0)]),
            Err(Error::PhotonNumberMismatch { .. })
        ));
        assert!(matches!(log_likelihood(&rho, &[]), Err(Error::NoData)));
    }
}
