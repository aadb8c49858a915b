use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::povm::{outcome_probabilities, outcomes, Outcome};
use super::waveplate::WaveplateSetting;
use crate::states::AccessibleDensityMatrix;
use crate::{Error, Real, Result};

/// One row of count data. Measured counts are whole numbers; expected-count
/// data may carry fractional values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: WaveplateSetting,
    pub outcome: Outcome,
    pub count: f64,
}

fn check_mean(mean_shots: f64) -> Result<()> {
    if !(mean_shots >= 0.0 && mean_shots.is_finite()) {
        return Err(Error::Invalid(format!(
            "mean shot number {mean_shots} must be finite and ≥ 0"
        )));
    }
    Ok(())
}

/// `mean_shots · p_k` for every setting and outcome.
pub fn expected_counts<T: Real>(
    rho: &AccessibleDensityMatrix<T>,
    settings: &[WaveplateSetting],
    mean_shots: f64,
) -> Result<Vec<CountRecord>> {
    check_mean(mean_shots)?;
    let mut out = Vec::with_capacity(settings.len() * (rho.n() + 1));
    for s in settings {
        let p = outcome_probabilities(rho, s)?;
        for (outcome, pk) in outcomes(rho.n()).into_iter().zip(p) {
            out.push(CountRecord {
                setting: *s,
                outcome,
                count: mean_shots * pk.as_f64(),
            });
        }
    }
    Ok(out)
}

/// Poisson-distributed counts with mean `mean_shots · p_k`. Each
/// `(setting index, outcome index)` pair draws from its own ChaCha20 stream
/// keyed by `seed`, so results do not depend on evaluation order.
pub fn simulate_counts<T: Real>(
    rho: &AccessibleDensityMatrix<T>,
    settings: &[WaveplateSetting],
    mean_shots: f64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    let mut records = expected_counts(rho, settings, mean_shots)?;
    let per_setting = rho.n() + 1;
    for (i, r) in records.iter_mut().enumerate() {
        let (s, k) = (i / per_setting, i % per_setting);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(((s as u64) << 16) | k as u64);
        r.count = poisson(&mut rng, r.count) as f64;
    }
    Ok(records)
}

fn ln_factorial(k: u64) -> f64 {
    if k < 16 {
        return (2..=k).map(|x| (x as f64).ln()).sum();
    }
    // Stirling series
    let x = k as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// Inversion below mean 30, Hörmann's transformed rejection (PTRS) above.
fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < 30.0 {
        let mut p = (-mean).exp();
        let mut cdf = p;
        let u: f64 = rng.random();
        let mut k = 0u64;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p == 0.0 && cdf < u {
                // only reachable through round-off in the far tail
                break;
            }
        }
        return k;
    }
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - ln_factorial(k as u64);
        if lhs <= rhs {
            return k as u64;
        }
    }
}
