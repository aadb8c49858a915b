use serde::{Deserialize, Serialize};

use super::data::group;
use super::inversion::linear_inversion;
use super::likelihood::PROBABILITY_FLOOR;
use crate::linalg::hermitian_part;
use crate::measurement::{CountRecord, WaveplateSetting};
use crate::states::{AccessibleDensityMatrix, BlockOperator};
use crate::{CMatrix, Error, Real, Result};

/// Weight of the maximally mixed state blended into the starting point so
/// that no eigenvalue starts at exactly zero.
const INIT_MIXING: f64 = 1e-8;
const MIN_DILUTION: f64 = 1e-12;
const MAX_DILUTION: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iters: usize,
    /// Stop once an accepted step raises the log-likelihood per count by
    /// less than this.
    pub tol: f64,
    /// Initial step size `ε` of the diluted update `(I + εR) ρ (I + εR)`.
    pub dilution: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            tol: 1e-10,
            dilution: 1.0,
        }
    }
}

/// Observed and fitted outcome frequencies of one setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingFit {
    pub setting: WaveplateSetting,
    pub observed: Vec<f64>,
    pub predicted: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult<T: Real> {
    pub estimate: AccessibleDensityMatrix<T>,
    pub log_likelihood: T,
    /// Accepted steps.
    pub iterations: usize,
    pub converged: bool,
    pub fits: Vec<SettingFit>,
    /// Log-likelihood of the starting point followed by every accepted step.
    pub trace: Vec<T>,
    /// Records with positive counts whose fitted probability is below the
    /// likelihood floor.
    pub floored: usize,
}

struct Term<'a, T: Real> {
    weight: T,
    element: &'a BlockOperator<T>,
}

fn evaluate<T: Real>(rho: &BlockOperator<T>, terms: &[Term<'_, T>], probs: &mut [T]) -> T {
    let floor = T::lit(PROBABILITY_FLOOR);
    let mut ll = T::zero();
    for (t, p) in terms.iter().zip(probs.iter_mut()) {
        *p = rho.pairing(t.element).expect("same photon number").max(floor);
        ll += t.weight * p.ln();
    }
    ll
}

/// `(I + εR) ρ (I + εR)` blockwise, renormalized.
fn diluted_step<T: Real>(rho: &BlockOperator<T>, r: &BlockOperator<T>, eps: T) -> BlockOperator<T> {
    let mut out = rho.clone();
    for (o, rb) in out.blocks_mut().iter_mut().zip(r.blocks()) {
        let d = o.matrix.nrows();
        let m: CMatrix<T> = CMatrix::identity(d, d) + rb.matrix.map(|z| z * eps);
        o.matrix = hermitian_part(&(&m * &o.matrix * m.adjoint()));
    }
    let tr = out.trace();
    out.scaled(T::one() / tr)
}

/// Maximum-likelihood estimate by the diluted `RρR` iteration with
/// step-size backtracking. Every accepted step increases the likelihood.
pub fn mle_reconstruct<T: Real>(data: &[CountRecord], opts: &MleOptions) -> Result<ReconstructionResult<T>> {
    if !(opts.tol >= 0.0 && opts.dilution > 0.0 && opts.dilution.is_finite()) {
        return Err(Error::Invalid("tolerance must be ≥ 0 and dilution positive".into()));
    }
    let ds = group::<T>(data)?;
    if ds.total <= 0.0 {
        return Err(Error::NoData);
    }
    let start = linear_inversion::<T>(data)?;
    let mixed = AccessibleDensityMatrix::<T>::maximally_mixed(ds.n)?;
    let mut rho = start.operator().scaled(T::one() - T::lit(INIT_MIXING));
    rho.add_scaled(T::lit(INIT_MIXING), mixed.operator());

    let mut terms = Vec::new();
    for s in &ds.settings {
        for (e, &count) in s.elements.iter().zip(&s.counts) {
            if count > 0.0 {
                terms.push(Term {
                    weight: T::lit(count),
                    element: &e.operator,
                });
            }
        }
    }
    let inv_total = T::one() / T::lit(ds.total);
    let mut probs = vec![T::zero(); terms.len()];
    let mut trial_probs = probs.clone();
    let mut ll = evaluate(&rho, &terms, &mut probs);
    let mut trace = vec![ll];
    let mut eps = T::lit(opts.dilution);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let mut r = BlockOperator::zeros(ds.n)?;
        for (t, &p) in terms.iter().zip(&probs) {
            r.add_scaled(t.weight * inv_total / p, t.element);
        }
        let accepted = loop {
            let cand = diluted_step(&rho, &r, eps);
            let cand_ll = evaluate(&cand, &terms, &mut trial_probs);
            if cand_ll >= ll {
                break Some((cand, cand_ll));
            }
            eps *= T::lit(0.5);
            if eps < T::lit(MIN_DILUTION) {
                break None;
            }
        };
        let Some((cand, cand_ll)) = accepted else {
            // no ascent direction left at working precision
            converged = true;
            break;
        };
        let gain = (cand_ll - ll) * inv_total;
        debug_assert!(cand_ll >= ll);
        rho = cand;
        ll = cand_ll;
        std::mem::swap(&mut probs, &mut trial_probs);
        trace.push(ll);
        iterations += 1;
        if gain < T::lit(opts.tol) {
            converged = true;
            break;
        }
        eps = (eps * T::lit(2.0)).min(T::lit(MAX_DILUTION));
    }

    let estimate = AccessibleDensityMatrix::from_raw(rho);
    let floor = T::lit(PROBABILITY_FLOOR);
    let mut fits = Vec::with_capacity(ds.settings.len());
    let mut floored = 0;
    for s in &ds.settings {
        let predicted: Vec<f64> = s
            .elements
            .iter()
            .map(|e| estimate.operator().pairing(&e.operator).map(|p| p.as_f64()))
            .collect::<Result<_>>()?;
        floored += predicted
            .iter()
            .zip(&s.counts)
            .filter(|(&p, &n)| n > 0.0 && p < floor.as_f64())
            .count();
        let observed = s
            .counts
            .iter()
            .map(|&n| if s.total > 0.0 { n / s.total } else { 0.0 })
            .collect();
        fits.push(SettingFit {
            setting: s.setting,
            observed,
            predicted,
        });
    }
    Ok(ReconstructionResult {
        estimate,
        log_likelihood: ll,
        iterations,
        converged,
        fits,
        trace,
        floored,
    })
}
