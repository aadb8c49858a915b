use nalgebra::{DMatrix, DVector};

use super::data::group;
use crate::linalg::clip_psd;
use crate::measurement::{design_row, param_layout, CountRecord};
use crate::states::{AccessibleDensityMatrix, BlockOperator};
use crate::{Error, Real, Result};

const RANK_TOL: f64 = 1e-9;

/// Least-squares solution of the per-setting frequencies against the block
/// parameters, before any positivity correction. The result is Hermitian
/// with unit trace but may have negative eigenvalues.
pub fn linear_inversion_raw<T: Real>(data: &[CountRecord]) -> Result<BlockOperator<T>> {
    let ds = group::<T>(data)?;
    let template = BlockOperator::<T>::zeros(ds.n)?;
    let layout = param_layout(&template);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for s in ds.settings.iter().filter(|s| s.total > 0.0) {
        for (e, &count) in s.elements.iter().zip(&s.counts) {
            rows.push(design_row(&layout, &e.operator));
            rhs.push(T::lit(count / s.total));
        }
    }
    if rows.is_empty() {
        return Err(Error::NoData);
    }
    let a = DMatrix::from_fn(rows.len(), layout.len(), |r, k| rows[r][k]);
    let b = DVector::from_vec(rhs);
    let svd = a.svd(true, true);
    let top = svd.singular_values.iter().cloned().fold(T::zero(), |x, y| x.max(y));
    let cut = top * T::tol(RANK_TOL);
    let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
    if rank < layout.len() {
        return Err(Error::RankDeficient {
            rank,
            required: layout.len(),
        });
    }
    let x = svd.solve(&b, cut).map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(layout.assemble(ds.n, x.as_slice()))
}

/// Linear inversion followed by clipping negative eigenvalues of every
/// block and renormalizing.
pub fn linear_inversion<T: Real>(data: &[CountRecord]) -> Result<AccessibleDensityMatrix<T>> {
    let raw = linear_inversion_raw::<T>(data)?;
    let clipped = raw.map_blocks(clip_psd);
    if clipped.trace() <= T::zero() {
        return AccessibleDensityMatrix::maximally_mixed(raw.n());
    }
    Ok(AccessibleDensityMatrix::from_raw(clipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{expected_counts, standard_settings, WaveplateSetting};

    #[test]
    fn mixed_state_round_trip() {
        let rho = AccessibleDensityMatrix::<f64>::maximally_mixed(3).unwrap();
        let data = expected_counts(&rho, &standard_settings(), 1e4).unwrap();
        let est = linear_inversion_raw::<f64>(&data).unwrap();
        assert!(est.max_abs_diff(rho.operator()) < 1e-10);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let rho = AccessibleDensityMatrix::<f64>::maximally_mixed(3).unwrap();
        let data = expected_counts(
            &rho,
            &[WaveplateSetting {
                qwp_deg: 0.0,
                hwp_deg: 0.0,
            }],
            1e4,
        )
        .unwrap();
        match linear_inversion::<f64>(&data) {
            Err(Error::RankDeficient { rank, required }) => {
                assert_eq!(rank, 4);
                assert_eq!(required, 20);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
