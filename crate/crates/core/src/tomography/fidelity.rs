use crate::linalg::{hermitian_eigen, psd_sqrt};
use crate::states::AccessibleDensityMatrix;
use crate::{Error, Real, Result};

/// Uhlmann fidelity `[Σ_j mult_j tr √(√A_j B_j √A_j)]²`, clamped to `[0, 1]`.
pub fn fidelity<T: Real>(rho: &AccessibleDensityMatrix<T>, sigma: &AccessibleDensityMatrix<T>) -> Result<T> {
    if rho.n() != sigma.n() {
        return Err(Error::PhotonNumberMismatch {
            expected: rho.n(),
            found: sigma.n(),
        });
    }
    let mut root_sum = T::zero();
    for (a, b) in rho.blocks().iter().zip(sigma.blocks()) {
        let sa = psd_sqrt(&a.matrix);
        let inner = &sa * &b.matrix * &sa;
        let (vals, _) = hermitian_eigen(&inner);
        let t = vals.into_iter().fold(T::zero(), |acc, v| acc + v.max(T::zero()).sqrt());
        root_sum += t * T::lit(a.multiplicity as f64);
    }
    Ok((root_sum * root_sum).min(T::one()).max(T::zero()))
}
