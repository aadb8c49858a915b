//! How a collective single-particle unitary `u^⊗N` acts inside a spin block.

use nalgebra::Matrix2;

use crate::{CMatrix, Real, C};

/// Sign applied on top of Condon-Shortley coupling: `s^{j−m}` with
/// `s = (−1)^{N/2−j}`. With it the collective flip `H ↔ V` sends `|j,m⟩` to
/// `|j,−m⟩` for every odd `N`, so the three-photon doublets take the familiar
/// form `|½,−½⟩ = flip |½,½⟩`.
pub fn basis_phase(n: usize, two_j: usize, two_m: i64) -> f64 {
    let s_odd = ((n - two_j) / 2) % 2 == 1;
    let steps = (two_j as i64 - two_m) / 2;
    if s_odd && steps % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else {
        factorial(n) / (factorial(k) * factorial(n - k))
    }
}

fn cpow<T: Real>(z: C<T>, k: usize) -> C<T> {
    (0..k).fold(C::new(T::one(), T::zero()), |acc, _| acc * z)
}

/// The `(2j+1)²` block of `u^⊗N` on one copy of spin `j`, rows and columns
/// ordered `m = j … −j`, in the phase convention of [`SchurBasis`].
///
/// The spin-`j` part is the symmetric power of `u` (Schwinger bosons); each
/// of the `N/2 − j` singlet pairs contributes a factor `det u`.
///
/// [`SchurBasis`]: super::SchurBasis
pub fn collective_block<T: Real>(u: &Matrix2<C<T>>, n: usize, two_j: usize) -> CMatrix<T> {
    assert!(two_j <= n && (n - two_j).is_multiple_of(2), "spin does not occur");
    let (a, b, c, d) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let dim = two_j + 1;
    let det = a * d - b * c;
    let det_pow = cpow(det, (n - two_j) / 2);
    CMatrix::from_fn(dim, dim, |row, col| {
        // p = number of H quanta = j + m
        let p = two_j - row;
        let q = row;
        let pp = two_j - col;
        let qp = col;
        let norm = (factorial(p) * factorial(q) / (factorial(pp) * factorial(qp))).sqrt();
        let mut acc = C::new(T::zero(), T::zero());
        let k_lo = p.saturating_sub(qp);
        for k in k_lo..=p.min(pp) {
            let l = p - k;
            let weight = T::lit(binomial(pp, k) * binomial(qp, l));
            acc += cpow(a, k) * cpow(c, pp - k) * cpow(b, l) * cpow(d, qp - l) * weight;
        }
        let m_row = two_j as i64 - 2 * row as i64;
        let m_col = two_j as i64 - 2 * col as i64;
        let phase = basis_phase(n, two_j, m_row) * basis_phase(n, two_j, m_col);
        acc * det_pow * T::lit(norm * phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, tensor_power};
    use crate::schur::SchurBasis;

    fn random_unitary(seed: u64) -> Matrix2<C<f64>> {
        // Euler-angle product with a global phase
        let x = seed as f64;
        let (al, be, ga, ph) = (0.3 + x, 1.1 * x + 0.2, 0.7 - 0.5 * x, 0.4 * x);
        let rz = |t: f64| Matrix2::<C<f64>>::new(c(t.cos(), -t.sin()), c(0.0, 0.0), c(0.0, 0.0), c(t.cos(), t.sin()));
        let ry = |t: f64| Matrix2::<C<f64>>::new(c(t.cos(), 0.0), c(-t.sin(), 0.0), c(t.sin(), 0.0), c(t.cos(), 0.0));
        (rz(al) * ry(be) * rz(ga)).map(|z| z * C::<f64>::new(ph.cos(), ph.sin()))
    }

    #[test]
    fn phase_convention() {
        assert_eq!(basis_phase(3, 1, -1), -1.0);
        assert_eq!(basis_phase(3, 1, 1), 1.0);
        assert_eq!(basis_phase(3, 3, -3), 1.0);
        assert_eq!(basis_phase(2, 0, 0), 1.0);
        assert_eq!(basis_phase(4, 2, -2), 1.0);
        assert_eq!(basis_phase(4, 2, 0), -1.0);
    }

    #[test]
    fn matches_schur_conjugation_of_tensor_power() {
        for n in 1..=5 {
            let basis = SchurBasis::<f64>::new(n).unwrap();
            for seed in 0..4 {
                let u = random_unitary(seed);
                let big = basis.to_schur(&tensor_power(&u, n));
                for s in basis.sectors() {
                    let block = collective_block(&u, n, s.two_j);
                    for mu in 1..=s.multiplicity {
                        let r = s.copy_range(mu);
                        let sub = big.view((r.start, r.start), (r.len(), r.len())).into_owned();
                        assert!(max_abs_diff(&sub, &block) < 1e-12, "n={n} 2j={} mu={mu}", s.two_j);
                    }
                }
            }
        }
    }
}
