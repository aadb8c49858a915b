use serde::{Deserialize, Serialize};

use super::waveplate::{waveplate_unitary, WaveplateSetting};
use crate::schur::{collective_block, N_MAX};
use crate::states::{AccessibleDensityMatrix, BlockOperator};
use crate::{Error, Real, Result};

const CLIP_BELOW: f64 = -1e-12;

/// Photon numbers seen in the two beamsplitter ports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome {
    pub n_h: usize,
    pub n_v: usize,
}

impl Outcome {
    pub fn n(&self) -> usize {
        self.n_h + self.n_v
    }

    /// `2m = N_H − N_V`.
    pub fn two_m(&self) -> i64 {
        self.n_h as i64 - self.n_v as i64
    }

    /// Row of this outcome in a spin-`j` block, if the weight occurs there.
    pub fn row_in(&self, two_j: usize) -> Option<usize> {
        let two_m = self.two_m();
        (two_m.unsigned_abs() as usize <= two_j).then(|| ((two_j as i64 - two_m) / 2) as usize)
    }
}

/// `(N, 0), (N−1, 1), …, (0, N)`.
pub fn outcomes(n: usize) -> Vec<Outcome> {
    (0..=n).rev().map(|n_h| Outcome { n_h, n_v: n - n_h }).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PovmElement<T: Real> {
    pub outcome: Outcome,
    pub operator: BlockOperator<T>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroParticles);
    }
    if n > N_MAX {
        return Err(Error::TooManyParticles { n, max: N_MAX });
    }
    Ok(())
}

/// `U^⊗N† P_{N_H} U^⊗N` for every outcome, in block form. In spin block
/// `j` this is `D_j† |m⟩⟨m| D_j` with `D_j` the collective rotation block.
pub fn povm_elements<T: Real>(setting: &WaveplateSetting, n: usize) -> Result<Vec<PovmElement<T>>> {
    check_n(n)?;
    let u = waveplate_unitary::<T>(setting);
    let zero = BlockOperator::<T>::zeros(n)?;
    let rotations: Vec<_> = zero.blocks().iter().map(|b| collective_block(&u, n, b.two_j)).collect();
    Ok(outcomes(n)
        .into_iter()
        .map(|outcome| {
            let mut op = zero.clone();
            for (b, d) in zero.blocks().iter().zip(&rotations) {
                if let Some(r) = outcome.row_in(b.two_j) {
                    let row = d.row(r);
                    let m = row.adjoint() * row;
                    *op.block_mut(b.two_j).expect("same layout") = m;
                }
            }
            PovmElement { outcome, operator: op }
        })
        .collect())
}

/// `p_k = Σ_j mult_j · tr(B_j Π_{k,j})` in outcome order, small negative
/// round-off clipped to zero.
pub fn outcome_probabilities<T: Real>(rho: &AccessibleDensityMatrix<T>, setting: &WaveplateSetting) -> Result<Vec<T>> {
    let n = rho.n();
    check_n(n)?;
    let u = waveplate_unitary::<T>(setting);
    let rotated = rho.operator().rotated(&u);
    let mut p = vec![T::zero(); n + 1];
    for b in rotated.blocks() {
        let mult = T::lit(b.multiplicity as f64);
        for r in 0..=b.two_j {
            // rows run m = j … −j; outcome index is N/2 − m
            let k = (n - b.two_j) / 2 + r;
            p[k] += b.matrix[(r, r)].re * mult;
        }
    }
    Ok(p.into_iter()
        .map(|x| {
            if x < T::lit(CLIP_BELOW) {
                T::zero()
            } else {
                x.max(T::zero())
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, min_eigenvalue, tensor_power};
    use crate::schur::SchurBasis;
    use crate::CMatrix;

    fn zero_setting() -> WaveplateSetting {
        WaveplateSetting {
            qwp_deg: 0.0,
            hwp_deg: 0.0,
        }
    }

    fn diag(v: &[f64]) -> CMatrix<f64> {
        CMatrix::from_fn(v.len(), v.len(), |r, k| if r == k { c(v[r], 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn outcome_order() {
        let o = outcomes(3);
        assert_eq!(o[0], Outcome { n_h: 3, n_v: 0 });
        assert_eq!(o[3], Outcome { n_h: 0, n_v: 3 });
        assert_eq!(o[1].row_in(1), Some(0));
        assert_eq!(o[0].row_in(1), None);
    }

    #[test]
    fn computational_elements() {
        let e = povm_elements::<f64>(&zero_setting(), 3).unwrap();
        assert!(max_abs_diff(e[0].operator.block(3).unwrap(), &diag(&[1.0, 0.0, 0.0, 0.0])) < 1e-15);
        assert!(max_abs_diff(e[0].operator.block(1).unwrap(), &diag(&[0.0, 0.0])) < 1e-15);
        assert!(max_abs_diff(e[1].operator.block(3).unwrap(), &diag(&[0.0, 1.0, 0.0, 0.0])) < 1e-15);
        assert!(max_abs_diff(e[1].operator.block(1).unwrap(), &diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn two_one_element_is_the_weight_projector() {
        // |HHV⟩⟨HHV| + |HVH⟩⟨HVH| + |VHH⟩⟨VHH|
        let basis = SchurBasis::<f64>::new(3).unwrap();
        let e = povm_elements::<f64>(&zero_setting(), 3).unwrap();
        let full = e[1].operator.to_full(&basis);
        let mut expected = CMatrix::<f64>::zeros(8, 8);
        for s in [0b001, 0b010, 0b100] {
            expected[(s, s)] = c(1.0, 0.0);
        }
        assert!(max_abs_diff(&full, &expected) < 1e-14);
    }

    #[test]
    fn elements_match_full_space_construction() {
        for n in 1..=4 {
            let basis = SchurBasis::<f64>::new(n).unwrap();
            for (q, h) in [(10.0, 3.0), (45.0, 22.5), (-71.0, 12.25)] {
                let s = WaveplateSetting { qwp_deg: q, hwp_deg: h };
                let big = tensor_power(&waveplate_unitary::<f64>(&s), n);
                for e in povm_elements::<f64>(&s, n).unwrap() {
                    let mut p = CMatrix::<f64>::zeros(1 << n, 1 << n);
                    for i in 0..1usize << n {
                        if n - i.count_ones() as usize == e.outcome.n_h {
                            p[(i, i)] = c(1.0, 0.0);
                        }
                    }
                    let direct = big.adjoint() * p * &big;
                    assert!(max_abs_diff(&e.operator.to_full(&basis), &direct) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn complete_and_positive() {
        let s = WaveplateSetting {
            qwp_deg: 17.0,
            hwp_deg: 40.0,
        };
        let e = povm_elements::<f64>(&s, 3).unwrap();
        let mut sum = BlockOperator::<f64>::zeros(3).unwrap();
        for el in &e {
            sum.add_scaled(1.0, &el.operator);
            for b in el.operator.blocks() {
                assert!(min_eigenvalue(&b.matrix) > -1e-12);
            }
        }
        assert!(sum.max_abs_diff(&BlockOperator::identity(3).unwrap()) < 1e-12);
    }

    #[test]
    fn maximally_mixed_probabilities() {
        let rho = AccessibleDensityMatrix::<f64>::maximally_mixed(3).unwrap();
        let p = outcome_probabilities(
            &rho,
            &WaveplateSetting {
                qwp_deg: 33.0,
                hwp_deg: 7.0,
            },
        )
        .unwrap();
        for (x, y) in p.iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn probabilities_equal_pairing() {
        let rho = AccessibleDensityMatrix::<f64>::maximally_mixed(4).unwrap();
        let s = WaveplateSetting {
            qwp_deg: 5.0,
            hwp_deg: 61.0,
        };
        let p = outcome_probabilities(&rho, &s).unwrap();
        for (k, e) in povm_elements::<f64>(&s, 4).unwrap().iter().enumerate() {
            assert!((rho.operator().pairing(&e.operator).unwrap() - p[k]).abs() < 1e-14);
        }
    }
}
