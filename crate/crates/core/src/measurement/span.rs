use nalgebra::DMatrix;

use super::povm::povm_elements;
use super::waveplate::WaveplateSetting;
use crate::states::BlockOperator;
use crate::{CMatrix, Error, Real, Result};

const RANK_TOL: f64 = 1e-9;

/// Real coordinates of a Hermitian block operator: for each block the
/// diagonal, then real and imaginary parts of the strict upper triangle.
#[derive(Clone, Debug)]
pub(crate) struct ParamLayout {
    /// `(two_j, multiplicity, first coordinate)` per block.
    blocks: Vec<(usize, usize, usize)>,
    len: usize,
}

pub(crate) fn param_layout<T: Real>(template: &BlockOperator<T>) -> ParamLayout {
    let mut blocks = Vec::new();
    let mut at = 0;
    for b in template.blocks() {
        let d = b.two_j + 1;
        blocks.push((b.two_j, b.multiplicity, at));
        at += d * d;
    }
    ParamLayout { blocks, len: at }
}

impl ParamLayout {
    pub fn len(&self) -> usize {
        self.len
    }

    /// Rebuilds the Hermitian operator from coordinates.
    pub fn assemble<T: Real>(&self, n: usize, x: &[T]) -> BlockOperator<T> {
        let mut op = BlockOperator::zeros(n).expect("layout built from a valid operator");
        for &(two_j, _, start) in &self.blocks {
            let d = two_j + 1;
            let m = op.block_mut(two_j).expect("same layout");
            let mut k = start;
            for a in 0..d {
                m[(a, a)] = crate::C::new(x[k], T::zero());
                k += 1;
            }
            for a in 0..d {
                for b in a + 1..d {
                    m[(a, b)] = crate::C::new(x[k], x[k + 1]);
                    m[(b, a)] = crate::C::new(x[k], -x[k + 1]);
                    k += 2;
                }
            }
        }
        op
    }
}

/// Coefficients `r` with `Σ r_i x_i = Σ_j mult_j tr(ρ_j E_j)` for the operator
/// `ρ` assembled from coordinates `x`.
pub(crate) fn design_row<T: Real>(layout: &ParamLayout, e: &BlockOperator<T>) -> Vec<T> {
    let mut row = vec![T::zero(); layout.len];
    for (&(two_j, mult, start), b) in layout.blocks.iter().zip(e.blocks()) {
        debug_assert_eq!(b.two_j, two_j);
        let d = two_j + 1;
        let m: &CMatrix<T> = &b.matrix;
        let w = T::lit(mult as f64);
        let two = T::lit(2.0);
        let mut k = start;
        for a in 0..d {
            row[k] = w * m[(a, a)].re;
            k += 1;
        }
        for a in 0..d {
            for bb in a + 1..d {
                // ρ_ab E_ba + ρ_ba E_ab = 2 Re(ρ_ab E_ba)
                row[k] = two * w * m[(bb, a)].re;
                row[k + 1] = -two * w * m[(bb, a)].im;
                k += 2;
            }
        }
    }
    row
}

/// Dimension of the real span of all POVM elements of the given settings.
pub fn measurement_span_rank(settings: &[WaveplateSetting], n: usize) -> Result<usize> {
    if settings.is_empty() {
        return Err(Error::NoData);
    }
    let layout = param_layout(&BlockOperator::<f64>::zeros(n)?);
    let mut rows = Vec::new();
    for s in settings {
        for e in povm_elements::<f64>(s, n)? {
            rows.push(design_row(&layout, &e.operator));
        }
    }
    Ok(numerical_rank(&rows, layout.len()))
}

pub(crate) fn numerical_rank(rows: &[Vec<f64>], cols: usize) -> usize {
    let a = DMatrix::from_fn(rows.len(), cols, |r, k| rows[r][k]);
    let sv = a.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}
