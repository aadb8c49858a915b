//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{ComplexField, DMatrix, Matrix2};

use crate::{CMatrix, Real, C};

pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::lit(re), T::lit(im))
}

pub fn cr<T: Real>(re: T) -> C<T> {
    C::new(re, T::zero())
}

/// Promotes a real matrix to a complex one.
pub fn complexify<T: Real>(m: &DMatrix<T>) -> CMatrix<T> {
    m.map(cr)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).modulus()))
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    if !m.is_square() {
        return T::max_value().unwrap_or_else(T::one);
    }
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).modulus());
        }
    }
    worst
}

/// Symmetrizes `(m + m†)/2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()).map(|z| z * T::lit(0.5))
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> C<T> {
    m.diagonal().iter().fold(C::new(T::zero(), T::zero()), |a, &z| a + z)
}

/// `tr(a b)` without forming the product.
pub fn trace_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> C<T> {
    let n = a.nrows();
    let mut acc = C::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), m.clone());
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    hermitian_eigen(m).0.first().copied().unwrap_or_else(T::zero)
}

/// Rebuilds `V f(Λ) V†` from an eigendecomposition.
pub fn spectral_map<T: Real>(m: &CMatrix<T>, f: impl Fn(T) -> T) -> CMatrix<T> {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in vals.iter().enumerate() {
        let w = f(lambda);
        if w == T::zero() {
            continue;
        }
        let col = vecs.column(k);
        for i in 0..n {
            let vi = col[i] * w;
            for j in 0..n {
                out[(i, j)] += vi * col[j].conj();
            }
        }
    }
    out
}

/// Projects onto the PSD cone by zeroing negative eigenvalues.
pub fn clip_psd<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    spectral_map(m, |x| x.max(T::zero()))
}

/// Square root of a PSD matrix; eigenvalues below `-1e-12` are not expected
/// and everything negative is clipped to zero.
pub fn psd_sqrt<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    spectral_map(m, |x| x.max(T::zero()).sqrt())
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// `u ⊗ u ⊗ … ⊗ u` (`n` factors), particle 1 leftmost.
pub fn tensor_power<T: Real>(u: &Matrix2<C<T>>, n: usize) -> CMatrix<T> {
    let u = CMatrix::from_fn(2, 2, |i, j| u[(i, j)]);
    let mut out = CMatrix::identity(1, 1);
    for _ in 0..n {
        out = kron(&out, &u);
    }
    out
}
