//! Block-diagonal operators on the accessible (permutation-invariant) space.

use std::collections::BTreeMap;

use nalgebra::{ComplexField, Matrix2};

use super::symmetrize::FirstQuantizedState;
use crate::linalg::{cr, hermitian_part, hermiticity_defect, max_abs_diff, min_eigenvalue, trace};
use crate::schur::{accessible_param_count, collective_block, spin_sectors, su2_multiplicity, SchurBasis};
use crate::{CMatrix, Error, Real, Result, C};

const SECTOR_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const INPUT_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

/// One spin sector: a `(2j+1)²` matrix, rows and columns `m = j … −j`,
/// standing for `multiplicity` identical copies.
#[derive(Clone, Debug, PartialEq)]
pub struct Block<T: Real> {
    pub two_j: usize,
    pub multiplicity: usize,
    pub matrix: CMatrix<T>,
}

/// An operator `⊕_j B_j ⊗ I_mult(j)`, blocks ordered by `j` descending.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator<T: Real> {
    n: usize,
    blocks: Vec<Block<T>>,
}

fn multiplicity(n: usize, two_j: usize) -> usize {
    su2_multiplicity(n, two_j).expect("n is valid") as usize
}

impl<T: Real> BlockOperator<T> {
    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_fn(n, |d| CMatrix::zeros(d, d))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |d| CMatrix::identity(d, d))
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> CMatrix<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParticles);
        }
        let blocks = spin_sectors(n)
            .into_iter()
            .map(|two_j| Block {
                two_j,
                multiplicity: multiplicity(n, two_j),
                matrix: f(two_j + 1),
            })
            .collect();
        Ok(Self { n, blocks })
    }

    /// Takes one matrix per spin, `j` descending.
    pub fn from_blocks(n: usize, matrices: Vec<CMatrix<T>>) -> Result<Self> {
        let mut op = Self::zeros(n)?;
        if matrices.len() != op.blocks.len() {
            return Err(Error::Dimension(format!(
                "{} blocks given, {} spin sectors for N = {n}",
                matrices.len(),
                op.blocks.len()
            )));
        }
        for (b, m) in op.blocks.iter_mut().zip(matrices) {
            let d = b.two_j + 1;
            if m.shape() != (d, d) {
                return Err(Error::Dimension(format!(
                    "block 2j = {} must be {d}×{d}, got {}×{}",
                    b.two_j,
                    m.nrows(),
                    m.ncols()
                )));
            }
            b.matrix = m;
        }
        Ok(op)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    pub(crate) fn blocks_mut(&mut self) -> &mut [Block<T>] {
        &mut self.blocks
    }

    pub fn block(&self, two_j: usize) -> Option<&CMatrix<T>> {
        self.blocks.iter().find(|b| b.two_j == two_j).map(|b| &b.matrix)
    }

    pub fn block_mut(&mut self, two_j: usize) -> Option<&mut CMatrix<T>> {
        self.blocks.iter_mut().find(|b| b.two_j == two_j).map(|b| &mut b.matrix)
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::PhotonNumberMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// `Re tr(A B)` in the full space: `Σ_j mult_j · Re tr(A_j B_j)`.
    pub fn pairing(&self, other: &Self) -> Result<T> {
        self.check_same_n(other)?;
        let mut acc = T::zero();
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            let d = a.matrix.nrows();
            let mut t = T::zero();
            for i in 0..d {
                for k in 0..d {
                    t += (a.matrix[(i, k)] * b.matrix[(k, i)]).re;
                }
            }
            acc += t * T::lit(a.multiplicity as f64);
        }
        Ok(acc)
    }

    /// Full-space trace `Σ_j mult_j · tr B_j` (real part).
    pub fn trace(&self) -> T {
        self.blocks.iter().fold(T::zero(), |acc, b| {
            acc + trace(&b.matrix).re * T::lit(b.multiplicity as f64)
        })
    }

    /// The operator as a `2^N × 2^N` matrix in the Schur basis ordering.
    pub fn to_schur_matrix(&self) -> CMatrix<T> {
        let dim = 1usize << self.n;
        let mut out = CMatrix::zeros(dim, dim);
        let mut at = 0;
        for b in &self.blocks {
            let d = b.matrix.nrows();
            for _ in 0..b.multiplicity {
                out.view_mut((at, at), (d, d)).copy_from(&b.matrix);
                at += d;
            }
        }
        out
    }

    /// The operator on computational strings.
    pub fn to_full(&self, basis: &SchurBasis<T>) -> CMatrix<T> {
        assert_eq!(basis.n(), self.n, "basis photon number");
        basis.from_schur(&self.to_schur_matrix())
    }

    /// `u^⊗N · A · u^⊗N†`, computed blockwise.
    pub fn rotated(&self, u: &Matrix2<C<T>>) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let d = collective_block(u, self.n, b.two_j);
                Block {
                    matrix: &d * &b.matrix * d.adjoint(),
                    ..b.clone()
                }
            })
            .collect();
        Self { n: self.n, blocks }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.n, other.n, "photon number");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .fold(T::zero(), |acc, (a, b)| acc.max(max_abs_diff(&a.matrix, &b.matrix)))
    }

    pub fn hermiticity_defect(&self) -> T {
        self.blocks
            .iter()
            .fold(T::zero(), |acc, b| acc.max(hermiticity_defect(&b.matrix)))
    }

    pub fn min_eigenvalue(&self) -> T {
        self.blocks
            .iter()
            .map(|b| min_eigenvalue(&b.matrix))
            .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
    }

    pub fn map_blocks(&self, f: impl Fn(&CMatrix<T>) -> CMatrix<T>) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block {
                matrix: f(&b.matrix),
                ..b.clone()
            })
            .collect();
        Self { n: self.n, blocks }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map_blocks(|m| m.map(|z| z * s))
    }

    /// `self + s · other`.
    pub fn add_scaled(&mut self, s: T, other: &Self) {
        assert_eq!(self.n, other.n, "photon number");
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.matrix += b.matrix.map(|z| z * s);
        }
    }
}

/// A valid accessible density matrix: Hermitian PSD blocks with
/// `Σ_j mult_j · tr B_j = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AccessibleDensityMatrix<T: Real> {
    op: BlockOperator<T>,
}

impl<T: Real> AccessibleDensityMatrix<T> {
    pub fn new(op: BlockOperator<T>) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > T::tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian(herm.as_f64()));
        }
        let tr = op.trace();
        if (tr - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(Error::BadTrace(tr.as_f64()));
        }
        let op = op.map_blocks(hermitian_part);
        let low = op.min_eigenvalue();
        if low < -T::tol(PSD_TOL) {
            return Err(Error::NotPositive(low.as_f64()));
        }
        Ok(Self { op })
    }

    pub fn from_blocks(n: usize, matrices: Vec<CMatrix<T>>) -> Result<Self> {
        Self::new(BlockOperator::from_blocks(n, matrices)?)
    }

    /// Hermitizes and rescales a PSD operator without the validity checks.
    pub(crate) fn from_raw(op: BlockOperator<T>) -> Self {
        let op = op.map_blocks(hermitian_part);
        let tr = op.trace();
        Self {
            op: op.scaled(T::one() / tr),
        }
    }

    /// `I / 2^N`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let scale = T::lit(1.0 / (1u64 << n.min(63)) as f64);
        Ok(Self {
            op: BlockOperator::identity(n)?.scaled(scale),
        })
    }

    /// A pure state `|v⟩⟨v|` inside the spin-`j` block, which must occur
    /// exactly once (only `j = N/2` for a valid state).
    pub fn pure_state(n: usize, two_j: usize, v: &[C<T>]) -> Result<Self> {
        let mut op = BlockOperator::zeros(n)?;
        let mult = multiplicity(n, two_j.min(n));
        if two_j > n || !(n - two_j).is_multiple_of(2) {
            return Err(Error::Invalid(format!("2j = {two_j} does not occur for N = {n}")));
        }
        if mult != 1 {
            return Err(Error::Invalid(format!(
                "2j = {two_j} occurs {mult} times; a pure state cannot fill one copy only"
            )));
        }
        if v.len() != two_j + 1 {
            return Err(Error::Dimension(format!(
                "vector of length {} for 2j = {two_j}",
                v.len()
            )));
        }
        let norm_sq = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if norm_sq == T::zero() {
            return Err(Error::ZeroNorm);
        }
        let m = CMatrix::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj() / cr(norm_sq));
        *op.block_mut(two_j).expect("sector exists") = m;
        Ok(Self { op })
    }

    pub fn n(&self) -> usize {
        self.op.n
    }

    pub fn operator(&self) -> &BlockOperator<T> {
        &self.op
    }

    pub fn into_operator(self) -> BlockOperator<T> {
        self.op
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.op.blocks
    }

    pub fn block(&self, two_j: usize) -> Option<&CMatrix<T>> {
        self.op.block(two_j)
    }

    /// `Σ_j mult_j · tr B_j²`.
    pub fn purity(&self) -> T {
        self.op.pairing(&self.op).expect("same operator")
    }

    /// Population of the totally symmetric sector `j = N/2`.
    pub fn symmetric_population(&self) -> T {
        trace(&self.op.blocks[0].matrix).re
    }

    /// Number of real parameters of the block form.
    pub fn param_count(&self) -> u128 {
        accessible_param_count(self.n(), 2).expect("n is valid")
    }

    pub fn to_full(&self, basis: &SchurBasis<T>) -> CMatrix<T> {
        self.op.to_full(basis)
    }

    pub fn rotated(&self, u: &Matrix2<C<T>>) -> Self {
        Self { op: self.op.rotated(u) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.op.max_abs_diff(&other.op)
    }
}

/// `C^j_{m m'}` coefficients of a coupled state, one rectangular array per
/// spin with rows `m = j … −j`. Columns index the hidden partner states and
/// may have any positive length.
#[derive(Clone, Debug)]
pub struct CoupledCoefficients<T: Real> {
    n: usize,
    coeffs: BTreeMap<usize, CMatrix<T>>,
}

impl<T: Real> CoupledCoefficients<T> {
    /// Requires `Σ_j Σ |C^j|² = 1`.
    pub fn new(n: usize, coeffs: BTreeMap<usize, CMatrix<T>>) -> Result<Self> {
        let cc = Self::unchecked(n, coeffs)?;
        let norm_sq = cc.norm_sq();
        if norm_sq == T::zero() {
            return Err(Error::ZeroNorm);
        }
        if (norm_sq - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(Error::BadTrace(norm_sq.as_f64()));
        }
        Ok(cc)
    }

    /// Rescales arbitrary nonzero coefficients to unit norm.
    pub fn normalized(n: usize, coeffs: BTreeMap<usize, CMatrix<T>>) -> Result<Self> {
        let mut cc = Self::unchecked(n, coeffs)?;
        let norm_sq = cc.norm_sq();
        if norm_sq == T::zero() {
            return Err(Error::ZeroNorm);
        }
        let s = T::one() / norm_sq.sqrt();
        for m in cc.coeffs.values_mut() {
            *m = m.map(|z| z * s);
        }
        Ok(cc)
    }

    fn unchecked(n: usize, coeffs: BTreeMap<usize, CMatrix<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParticles);
        }
        for (&two_j, m) in &coeffs {
            if two_j > n || !(n - two_j).is_multiple_of(2) {
                return Err(Error::Invalid(format!("2j = {two_j} does not occur for N = {n}")));
            }
            if m.nrows() != two_j + 1 || m.ncols() == 0 {
                return Err(Error::Dimension(format!(
                    "coefficients for 2j = {two_j} must have {} rows and at least one column",
                    two_j + 1
                )));
            }
        }
        Ok(Self { n, coeffs })
    }

    fn norm_sq(&self) -> T {
        self.coeffs
            .values()
            .flat_map(|m| m.iter())
            .fold(T::zero(), |a, z| a + z.norm_sqr())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, two_j: usize) -> Option<&CMatrix<T>> {
        self.coeffs.get(&two_j)
    }
}

/// `B_j = C^j C^j† / mult_j`.
pub fn coupled_to_accessible<T: Real>(coeffs: &CoupledCoefficients<T>) -> Result<AccessibleDensityMatrix<T>> {
    let n = coeffs.n;
    let mut op = BlockOperator::zeros(n)?;
    for b in op.blocks.iter_mut() {
        if let Some(cm) = coeffs.coeffs.get(&b.two_j) {
            let s = T::one() / T::lit(b.multiplicity as f64);
            b.matrix = (cm * cm.adjoint()).map(|z| z * s);
        }
    }
    AccessibleDensityMatrix::new(op)
}

/// Per-spin `μ`-averaged diagonal blocks of a Schur-basis matrix, plus the
/// largest entry outside the repeated-block pattern.
fn average_blocks<T: Real>(basis: &SchurBasis<T>, schur: &CMatrix<T>) -> (BlockOperator<T>, T) {
    let n = basis.n();
    let mut op = BlockOperator::zeros(n).expect("basis has n ≥ 1");
    let dim = basis.dim();
    // copy id of each index
    let mut copy_of = vec![0usize; dim];
    let mut id = 0;
    for s in basis.sectors() {
        for mu in 1..=s.multiplicity {
            for k in s.copy_range(mu) {
                copy_of[k] = id;
            }
            id += 1;
        }
    }
    let mut off = T::zero();
    for r in 0..dim {
        for c in 0..dim {
            if copy_of[r] != copy_of[c] {
                off = off.max(schur[(r, c)].modulus());
            }
        }
    }
    for (b, s) in op.blocks.iter_mut().zip(basis.sectors()) {
        let d = s.block_dim();
        let inv = T::one() / T::lit(s.multiplicity as f64);
        for mu in 1..=s.multiplicity {
            let start = s.copy_range(mu).start;
            b.matrix += schur.view((start, start), (d, d)).map(|z| z * inv);
        }
    }
    (op, off)
}

/// Partial trace over hidden modes followed by the block decomposition.
pub fn trace_hidden<T: Real>(state: &FirstQuantizedState<T>) -> Result<AccessibleDensityMatrix<T>> {
    let defect = state.symmetry_defect();
    if defect > T::tol(SECTOR_TOL) {
        return Err(Error::NotSymmetric(defect.as_f64()));
    }
    let basis = SchurBasis::new(state.n())?;
    let schur = basis.to_schur(&state.visible_density());
    let (op, off) = average_blocks(&basis, &schur);
    if off > T::tol(SECTOR_TOL) {
        return Err(Error::SectorCoherence(off.as_f64()));
    }
    AccessibleDensityMatrix::new(op)
}

fn photon_number_of(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("{dim} is not 2^N for N ≥ 1")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// The S_N twirl of a polarization density matrix, in block form.
pub fn accessible_projection<T: Real>(rho_vis: &CMatrix<T>) -> Result<AccessibleDensityMatrix<T>> {
    if !rho_vis.is_square() {
        return Err(Error::Dimension("density matrix must be square".into()));
    }
    let n = photon_number_of(rho_vis.nrows())?;
    let herm = hermiticity_defect(rho_vis);
    if herm > T::tol(INPUT_TOL) {
        return Err(Error::NotHermitian(herm.as_f64()));
    }
    let tr = trace(rho_vis).re;
    if (tr - T::one()).abs() > T::tol(INPUT_TOL) {
        return Err(Error::BadTrace(tr.as_f64()));
    }
    let basis = SchurBasis::new(n)?;
    let (op, _) = average_blocks(&basis, &basis.to_schur(rho_vis));
    AccessibleDensityMatrix::new(op)
}

/// `(1/N!) Σ_π P_π A P_π†` by explicit summation over all particle
/// permutations. Costs `N!·4^N`; meant for checking small cases.
pub fn permutation_twirl<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = photon_number_of(a.nrows())?;
    let dim = a.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = CMatrix::zeros(dim, dim);
    let mut count = 0usize;
    let mut index = vec![0usize; dim];
    loop {
        // bit at position k moves to position perm[k]
        for (s, slot) in index.iter_mut().enumerate() {
            *slot = (0..n).fold(0, |acc, k| {
                let bit = (s >> (n - 1 - k)) & 1;
                acc | (bit << (n - 1 - perm[k]))
            });
        }
        for r in 0..dim {
            for c in 0..dim {
                out[(index[r], index[c])] += a[(r, c)];
            }
        }
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let inv = T::one() / T::lit(count as f64);
    Ok(out.map(|z| z * inv))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
