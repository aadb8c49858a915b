//! Explicit Schur basis for N qubits by sequential spin-½ coupling.
//!
//! Computational basis strings are indexed with particle 1 as the most
//! significant bit, `H = 0`, `V = 1`. Basis vectors are ordered by `j`
//! descending, then multiplicity copy `μ` ascending, then weight `m`
//! descending, so every `(j, μ)` pair occupies a contiguous run of `2j+1`
//! indices.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::rotation::basis_phase;
use super::{clebsch_gordan, N_MAX};
use crate::linalg::complexify;
use crate::{CMatrix, Error, Real, Result};

/// `(j, μ, m)` of one basis vector; `mu` counts from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchurLabel {
    pub two_j: usize,
    pub mu: usize,
    pub two_m: i64,
}

/// All copies of one spin `j`.
#[derive(Clone, Debug)]
pub struct Sector {
    pub two_j: usize,
    pub multiplicity: usize,
    /// Intermediate `2j` after coupling particles `1..=k`, one path per copy,
    /// in lexicographic order.
    pub paths: Vec<Vec<usize>>,
    /// Index of the sector's first basis vector.
    pub offset: usize,
}

impl Sector {
    pub fn block_dim(&self) -> usize {
        self.two_j + 1
    }

    /// Index range of copy `mu` (1-based).
    pub fn copy_range(&self, mu: usize) -> std::ops::Range<usize> {
        let start = self.offset + (mu - 1) * self.block_dim();
        start..start + self.block_dim()
    }
}

/// The basis restricted to one weight. Each such restriction is a square
/// orthogonal matrix since weights are conserved by coupling.
#[derive(Clone, Debug)]
pub struct WeightClass<T: Real> {
    pub two_m: i64,
    /// Computational indices with this weight, ascending.
    pub strings: Vec<usize>,
    /// Basis-vector indices with this weight, ascending.
    pub labels: Vec<usize>,
    /// `coeffs[(r, c)] = ⟨strings[r] | labels[c]⟩`.
    pub coeffs: DMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct SchurBasis<T: Real> {
    n: usize,
    labels: Vec<SchurLabel>,
    sectors: Vec<Sector>,
    classes: Vec<WeightClass<T>>,
    /// (class, column) of each label.
    label_slot: Vec<(usize, usize)>,
}

type Sparse<T> = Vec<(usize, T)>;

type IndexPicker<T> = fn(&WeightClass<T>) -> &[usize];

impl<T: Real> SchurBasis<T> {
    /// Builds the basis for `n` qubits, `1 ≤ n ≤ N_MAX`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParticles);
        }
        if n > N_MAX {
            return Err(Error::TooManyParticles { n, max: N_MAX });
        }

        // (path, 2m) -> sparse vector over computational strings
        let mut states: BTreeMap<(Vec<usize>, i64), Sparse<T>> = BTreeMap::new();
        states.insert((vec![1], 1), vec![(0, T::one())]);
        states.insert((vec![1], -1), vec![(1, T::one())]);

        for _ in 1..n {
            let mut paths: Vec<Vec<usize>> = states.keys().map(|(p, _)| p.clone()).collect();
            paths.dedup();
            let mut next = BTreeMap::new();
            for path in paths {
                let prev = *path.last().expect("nonempty path") as i64;
                let mut targets = vec![prev + 1];
                if prev > 0 {
                    targets.push(prev - 1);
                }
                for two_j in targets {
                    let mut new_path = path.clone();
                    new_path.push(two_j as usize);
                    for two_m in (-two_j..=two_j).step_by(2) {
                        let mut acc: BTreeMap<usize, T> = BTreeMap::new();
                        for (sigma, bit) in [(1i64, 0usize), (-1, 1)] {
                            let coef = clebsch_gordan::<T>(prev, two_m - sigma, 1, sigma, two_j, two_m);
                            if coef == T::zero() {
                                continue;
                            }
                            if let Some(old) = states.get(&(path.clone(), two_m - sigma)) {
                                for &(idx, amp) in old {
                                    *acc.entry(idx * 2 + bit).or_insert_with(T::zero) += coef * amp;
                                }
                            }
                        }
                        next.insert((new_path.clone(), two_m), acc.into_iter().collect());
                    }
                }
            }
            states = next;
        }

        // group the coupling paths by final spin
        let mut by_spin: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for (path, _) in states.keys() {
            let list = by_spin.entry(*path.last().unwrap()).or_default();
            if list.last() != Some(path) {
                list.push(path.clone());
            }
        }

        let dim = 1usize << n;
        let mut labels = Vec::with_capacity(dim);
        let mut sectors = Vec::new();
        let mut vectors: Vec<Sparse<T>> = Vec::with_capacity(dim);
        for (&two_j, paths) in by_spin.iter().rev() {
            let mut paths = paths.clone();
            paths.sort();
            sectors.push(Sector {
                two_j,
                multiplicity: paths.len(),
                paths: paths.clone(),
                offset: labels.len(),
            });
            for (k, path) in paths.iter().enumerate() {
                for two_m in (-(two_j as i64)..=two_j as i64).rev().step_by(2) {
                    let phase = T::lit(basis_phase(n, two_j, two_m));
                    let v = states
                        .remove(&(path.clone(), two_m))
                        .expect("every coupled state is built");
                    vectors.push(v.into_iter().map(|(i, a)| (i, a * phase)).collect());
                    labels.push(SchurLabel {
                        two_j,
                        mu: k + 1,
                        two_m,
                    });
                }
            }
        }
        debug_assert_eq!(labels.len(), dim);

        // weight classes, largest weight first
        let weight = |idx: usize| n as i64 - 2 * idx.count_ones() as i64;
        let mut classes = Vec::new();
        let mut label_slot = vec![(0, 0); dim];
        let mut string_slot = vec![(0, 0); dim];
        for (ci, two_m) in (-(n as i64)..=n as i64).rev().step_by(2).enumerate() {
            let strings: Vec<usize> = (0..dim).filter(|&i| weight(i) == two_m).collect();
            let class_labels: Vec<usize> = (0..dim).filter(|&l| labels[l].two_m == two_m).collect();
            for (r, &s) in strings.iter().enumerate() {
                string_slot[s] = (ci, r);
            }
            for (c, &l) in class_labels.iter().enumerate() {
                label_slot[l] = (ci, c);
            }
            classes.push(WeightClass {
                two_m,
                coeffs: DMatrix::zeros(strings.len(), class_labels.len()),
                strings,
                labels: class_labels,
            });
        }
        for (l, v) in vectors.iter().enumerate() {
            let (ci, col) = label_slot[l];
            for &(s, amp) in v {
                let (cs, row) = string_slot[s];
                debug_assert_eq!(cs, ci, "basis vector mixes weights");
                classes[ci].coeffs[(row, col)] = amp;
            }
        }

        Ok(Self {
            n,
            labels,
            sectors,
            classes,
            label_slot,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn labels(&self) -> &[SchurLabel] {
        &self.labels
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, two_j: usize) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.two_j == two_j)
    }

    pub fn classes(&self) -> &[WeightClass<T>] {
        &self.classes
    }

    pub fn index_of(&self, two_j: usize, mu: usize, two_m: i64) -> Option<usize> {
        let s = self.sector(two_j)?;
        if mu == 0 || mu > s.multiplicity || two_m.abs() > two_j as i64 || (two_j as i64 - two_m) % 2 != 0 {
            return None;
        }
        Some(s.copy_range(mu).start + ((two_j as i64 - two_m) / 2) as usize)
    }

    /// Dense coefficient vector of basis element `index`.
    pub fn vector(&self, index: usize) -> DVector<T> {
        let (ci, col) = self.label_slot[index];
        let class = &self.classes[ci];
        let mut v = DVector::zeros(self.dim());
        for (r, &s) in class.strings.iter().enumerate() {
            v[s] = class.coeffs[(r, col)];
        }
        v
    }

    /// The full `2^N × 2^N` change of basis; column `k` is basis vector `k`.
    pub fn matrix(&self) -> DMatrix<T> {
        let mut w = DMatrix::zeros(self.dim(), self.dim());
        for class in &self.classes {
            for (r, &s) in class.strings.iter().enumerate() {
                for (c, &l) in class.labels.iter().enumerate() {
                    w[(s, l)] = class.coeffs[(r, c)];
                }
            }
        }
        w
    }

    /// `W† A W`: an operator on `(C²)^⊗N` expressed in the Schur basis.
    pub fn to_schur(&self, op: &CMatrix<T>) -> CMatrix<T> {
        self.conjugate(op, true)
    }

    /// `W A W†`: back from the Schur basis to computational strings.
    pub fn from_schur(&self, op: &CMatrix<T>) -> CMatrix<T> {
        self.conjugate(op, false)
    }

    fn conjugate(&self, op: &CMatrix<T>, forward: bool) -> CMatrix<T> {
        let dim = self.dim();
        assert_eq!(op.shape(), (dim, dim), "operator dimension");
        let (rows_of, cols_of): (IndexPicker<T>, IndexPicker<T>) = if forward {
            (|c| &c.strings, |c| &c.labels)
        } else {
            (|c| &c.labels, |c| &c.strings)
        };
        let mats: Vec<CMatrix<T>> = self
            .classes
            .iter()
            .map(|c| {
                let m = complexify(&c.coeffs);
                if forward {
                    m
                } else {
                    m.transpose()
                }
            })
            .collect();
        let mut out = CMatrix::zeros(dim, dim);
        for (a, ca) in self.classes.iter().enumerate() {
            for (b, cb) in self.classes.iter().enumerate() {
                let ra = rows_of(ca);
                let rb = rows_of(cb);
                let sub = CMatrix::from_fn(ra.len(), rb.len(), |i, j| op[(ra[i], rb[j])]);
                let x = mats[a].transpose() * sub * &mats[b];
                let oa = cols_of(ca);
                let ob = cols_of(cb);
                for i in 0..oa.len() {
                    for j in 0..ob.len() {
                        out[(oa[i], ob[j])] = x[(i, j)];
                    }
                }
            }
        }
        out
    }
}
