//! First-quantized (particle-labelled) form of bosonic states.

use std::collections::BTreeMap;

use nalgebra::ComplexField;

use super::expr::CreationOperatorExpression;
use super::Pol;
use crate::linalg::c;
use crate::schur::N_MAX;
use crate::{CMatrix, Complex64, Error, Real, Result, C};

const DROP_BELOW: f64 = 1e-14;
const SYMMETRY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// Single-particle label: polarization and primitive hidden mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub pol: Pol,
    pub mode: usize,
}

/// Amplitudes over N-particle tensor labels. Labels not present have
/// amplitude zero.
#[derive(Clone, Debug)]
pub struct FirstQuantizedState<T: Real> {
    n: usize,
    modes: Vec<String>,
    amps: BTreeMap<Vec<Slot>, C<T>>,
}

impl<T: Real> FirstQuantizedState<T> {
    /// Wraps explicit amplitudes, checking unit norm and permutation symmetry.
    pub fn from_amplitudes(n: usize, modes: Vec<String>, amps: BTreeMap<Vec<Slot>, C<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParticles);
        }
        for label in amps.keys() {
            if label.len() != n {
                return Err(Error::Dimension(format!(
                    "label of length {} in an {n}-particle state",
                    label.len()
                )));
            }
            if let Some(s) = label.iter().find(|s| s.mode >= modes.len()) {
                return Err(Error::Dimension(format!("mode index {} out of range", s.mode)));
            }
        }
        let state = Self { n, modes, amps };
        let norm = state.norm().as_f64();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        if (norm - 1.0).abs() > T::TOL_FLOOR.max(NORM_TOL) {
            return Err(Error::BadTrace(norm * norm));
        }
        let defect = state.symmetry_defect().as_f64();
        if defect > T::TOL_FLOOR.max(SYMMETRY_TOL) {
            return Err(Error::NotSymmetric(defect));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Names of the primitive hidden modes, indexed by [`Slot::mode`].
    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &BTreeMap<Vec<Slot>, C<T>> {
        &self.amps
    }

    pub fn amplitude(&self, label: &[Slot]) -> C<T> {
        self.amps
            .get(label)
            .copied()
            .unwrap_or_else(|| C::new(T::zero(), T::zero()))
    }

    pub fn norm(&self) -> T {
        self.amps.values().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// Largest amplitude change under any transposition of two particles.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for (label, &amp) in &self.amps {
            for a in 0..self.n {
                for b in a + 1..self.n {
                    if label[a] == label[b] {
                        continue;
                    }
                    let mut swapped = label.clone();
                    swapped.swap(a, b);
                    worst = worst.max((amp - self.amplitude(&swapped)).modulus());
                }
            }
        }
        worst
    }

    /// Reduced polarization state `Tr_hid |ψ⟩⟨ψ|` on `2^N` computational
    /// strings (particle 1 most significant, `H = 0`).
    pub fn visible_density(&self) -> CMatrix<T> {
        let dim = 1usize << self.n;
        // hidden string -> [(visible index, amplitude)]
        let mut by_hidden: BTreeMap<Vec<usize>, Vec<(usize, C<T>)>> = BTreeMap::new();
        for (label, &amp) in &self.amps {
            let hidden = label.iter().map(|s| s.mode).collect();
            let visible = label.iter().fold(0, |acc, s| acc * 2 + s.pol.bit());
            by_hidden.entry(hidden).or_default().push((visible, amp));
        }
        let mut rho = CMatrix::zeros(dim, dim);
        for col in by_hidden.values() {
            for &(p, a) in col {
                for &(q, b) in col {
                    rho[(p, q)] += a * b.conj();
                }
            }
        }
        rho
    }
}

/// Multiplies out the product and writes every monomial as its normalized
/// symmetric particle-labelled state.
///
/// A monomial `Π (a†_s)^{n_s}` creates a Fock state of norm `√Π n_s!`; in
/// first quantization that is an equal-weight sum over the distinct
/// arrangements of its slots, each with amplitude `√(Π n_s!) / √#arrangements`.
pub fn expand_and_symmetrize<T: Real>(expr: &CreationOperatorExpression) -> Result<FirstQuantizedState<T>> {
    let n = expr.photon_number();
    if n == 0 {
        return Err(Error::ZeroParticles);
    }
    if n > N_MAX {
        return Err(Error::TooManyParticles { n, max: N_MAX });
    }
    if let Some(k) = expr.factors.iter().position(|f| f.terms.is_empty()) {
        return Err(Error::Invalid(format!("factor {} has no terms", k + 1)));
    }

    // sorted slot multiset -> coefficient
    let mut poly: BTreeMap<Vec<Slot>, Complex64> = BTreeMap::new();
    poly.insert(Vec::new(), expr.prefactor);
    for factor in &expr.factors {
        let mut next: BTreeMap<Vec<Slot>, Complex64> = BTreeMap::new();
        for (mono, &coef) in &poly {
            for t in &factor.terms {
                let slot = Slot {
                    pol: t.pol,
                    mode: t.mode,
                };
                let mut m = mono.clone();
                let at = m.partition_point(|s| *s <= slot);
                m.insert(at, slot);
                *next.entry(m).or_default() += coef * t.coef;
            }
        }
        poly = next;
    }

    let mut amps: BTreeMap<Vec<Slot>, Complex64> = BTreeMap::new();
    for (mono, coef) in poly {
        if coef.norm() < DROP_BELOW {
            continue;
        }
        let arrangements = distinct_permutations(&mono);
        let occupation: f64 = run_lengths(&mono).iter().map(|&k| factorial(k)).product();
        let amp = coef * (occupation / arrangements.len() as f64).sqrt();
        for label in arrangements {
            *amps.entry(label).or_default() += amp;
        }
    }
    amps.retain(|_, a| a.norm() >= DROP_BELOW);
    let norm = amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < DROP_BELOW {
        return Err(Error::ZeroNorm);
    }
    let amps = amps
        .into_iter()
        .map(|(k, a)| (k, c::<T>(a.re / norm, a.im / norm)))
        .collect();
    Ok(FirstQuantizedState {
        n,
        modes: expr.modes.clone(),
        amps,
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

fn run_lengths(sorted: &[Slot]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, s) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1] == *s {
            *out.last_mut().expect("run started") += 1;
        } else {
            out.push(1);
        }
    }
    out
}

/// All distinct orderings of a sorted multiset, in lexicographic order.
fn distinct_permutations(sorted: &[Slot]) -> Vec<Vec<Slot>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    // standard next-permutation
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len())
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}
