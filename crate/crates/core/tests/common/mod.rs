//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use accessible_dm::linalg::c;
use accessible_dm::measurement::{outcomes, standard_settings, CountRecord};
use accessible_dm::states::{expand_and_symmetrize, parse_source, trace_hidden};
use accessible_dm::{AccessibleDensityMatrix64, CMatrix, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Three photons, the third in a mode with 50% overlap with the other two.
pub const HALF_OVERLAP: &str = "\
# third photon half overlaps the first two
w  = exp(i*2/3*pi)
w2 = exp(i*4/3*pi)
c  = sqrt(1/2)*a + sqrt(1/2)*b
(aH + aV)(aH + w*aV)(cH + w2*cV)
";

pub const NOON3: &str = "\
w  = exp(i*2/3*pi)
w2 = exp(i*4/3*pi)
(aH + aV)(aH + w*aV)(aH + w2*aV)
";

pub fn analyze(text: &str) -> AccessibleDensityMatrix64 {
    let expr = parse_source(text, None).expect("parses").expression;
    trace_hidden(&expand_and_symmetrize::<f64>(&expr).expect("symmetrizes")).expect("traces")
}

/// Exact blocks of the half-overlap state.
pub fn half_overlap_exact() -> AccessibleDensityMatrix64 {
    let big = 4.0 / 11.0;
    let b32 = CMatrix::from_fn(4, 4, |r, k| {
        if (r == 0 || r == 3) && (k == 0 || k == 3) {
            c(big, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let small = 3.0 / 44.0;
    let phase = Complex64::from_polar(small, 2.0 * PI / 3.0);
    let b12 = CMatrix::from_row_slice(2, 2, &[c(small, 0.0), phase, phase.conj(), c(small, 0.0)]);
    AccessibleDensityMatrix64::from_blocks(3, vec![b32, b12]).unwrap()
}

pub fn noon3() -> AccessibleDensityMatrix64 {
    let r = 0.5f64.sqrt();
    AccessibleDensityMatrix64::pure_state(3, 3, &[c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap()
}

/// Reference counts for the twelve-setting design, rows in
/// setting order, columns `(3,0) (2,1) (1,2) (0,3)`.
pub const REFERENCE_COUNTS: [[u32; 4]; 12] = [
    [3645, 1459, 1385, 3586],
    [2201, 3953, 1006, 2703],
    [275, 7699, 160, 1932],
    [905, 5260, 2904, 904],
    [2078, 2042, 3834, 1975],
    [2759, 2388, 2185, 2673],
    [2105, 2693, 4174, 1108],
    [420, 6700, 1459, 1272],
    [910, 2741, 5163, 888],
    [892, 4226, 3021, 1899],
    [1337, 3838, 3207, 1550],
    [1914, 2043, 6069, 0],
];

pub fn reference_records() -> Vec<CountRecord> {
    let mut out = Vec::new();
    for (s, row) in standard_settings().into_iter().zip(REFERENCE_COUNTS) {
        for (o, n) in outcomes(3).into_iter().zip(row) {
            out.push(CountRecord {
                setting: s,
                outcome: o,
                count: n as f64,
            });
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(r: &mut R) -> f64 {
    // Box-Muller
    let u: f64 = r.random::<f64>().max(1e-300);
    let v: f64 = r.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Ginibre-distributed `G G† / tr`, optionally of reduced rank.
pub fn random_density<R: Rng>(r: &mut R, dim: usize, rank: usize) -> CMatrix<f64> {
    let g = CMatrix::<f64>::from_fn(dim, rank, |_, _| c(gaussian(r), gaussian(r)));
    let m = &g * g.adjoint();
    let tr: f64 = m.trace().re;
    m.map(|z: Complex64| z / tr)
}

/// A random accessible state: independent Ginibre blocks weighted by a
/// random distribution over spins.
pub fn random_accessible<R: Rng>(r: &mut R, n: usize) -> AccessibleDensityMatrix64 {
    let zero = accessible_dm::BlockOperator64::zeros(n).unwrap();
    let weights: Vec<f64> = zero.blocks().iter().map(|_| r.random::<f64>() + 0.05).collect();
    let total: f64 = weights
        .iter()
        .zip(zero.blocks())
        .map(|(w, b)| w * b.multiplicity as f64)
        .sum();
    let blocks = zero
        .blocks()
        .iter()
        .zip(&weights)
        .map(|(b, w)| random_density(r, b.two_j + 1, b.two_j + 1).map(|z| z * (w / total)))
        .collect();
    AccessibleDensityMatrix64::from_blocks(n, blocks).unwrap()
}
