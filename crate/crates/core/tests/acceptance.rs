//! Acceptance checks, one line per criterion.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use accessible_dm::linalg::{c, max_abs_diff, tensor_power};
use accessible_dm::measurement::{
    expected_counts, measurement_span_rank, outcome_probabilities, povm_elements, simulate_counts, standard_settings,
    waveplate_unitary, WaveplateSetting,
};
use accessible_dm::schur::{
    accessible_param_count, binomial, partitions, spin_sectors, su2_multiplicity, weyl_dimension, SchurBasis,
};
use accessible_dm::states::{
    accessible_projection, expand_and_symmetrize, parse_operator_expression, permutation_twirl, ModeTable,
};
use accessible_dm::tomography::{
    fidelity, indistinguishability_report, mle_reconstruct, MleOptions, Verdict, DEFAULT_VERDICT_TOL,
};
use accessible_dm::{AccessibleDensityMatrix64, CMatrix, Complex64};
use rand::Rng;

use common::*;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn run(id: u32, name: &str, budget: Option<Duration>, f: fn() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let result = match (result, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
        (r, _) => r,
    };
    let ok = result.is_ok();
    let detail = result.unwrap_or_else(|e| e);
    println!(
        "criterion {id} [{}] {name}: {detail} ({elapsed:.2?})",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn parameter_counts() -> Check {
    ensure!(accessible_param_count(3, 2).unwrap() == 20, "count(3, 2) != 20");
    for n in 1..=8 {
        let explicit: u128 = spin_sectors(n).iter().map(|&tj| ((tj + 1) * (tj + 1)) as u128).sum();
        let closed = binomial(n as u64 + 3, 3).unwrap();
        ensure!(
            explicit == closed,
            "N = {n}: Σ(2j+1)² = {explicit}, C(N+3,3) = {closed}"
        );
        ensure!(
            accessible_param_count(n, 2).unwrap() == closed,
            "N = {n}: count mismatch"
        );
    }
    for n in 1..=6 {
        for d in 1..=4 {
            let total: u128 = partitions(n, d)
                .iter()
                .map(|l| weyl_dimension(l, d).unwrap().pow(2))
                .sum();
            let closed = binomial((n + d * d - 1) as u64, n as u64).unwrap();
            ensure!(
                total == closed,
                "N = {n}, d = {d}: Σ weyl² = {total}, binomial = {closed}"
            );
            ensure!(accessible_param_count(n, d).unwrap() == closed, "N = {n}, d = {d}");
        }
    }
    Ok("20 for N=3; C(N+3,3) for N ≤ 8; C(N+d²−1,N) for N ≤ 6, d ≤ 4".into())
}

fn worked_term() -> Check {
    let rho = analyze("(aH)(aV)(bV)");
    let mut b32 = CMatrix::<f64>::zeros(4, 4);
    b32[(2, 2)] = c(2.0 / 3.0, 0.0);
    let mut b12 = CMatrix::<f64>::zeros(2, 2);
    b12[(1, 1)] = c(1.0 / 6.0, 0.0);
    let d32 = max_abs_diff(rho.block(3).unwrap(), &b32);
    let d12 = max_abs_diff(rho.block(1).unwrap(), &b12);
    ensure!(d32 <= 1e-10 && d12 <= 1e-10, "deviation {d32:.2e} / {d12:.2e}");
    Ok(format!(
        "B_3/2[-1/2] = 2/3, B_1/2[-1/2] = 1/6, max deviation {:.1e}",
        d32.max(d12)
    ))
}

fn full_state() -> Check {
    let rho = analyze(HALF_OVERLAP);
    let b = rho.block(3).unwrap();
    let s = rho.block(1).unwrap();
    let tol = 5e-5;
    for (r, k) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        ensure!(
            (b[(r, k)] - c(0.3636, 0.0)).norm() < tol,
            "B_3/2[{r},{k}] = {}",
            b[(r, k)]
        );
    }
    for r in 1..3 {
        for k in 0..4 {
            ensure!(
                b[(r, k)].norm() < tol && b[(k, r)].norm() < tol,
                "B_3/2 inner entry nonzero"
            );
        }
    }
    ensure!((s[(0, 0)] - c(0.0682, 0.0)).norm() < tol, "B_1/2[0,0] = {}", s[(0, 0)]);
    ensure!((s[(1, 1)] - c(0.0682, 0.0)).norm() < tol, "B_1/2[1,1] = {}", s[(1, 1)]);
    // the two off-diagonal entries form the conjugate pair −0.0341 ∓ 0.0590i
    let pair = [s[(0, 1)], s[(1, 0)]];
    let target = c(-0.0341, -0.0590);
    ensure!(
        pair.iter().any(|z| (z - target).norm() < tol) && pair.iter().any(|z| (z - target.conj()).norm() < tol),
        "off-diagonal pair {} / {}",
        pair[0],
        pair[1]
    );
    let exact = half_overlap_exact();
    ensure!(rho.max_abs_diff(&exact) < 1e-12, "differs from 4/11, 3/44 e^(±2πi/3)");
    let pop = rho.symmetric_population();
    ensure!((pop - 0.7273).abs() <= 5e-4, "symmetric population {pop}");
    let f = fidelity(&rho, &noon3()).unwrap();
    ensure!((f - 0.7273).abs() <= 1e-4, "N00N fidelity {f}");
    Ok(format!(
        "B_1/2 off-diagonal {:.4}, symmetric population {pop:.4}, N00N fidelity {f:.4}",
        s[(1, 0)]
    ))
}

fn span_rank() -> Check {
    let settings = standard_settings();
    let elements: usize = settings.iter().map(|s| povm_elements::<f64>(s, 3).unwrap().len()).sum();
    ensure!(elements == 48, "{elements} POVM elements");
    let rank = measurement_span_rank(&settings, 3).unwrap();
    ensure!(rank == 20, "rank {rank}");
    Ok("48 elements, rank 20".into())
}

fn probability_consistency() -> Check {
    let rho = analyze(HALF_OVERLAP);
    let p = outcome_probabilities(
        &rho,
        &WaveplateSetting {
            qwp_deg: 0.0,
            hwp_deg: 0.0,
        },
    )
    .unwrap();
    for (x, y) in p.iter().zip([0.3636, 0.1364, 0.1364, 0.3636]) {
        ensure!((x - y).abs() <= 5e-5, "probabilities {p:?}");
    }
    let row = REFERENCE_COUNTS[0];
    let total: f64 = row.iter().map(|&n| n as f64).sum();
    let mut worst: f64 = 0.0;
    for (&n, &pk) in row.iter().zip(&p) {
        let sd = (pk * (1.0 - pk) / total).sqrt();
        worst = worst.max((n as f64 / total - pk).abs() / sd);
    }
    ensure!(worst <= 4.0, "reference frequencies {worst:.2} σ away");
    Ok(format!(
        "p = ({:.4}, {:.4}, {:.4}, {:.4}), reference row within {worst:.2} σ",
        p[0], p[1], p[2], p[3]
    ))
}

fn noiseless_mle() -> Check {
    let truth = half_overlap_exact();
    let data = expected_counts(&truth, &standard_settings(), 1e4).unwrap();
    let res = mle_reconstruct::<f64>(&data, &MleOptions::default()).unwrap();
    ensure!(res.iterations <= 100_000, "{} iterations", res.iterations);
    let dev = res.estimate.max_abs_diff(&truth);
    ensure!(dev <= 1e-6, "max block deviation {dev:.2e}");
    ensure!(res.trace.windows(2).all(|w| w[1] >= w[0]), "log-likelihood decreased");
    Ok(format!(
        "max deviation {dev:.1e} after {} accepted steps, monotone",
        res.iterations
    ))
}

fn round_trip() -> Check {
    let truth = half_overlap_exact();
    let settings = standard_settings();
    let mut fids = Vec::new();
    for seed in 0..50 {
        let data = simulate_counts(&truth, &settings, 1e4, seed).unwrap();
        let res = mle_reconstruct::<f64>(&data, &MleOptions::default()).unwrap();
        fids.push(fidelity(&res.estimate, &truth).unwrap());
    }
    let min = fids.iter().cloned().fold(1.0, f64::min);
    fids.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (fids[24] + fids[25]);
    ensure!(min >= 0.99, "worst fidelity {min:.5}");
    ensure!(median >= 0.995, "median fidelity {median:.5}");
    Ok(format!("50 seeds: min fidelity {min:.5}, median {median:.5}"))
}

fn transposition(n: usize, a: usize, b: usize) -> CMatrix<f64> {
    let dim = 1 << n;
    let mut p = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        let (ba, bb) = ((s >> (n - 1 - a)) & 1, (s >> (n - 1 - b)) & 1);
        let mut t = s & !(1 << (n - 1 - a)) & !(1 << (n - 1 - b));
        t |= bb << (n - 1 - a);
        t |= ba << (n - 1 - b);
        p[(t, s)] = c(1.0, 0.0);
    }
    p
}

fn property_suites() -> Check {
    let mut rng = rng(2024);

    // twirl: idempotent, trace and positivity preserving, equal to the N! average
    for i in 0..200 {
        let n = 1 + i % 4;
        let rank = 1 + rng.random_range(0..(1usize << n));
        let rho = random_density(&mut rng, 1 << n, rank);
        let acc = accessible_projection(&rho).map_err(|e| e.to_string())?;
        let basis = SchurBasis::<f64>::new(n).unwrap();
        let full = acc.to_full(&basis);
        let again = accessible_projection(&full).map_err(|e| e.to_string())?;
        ensure!(again.max_abs_diff(&acc) < 1e-10, "twirl not idempotent (N = {n})");
        ensure!((acc.operator().trace() - 1.0).abs() < 1e-10, "twirl changed the trace");
        ensure!(acc.operator().min_eigenvalue() > -1e-10, "twirl lost positivity");
        let brute = permutation_twirl(&rho).unwrap();
        ensure!(
            max_abs_diff(&brute, &full) < 1e-10,
            "Schur twirl differs from N! average"
        );
    }

    // symmetrization under all transpositions
    let modes = ["a", "b", "c"];
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let mut text = String::new();
        for _ in 0..n {
            let terms: Vec<String> = (0..rng.random_range(1..=3))
                .map(|_| {
                    let m = modes[rng.random_range(0..3)];
                    let p = if rng.random::<bool>() { "H" } else { "V" };
                    format!("{:.3}*{m}{p}", rng.random::<f64>() + 0.1)
                })
                .collect();
            text.push_str(&format!("({})", terms.join(" + ")));
        }
        let expr = parse_operator_expression(&text, &ModeTable::new()).unwrap();
        match expand_and_symmetrize::<f64>(&expr) {
            Ok(s) => ensure!(s.symmetry_defect() <= 1e-10, "{text} is not symmetric"),
            Err(accessible_dm::Error::ZeroNorm) => {}
            Err(e) => return Err(format!("{text}: {e}")),
        }
    }

    // block pairing against the full 2^N space
    for n in 1..=4 {
        let basis = SchurBasis::<f64>::new(n).unwrap();
        for _ in 0..10 {
            let rho = random_accessible(&mut rng, n);
            let full_rho = rho.to_full(&basis);
            let s = WaveplateSetting {
                qwp_deg: rng.random_range(0.0..180.0),
                hwp_deg: rng.random_range(0.0..180.0),
            };
            let u = tensor_power(&waveplate_unitary::<f64>(&s), n);
            let p = outcome_probabilities(&rho, &s).unwrap();
            let rotated = &u * full_rho * u.adjoint();
            for (k, pk) in p.iter().enumerate() {
                let n_h = n - k;
                let brute: f64 = (0..1usize << n)
                    .filter(|x| n - x.count_ones() as usize == n_h)
                    .map(|x| rotated[(x, x)].re)
                    .sum();
                ensure!((brute - pk).abs() < 1e-10, "N = {n}: pairing {pk} vs full {brute}");
            }
        }
    }

    // Schur basis unitarity and sector invariance
    for n in 1..=7 {
        let basis = SchurBasis::<f64>::new(n).unwrap();
        let w = basis.matrix();
        let dev = (&w * w.transpose() - nalgebra::DMatrix::<f64>::identity(1 << n, 1 << n))
            .abs()
            .max();
        ensure!(dev < 1e-12, "N = {n}: unitarity defect {dev:.1e}");
        for sector in basis.sectors() {
            let cols: Vec<usize> = (sector.offset..sector.offset + sector.multiplicity * sector.block_dim()).collect();
            let q = CMatrix::from_fn(1 << n, 1 << n, |r, k| {
                c(cols.iter().map(|&l| w[(r, l)] * w[(k, l)]).sum(), 0.0)
            });
            for a in 0..n {
                for b in a + 1..n {
                    let p = transposition(n, a, b);
                    let moved = &p * &q * p.adjoint();
                    ensure!(
                        max_abs_diff(&moved, &q) < 1e-12,
                        "N = {n}: sector 2j = {} moved",
                        sector.two_j
                    );
                }
            }
        }
    }

    // outcome (2,1) at (0°, 0°) is |HHV⟩⟨HHV| + |HVH⟩⟨HVH| + |VHH⟩⟨VHH|
    let basis = SchurBasis::<f64>::new(3).unwrap();
    let e = &povm_elements::<f64>(
        &WaveplateSetting {
            qwp_deg: 0.0,
            hwp_deg: 0.0,
        },
        3,
    )
    .unwrap()[1];
    let mut expected = CMatrix::<f64>::zeros(8, 8);
    for s in [0b001, 0b010, 0b100] {
        expected[(s, s)] = Complex64::new(1.0, 0.0);
    }
    ensure!(
        max_abs_diff(&e.operator.to_full(&basis), &expected) < 1e-12,
        "(2,1) operator differs"
    );

    let mult: u128 = su2_multiplicity(3, 1).unwrap();
    ensure!(mult == 2, "mult(3, 1/2) = {mult}");
    Ok("twirl ×200, symmetrization ×100, pairing N ≤ 4, Schur N ≤ 7, (2,1) operator".into())
}

fn reports() -> Check {
    for text in [NOON3, "(aH)(aH)(aV)", "(aH + aV)(aH - aV)", "(aH)"] {
        let r = indistinguishability_report(&analyze(text), DEFAULT_VERDICT_TOL).unwrap();
        ensure!(r.verdict == Verdict::Indistinguishable, "{text:?} gave {}", r.verdict);
    }
    let r = indistinguishability_report(&analyze(HALF_OVERLAP), DEFAULT_VERDICT_TOL).unwrap();
    ensure!(
        r.verdict == Verdict::HiddenDifferencesDetected,
        "half overlap gave {}",
        r.verdict
    );
    ensure!(
        (r.symmetric_population - 0.7273).abs() <= 5e-4,
        "symmetric population {}",
        r.symmetric_population
    );
    let mixed = AccessibleDensityMatrix64::maximally_mixed(3).unwrap();
    let r2 = indistinguishability_report(&mixed, DEFAULT_VERDICT_TOL).unwrap();
    ensure!(
        r2.verdict == Verdict::HiddenDifferencesDetected,
        "maximally mixed gave {}",
        r2.verdict
    );
    Ok(format!(
        "single-mode states indistinguishable; half overlap {} at {:.4}",
        r.verdict, r.symmetric_population
    ))
}

fn main() {
    let second = Some(Duration::from_secs(1));
    let results = [
        run(1, "parameter counts", second, parameter_counts),
        run(2, "worked term", None, worked_term),
        run(3, "half-overlap state", second, full_state),
        run(4, "span rank", second, span_rank),
        run(5, "probability consistency", None, probability_consistency),
        run(6, "noiseless maximum likelihood", None, noiseless_mle),
        run(
            7,
            "simulate/reconstruct round trip",
            Some(Duration::from_secs(60)),
            round_trip,
        ),
        run(8, "property suites", None, property_suites),
        run(9, "indistinguishability reports", None, reports),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
