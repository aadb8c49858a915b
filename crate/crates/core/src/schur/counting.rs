//! Exact dimension counting for SU(d) ⊗ S_N decompositions.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::Partition;
use crate::{Error, Result};

fn to_u128(x: BigUint, what: &'static str) -> Result<u128> {
    x.to_u128().ok_or(Error::Overflow(what))
}

fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    to_u128(big_binomial(n, k), "binomial coefficient")
}

/// Number of copies of spin `j` in `(C²)^⊗N`: `C(N, N/2−j) − C(N, N/2−j−1)`.
/// Returns 0 for spins that do not occur.
pub fn su2_multiplicity(n: usize, two_j: usize) -> Result<u128> {
    if n == 0 {
        return Err(Error::ZeroParticles);
    }
    if two_j > n || !(n - two_j).is_multiple_of(2) {
        return Ok(0);
    }
    let k = ((n - two_j) / 2) as u64;
    let n = n as u64;
    let lower = if k == 0 { 0 } else { binomial(n, k - 1)? };
    Ok(binomial(n, k)? - lower)
}

/// `2j` values occurring for `N` qubits, largest first.
pub fn spin_sectors(n: usize) -> Vec<usize> {
    (0..=n).rev().filter(|t| (n - t).is_multiple_of(2)).collect()
}

/// Dimension of the U(d) irrep `λ` from the Weyl product formula
/// `Π_{i<j} (λᵢ − λⱼ + j − i)/(j − i)`.
pub fn weyl_dimension(lambda: &Partition, d: usize) -> Result<u128> {
    if d == 0 {
        return Err(Error::ZeroLevels);
    }
    if lambda.len() > d {
        return Err(Error::MalformedPartition(
            lambda.parts().to_vec(),
            "more rows than levels",
        ));
    }
    let rows = lambda.padded(d);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        for j in i + 1..d {
            num *= BigUint::from(rows[i] - rows[j] + j - i);
            den *= BigUint::from(j - i);
        }
    }
    to_u128(num / den, "Weyl dimension")
}

/// Dimension of the symmetric subspace of `(C^d)^⊗N`: `C(N+d−1, N)`.
pub fn symmetric_dimension(n: usize, d: usize) -> Result<u128> {
    if n == 0 {
        return Err(Error::ZeroParticles);
    }
    if d == 0 {
        return Err(Error::ZeroLevels);
    }
    binomial((n + d - 1) as u64, n as u64)
}

/// Real parameters of an accessible density matrix, `C(N+d²−1, N)`.
pub fn accessible_param_count(n: usize, d: usize) -> Result<u128> {
    if n == 0 {
        return Err(Error::ZeroParticles);
    }
    if d == 0 {
        return Err(Error::ZeroLevels);
    }
    let d2 = d.checked_mul(d).ok_or(Error::Overflow("d²"))?;
    let count = binomial((n + d2 - 1) as u64, n as u64)?;
    if d <= 4 && n <= 8 {
        let mut sum = 0u128;
        for p in partitions(n, d) {
            let w = weyl_dimension(&p, d)?;
            sum += w * w;
        }
        debug_assert_eq!(sum, count, "Σ dim² disagrees with C(N+d²−1, N)");
        if sum != count {
            return Err(Error::Invalid(format!(
                "Σ dim² = {sum} but C(N+d²−1,N) = {count} for N={n}, d={d}"
            )));
        }
    }
    Ok(count)
}

/// Partitions of `n` into at most `max_parts` rows, lexicographically
/// decreasing: `(n), (n−1,1), (n−2,2), (n−2,1,1), …`.
pub fn partitions(n: usize, max_parts: usize) -> Vec<Partition> {
    fn rec(rest: usize, cap: usize, parts_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if parts_left == 0 {
            return;
        }
        for first in (1..=cap.min(rest)).rev() {
            cur.push(first);
            rec(rest - first, first, parts_left - 1, cur, out);
            cur.pop();
        }
    }
    if n == 0 || max_parts == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(n, n, max_parts, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|p| Partition::new(p).expect("generated partitions are valid"))
        .collect()
}
