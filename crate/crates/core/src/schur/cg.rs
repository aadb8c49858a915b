//! Clebsch-Gordan coefficients from the Racah formula in exact rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Real;

fn factorial(n: i64) -> BigUint {
    (1..=n.max(0) as u64).fold(BigUint::one(), |acc, k| acc * k)
}

fn frac(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact `⟨j1 m1; j2 m2 | j m⟩` as `(sign, square)`, all arguments doubled.
/// The sign is `0` exactly when the coefficient vanishes.
pub fn clebsch_gordan_exact(
    two_j1: i64,
    two_m1: i64,
    two_j2: i64,
    two_m2: i64,
    two_j: i64,
    two_m: i64,
) -> (i8, BigRational) {
    let zero = (0, BigRational::zero());
    if two_m1 + two_m2 != two_m
        || two_m1.abs() > two_j1
        || two_m2.abs() > two_j2
        || two_m.abs() > two_j
        || (two_j1 + two_m1) % 2 != 0
        || (two_j2 + two_m2) % 2 != 0
        || (two_j + two_m) % 2 != 0
        || (two_j1 + two_j2 + two_j) % 2 != 0
        || two_j > two_j1 + two_j2
        || two_j < (two_j1 - two_j2).abs()
    {
        return zero;
    }
    let h = |x: i64| x / 2;
    let a = h(two_j1 + two_j2 - two_j);
    let b = h(two_j1 - two_j2 + two_j);
    let c = h(-two_j1 + two_j2 + two_j);
    let s = h(two_j1 + two_j2 + two_j) + 1;
    let j1m = h(two_j1 - two_m1);
    let j1p = h(two_j1 + two_m1);
    let j2m = h(two_j2 - two_m2);
    let j2p = h(two_j2 + two_m2);
    let jm = h(two_j - two_m);
    let jp = h(two_j + two_m);
    let x = h(two_j - two_j2 + two_m1);
    let y = h(two_j - two_j1 - two_m2);

    let prefactor = frac(
        BigUint::from((two_j + 1) as u64)
            * factorial(a)
            * factorial(b)
            * factorial(c)
            * factorial(jp)
            * factorial(jm)
            * factorial(j1m)
            * factorial(j1p)
            * factorial(j2m)
            * factorial(j2p),
        factorial(s),
    );

    let k_min = 0.max(-x).max(-y);
    let k_max = a.min(j1m).min(j2p);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(a - k)
            * factorial(j1m - k)
            * factorial(j2p - k)
            * factorial(x + k)
            * factorial(y + k);
        let term = frac(BigUint::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return zero;
    }
    let sign = if sum.is_negative() { -1 } else { 1 };
    (sign, prefactor * &sum * &sum)
}

/// Floating-point Clebsch-Gordan coefficient, `sign · sqrt(exact square)`.
pub fn clebsch_gordan<T: Real>(two_j1: i64, two_m1: i64, two_j2: i64, two_m2: i64, two_j: i64, two_m: i64) -> T {
    let (sign, sq) = clebsch_gordan_exact(two_j1, two_m1, two_j2, two_m2, two_j, two_m);
    if sign == 0 {
        return T::zero();
    }
    let mag = T::lit(sq.to_f64().expect("CG square is a finite rational")).sqrt();
    if sign < 0 {
        -mag
    } else {
        mag
    }
}
