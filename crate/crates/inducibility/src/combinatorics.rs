//! Small exact-arithmetic helpers shared across the crate.

use num::{BigInt, BigRational, BigUint, One, Zero};

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multinomial coefficient `n! / (parts[0]! · parts[1]! · …)`.
///
/// Panics if the parts do not sum to `n`.
pub fn multinomial(n: u64, parts: &[u64]) -> BigUint {
    assert_eq!(
        parts.iter().sum::<u64>(),
        n,
        "multinomial parts must sum to n"
    );
    let mut acc = factorial(n);
    for &p in parts {
        acc /= factorial(p);
    }
    acc
}

pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rational_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `base^exp` as a big integer.
pub fn big_pow(base: u64, exp: u64) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}
