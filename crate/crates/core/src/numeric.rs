//! Small exact-arithmetic helpers shared across modules.

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= BigUint::from(i);
    }
    acc
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num::integer::binomial(BigUint::from(n), BigUint::from(k))
}

/// Natural log of a big natural number, exact to double precision even far
/// outside f64 range. ln(0) is negative infinity.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return (x.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_u64().expect("shifted to 53 bits") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Convert an exact rational to f64, tolerating operands far outside f64
/// range by shifting numerator and denominator together.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = (nb.max(db) - 500).max(0) as u64;
    let n2 = (num >> shift).to_f64().unwrap_or(f64::NAN);
    let d2 = (den >> shift).to_f64().unwrap_or(f64::NAN);
    if d2 == 0.0 {
        // Denominator vanished under the shift: the value is enormous.
        return if num.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    n2 / d2
}

pub fn big_ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
