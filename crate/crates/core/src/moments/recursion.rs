//! Exact even/odd moment recursions and their closed-form limits.
//!
//! The identification argument reduces limiting moments of X to a linear
//! recursion in the quantities `B_{k,m}`. For even orders, with
//! `M_{2m} = lim E(X^{2m})` supplied for m < k,
//!
//! ```text
//! B_{k,0}  = 1
//! B_{k,2m} = k/(k-m) * M_{2m} - m(2m-1)/(k-m) * B_{k,2m-2}
//! M_{2k}   = (2k-1) * B_{k,2k-2}
//! ```
//!
//! and the odd chain `(2k+2-2m) B_{k,2m-1} = -(2m-1)(2m-2) B_{k,2m-3}` is
//! seeded by `B_{k,1} = 0`, so every odd limit vanishes. All arithmetic is
//! exact rational: the zero-tolerance tests would mean nothing in floating
//! point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

fn ratio(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Closed-form limiting moment of X: `(2k)!/(2^k k!)` for order `2k`, zero
/// for odd orders, computed with exact integer arithmetic.
pub fn limiting_moment(order: u32) -> BigRational {
    if order % 2 == 1 {
        return BigRational::zero();
    }
    let k = order / 2;
    let mut num = BigInt::one();
    for i in 1..=2 * k {
        num *= BigInt::from(i);
    }
    let mut den = BigInt::one();
    for i in 1..=k {
        den *= BigInt::from(i);
    }
    den *= BigInt::from(2u32).pow(k);
    BigRational::new(num, den)
}

/// Result of running the even recursion at level `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRecursionTable {
    pub k: u32,
    /// `B_{k,0}, B_{k,2}, ..., B_{k,2k-2}`.
    pub even_values: Vec<BigRational>,
    /// `B_{k,1}, B_{k,3}, ..., B_{k,2k-1}` (identically zero).
    pub odd_values: Vec<BigRational>,
}

impl MomentRecursionTable {
    /// `lim E(X^{2k}) = (2k-1) * B_{k,2k-2}`.
    pub fn final_even_moment(&self) -> BigRational {
        ratio(2 * self.k as i64 - 1) * self.even_values.last().expect("k >= 1").clone()
    }

    /// `lim E(X^{2k+1}) = B_{k,2k-1}`.
    pub fn final_odd_moment(&self) -> BigRational {
        self.odd_values.last().expect("k >= 1").clone()
    }
}

/// Run the even recursion at level `k`, given the limiting even moments
/// `input_moments[m] = lim E(X^{2m})` for `0 <= m <= k-1`.
pub fn even_recursion(k: u32, input_moments: &[BigRational]) -> Result<MomentRecursionTable> {
    if k == 0 {
        return Err(Error::Config("recursion level k must be >= 1".into()));
    }
    if input_moments.len() < k as usize {
        return Err(Error::Config(format!(
            "even recursion at k = {k} needs input moments for m = 0..{}, got {}",
            k - 1,
            input_moments.len()
        )));
    }
    let mut even_values = Vec::with_capacity(k as usize);
    for m in 0..k {
        // k - m >= 1 for m <= k - 1, so the division is always defined.
        let b = if m == 0 {
            input_moments[0].clone()
        } else {
            let prev: &BigRational = even_values.last().expect("m >= 1");
            ratio(k as i64) / ratio((k - m) as i64) * input_moments[m as usize].clone()
                - ratio((m as i64) * (2 * m as i64 - 1)) / ratio((k - m) as i64) * prev.clone()
        };
        even_values.push(b);
    }
    Ok(MomentRecursionTable {
        k,
        even_values,
        odd_values: odd_recursion(k)?,
    })
}

/// Run the odd recursion at level `k`: seeds `B_{k,1} = 0` and propagates
/// through `(2k+2-2m) B_{k,2m-1} = -(2m-1)(2m-2) B_{k,2m-3}` for m = 2..k.
pub fn odd_recursion(k: u32) -> Result<Vec<BigRational>> {
    if k == 0 {
        return Err(Error::Config("recursion level k must be >= 1".into()));
    }
    let mut values = vec![BigRational::zero()];
    for m in 2..=k as i64 {
        let denom = 2 * k as i64 + 2 - 2 * m;
        debug_assert!(denom != 0, "denominator vanishes only at m = k + 1");
        let prev = values.last().expect("seeded").clone();
        values.push(ratio(-(2 * m - 1) * (2 * m - 2)) / ratio(denom) * prev);
    }
    Ok(values)
}
