//! Cyclic index arithmetic and small integer helpers.

use crate::error::{Error, Result};

/// `i mod k` mapped into `[1, k]`, residue 0 becoming `k`.
pub fn cyclic_mod(i: i64, k: i64) -> Result<i64> {
    if k <= 0 {
        return Err(Error::InvalidParameter(format!("modulus must be positive, got {k}")));
    }
    let m = i.rem_euclid(k);
    Ok(if m == 0 { k } else { m })
}

/// Same as [`cyclic_mod`] for already-validated `usize` moduli.
#[inline]
pub(crate) fn wrap(i: i64, k: usize) -> usize {
    debug_assert!(k > 0);
    let m = i.rem_euclid(k as i64) as usize;
    if m == 0 {
        k
    } else {
        m
    }
}

/// The cyclic run `<a>_k, <a+1>_k, ..., <b>_k`.
pub fn cyclic_interval(a: i64, b: i64, k: i64) -> Result<Vec<i64>> {
    let start = cyclic_mod(a, k)?;
    // <b-a>_K + 1 elements, except that b == a (mod K) is the singleton run.
    let len = (b - a).rem_euclid(k) + 1;
    Ok((0..len).map(|o| wrap(start + o, k as usize) as i64).collect())
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// `C(n, k)`, zero when `k > n`. Panics on overflow of `u64`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// Signed variant used by closed forms whose top argument may go negative.
pub(crate) fn binomial_signed(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 {
        0
    } else {
        binomial(n as u64, k as u64)
    }
}
