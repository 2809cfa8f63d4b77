use crate::error::{Error, Result};

pub(crate) fn check_radices(radices: &[u64]) -> Result<()> {
    match radices.iter().find(|&&n| n < 2) {
        Some(&n) => Err(Error::InvalidRadix(n)),
        None => Ok(()),
    }
}

/// Product of the radices, or `None` on overflow.
pub fn radix_capacity(radices: &[u64]) -> Option<u64> {
    radices.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n))
}

/// Digits `d_1..d_L` of `t = d_1 + n_1 d_2 + n_1 n_2 d_3 + ...`, least significant first.
pub fn radix_encode(mut t: u64, radices: &[u64]) -> Result<Vec<u64>> {
    check_radices(radices)?;
    if let Some(limit) = radix_capacity(radices) {
        if t >= limit {
            return Err(Error::ValueOutOfRange { value: t, limit });
        }
    }
    Ok(radices
        .iter()
        .map(|&n| {
            let d = t % n;
            t /= n;
            d
        })
        .collect())
}

pub fn radix_decode(digits: &[u64], radices: &[u64]) -> Result<u64> {
    check_radices(radices)?;
    if digits.len() != radices.len() {
        return Err(Error::DimensionMismatch {
            expected: radices.len(),
            found: digits.len(),
        });
    }
    let mut value = 0u64;
    for (position, (&d, &n)) in digits.iter().zip(radices).enumerate().rev() {
        if d >= n {
            return Err(Error::DigitOutOfRange {
                position,
                digit: d,
                radix: n,
            });
        }
        value = value
            .checked_mul(n)
            .and_then(|v| v.checked_add(d))
            .ok_or(Error::Overflow("radix_decode"))?;
    }
    Ok(value)
}
