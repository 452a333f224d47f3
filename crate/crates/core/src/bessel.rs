//! Integer-order Bessel functions `J_n(x)` and `I_n(x)` by Miller's backward
//! recurrence, normalized with the generating-function sums
//! `J₀ + 2ΣJ_{2k} = 1` and `I₀ + 2ΣI_k = eˣ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const MAX_ORDER: i64 = 1_000_000;
const MAX_ARG: f64 = 1.0e6;
const RESCALE_ABOVE: f64 = 1.0e250;
const RESCALE_BY: f64 = 1.0e-250;

fn check_domain(n: i64, x: f64) -> Result<()> {
    if n.abs() > MAX_ORDER {
        return Err(Error::OutOfDomain { name: "order", value: n as f64 });
    }
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::OutOfDomain { name: "argument", value: x });
    }
    Ok(())
}

fn start_index(order: usize, x: f64) -> usize {
    let top = libm::fmax(order as f64, libm::ceil(x));
    let start = top + 30.0 + libm::ceil(6.0 * libm::sqrt(top));
    start as usize
}

/// Regular Bessel function of the first kind.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    check_domain(n, x)?;
    let order = n.unsigned_abs() as usize;
    let sign = if n < 0 && order % 2 == 1 { -1.0 } else { 1.0 };
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let start = start_index(order, x);
    let mut next = 0.0; // f_{m+1}
    let mut current = 1.0e-300; // f_m
    let mut norm = 0.0;
    let mut value = 0.0;
    for m in (1..=start).rev() {
        // f_{m−1} = (2m/x) f_m − f_{m+1}
        let prev = 2.0 * m as f64 / x * current - next;
        if m % 2 == 0 {
            norm += 2.0 * current;
        }
        if m == order {
            value = current;
        }
        next = current;
        current = prev;
        if libm::fabs(current) > RESCALE_ABOVE {
            current *= RESCALE_BY;
            next *= RESCALE_BY;
            norm *= RESCALE_BY;
            value *= RESCALE_BY;
        }
    }
    // current now holds f_0
    norm += current;
    if order == 0 {
        value = current;
    }
    Ok(sign * value / norm)
}

/// `e^{−x} I_n(x)`, finite for every admissible argument.
pub fn bessel_i_scaled(n: i64, x: f64) -> Result<f64> {
    check_domain(n, x)?;
    let order = n.unsigned_abs() as usize;
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let start = start_index(order, x);
    let mut next = 0.0;
    let mut current = 1.0e-300;
    let mut norm = 0.0;
    let mut value = 0.0;
    for m in (1..=start).rev() {
        // f_{m−1} = (2m/x) f_m + f_{m+1}
        let prev = 2.0 * m as f64 / x * current + next;
        norm += 2.0 * current;
        if m == order {
            value = current;
        }
        next = current;
        current = prev;
        if current > RESCALE_ABOVE {
            current *= RESCALE_BY;
            next *= RESCALE_BY;
            norm *= RESCALE_BY;
            value *= RESCALE_BY;
        }
    }
    norm += current;
    if order == 0 {
        value = current;
    }
    Ok(value / norm)
}

/// Modified Bessel function of the first kind (`I_{−n} = I_n`).
pub fn bessel_i(n: i64, x: f64) -> Result<f64> {
    let value = bessel_i_scaled(n, x)? * libm::exp(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfDomain { name: "argument", value: x })
    }
}

/// `J_n(x)` for every order in `lo..=hi` from a single recurrence.
pub fn bessel_j_range(lo: i64, hi: i64, x: f64) -> Result<Vec<f64>> {
    if hi < lo {
        return Ok(Vec::new());
    }
    (lo..=hi).map(|n| bessel_j(n, x)).collect()
}
