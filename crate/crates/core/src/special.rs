//! Real-valued special functions: log-gamma, shifted and double factorials,
//! and the limit-definition gamma sequence used as an independent oracle.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

fn check_finite(op: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("non-finite argument {x}")))
    }
}

/// `ln Γ(x)` for `x > 0`.
///
/// Backed by the fdlibm `lgamma` port in `libm`, which handles the zeros of
/// `ln Γ` at 1 and 2 with dedicated expansions, so the relative error stays
/// small across `[1e-3, 1e3]`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_finite("log_gamma", x)?;
    if x <= 0.0 {
        return Err(Error::domain("log_gamma", format!("x = {x} must be positive")));
    }
    Ok(libm::lgamma(x))
}

/// `ln (z)_k` where `(z)_k = z (z+1) ... (z+k-1)` and `(z)_0 = 1`.
pub fn pochhammer_log(z: f64, k: u64) -> Result<f64> {
    check_finite("pochhammer_log", z)?;
    if k == 0 {
        return Ok(0.0);
    }
    if z <= 0.0 {
        return Err(Error::domain(
            "pochhammer_log",
            format!("factor z = {z} is not positive"),
        ));
    }
    let mut acc = NeumaierSum::new();
    for j in 0..k {
        acc += (z + j as f64).ln();
    }
    Ok(acc.value())
}

/// `ln k!` by direct summation of logarithms (no gamma-function call).
pub fn log_factorial_direct(k: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    for j in 2..=k {
        acc += (j as f64).ln();
    }
    acc.value()
}

/// The `K`-th element of `K^(z-1) K! / (z)_K`, which tends to `Γ(z)` with
/// error `~ z(z-1)/(2K)`. No acceleration is applied.
pub fn gamma_limit(z: f64, k: u64) -> Result<f64> {
    check_finite("gamma_limit", z)?;
    if z <= 0.0 {
        return Err(Error::domain("gamma_limit", format!("z = {z} must be positive")));
    }
    if k == 0 {
        return Err(Error::domain("gamma_limit", "K must be at least 1"));
    }
    let kf = k as f64;
    let log_seq = (z - 1.0) * kf.ln() + log_factorial_direct(k) - pochhammer_log(z, k)?;
    Ok(log_seq.exp())
}

/// Largest `n` whose double factorial fits in a `u64`.
pub const DOUBLE_FACTORIAL_EXACT_MAX: u32 = 33;

/// `n!! = n (n-2) (n-4) ...`, exact for `n <= 33`; `None` beyond.
pub fn double_factorial(n: u32) -> Option<u64> {
    if n > DOUBLE_FACTORIAL_EXACT_MAX {
        return None;
    }
    let mut acc: u64 = 1;
    let mut j = n;
    while j > 1 {
        acc = acc.checked_mul(j as u64)?;
        j -= 2;
    }
    Some(acc)
}

pub fn ln_double_factorial(n: u32) -> f64 {
    if let Some(v) = double_factorial(n) {
        return (v as f64).ln();
    }
    let mut acc = NeumaierSum::new();
    let mut j = n;
    while j > 1 {
        acc += (j as f64).ln();
        j -= 2;
    }
    acc.value()
}

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u32, k: u32) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at each step.
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// `ln(1 + x) - x`, accurate in the relative sense for small `|x|`.
pub fn log1pmx(x: f64) -> f64 {
    if x.abs() < 0.125 {
        // -x^2/2 + x^3/3 - ... ; 22 terms put the truncation below 1e-19 relative.
        let mut poly = 0.0;
        for j in (2..=23).rev() {
            let c = if j % 2 == 0 { -1.0 } else { 1.0 } / j as f64;
            poly = c + x * poly;
        }
        // poly now holds sum_{j>=2} c_j x^(j-2)
        x * x * poly
    } else {
        x.ln_1p() - x
    }
}
