//! Test-only oracles, written independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos `ln Γ(x)` for `x > 0`, reflected below 1/2.
pub fn lanczos_lgamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - lanczos_lgamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn double_factorial(n: u32) -> f64 {
    (1..=n).rev().step_by(2).map(f64::from).product()
}

/// `Γ(n/2)` for integer `n >= 1` from factorials and double factorials.
pub fn gamma_half_int(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        factorial(n / 2 - 1)
    } else {
        // Γ(k + 1/2) = (2k-1)!! sqrt(pi) / 2^k
        let k = (n - 1) / 2;
        let df = if k == 0 { 1.0 } else { double_factorial(2 * k - 1) };
        df / 2f64.powi(k as i32) * PI.sqrt()
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
