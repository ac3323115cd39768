//! Derivative and bound diagnostics for `M(n, p)`.
//!
//! The sign expressions used in the monotonicity argument are evaluated and
//! reported with an agreement flag instead of being taken as given: the
//! headline facts (monotone on `(1, 2]`, the two bounds) check out
//! numerically, while several intermediate sign claims do not.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{eval_series, TruncationPolicy};
use crate::error::{Error, Result};
use crate::identities::mn2_closed;
use crate::special::log_gamma;
use crate::volume::{h_func, holder_conjugate, mprod_gamma};

/// Values within this distance of zero are classified as zero.
pub const SIGN_ZERO_TOL: f64 = 1e-10;
/// Relative slack used by the bound checks, scaled by `M(n, 2)`.
pub const BOUND_TOL: f64 = 1e-9;
/// Relative distance at which a value counts as attaining a bound.
pub const EQUALITY_TOL: f64 = 1e-12;
/// Allowed negative excursion of `dM/dp`, relative to `M`.
pub const MONOTONE_TOL: f64 = 1e-7;
pub const SERIES_FD_REL_TOL: f64 = 1e-4;
pub const SERIES_FD_ABS_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn classify(value: f64, zero_tol: f64) -> Sign {
        if value.abs() <= zero_tol {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub value: f64,
    pub sign: Sign,
    pub claim_source: String,
    pub agrees_with_paper: bool,
    /// Independent value the sign was cross-checked against, if any.
    pub reference: Option<f64>,
}

fn interior(op: &'static str, p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::domain(op, format!("p = {p} must lie in (1, inf)")));
    }
    Ok(())
}

/// `(pq)' = p(p-2)/(p-1)^2`.
pub fn pq_derivative(p: f64) -> Result<f64> {
    interior("pq_derivative", p)?;
    Ok(p * (p - 2.0) / ((p - 1.0) * (p - 1.0)))
}

/// `d(1/(pq))/dp = -(pq)'/(pq)^2 = (2-p)/p^3`.
pub fn inv_pq_derivative(p: f64) -> Result<f64> {
    interior("inv_pq_derivative", p)?;
    Ok((2.0 - p) / (p * p * p))
}

/// `h'/h = -(pq)'/(pq) + (pi/p^2) cot(pi/p)`.
pub fn h_log_derivative(p: f64) -> Result<f64> {
    interior("h_log_derivative", p)?;
    let t = PI / p;
    Ok((2.0 - p) / (p * (p - 1.0)) + t / p * t.cos() / t.sin())
}

/// `d ln M(n,p) / dp` from the series form
/// `(2n-2) h'/h + d(1/pq)/dp * sum_k [(n-2)/g_k + n^2/r_k]`
/// with `g_k = k^2 + k + 1/(pq)` and `r_k = k^2 + nk + n^2/(pq)`.
pub fn dlogm_dp_series(n: u32, p: f64, policy: &TruncationPolicy) -> Result<f64> {
    interior("dlogm_dp_series", p)?;
    if n == 0 {
        return Err(Error::domain("dlogm_dp_series", "n must be at least 1"));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let c = holder_conjugate(p)?.inv_pq();
    let nf = n as f64;
    let series = eval_series(
        |k| {
            let kf = k as f64;
            (nf - 2.0) / (kf * kf + kf + c) + nf * nf / (kf * kf + nf * kf + nf * nf * c)
        },
        policy,
    )?;
    Ok((2.0 * nf - 2.0) * h_log_derivative(p)? + inv_pq_derivative(p)? * series.log_value)
}

pub fn default_fd_step(p: f64) -> f64 {
    1e-5 * p.max(1.0)
}

/// Central difference of `mprod_gamma` in `p`.
pub fn dm_dp_fd(n: u32, p: f64, step: Option<f64>) -> Result<f64> {
    let h = step.unwrap_or_else(|| default_fd_step(p));
    if !(h > 0.0) || !(p - h > 1.0) || !(p + h).is_finite() {
        return Err(Error::domain(
            "dm_dp_fd",
            format!("stencil [{}, {}] leaves (1, inf)", p - h, p + h),
        ));
    }
    Ok((mprod_gamma(n, p + h)? - mprod_gamma(n, p - h)?) / (2.0 * h))
}

pub fn omega_value(p: f64) -> f64 {
    let t = PI / p;
    p * (2.0 - p) * t.sin() + PI * (p - 1.0) * t.cos()
}

/// `omega(p) = p(2-p) sin(pi/p) + pi(p-1) cos(pi/p)` with the printed claim
/// `omega >= 0` on `[1, 2]`, zero only at `p = 2`.
pub fn omega(p: f64) -> Result<SignReport> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::domain("omega", format!("p = {p} must lie in [1, 2]")));
    }
    let value = omega_value(p);
    let sign = Sign::classify(value, SIGN_ZERO_TOL);
    let agrees = match sign {
        Sign::Negative => false,
        Sign::Zero => p == 1.0 || p == 2.0,
        Sign::Positive => true,
    };
    Ok(SignReport {
        value,
        sign,
        claim_source: "omega >= 0 on (1,2], equality iff p = 2".into(),
        agrees_with_paper: agrees,
        reference: None,
    })
}

pub fn omega_prime_fd(p: f64) -> f64 {
    let h = 1e-6;
    (omega_value(p + h) - omega_value(p - h)) / (2.0 * h)
}

/// The printed sign expression for `omega'`,
/// `pi(1-p) sin(pi/p) + (p^2 + 2p - 2) cos(pi/p)`, claimed negative. The
/// agreement flag compares its sign with a finite difference of `omega`.
pub fn omega_prime_printed(p: f64) -> Result<SignReport> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::domain(
            "omega_prime_printed",
            format!("p = {p} must lie in (1, 2]"),
        ));
    }
    let t = PI / p;
    let value = PI * (1.0 - p) * t.sin() + (p * p + 2.0 * p - 2.0) * t.cos();
    let sign = Sign::classify(value, SIGN_ZERO_TOL);
    let fd = omega_prime_fd(p);
    Ok(SignReport {
        value,
        sign,
        claim_source: "sgn(omega') = sgn[pi(1-p) sin(pi/p) + (p^2+2p-2) cos(pi/p)] < 0".into(),
        agrees_with_paper: sign == Sign::classify(fd, 1e-8),
        reference: Some(fd),
    })
}

/// Sign of `h'(p)`, computed as `h * h'/h` and cross-checked by a central
/// difference of `h_func` (stored in `reference`). The printed claim is
/// `h' >= 0` on `(1, 2]`; no claim exists beyond 2.
pub fn h_prime_sign(p: f64) -> Result<SignReport> {
    interior("h_prime_sign", p)?;
    let value = h_func(p)? * h_log_derivative(p)?;
    let sign = Sign::classify(value, SIGN_ZERO_TOL);
    let step = 1e-6 * p;
    let fd = (h_func(p + step)? - h_func(p - step)?) / (2.0 * step);
    let agrees = if p <= 2.0 {
        match sign {
            Sign::Positive => true,
            Sign::Zero => p == 2.0,
            Sign::Negative => false,
        }
    } else {
        true
    };
    Ok(SignReport {
        value,
        sign,
        claim_source: "h' >= 0 on (1,2], equality iff p = 2".into(),
        agrees_with_paper: agrees,
        reference: Some(fd),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Lower,
    Upper,
    Monotone,
    SeriesAgreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub n: u32,
    pub p: f64,
    pub check: CheckKind,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualityKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualityCase {
    pub n: u32,
    pub p: f64,
    pub kind: EqualityKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid: String,
    pub points: usize,
    pub worst_margin: f64,
    pub failures: Vec<Failure>,
    pub equality_cases: Vec<EqualityCase>,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerificationReport {
    fn assemble(grid: String, tolerance: f64, parts: Vec<PointOutcome>) -> Self {
        let points = parts.len();
        let worst_margin = parts
            .iter()
            .map(|o| o.margin)
            .fold(f64::INFINITY, f64::min);
        let mut failures = Vec::new();
        let mut equality_cases = Vec::new();
        for o in parts {
            failures.extend(o.failures);
            equality_cases.extend(o.equalities);
        }
        let passed = failures.is_empty();
        VerificationReport {
            grid,
            points,
            worst_margin,
            failures,
            equality_cases,
            tolerance,
            passed,
        }
    }
}

struct PointOutcome {
    margin: f64,
    failures: Vec<Failure>,
    equalities: Vec<EqualityCase>,
}

fn log_factorial(n: u32) -> Result<f64> {
    log_gamma(n as f64 + 1.0)
}

fn bounds_point(n: u32, p: f64) -> Result<PointOutcome> {
    let m = mprod_gamma(n, p)?;
    let lower = (n as f64 * 4f64.ln() - log_factorial(n)?).exp();
    let upper = mn2_closed(n)?;
    let tol = BOUND_TOL * upper;
    let mut failures = Vec::new();
    if m < lower - tol {
        failures.push(Failure {
            n,
            p,
            check: CheckKind::Lower,
            observed: m,
            bound: lower,
        });
    }
    if m > upper + tol {
        failures.push(Failure {
            n,
            p,
            check: CheckKind::Upper,
            observed: m,
            bound: upper,
        });
    }
    let mut equalities = Vec::new();
    if (m - lower).abs() <= EQUALITY_TOL * lower {
        equalities.push(EqualityCase {
            n,
            p,
            kind: EqualityKind::Lower,
        });
    }
    if (m - upper).abs() <= EQUALITY_TOL * upper {
        equalities.push(EqualityCase {
            n,
            p,
            kind: EqualityKind::Upper,
        });
    }
    Ok(PointOutcome {
        margin: ((m - lower) / upper).min((upper - m) / upper),
        failures,
        equalities,
    })
}

/// Single-point check of `4^n/n! <= M(n,p) <= M(n,2)`.
pub fn check_bounds(n: u32, p: f64) -> Result<VerificationReport> {
    let outcome = bounds_point(n, p)?;
    Ok(VerificationReport::assemble(
        format!("n={n}, p={p}"),
        BOUND_TOL,
        vec![outcome],
    ))
}

fn grid_points(ns: &[u32], ps: &[f64]) -> Vec<(u32, f64)> {
    ns.iter()
        .flat_map(|&n| ps.iter().map(move |&p| (n, p)))
        .collect()
}

fn describe(ns: &[u32], ps: &[f64]) -> String {
    let (nmin, nmax) = (ns.iter().min(), ns.iter().max());
    let pmin = ps.iter().copied().fold(f64::INFINITY, f64::min);
    let pmax = ps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!(
        "n in [{}, {}] ({} values) x p in [{pmin}, {pmax}] ({} values)",
        nmin.copied().unwrap_or(0),
        nmax.copied().unwrap_or(0),
        ns.len(),
        ps.len()
    )
}

/// Bound check over a grid; points are evaluated in parallel and reported
/// in grid order.
pub fn bounds_scan(ns: &[u32], ps: &[f64]) -> Result<VerificationReport> {
    let parts = grid_points(ns, ps)
        .par_iter()
        .map(|&(n, p)| bounds_point(n, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::assemble(describe(ns, ps), BOUND_TOL, parts))
}

fn monotone_point(n: u32, p: f64, policy: &TruncationPolicy) -> Result<PointOutcome> {
    let m = mprod_gamma(n, p)?;
    let fd = dm_dp_fd(n, p, None)?;
    let series = dlogm_dp_series(n, p, policy)?;
    let fd_log = fd / m;
    let mut failures = Vec::new();
    if fd < -MONOTONE_TOL * m {
        failures.push(Failure {
            n,
            p,
            check: CheckKind::Monotone,
            observed: fd,
            bound: -MONOTONE_TOL * m,
        });
    }
    let allowed = SERIES_FD_ABS_FLOOR.max(SERIES_FD_REL_TOL * series.abs());
    if (series - fd_log).abs() > allowed {
        failures.push(Failure {
            n,
            p,
            check: CheckKind::SeriesAgreement,
            observed: series,
            bound: fd_log,
        });
    }
    Ok(PointOutcome {
        margin: fd_log,
        failures,
        equalities: Vec::new(),
    })
}

/// Checks `dM/dp >= -tol * M` by finite differences and the agreement of
/// the series log-derivative with `(dM/dp)/M` over `n x p`, `p in (1, 2]`.
pub fn monotonicity_scan(
    ns: &[u32],
    ps: &[f64],
    policy: &TruncationPolicy,
) -> Result<VerificationReport> {
    if let Some(&bad) = ps.iter().find(|&&p| !(p > 1.0 && p <= 2.0)) {
        return Err(Error::domain(
            "monotonicity_scan",
            format!("grid point p = {bad} outside (1, 2]"),
        ));
    }
    let parts = grid_points(ns, ps)
        .par_iter()
        .map(|&(n, p)| monotone_point(n, p, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::assemble(describe(ns, ps), MONOTONE_TOL, parts))
}
