//! Closed-form product identities at `p = 2`, checked numerically with a
//! verdict per identity.
//!
//! At `p = 2` the gamma-free product for `M(n, 2)` is a perfect square, so
//! its square root `Q_n = 2^(n-2) pi^(1-n/2) / Γ(n/2 + 1)` gives a closed form
//! for each dimension. Even `n = 2m` yields
//! `prod (2k+1)^(2m-2) (2k+2m) / (2k+2)^(2m-1) = (4/pi)^(m-1) / m!`, odd
//! `n = 2m+1` yields
//! `prod (2k+1)^(2m-1) (2k+2m+1) / (2k+2)^(2m) = (8/pi)^m / (2m+1)!!`.
//! The published variant with `(2k+2m+3)` in the numerator and
//! `(8/pi)^(m+1) / (2m+3)!!` on the right is kept as a separate check; its
//! factors behave like `1 + 1/(k+1)` and the product diverges.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::engine::{eval_log_product, ProductEval, TruncationPolicy};
use crate::error::{Error, Result};
use crate::special::{ln_double_factorial, log1pmx, log_gamma};
use crate::volume::h_func;

pub const DEFAULT_IDENTITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Falsified,
    Diverges,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Verified => "verified",
            Verdict::Falsified => "falsified",
            Verdict::Diverges => "diverges",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: String,
    /// Product side. For a divergent product this is the partial value at
    /// the stage where divergence was flagged.
    pub lhs: f64,
    pub rhs: f64,
    pub abs_dev: f64,
    /// `|lhs - rhs| / |rhs|`
    pub rel_dev: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub policy: TruncationPolicy,
    /// Bracket on `lhs` (linear scale) when the product route supplied one.
    pub lhs_bracket: Option<(f64, f64)>,
    pub terms_used: Option<u64>,
    /// Gamma-ratio value the product would take if its factors were
    /// balanced. Only set for products that do not converge.
    pub formal_lhs: Option<f64>,
}

impl IdentityReport {
    pub fn compare(
        identity_id: String,
        lhs: f64,
        rhs: f64,
        log_bracket: Option<(f64, f64)>,
        tolerance: f64,
        policy: &TruncationPolicy,
    ) -> Self {
        let abs_dev = (lhs - rhs).abs();
        let rel_dev = abs_dev / rhs.abs();
        IdentityReport {
            identity_id,
            lhs,
            rhs,
            abs_dev,
            rel_dev,
            verdict: if rel_dev <= tolerance {
                Verdict::Verified
            } else {
                Verdict::Falsified
            },
            tolerance,
            policy: *policy,
            lhs_bracket: log_bracket.map(|(lo, hi)| (lo.exp(), hi.exp())),
            terms_used: None,
            formal_lhs: None,
        }
    }

    fn from_product(
        identity_id: String,
        product: Result<ProductEval>,
        rhs: f64,
        policy: &TruncationPolicy,
    ) -> Result<Self> {
        match product {
            Ok(eval) => {
                let mut r = Self::compare(
                    identity_id,
                    eval.value,
                    rhs,
                    Some(eval.error_bracket),
                    DEFAULT_IDENTITY_TOL,
                    policy,
                );
                r.terms_used = Some(eval.terms_used);
                Ok(r)
            }
            Err(Error::DivergenceSuspected(partial)) => {
                let mut r = Self::compare(
                    identity_id,
                    partial.value,
                    rhs,
                    None,
                    DEFAULT_IDENTITY_TOL,
                    policy,
                );
                r.verdict = Verdict::Diverges;
                r.terms_used = Some(partial.terms_used);
                Ok(r)
            }
            Err(e) => Err(e),
        }
    }
}

fn check_m(op: &'static str, m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::domain(op, "m must be at least 1"))
    } else {
        Ok(())
    }
}

/// `ln M(n, 2) = ln[4 pi^n / (n^2 Γ(n/2)^2)]`.
pub fn log_mn2_closed(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("mn2_closed", "n must be at least 1"));
    }
    let nf = n as f64;
    Ok(2.0 * LN_2 + nf * PI.ln() - 2.0 * nf.ln() - 2.0 * log_gamma(nf / 2.0)?)
}

pub fn mn2_closed(n: u32) -> Result<f64> {
    Ok(log_mn2_closed(n)?.exp())
}

/// `sqrt(M(n,2) / (4^n h(2)^(2n-2)))`: the square root of the `p = 2`
/// product, from the closed form for `M(n, 2)`.
pub fn sqrt_p2_product_closed(n: u32) -> Result<f64> {
    let nf = n as f64;
    let log_q = 0.5 * (log_mn2_closed(n)? - nf * 2.0 * LN_2 - (2.0 * nf - 2.0) * h_func(2.0)?.ln());
    Ok(log_q.exp())
}

/// `e ln(1 - w) + ln(1 + e w)`: the linear parts cancel, leaving `O(w^2)`.
fn balanced_term(e: f64, w: f64) -> f64 {
    e * log1pmx(-w) + log1pmx(e * w)
}

pub fn corollary1_rhs(m: u32) -> Result<f64> {
    check_m("corollary1_rhs", m)?;
    let mf = m as f64;
    Ok(((mf - 1.0) * (4.0 / PI).ln() - log_gamma(mf + 1.0)?).exp())
}

/// `prod (2k+1)^(2m-2) (2k+2m) / (2k+2)^(2m-1) = (4/pi)^(m-1) / m!`.
pub fn corollary1_check(m: u32, policy: &TruncationPolicy) -> Result<IdentityReport> {
    check_m("corollary1_check", m)?;
    let e = 2.0 * m as f64 - 2.0;
    let product = if m == 1 {
        eval_log_product(|_| 0.0, policy)
    } else {
        eval_log_product(|k| balanced_term(e, 1.0 / (2.0 * k as f64 + 2.0)), policy)
    };
    IdentityReport::from_product(
        format!("corollary1(m={m})"),
        product,
        corollary1_rhs(m)?,
        policy,
    )
}

/// Printed right-hand side `(8/pi)^(m+1) / (2m+3)!!`.
pub fn corollary2_printed_rhs(m: u32) -> Result<f64> {
    check_m("corollary2_printed_rhs", m)?;
    let mf = m as f64;
    Ok(((mf + 1.0) * (8.0 / PI).ln() - ln_double_factorial(2 * m + 3)).exp())
}

/// `Γ(2)^(2m) / (Γ(3/2)^(2m-1) Γ(m + 5/2))`: what the printed product would
/// equal if its factors were balanced.
pub fn corollary2_printed_formal_lhs(m: u32) -> Result<f64> {
    check_m("corollary2_printed_formal_lhs", m)?;
    let mf = m as f64;
    Ok((-(2.0 * mf - 1.0) * log_gamma(1.5)? - log_gamma(mf + 2.5)?).exp())
}

/// The published form
/// `prod (2k+1)^(2m-1) (2k+2m+3) / (2k+2)^(2m) = (8/pi)^(m+1) / (2m+3)!!`,
/// evaluated as written.
pub fn corollary2_check_printed(m: u32, policy: &TruncationPolicy) -> Result<IdentityReport> {
    check_m("corollary2_check_printed", m)?;
    let e = 2.0 * m as f64 - 1.0;
    let product = eval_log_product(
        |k| {
            let w = 1.0 / (2.0 * k as f64 + 2.0);
            e * (-w).ln_1p() + ((e + 2.0) * w).ln_1p()
        },
        policy,
    );
    let mut r = IdentityReport::from_product(
        format!("corollary2-printed(m={m})"),
        product,
        corollary2_printed_rhs(m)?,
        policy,
    )?;
    if r.verdict == Verdict::Diverges {
        r.formal_lhs = Some(corollary2_printed_formal_lhs(m)?);
    }
    Ok(r)
}

/// `(8/pi)^m / (2m+1)!!`.
pub fn corollary2_corrected_rhs(m: u32) -> Result<f64> {
    check_m("corollary2_corrected_rhs", m)?;
    let mf = m as f64;
    Ok((mf * (8.0 / PI).ln() - ln_double_factorial(2 * m + 1)).exp())
}

/// `prod (2k+1)^(2m-1) (2k+2m+1) / (2k+2)^(2m) = (8/pi)^m / (2m+1)!!`, the
/// odd-dimension (`n = 2m+1`) square root of the `p = 2` product.
pub fn corollary2_check_corrected(m: u32, policy: &TruncationPolicy) -> Result<IdentityReport> {
    check_m("corollary2_check_corrected", m)?;
    let e = 2.0 * m as f64 - 1.0;
    let product = eval_log_product(|k| balanced_term(e, 1.0 / (2.0 * k as f64 + 2.0)), policy);
    IdentityReport::from_product(
        format!("corollary2-corrected(m={m})"),
        product,
        corollary2_corrected_rhs(m)?,
        policy,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemarkVariant {
    /// `prod (2k+2)(2k+2m) / ((2k+1)(2k+2m+3))`
    Printed,
    /// `prod (2k+2)(2k+2m) / ((2k+1)(2k+2m+1))`
    Corrected,
}

/// `Γ(3/2) Γ(m+3/2) / (Γ(2) Γ(m+1)) = pi (2m+1)!! / (2^(m+2) m!)`.
pub fn remark_corrected_closed(m: u32) -> Result<f64> {
    check_m("remark_corrected_closed", m)?;
    let mf = m as f64;
    Ok((PI.ln() + ln_double_factorial(2 * m + 1) - (mf + 2.0) * LN_2 - log_gamma(mf + 1.0)?).exp())
}

/// The ratio product of the two corollaries. The printed variant is compared
/// against the ratio of the printed right-hand sides.
pub fn remark_product(
    m: u32,
    variant: RemarkVariant,
    policy: &TruncationPolicy,
) -> Result<IdentityReport> {
    check_m("remark_product", m)?;
    let mf = m as f64;
    let (product, rhs, id) = match variant {
        RemarkVariant::Printed => (
            eval_log_product(
                |k| {
                    let kf = k as f64;
                    (1.0 / (2.0 * kf + 1.0)).ln_1p() + (-3.0 / (2.0 * kf + 2.0 * mf + 3.0)).ln_1p()
                },
                policy,
            ),
            corollary1_rhs(m)? / corollary2_printed_rhs(m)?,
            format!("remark-printed(m={m})"),
        ),
        RemarkVariant::Corrected => (
            eval_log_product(
                |k| {
                    let kf = k as f64;
                    let (lo, hi) = (2.0 * kf + 1.0, 2.0 * kf + 2.0 * mf + 1.0);
                    2.0 * mf / (lo * hi) + log1pmx(1.0 / lo) + log1pmx(-1.0 / hi)
                },
                policy,
            ),
            remark_corrected_closed(m)?,
            format!("remark-corrected(m={m})"),
        ),
    };
    IdentityReport::from_product(id, product, rhs, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::mprod_gamma;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn mn2_closed_examples() {
        assert!(rel(mn2_closed(2).unwrap(), PI * PI) < 1e-15);
        assert!(rel(mn2_closed(3).unwrap(), 16.0 * PI * PI / 9.0) < 1e-15);
        assert!(rel(mn2_closed(1).unwrap(), 4.0) < 1e-15);
        for n in 1..=15 {
            assert!(rel(mn2_closed(n).unwrap(), mprod_gamma(n, 2.0).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn corollary1_examples() {
        let r = corollary1_check(1, &policy()).unwrap();
        assert_eq!((r.lhs, r.rhs), (1.0, 1.0));
        assert_eq!(r.verdict, Verdict::Verified);
        let r = corollary1_check(2, &policy()).unwrap();
        assert!(rel(r.rhs, 2.0 / PI) < 1e-15);
        assert_eq!(r.verdict, Verdict::Verified);
        // gamma-ratio oracle: Γ(2)^3 / (Γ(3/2)^2 Γ(3))
        let oracle = (-2.0 * log_gamma(1.5).unwrap() - log_gamma(3.0).unwrap()).exp();
        assert!(rel(r.lhs, oracle) < 1e-8);
        let r = corollary1_check(3, &policy()).unwrap();
        assert!(rel(r.rhs, (4.0 / PI).powi(2) / 6.0) < 1e-15);
        assert_eq!(r.verdict, Verdict::Verified);
    }

    #[test]
    fn corollary2_printed_does_not_hold() {
        let r = corollary2_check_printed(1, &policy()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges);
        assert!(rel(r.rhs, 64.0 / (15.0 * PI * PI)) < 1e-15);
        assert!(rel(r.formal_lhs.unwrap(), 16.0 / (15.0 * PI)) < 1e-14);
        assert!(r.lhs > 10.0);
    }

    #[test]
    fn corollary2_corrected_examples() {
        let r = corollary2_check_corrected(1, &policy()).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert!(rel(r.rhs, 8.0 / (3.0 * PI)) < 1e-15);
        let r = corollary2_check_corrected(2, &policy()).unwrap();
        assert!(rel(r.rhs, (8.0 / PI).powi(2) / 15.0) < 1e-15);
        assert_eq!(r.verdict, Verdict::Verified);
    }

    #[test]
    fn corrected_rhs_matches_closed_form_route() {
        for m in 1..=8 {
            assert!(rel(corollary1_rhs(m).unwrap(), sqrt_p2_product_closed(2 * m).unwrap()) < 1e-13);
            assert!(
                rel(corollary2_corrected_rhs(m).unwrap(), sqrt_p2_product_closed(2 * m + 1).unwrap())
                    < 1e-13
            );
        }
    }

    #[test]
    fn remark_examples() {
        let r = remark_product(1, RemarkVariant::Printed, &policy()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverges);
        assert!(r.lhs < 0.01);
        let r = remark_product(1, RemarkVariant::Corrected, &policy()).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert!(rel(r.rhs, 3.0 * PI / 8.0) < 1e-15);
        let r = remark_product(2, RemarkVariant::Corrected, &policy()).unwrap();
        assert!(rel(r.rhs, 15.0 * PI / 32.0) < 1e-15);
        assert_eq!(r.verdict, Verdict::Verified);
        for m in 1..=6 {
            let ratio = corollary1_rhs(m).unwrap() / corollary2_corrected_rhs(m).unwrap();
            assert!(rel(remark_corrected_closed(m).unwrap(), ratio) < 1e-13);
        }
    }

    #[test]
    fn zero_m_rejected() {
        assert!(corollary1_check(0, &policy()).is_err());
        assert!(remark_product(0, RemarkVariant::Corrected, &policy()).is_err());
    }
}
