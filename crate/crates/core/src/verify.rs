//! Named verification suites with expected verdicts, plus the discrepancy
//! ledger: printed claims that do not survive numerical evaluation, each
//! paired with the variant that does.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    bounds_scan, dlogm_dp_series, h_prime_sign, monotonicity_scan, omega, omega_prime_printed,
    EqualityKind, Sign,
};
use crate::engine::{log_upper_bound_sum, TruncationPolicy};
use crate::error::{Error, Result};
use crate::identities::{
    corollary1_check, corollary2_check_corrected, corollary2_check_printed, mn2_closed,
    remark_product, RemarkVariant, Verdict,
};
use crate::special::log_gamma;
use crate::volume::{
    ball_volume, gamma_np_factorized, log_p_gamma_side, mprod_gamma, p_product,
    pair_product_check, s_product, sigma_inequality, sigma_n, BallSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma21,
    Eq3,
    Eq4,
    Bounds,
    Monotonicity,
    Identities,
    Signs,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Lemma21,
        Suite::Eq3,
        Suite::Eq4,
        Suite::Bounds,
        Suite::Monotonicity,
        Suite::Identities,
        Suite::Signs,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma21 => "lemma21",
            Suite::Eq3 => "eq3",
            Suite::Eq4 => "eq4",
            Suite::Bounds => "bounds",
            Suite::Monotonicity => "monotonicity",
            Suite::Identities => "identities",
            Suite::Signs => "signs",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub policy: TruncationPolicy,
    /// Largest dimension in the bound scan.
    pub n_max: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            policy: TruncationPolicy::default(),
            n_max: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(id: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, passed: bool) -> Self {
        CheckOutcome {
            id: id.into(),
            expected: expected.into(),
            observed: observed.into(),
            passed,
        }
    }

    fn within(id: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(id, format!("<= {tol:e}"), format!("{value:e}"), value <= tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteResult {
    fn new(suite: Suite, checks: Vec<CheckOutcome>) -> Self {
        SuiteResult {
            suite: suite.name().into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyEntry {
    pub claim: String,
    pub printed: String,
    pub observed: String,
    pub derived_variant: Option<String>,
    pub variant_confirmed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub suites: Vec<SuiteResult>,
    pub discrepancy_ledger: Vec<DiscrepancyEntry>,
    pub passed: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub const LEMMA_XS: [f64; 5] = [0.3, 0.5, 1.0, 2.7, 8.0];
pub const LEMMA_AS: [f64; 4] = [0.0, 0.25, 0.5, 0.9];
pub const EQ3_PS: [f64; 4] = [1.25, 1.5, 2.0, 3.0];
/// `(n, m, p)` samples for the pairing identity.
pub const EQ4_SAMPLES: [(u32, u32, f64); 10] = [
    (2, 1, 2.0),
    (3, 1, 1.5),
    (3, 2, 1.25),
    (4, 2, 3.0),
    (5, 4, 3.0),
    (5, 1, 1.1),
    (6, 3, 5.0),
    (7, 5, 1.5),
    (8, 1, 10.0),
    (8, 7, 2.0),
];

/// Bound-scan p grid on `[1, 40]`: dense near 1, always containing 1 and 2.
pub fn bounds_p_grid() -> Vec<f64> {
    let mut ps: Vec<f64> = (0..=120)
        .map(|i| {
            let t = i as f64 / 120.0;
            1.0 + 39.0 * t * t
        })
        .collect();
    ps.push(2.0);
    ps.sort_by(|a, b| a.total_cmp(b));
    ps.dedup();
    ps
}

/// The 20-point grid `1.05, 1.10, ..., 2.00`.
pub fn monotonicity_p_grid() -> Vec<f64> {
    (1..=20).map(|i| 1.0 + 0.05 * i as f64).collect()
}

fn lemma21(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let grid: Vec<(f64, f64)> = LEMMA_XS
        .iter()
        .flat_map(|&x| LEMMA_AS.iter().map(move |&a| (x, a)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(x, a)| -> Result<(f64, f64, f64, Option<bool>)> {
            let prod = p_product(x, a, &cfg.policy)?;
            let log_gamma_side = log_p_gamma_side(x, a)?;
            let dev = rel(prod.value, log_gamma_side.exp());
            let bound = if a * (x + a - 1.0) >= 0.0 {
                Some(prod.log_value <= log_upper_bound_sum(a, x, 10_000)?)
            } else {
                None
            };
            Ok((x, a, dev, bound))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    for (x, a, dev, bound) in &rows {
        out.push(CheckOutcome::within(format!("P({x},{a}) vs gamma side"), *dev, 1e-7));
        if let Some(ok) = bound {
            out.push(CheckOutcome::new(
                format!("log P({x},{a}) <= log-inequality bound"),
                "holds",
                if *ok { "holds" } else { "violated" },
                *ok,
            ));
        }
    }
    out.push(CheckOutcome::within("max rel dev over grid", worst, 1e-7));
    Ok(out)
}

fn eq3(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let grid: Vec<(u32, f64)> = (2..=8)
        .flat_map(|n| EQ3_PS.iter().map(move |&p| (n, p)))
        .collect();
    grid.par_iter()
        .map(|&(n, p)| {
            let f = gamma_np_factorized(n, p, &cfg.policy)?;
            let g = log_gamma(n as f64 / p)?.exp();
            Ok(CheckOutcome::within(
                format!("Gamma({n}/{p}) factorized"),
                rel(f, g),
                1e-6,
            ))
        })
        .collect()
}

fn eq4(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    EQ4_SAMPLES
        .par_iter()
        .map(|&(n, m, p)| {
            let r = pair_product_check(n, m, p, &cfg.policy)?;
            Ok(CheckOutcome::within(
                format!("pairing n={n} m={m} p={p}"),
                r.rel_dev,
                1e-6,
            ))
        })
        .collect()
}

fn bounds(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let ns: Vec<u32> = (1..=cfg.n_max).collect();
    let ps = bounds_p_grid();
    let report = bounds_scan(&ns, &ps)?;
    let mut out = vec![CheckOutcome::new(
        format!("bounds over {}", report.grid),
        "no failures",
        format!(
            "{} failures, worst margin {:e}",
            report.failures.len(),
            report.worst_margin
        ),
        report.passed,
    )];
    for n in 2..=cfg.n_max {
        let found: Vec<(f64, EqualityKind)> = report
            .equality_cases
            .iter()
            .filter(|e| e.n == n)
            .map(|e| (e.p, e.kind))
            .collect();
        let ok = found == vec![(1.0, EqualityKind::Lower), (2.0, EqualityKind::Upper)];
        out.push(CheckOutcome::new(
            format!("equality cases n={n}"),
            "lower at p=1, upper at p=2",
            format!("{found:?}"),
            ok,
        ));
    }
    for n in 1..=10u32 {
        let s = s_product(n, &cfg.policy)?;
        let fact = log_gamma(n as f64 + 1.0)?.exp();
        out.push(CheckOutcome::within(
            format!("s_{n} * {n}! = 1"),
            (s.value * fact - 1.0).abs(),
            1e-6,
        ));
    }
    let s2 = sigma_n(2, &cfg.policy)?;
    out.push(CheckOutcome::within(
        "sigma_2 = pi^2/6 - 1",
        (s2.value - (PI * PI / 6.0 - 1.0)).abs(),
        1e-9,
    ));
    for n in 2..=10u32 {
        let q = sigma_inequality(n, &cfg.policy)?;
        out.push(CheckOutcome::new(
            format!("1/{n}! < exp(-sigma_{n})"),
            "holds",
            format!("{:e} vs {:e}", q.inv_factorial, q.exp_neg_sigma),
            q.holds,
        ));
    }
    Ok(out)
}

fn monotonicity(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let ns: Vec<u32> = (1..=8).collect();
    let report = monotonicity_scan(&ns, &monotonicity_p_grid(), &cfg.policy)?;
    Ok(vec![CheckOutcome::new(
        format!("dM/dp >= 0 and series agreement over {}", report.grid),
        "no failures",
        format!(
            "{} failures, min dlnM/dp {:e}",
            report.failures.len(),
            report.worst_margin
        ),
        report.passed,
    )])
}

fn verdict_check(id: String, expected: Verdict, observed: Verdict) -> CheckOutcome {
    CheckOutcome::new(id, expected.to_string(), observed.to_string(), expected == observed)
}

fn identities(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let policy = &cfg.policy;
    let mut out = Vec::new();
    for n in 1..=15u32 {
        out.push(CheckOutcome::within(
            format!("M({n},2) closed form = gamma route"),
            rel(mn2_closed(n)?, mprod_gamma(n, 2.0)?),
            1e-12,
        ));
    }
    let cor1 = (1..=8u32)
        .into_par_iter()
        .map(|m| corollary1_check(m, policy))
        .collect::<Result<Vec<_>>>()?;
    for (m, r) in (1..).zip(&cor1) {
        out.push(verdict_check(format!("corollary1 m={m}"), Verdict::Verified, r.verdict));
    }
    let printed = corollary2_check_printed(1, policy)?;
    out.push(verdict_check(
        "corollary2 printed m=1".into(),
        Verdict::Diverges,
        printed.verdict,
    ));
    let cor2 = (1..=6u32)
        .into_par_iter()
        .map(|m| corollary2_check_corrected(m, policy))
        .collect::<Result<Vec<_>>>()?;
    for (m, r) in (1..).zip(&cor2) {
        out.push(verdict_check(
            format!("corollary2 corrected m={m}"),
            Verdict::Verified,
            r.verdict,
        ));
    }
    let remark = remark_product(1, RemarkVariant::Printed, policy)?;
    out.push(verdict_check(
        "remark printed m=1".into(),
        Verdict::Diverges,
        remark.verdict,
    ));
    for m in 1..=6u32 {
        let r = remark_product(m, RemarkVariant::Corrected, policy)?;
        out.push(verdict_check(
            format!("remark corrected m={m}"),
            Verdict::Verified,
            r.verdict,
        ));
    }
    Ok(out)
}

fn signs(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for p in [1.0, 2.0] {
        let w = omega(p)?;
        out.push(CheckOutcome::within(format!("|omega({p})|"), w.value.abs(), 1e-14));
    }
    let w = omega(1.5)?;
    out.push(CheckOutcome::new(
        "omega(1.5) sign (printed claim: >= 0)",
        "negative, disagrees",
        format!("{:?} ({:.6}), agrees={}", w.sign, w.value, w.agrees_with_paper),
        w.sign == Sign::Negative && !w.agrees_with_paper,
    ));
    let decreasing = (1..40)
        .map(|i| 1.0 + i as f64 / 40.0)
        .map(h_prime_sign)
        .collect::<Result<Vec<_>>>()?;
    let all_neg = decreasing
        .iter()
        .all(|r| r.sign == Sign::Negative && !r.agrees_with_paper);
    out.push(CheckOutcome::new(
        "h' on (1,2) (printed claim: >= 0)",
        "negative everywhere, disagrees",
        if all_neg { "negative everywhere" } else { "not uniformly negative" },
        all_neg,
    ));
    let consistent = decreasing
        .iter()
        .all(|r| r.reference.map(|fd| Sign::classify(fd, 1e-12)) == Some(r.sign));
    out.push(CheckOutcome::new(
        "h' analytic sign = finite-difference sign",
        "consistent",
        if consistent { "consistent" } else { "inconsistent" },
        consistent,
    ));
    let wp = omega_prime_printed(2.0)?;
    out.push(CheckOutcome::new(
        "printed omega' expression at p=2 vs finite difference",
        "disagrees",
        format!(
            "printed {:.6}, fd {:.6}",
            wp.value,
            wp.reference.unwrap_or(f64::NAN)
        ),
        !wp.agrees_with_paper,
    ));
    let d = dlogm_dp_series(2, 2.0, &cfg.policy)?;
    out.push(CheckOutcome::within("|dlnM/dp(2, 2)|", d.abs(), 1e-8));
    Ok(out)
}

/// Printed claims that fail as written, with the variant that holds.
pub fn discrepancy_ledger(policy: &TruncationPolicy) -> Result<Vec<DiscrepancyEntry>> {
    let mut ledger = Vec::new();

    let v1 = ball_volume(&BallSpec::new(3, 1.0)?)?;
    ledger.push(DiscrepancyEntry {
        claim: "cross-polytope volume".into(),
        printed: "|B_1^n| = 2^n (n=3: 8)".into(),
        observed: format!("gamma formula at p=1, n=3: {v1}"),
        derived_variant: Some("|B_1^n| = 2^n / n!".into()),
        variant_confirmed: Some(rel(v1, 8.0 / 6.0) < 1e-14),
    });

    ledger.push(DiscrepancyEntry {
        claim: "one-dimensional volume product".into(),
        printed: "M(1, p) = 4^n".into(),
        observed: format!("M(1, 1.7) = {}", mprod_gamma(1, 1.7)?),
        derived_variant: Some("M(1, p) = 4".into()),
        variant_confirmed: Some(rel(mprod_gamma(1, 1.7)?, 4.0) < 1e-15),
    });

    let (n, m, p) = (5u32, 4u32, 3.0f64);
    let pq = p * p / (p - 1.0);
    let pair = pair_product_check(n, m, p, policy)?;
    ledger.push(DiscrepancyEntry {
        claim: "pairing identity prefactor".into(),
        printed: "leading factor 1/(pq)".into(),
        observed: format!(
            "n={n} m={m} p={p}: LHS {:.10}, printed RHS {:.10}",
            pair.lhs,
            pair.rhs / (pq * pq)
        ),
        derived_variant: Some("leading factor pq".into()),
        variant_confirmed: Some(pair.verdict == Verdict::Verified),
    });

    let w = omega(1.5)?;
    ledger.push(DiscrepancyEntry {
        claim: "omega >= 0 on (1, 2]".into(),
        printed: "omega(p) = p(2-p) sin(pi/p) + pi(p-1) cos(pi/p) >= 0".into(),
        observed: format!("omega(1.5) = {:.10}", w.value),
        derived_variant: None,
        variant_confirmed: None,
    });

    let h = h_prime_sign(1.5)?;
    ledger.push(DiscrepancyEntry {
        claim: "h' >= 0 on (1, 2]".into(),
        printed: "h' >= 0 with equality iff p = 2".into(),
        observed: format!("h'(1.5) = {:.10}", h.value),
        derived_variant: Some("h' <= 0 on (1, 2], zero at p = 2 (monotonicity of M still holds)".into()),
        variant_confirmed: Some(h.sign == Sign::Negative),
    });

    let wp = omega_prime_printed(2.0)?;
    ledger.push(DiscrepancyEntry {
        claim: "sign expression for omega'".into(),
        printed: "pi(1-p) sin(pi/p) + (p^2+2p-2) cos(pi/p) < 0".into(),
        observed: format!(
            "p=2: printed {:.10}, finite-difference omega' {:.10}",
            wp.value,
            wp.reference.unwrap_or(f64::NAN)
        ),
        derived_variant: Some("omega' = (p-1)[(pi^2/p^2 - 2) sin(pi/p) + (2 pi/p) cos(pi/p)]".into()),
        variant_confirmed: wp
            .reference
            .map(|fd| (fd - (PI * PI / 4.0 - 2.0)).abs() < 1e-8),
    });

    let printed = corollary2_check_printed(1, policy)?;
    let corrected = corollary2_check_corrected(1, policy)?;
    ledger.push(DiscrepancyEntry {
        claim: "odd-dimension product identity".into(),
        printed: "prod (2k+1)^(2m-1)(2k+2m+3)/(2k+2)^(2m) = (8/pi)^(m+1)/(2m+3)!!".into(),
        observed: format!(
            "m=1: product {} after {} terms (RHS {:.10}, formal gamma value {:.10})",
            printed.verdict,
            printed.terms_used.unwrap_or(0),
            printed.rhs,
            printed.formal_lhs.unwrap_or(f64::NAN)
        ),
        derived_variant: Some("prod (2k+1)^(2m-1)(2k+2m+1)/(2k+2)^(2m) = (8/pi)^m/(2m+1)!!".into()),
        variant_confirmed: Some(corrected.verdict == Verdict::Verified),
    });

    let remark = remark_product(1, RemarkVariant::Printed, policy)?;
    let remark_fixed = remark_product(1, RemarkVariant::Corrected, policy)?;
    ledger.push(DiscrepancyEntry {
        claim: "ratio product".into(),
        printed: "prod (2k+2)(2k+2m)/((2k+1)(2k+2m+3))".into(),
        observed: format!(
            "m=1: product {} (partial value {:e} after {} terms)",
            remark.verdict,
            remark.lhs,
            remark.terms_used.unwrap_or(0)
        ),
        derived_variant: Some(
            "prod (2k+2)(2k+2m)/((2k+1)(2k+2m+1)) = pi (2m+1)!!/(2^(m+2) m!)".into(),
        ),
        variant_confirmed: Some(remark_fixed.verdict == Verdict::Verified),
    });

    Ok(ledger)
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    cfg.policy.validate()?;
    if cfg.n_max == 0 {
        return Err(Error::domain("verify", "n_max must be at least 1"));
    }
    let selected: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    selected
        .into_iter()
        .map(|s| {
            let checks = match s {
                Suite::Lemma21 => lemma21(cfg)?,
                Suite::Eq3 => eq3(cfg)?,
                Suite::Eq4 => eq4(cfg)?,
                Suite::Bounds => bounds(cfg)?,
                Suite::Monotonicity => monotonicity(cfg)?,
                Suite::Identities => identities(cfg)?,
                Suite::Signs => signs(cfg)?,
                Suite::All => unreachable!(),
            };
            Ok(SuiteResult::new(s, checks))
        })
        .collect()
}

/// Runs `suite` and attaches the discrepancy ledger.
pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyOutcome> {
    let suites = run_suite(suite, cfg)?;
    let discrepancy_ledger = discrepancy_ledger(&cfg.policy)?;
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyOutcome {
        suites,
        discrepancy_ledger,
        passed,
    })
}
