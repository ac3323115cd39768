//! Unit p-ball volumes and the volume product `M(n, p) = |B_p^n| |B_q^n|`,
//! evaluated through gamma functions and through the gamma-free infinite
//! product, together with the auxiliary products those routes rely on.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::engine::{eval_log_product, ProductEval, TruncationPolicy};
use crate::error::{Error, Result};
use crate::identities::{IdentityReport, DEFAULT_IDENTITY_TOL};
use crate::special::{binomial, log1pmx, log_gamma};
use crate::sum::NeumaierSum;

const LN_4: f64 = 2.0 * LN_2;

/// A Hölder-conjugate pair `1/p + 1/q = 1` on `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderPair {
    p: f64,
    q: f64,
}

impl HolderPair {
    pub fn new(p: f64) -> Result<Self> {
        holder_conjugate(p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `1/p`, zero at `p = inf`.
    pub fn inv_p(&self) -> f64 {
        if self.p.is_infinite() {
            0.0
        } else {
            1.0 / self.p
        }
    }

    /// `1/q = (p - 1)/p`, computed without going through `q`.
    pub fn inv_q(&self) -> f64 {
        if self.p.is_infinite() {
            1.0
        } else {
            (self.p - 1.0) / self.p
        }
    }

    /// `1/(pq)`.
    pub fn inv_pq(&self) -> f64 {
        self.inv_p() * self.inv_q()
    }

    pub fn conjugate(&self) -> HolderPair {
        HolderPair {
            p: self.q,
            q: self.p,
        }
    }

    pub fn is_boundary(&self) -> bool {
        self.p == 1.0 || self.p.is_infinite()
    }
}

pub fn holder_conjugate(p: f64) -> Result<HolderPair> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::domain("holder_conjugate", format!("p = {p} must be >= 1")));
    }
    let q = if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    };
    Ok(HolderPair { p, q })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub n: u32,
    pub pair: HolderPair,
}

impl BallSpec {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("BallSpec", "dimension n must be at least 1"));
        }
        Ok(BallSpec {
            n,
            pair: holder_conjugate(p)?,
        })
    }
}

/// `ln |B_p^n| = n ln 2 + n ln Γ(1 + 1/p) - ln Γ(1 + n/p)`.
pub fn log_ball_volume(spec: &BallSpec) -> Result<f64> {
    let n = spec.n as f64;
    let inv_p = spec.pair.inv_p();
    if inv_p == 0.0 {
        return Ok(n * LN_2);
    }
    Ok(n * LN_2 + n * log_gamma(1.0 + inv_p)? - log_gamma(1.0 + n * inv_p)?)
}

/// Volume of the unit p-ball. At `p = 1` this is the cross-polytope volume `2^n / n!`.
pub fn ball_volume(spec: &BallSpec) -> Result<f64> {
    if spec.pair.p().is_infinite() && spec.n < 1024 {
        return Ok(2f64.powi(spec.n as i32));
    }
    finite_exp("ball_volume", log_ball_volume(spec)?)
}

fn finite_exp(what: &'static str, log_value: f64) -> Result<f64> {
    let v = log_value.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { what, log_value })
    }
}

fn check_dim(op: &'static str, n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::domain(op, "dimension n must be at least 1"))
    } else {
        Ok(())
    }
}

pub fn log_mprod_gamma(n: u32, p: f64) -> Result<f64> {
    let spec = BallSpec::new(n, p)?;
    let dual = BallSpec {
        n,
        pair: spec.pair.conjugate(),
    };
    Ok(log_ball_volume(&spec)? + log_ball_volume(&dual)?)
}

/// Reference evaluation of the volume product through gamma functions.
pub fn mprod_gamma(n: u32, p: f64) -> Result<f64> {
    finite_exp("mprod_gamma", log_mprod_gamma(n, p)?)
}

fn check_lemma_region(op: &'static str, x: f64, a: f64) -> Result<()> {
    if !(x.is_finite() && a.is_finite()) || x <= 0.0 || !(0.0..1.0).contains(&a) {
        return Err(Error::domain(
            op,
            format!("need x > 0 and 0 <= a < 1, got x = {x}, a = {a}"),
        ));
    }
    Ok(())
}

/// `P(x, a) = prod_k k(k+x-1) / ((k-a)(k+x+a-1))`.
///
/// Each factor equals `1 + a(x+a-1) / ((k-a)(k+x+a-1))`, which is the form
/// summed here.
pub fn p_product(x: f64, a: f64, policy: &TruncationPolicy) -> Result<ProductEval> {
    check_lemma_region("p_product", x, a)?;
    let shift = a * (x + a - 1.0);
    let b = x + a - 1.0;
    eval_log_product(
        |k| {
            let kf = k as f64;
            (shift / ((kf - a) * (kf + b))).ln_1p()
        },
        policy,
    )
}

pub fn log_p_gamma_side(x: f64, a: f64) -> Result<f64> {
    check_lemma_region("p_gamma_side", x, a)?;
    Ok(log_gamma(1.0 - a)? + log_gamma(x + a)? - log_gamma(x)?)
}

/// `Γ(1-a) Γ(x+a) / Γ(x)`.
pub fn p_gamma_side(x: f64, a: f64) -> Result<f64> {
    finite_exp("p_gamma_side", log_p_gamma_side(x, a)?)
}

fn interior_pair(op: &'static str, p: f64) -> Result<HolderPair> {
    let pair = holder_conjugate(p)?;
    if pair.is_boundary() {
        return Err(Error::domain(op, format!("p = {p} must lie in (1, inf)")));
    }
    Ok(pair)
}

/// `ln Γ(n/p)` assembled as `ln Γ(1/p) - (n-1) ln Γ(1/q) + sum_m ln P(m/p, 1/p)`.
pub fn log_gamma_np_factorized(n: u32, p: f64, policy: &TruncationPolicy) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("gamma_np_factorized", "n must be at least 2"));
    }
    let pair = interior_pair("gamma_np_factorized", p)?;
    let (ip, iq) = (pair.inv_p(), pair.inv_q());
    let mut acc = NeumaierSum::new();
    acc += log_gamma(ip)?;
    acc += -((n - 1) as f64) * log_gamma(iq)?;
    for m in 1..n {
        acc += p_product((n - m) as f64 * ip, ip, policy)?.log_value;
    }
    Ok(acc.value())
}

pub fn gamma_np_factorized(n: u32, p: f64, policy: &TruncationPolicy) -> Result<f64> {
    finite_exp("gamma_np_factorized", log_gamma_np_factorized(n, p, policy)?)
}

/// Checks the pairing identity
/// `P(j/p, 1/p) P(j/q, 1/q) = pq (j/(j+1))^2 prod_k (k+1)^2/g_k * r_k(j)/r_k(j+1)`
/// with `j = n - m`, `r_k(j) = k^2 + jk + j^2/(pq)` and `g_k = r_k(1)`.
///
/// The leading factor is `pq`: re-indexing the left side from `k = 0`
/// produces `(j/(j+1))^2 / c` with `c = 1/(pq)`.
pub fn pair_product_check(
    n: u32,
    m: u32,
    p: f64,
    policy: &TruncationPolicy,
) -> Result<IdentityReport> {
    if n < 2 || m == 0 || m >= n {
        return Err(Error::domain(
            "pair_product_check",
            format!("need n >= 2 and 1 <= m <= n-1, got n = {n}, m = {m}"),
        ));
    }
    let pair = interior_pair("pair_product_check", p)?;
    let (ip, iq) = (pair.inv_p(), pair.inv_q());
    let c = pair.inv_pq();
    let j = (n - m) as f64;

    let left = p_product(j * ip, ip, policy)?.log_value + p_product(j * iq, iq, policy)?.log_value;

    let big = j + 1.0;
    let (c2, c1, c0) = (
        big * (1.0 - 2.0 * c),
        big * (big * c + 1.0 - 3.0 * c),
        c * (big * big - (big * big + 2.0 * big - 1.0) * c),
    );
    let right_prod = eval_log_product(
        |k| {
            let kf = k as f64;
            let g = kf * kf + kf + c;
            let r_next = kf * kf + big * kf + big * big * c;
            let u = (kf + 1.0 - c) / g;
            let v = -(kf + (2.0 * big - 1.0) * c) / r_next;
            let linear = ((c2 * kf + c1) * kf + c0) / (g * r_next);
            linear + log1pmx(u) + log1pmx(v)
        },
        policy,
    )?;
    let log_prefactor = -c.ln() + 2.0 * (j / big).ln();
    let right = right_prod.shifted(log_prefactor);

    Ok(IdentityReport::compare(
        format!("pairing(n={n},m={m},p={p})"),
        left.exp(),
        right.value,
        Some(right.error_bracket),
        DEFAULT_IDENTITY_TOL,
        policy,
    ))
}

/// `h(p) = pi / (pq sin(pi/p)) = Γ(1 + 1/p) Γ(1 + 1/q)`, equal to 1 at `p in {1, inf}`.
pub fn h_func(p: f64) -> Result<f64> {
    let pair = holder_conjugate(p)?;
    // sin(pi/p) = sin(pi/q); use the smaller argument to keep pi*s/sin(pi*s) accurate.
    let s = pair.inv_p().min(pair.inv_q());
    if s == 0.0 {
        return Ok(1.0);
    }
    let other = 1.0 - s;
    Ok(PI * s / (PI * s).sin() * other)
}

/// Log-term of the gamma-free product for `M(n, p)` with `c = 1/(pq)`:
/// `ln[(k^2+k+c)^(n-2) (k^2+nk+n^2 c) / (k+1)^(2n-2)]`.
///
/// Each quadratic is paired with `(k+1)^2`; the `1/(k+1)` pieces cancel in
/// closed form and only the `O(1/k^2)` remainder is evaluated numerically.
fn mprod_log_term(n: u32, c: f64, k: u64) -> f64 {
    let nf = n as f64;
    let kp1 = k as f64 + 1.0;
    let sq = kp1 * kp1;
    let u = (kp1 - c) / sq;
    let v = ((nf - 2.0) * (kp1 - 1.0) + nf * nf * c - 1.0) / sq;
    let linear = ((nf * nf + nf - 2.0) * c - (nf - 1.0)) / sq;
    linear + (nf - 2.0) * log1pmx(-u) + log1pmx(v)
}

/// Gamma-free evaluation of `M(n, p)`:
/// `4^n h(p)^(2n-2) prod_k (k^2+k+1/pq)^(n-2) (k^2+nk+n^2/pq) / (k+1)^(2n-2)`.
///
/// The returned evaluation describes `M` itself (log-value, bracket and
/// value include the prefactor). At `p in {1, inf}` the limit `4^n s_n` is used.
pub fn mprod_product(n: u32, p: f64, policy: &TruncationPolicy) -> Result<ProductEval> {
    check_dim("mprod_product", n)?;
    let pair = holder_conjugate(p)?;
    let nf = n as f64;
    if pair.is_boundary() {
        let s = s_product(n, policy)?;
        let value = 4f64.powi(n as i32) * s.value;
        let mut out = s.shifted(nf * LN_4);
        out.value = value;
        return Ok(out);
    }
    let c = pair.inv_pq();
    let h = h_func(p)?;
    let prod = if n == 1 {
        eval_log_product(|_| 0.0, policy)?
    } else {
        eval_log_product(|k| mprod_log_term(n, c, k), policy)?
    };
    let exponent = 2 * n as i32 - 2;
    let value = 4f64.powi(n as i32) * h.powi(exponent) * prod.value;
    let mut out = prod.shifted(nf * LN_4 + exponent as f64 * h.ln());
    if value.is_finite() {
        out.value = value;
    }
    Ok(out)
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    match binomial(n, k) {
        Some(v) => v as f64,
        None => {
            let (nf, kf) = (n as f64, k as f64);
            (libm::lgamma(nf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0)).exp()
        }
    }
}

/// `s_n = prod_k k^(n-1) (k+n) / (k+1)^n`, the `p -> 1` limit of the product
/// in `M(n, p) / 4^n`. Factors are written `1 - d_k` with
/// `d_k = [(k+1)^n - k^n - n k^(n-1)] / (k+1)^n = sum_{j>=2} C(n,j) k^(n-j) / (k+1)^n`.
pub fn s_product(n: u32, policy: &TruncationPolicy) -> Result<ProductEval> {
    check_dim("s_product", n)?;
    if n == 1 {
        return eval_log_product(|_| 0.0, policy);
    }
    let coeffs: Vec<f64> = (2..=n).map(|j| binomial_f64(n, j)).collect();
    eval_log_product(
        |k| {
            let kf = k as f64;
            let ratio = kf / (kf + 1.0);
            let inv = 1.0 / (kf + 1.0);
            let d: f64 = (2..=n)
                .zip(&coeffs)
                .map(|(j, cj)| cj * ratio.powi((n - j) as i32) * inv.powi(j as i32))
                .sum();
            (-d).ln_1p()
        },
        policy,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaEval {
    pub n: u32,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub terms_used: u64,
}

/// Largest `n` for which the `sigma_n` binomials are exact integers.
pub const SIGMA_MAX_N: u32 = 60;
const SIGMA_TERMS_CAP: u64 = 100_000;

/// `int_T^inf t^(n-m) / (t+1)^n dt` via `u = 1/(t+1)`: a finite alternating
/// sum of `C(n-m, j) (-1)^j U^(m-1+j) / (m-1+j)` with `U = 1/(T+1)`.
fn sigma_tail_integral(n: u32, m: u32, t: f64) -> f64 {
    let u = 1.0 / (t + 1.0);
    let mut acc = NeumaierSum::new();
    for j in 0..=(n - m) {
        let e = m - 1 + j;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial_f64(n - m, j) * u.powi(e as i32) / e as f64;
    }
    acc.value()
}

/// `sigma_n = sum_{m=2}^n C(n,m) sum_{k>=1} k^(n-m) / (k+1)^n`.
///
/// Inner sums run to `K = min(max_terms, 1e5)` terms; their tails are
/// bracketed by the integrals from `K+1` and from `K`, with the midpoint
/// integral from `K + 1/2` as the estimate.
pub fn sigma_n(n: u32, policy: &TruncationPolicy) -> Result<SigmaEval> {
    if !(2..=SIGMA_MAX_N).contains(&n) {
        return Err(Error::domain(
            "sigma_n",
            format!("n = {n} must lie in [2, {SIGMA_MAX_N}]"),
        ));
    }
    policy.validate()?;
    // the summand is decreasing only for k > (n-m)/m
    let k_max = policy.max_terms.min(SIGMA_TERMS_CAP).max(n as u64 + 1);
    let kf = k_max as f64;
    let (mut value, mut lower, mut upper) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    for m in 2..=n {
        let weight = binomial_f64(n, m);
        let partial: f64 = (1..=k_max)
            .map(|k| {
                let x = k as f64;
                (x / (x + 1.0)).powi((n - m) as i32) / (x + 1.0).powi(m as i32)
            })
            .collect::<NeumaierSum>()
            .value();
        value += weight * (partial + sigma_tail_integral(n, m, kf + 0.5));
        lower += weight * (partial + sigma_tail_integral(n, m, kf + 1.0));
        upper += weight * (partial + sigma_tail_integral(n, m, kf));
    }
    Ok(SigmaEval {
        n,
        value: value.value(),
        lower: lower.value(),
        upper: upper.value(),
        terms_used: k_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaInequality {
    pub n: u32,
    /// `1/n!`
    pub inv_factorial: f64,
    /// `exp(-sigma_n)`
    pub exp_neg_sigma: f64,
    /// Decided with the upper bracket of `sigma_n`.
    pub holds: bool,
}

/// Checks `1/n! < exp(-sigma_n)`, i.e. `sigma_n < ln n!`.
pub fn sigma_inequality(n: u32, policy: &TruncationPolicy) -> Result<SigmaInequality> {
    let sigma = sigma_n(n, policy)?;
    let ln_fact = log_gamma(n as f64 + 1.0)?;
    Ok(SigmaInequality {
        n,
        inv_factorial: (-ln_fact).exp(),
        exp_neg_sigma: (-sigma.value).exp(),
        holds: sigma.upper < ln_fact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::Verdict;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn holder_examples() {
        let h = holder_conjugate(2.0).unwrap();
        assert_eq!((h.p(), h.q()), (2.0, 2.0));
        let h = holder_conjugate(1.0).unwrap();
        assert_eq!(h.p(), 1.0);
        assert!(h.q().is_infinite());
        let h = holder_conjugate(1.5).unwrap();
        assert_eq!(h.q(), 3.0);
        let h = holder_conjugate(f64::INFINITY).unwrap();
        assert_eq!(h.q(), 1.0);
        assert_eq!(h.inv_pq(), 0.0);
        assert!(holder_conjugate(0.99).is_err());
        assert!(holder_conjugate(f64::NAN).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        for &p in &[1.0, 1.37, 2.0, 7.0, f64::INFINITY] {
            assert!(rel(ball_volume(&BallSpec::new(1, p).unwrap()).unwrap(), 2.0) < 1e-15);
        }
        assert!(rel(ball_volume(&BallSpec::new(2, 2.0).unwrap()).unwrap(), PI) < 1e-15);
        assert_eq!(ball_volume(&BallSpec::new(3, f64::INFINITY).unwrap()).unwrap(), 8.0);
        assert!(rel(ball_volume(&BallSpec::new(2, 1.0).unwrap()).unwrap(), 2.0) < 1e-15);
        assert!(BallSpec::new(0, 2.0).is_err());
    }

    #[test]
    fn ball_volume_overflow_is_reported() {
        let spec = BallSpec::new(2000, f64::INFINITY).unwrap();
        assert!(matches!(ball_volume(&spec), Err(Error::Overflow { .. })));
        assert!(log_ball_volume(&spec).unwrap().is_finite());
    }

    #[test]
    fn mprod_gamma_examples() {
        assert!(rel(mprod_gamma(2, 2.0).unwrap(), PI * PI) < 1e-14);
        assert!(rel(mprod_gamma(3, 1.0).unwrap(), 32.0 / 3.0) < 1e-14);
        assert!(rel(mprod_gamma(3, f64::INFINITY).unwrap(), 32.0 / 3.0) < 1e-14);
        for &p in &[1.0, 1.3, 2.0, 9.0] {
            assert!(rel(mprod_gamma(1, p).unwrap(), 4.0) < 1e-15);
        }
    }

    #[test]
    fn p_product_examples() {
        let r = p_product(5.0, 0.0, &policy()).unwrap();
        assert_eq!(r.value, 1.0);
        let r = p_product(1.0, 0.5, &policy()).unwrap();
        assert!(rel(r.value, PI / 2.0) < 1e-9);
        let r = p_product(0.5, 0.5, &policy()).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(p_product(0.0, 0.5, &policy()).is_err());
        assert!(p_product(1.0, 1.0, &policy()).is_err());
        assert!(p_product(1.0, -0.1, &policy()).is_err());
    }

    #[test]
    fn p_gamma_side_examples() {
        assert!(rel(p_gamma_side(3.0, 0.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(p_gamma_side(1.0, 0.5).unwrap(), PI / 2.0) < 1e-15);
        let r = p_product(2.7, 0.9, &policy()).unwrap();
        assert!(rel(r.value, p_gamma_side(2.7, 0.9).unwrap()) < 1e-7);
    }

    #[test]
    fn gamma_np_factorized_examples() {
        assert!(rel(gamma_np_factorized(2, 2.0, &policy()).unwrap(), 1.0) < 1e-9);
        assert!(rel(gamma_np_factorized(3, 2.0, &policy()).unwrap(), PI.sqrt() / 2.0) < 1e-8);
        // Gamma(3.2) = 2.42396547993536844 (mpmath)
        assert!(rel(gamma_np_factorized(4, 1.25, &policy()).unwrap(), 2.423_965_479_935_368) < 1e-7);
        assert!(gamma_np_factorized(1, 2.0, &policy()).is_err());
        assert!(gamma_np_factorized(3, 1.0, &policy()).is_err());
    }

    #[test]
    fn pair_product_examples() {
        for &(n, m, p) in &[(2, 1, 2.0), (3, 1, 1.5), (5, 4, 3.0)] {
            let r = pair_product_check(n, m, p, &policy()).unwrap();
            assert_eq!(r.verdict, Verdict::Verified, "{r:?}");
            assert!(r.rel_dev <= 1e-7);
        }
        assert!(pair_product_check(3, 3, 2.0, &policy()).is_err());
        assert!(pair_product_check(3, 1, 1.0, &policy()).is_err());
    }

    #[test]
    fn h_func_examples() {
        assert!(rel(h_func(2.0).unwrap(), PI / 4.0) < 1e-15);
        assert_eq!(h_func(1.0).unwrap(), 1.0);
        assert_eq!(h_func(f64::INFINITY).unwrap(), 1.0);
        // pi / (4.5 sin(2 pi / 3)) = 0.80613305077076349 (mpmath)
        assert!(rel(h_func(1.5).unwrap(), 0.806_133_050_770_763_5) < 1e-15);
        assert!((h_func(1.0 + 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!((h_func(1e12).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn mprod_product_examples() {
        let r = mprod_product(2, 2.0, &policy()).unwrap();
        assert!(rel(r.value, PI * PI) < 1e-9);
        assert_eq!(mprod_product(1, 1.7, &policy()).unwrap().value, 4.0);
        let r = mprod_product(3, 2.0, &policy()).unwrap();
        assert!(rel(r.value, 16.0 * PI * PI / 9.0) < 1e-9);
        let r = mprod_product(2, 1.5, &policy()).unwrap();
        assert!(rel(r.value, mprod_gamma(2, 1.5).unwrap()) < 1e-7);
        assert!(r.converged);
    }

    #[test]
    fn mprod_product_boundary_uses_limit() {
        let r = mprod_product(3, 1.0, &policy()).unwrap();
        assert!(rel(r.value, 32.0 / 3.0) < 1e-8);
        let r = mprod_product(3, f64::INFINITY, &policy()).unwrap();
        assert!(rel(r.value, 32.0 / 3.0) < 1e-8);
    }

    #[test]
    fn s_product_examples() {
        assert_eq!(s_product(1, &policy()).unwrap().value, 1.0);
        assert!(rel(s_product(2, &policy()).unwrap().value, 0.5) < 1e-9);
        assert!(rel(s_product(5, &policy()).unwrap().value, 1.0 / 120.0) < 1e-9);
    }

    #[test]
    fn sigma_examples() {
        let s = sigma_n(2, &policy()).unwrap();
        assert!((s.value - (PI * PI / 6.0 - 1.0)).abs() < 1e-9);
        assert!(s.lower <= s.value && s.value <= s.upper);
        let ineq = sigma_inequality(2, &policy()).unwrap();
        assert!(ineq.holds);
        assert!((ineq.exp_neg_sigma - 0.524_697_135_902_037_9).abs() < 1e-9);
        assert!(sigma_inequality(6, &policy()).unwrap().holds);
        assert!(sigma_n(1, &policy()).is_err());
        assert!(sigma_n(61, &policy()).is_err());
    }
}
