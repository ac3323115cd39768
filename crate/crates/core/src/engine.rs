//! Evaluation of convergent infinite products `prod f_k` through their log
//! series `sum ln f_k`, where the log-terms decay like `1/k^2`.
//!
//! Terms are accumulated with compensated summation in stages of
//! `1024 * 4^j` terms (capped at `max_terms`). After each stage the remaining
//! tail is estimated and an error bracket on the full log-sum is formed; the
//! engine stops at the first stage whose bracket is narrower than `rel_tol`.
//! Brackets are heuristic plus margin, not interval arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

const FIRST_STAGE: u64 = 1024;
const STAGE_GROWTH: u64 = 4;
const WINDOW_SAMPLES: u64 = 256;
/// Roundoff allowance added to every bracket, relative to `sum |term|`.
const BRACKET_FLOOR: f64 = 1e-13;
/// Growth of `k^2 * term(k)` across one window that counts as suspicious.
const WINDOW_GROWTH_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    None,
    FirstOrder,
    Richardson,
}

impl std::str::FromStr for TailMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TailMode::None),
            "first-order" | "first_order" => Ok(TailMode::FirstOrder),
            "richardson" => Ok(TailMode::Richardson),
            other => Err(Error::Policy(format!("unknown tail mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub max_terms: u64,
    pub rel_tol: f64,
    pub tail_mode: TailMode,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_terms: 1_000_000,
            rel_tol: 1e-9,
            tail_mode: TailMode::FirstOrder,
        }
    }
}

impl TruncationPolicy {
    pub fn new(max_terms: u64, rel_tol: f64, tail_mode: TailMode) -> Result<Self> {
        let p = TruncationPolicy {
            max_terms,
            rel_tol,
            tail_mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 16 {
            return Err(Error::Policy(format!(
                "max_terms = {} must be at least 16",
                self.max_terms
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Policy(format!(
                "rel_tol = {} must lie in (0, 1)",
                self.rel_tol
            )));
        }
        Ok(())
    }

    pub fn with_max_terms(mut self, max_terms: u64) -> Self {
        self.max_terms = max_terms;
        self
    }

    fn stages(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut t = FIRST_STAGE;
        while t < self.max_terms {
            out.push(t);
            t *= STAGE_GROWTH;
        }
        out.push(self.max_terms);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEval {
    pub log_value: f64,
    pub value: f64,
    pub terms_used: u64,
    /// Estimated log-sum of the omitted terms, already included in `log_value`.
    pub tail_estimate: f64,
    /// Lower and upper bounds on the full log-sum.
    pub error_bracket: (f64, f64),
    pub converged: bool,
    /// Fitted limit of `k^2 * term(k)`, when a fit was made.
    pub tail_coefficient: Option<f64>,
}

impl ProductEval {
    pub fn bracket_width(&self) -> f64 {
        self.error_bracket.1 - self.error_bracket.0
    }

    pub fn contains_log(&self, log_v: f64) -> bool {
        self.error_bracket.0 <= log_v && log_v <= self.error_bracket.1
    }

    /// Multiplies the product by `exp(offset)`.
    pub fn shifted(mut self, offset: f64) -> Self {
        self.log_value += offset;
        self.value = self.log_value.exp();
        self.error_bracket = (self.error_bracket.0 + offset, self.error_bracket.1 + offset);
        self
    }

    fn exact_zero(terms_used: u64) -> Self {
        ProductEval {
            log_value: 0.0,
            value: 1.0,
            terms_used,
            tail_estimate: 0.0,
            error_bracket: (0.0, 0.0),
            converged: true,
            tail_coefficient: Some(0.0),
        }
    }
}

/// `sum_{k > t} 1/k^2` by Euler–Maclaurin; accurate to ~1e-17 relative for t >= 16.
fn tail_inv_sq(t: f64) -> f64 {
    let i = 1.0 / t;
    i - 0.5 * i * i + i * i * i / 6.0 - i.powi(5) / 30.0
}

/// `sum_{k > t} 1/k^3`.
fn tail_inv_cube(t: f64) -> f64 {
    let i = 1.0 / t;
    0.5 * i * i - 0.5 * i * i * i + 0.25 * i.powi(4)
}

struct StageState {
    sum: f64,
    abs_sum: f64,
    /// (k, term(k)) samples spread over the window (t/10, t].
    window: Vec<(u64, f64)>,
    last_term: f64,
}

#[derive(Default)]
struct DivergenceTracker {
    prev_suspicious: bool,
    prev_end_level: f64,
}

impl DivergenceTracker {
    /// Returns true when the window looks non-summable at this stage and
    /// the previous one, with `k^2 * term(k)` still growing between them.
    fn observe(&mut self, window: &[(u64, f64)]) -> bool {
        let n = window.len();
        if n < 20 {
            return false;
        }
        let tenth = n / 10;
        let mean = |s: &[(u64, f64)], f: &dyn Fn(u64, f64) -> f64| {
            s.iter().map(|&(k, v)| f(k, v)).sum::<f64>() / s.len() as f64
        };
        let scaled = |k: u64, v: f64| (k as f64).powi(2) * v.abs();
        let plain = |_: u64, v: f64| v.abs();
        let head = &window[..tenth];
        let tail = &window[n - tenth..];
        let y_head = mean(head, &scaled);
        let y_tail = mean(tail, &scaled);
        let t_head = mean(head, &plain);
        let t_tail = mean(tail, &plain);

        let grows = y_head > 0.0 && y_tail / y_head >= WINDOW_GROWTH_LIMIT;
        let flat = t_head > 0.0 && t_tail >= t_head;
        let suspicious = grows || flat;
        let still_growing = self.prev_end_level > 0.0 && y_tail >= 2.0 * self.prev_end_level;
        let verdict = suspicious && self.prev_suspicious && still_growing;
        self.prev_suspicious = suspicious;
        self.prev_end_level = y_tail;
        verdict
    }
}

fn window_points(t: u64) -> Vec<u64> {
    let lo = (t / 10).max(1);
    let span = t - lo;
    let count = WINDOW_SAMPLES.min(span);
    (1..=count).map(|i| lo + (span * i) / count).collect()
}

/// Least squares `y = alpha + beta / k` over the window, with the largest residual.
fn fit_tail(window: &[(u64, f64)]) -> (f64, f64, f64) {
    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|&(k, v)| {
            let kf = k as f64;
            (1.0 / kf, kf * kf * v)
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let alpha = my - beta * mx;
    let resid = pts
        .iter()
        .map(|p| (p.1 - alpha - beta * p.0).abs())
        .fold(0.0, f64::max);
    (alpha, beta, resid)
}

/// Fits `S(K) = S_inf + a/K + b/K^2` through three partial sums.
fn richardson3(points: [(u64, f64); 3]) -> f64 {
    let h: Vec<f64> = points.iter().map(|p| 1.0 / p.0 as f64).collect();
    let s: Vec<f64> = points.iter().map(|p| p.1).collect();
    // Lagrange extrapolation to h = 0 in the variable h.
    let mut acc = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= h[j] / (h[j] - h[i]);
            }
        }
        acc += w * s[i];
    }
    acc
}

fn richardson2(points: [(u64, f64); 2]) -> f64 {
    let (k1, s1) = (points[0].0 as f64, points[0].1);
    let (k2, s2) = (points[1].0 as f64, points[1].1);
    (k2 * s2 - k1 * s1) / (k2 - k1)
}

struct StageResult {
    tail: f64,
    half_width: f64,
    alpha: Option<f64>,
}

fn estimate_tail(
    mode: TailMode,
    t: u64,
    state: &StageState,
    checkpoints: &[(u64, f64)],
) -> StageResult {
    let floor = BRACKET_FLOOR * state.abs_sum.max(1.0);
    let tf = t as f64;
    match mode {
        TailMode::None => StageResult {
            tail: 0.0,
            half_width: 2.0 * tf * state.last_term.abs() + floor,
            alpha: None,
        },
        TailMode::FirstOrder => {
            let (alpha, beta, resid) = fit_tail(&state.window);
            let tail = alpha * tail_inv_sq(tf) + beta * tail_inv_cube(tf);
            StageResult {
                tail,
                half_width: 2.0 * resid * tail_inv_sq(tf) + floor,
                alpha: Some(alpha),
            }
        }
        TailMode::Richardson => {
            let at = |k: u64| {
                checkpoints
                    .iter()
                    .find(|c| c.0 == k)
                    .map(|c| c.1)
                    .expect("checkpoint recorded")
            };
            let (k1, k2) = (t / 4, t / 2);
            let s3 = state.sum;
            let r2 = richardson2([(k2, at(k2)), (t, s3)]);
            let r3 = richardson3([(k1, at(k1)), (k2, at(k2)), (t, s3)]);
            StageResult {
                tail: r3 - s3,
                half_width: (r3 - r2).abs() + floor,
                alpha: None,
            }
        }
    }
}

/// Sums `term(k)` for `k = 1, 2, ...` under `policy` and returns the log of
/// the infinite product together with tail estimate and error bracket.
///
/// Fails with [`Error::DivergenceSuspected`] when the terms stop behaving
/// like `1/k^2`; the partial evaluation rides along in the error.
pub fn eval_log_product<F>(term: F, policy: &TruncationPolicy) -> Result<ProductEval>
where
    F: Fn(u64) -> f64,
{
    policy.validate()?;
    let stages = policy.stages();

    let mut sample_ks: Vec<u64> = stages.iter().flat_map(|&t| window_points(t)).collect();
    sample_ks.sort_unstable();
    sample_ks.dedup();
    let mut checkpoint_ks: Vec<u64> = if policy.tail_mode == TailMode::Richardson {
        stages.iter().flat_map(|&t| [t / 4, t / 2]).collect()
    } else {
        Vec::new()
    };
    checkpoint_ks.sort_unstable();
    checkpoint_ks.dedup();

    let mut acc = NeumaierSum::new();
    let mut abs_acc = NeumaierSum::new();
    let mut samples: Vec<(u64, f64)> = Vec::with_capacity(sample_ks.len());
    let mut checkpoints: Vec<(u64, f64)> = Vec::with_capacity(checkpoint_ks.len());
    let (mut next_sample, mut next_check) = (0usize, 0usize);
    let mut k: u64 = 0;
    let mut last_term = 0.0;
    let mut tracker = DivergenceTracker::default();
    let mut last_eval: Option<ProductEval> = None;

    for &t in &stages {
        while k < t {
            k += 1;
            let v = term(k);
            if !v.is_finite() {
                return Err(Error::domain(
                    "eval_log_product",
                    format!("term({k}) = {v} is not finite"),
                ));
            }
            acc += v;
            abs_acc += v.abs();
            last_term = v;
            if next_sample < sample_ks.len() && sample_ks[next_sample] == k {
                samples.push((k, v));
                next_sample += 1;
            }
            if next_check < checkpoint_ks.len() && checkpoint_ks[next_check] == k {
                checkpoints.push((k, acc.value()));
                next_check += 1;
            }
        }

        let lo = (t / 10).max(1);
        let window: Vec<(u64, f64)> = samples
            .iter()
            .copied()
            .filter(|&(kk, _)| kk > lo && kk <= t)
            .collect();
        let state = StageState {
            sum: acc.value(),
            abs_sum: abs_acc.value(),
            window,
            last_term,
        };

        if state.abs_sum == 0.0 {
            return Ok(ProductEval::exact_zero(t));
        }

        let diverging = tracker.observe(&state.window);
        let est = estimate_tail(policy.tail_mode, t, &state, &checkpoints);
        let log_value = state.sum + est.tail;
        let eval = ProductEval {
            log_value,
            value: log_value.exp(),
            terms_used: t,
            tail_estimate: est.tail,
            error_bracket: (log_value - est.half_width, log_value + est.half_width),
            converged: 2.0 * est.half_width <= policy.rel_tol,
            tail_coefficient: est.alpha,
        };
        if diverging {
            return Err(Error::DivergenceSuspected(Box::new(ProductEval {
                converged: false,
                ..eval
            })));
        }
        if eval.converged {
            return Ok(eval);
        }
        last_eval = Some(eval);
    }

    Ok(last_eval.expect("at least one stage"))
}

/// Sums a convergent series `sum_{k>=1} term(k)` with `O(1/k^2)` terms.
/// Same machinery as [`eval_log_product`]; `log_value` holds the sum.
pub fn eval_series<F>(term: F, policy: &TruncationPolicy) -> Result<ProductEval>
where
    F: Fn(u64) -> f64,
{
    eval_log_product(term, policy)
}

/// `ln(1 + z) / z`, continuous at `z = 0`.
fn log1p_over(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        z.ln_1p() / z
    }
}

/// Certified upper bound on `ln P(x, a)` from `ln t <= t - 1`:
/// `a (x + a - 1) * sum_k 1 / ((k - a)(k + x + a - 1))`.
///
/// With a non-negative prefactor the first `k_max` terms are summed and the
/// remainder is bounded by `int_K^inf dt / ((t - a)(t + b))`. With a negative
/// prefactor the remainder is dropped, which keeps the value an upper bound.
pub fn log_upper_bound_sum(a: f64, x: f64, k_max: u64) -> Result<f64> {
    if !(a.is_finite() && x.is_finite()) || !(0.0..1.0).contains(&a) || x <= 0.0 {
        return Err(Error::domain(
            "log_upper_bound_sum",
            format!("need 0 <= a < 1 and x > 0, got a = {a}, x = {x}"),
        ));
    }
    if k_max == 0 {
        return Err(Error::domain("log_upper_bound_sum", "K must be at least 1"));
    }
    let b = x + a - 1.0;
    let prefactor = a * b;
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let partial: f64 = (1..=k_max)
        .map(|k| {
            let kf = k as f64;
            1.0 / ((kf - a) * (kf + b))
        })
        .collect::<NeumaierSum>()
        .value();
    if prefactor < 0.0 {
        return Ok(prefactor * partial);
    }
    let kf = k_max as f64;
    // (1/(a+b)) ln((K+b)/(K-a)) written as ln1p(z)/z / (K-a), z = (a+b)/(K-a)
    let tail = log1p_over((a + b) / (kf - a)) / (kf - a);
    Ok(prefactor * (partial + tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(15, 1e-9, TailMode::FirstOrder).is_err());
        assert!(TruncationPolicy::new(16, 0.0, TailMode::FirstOrder).is_err());
        assert!(TruncationPolicy::new(16, 1.0, TailMode::FirstOrder).is_err());
        assert!(TruncationPolicy::new(16, 0.5, TailMode::None).is_ok());
        assert_eq!("first-order".parse::<TailMode>().unwrap(), TailMode::FirstOrder);
        assert!("levin".parse::<TailMode>().is_err());
    }

    #[test]
    fn stage_schedule() {
        let p = TruncationPolicy::default();
        assert_eq!(
            p.stages(),
            vec![1024, 4096, 16384, 65536, 262_144, 1_000_000]
        );
        assert_eq!(p.with_max_terms(100).stages(), vec![100]);
        assert_eq!(p.with_max_terms(4096).stages(), vec![1024, 4096]);
    }

    #[test]
    fn telescoping_half() {
        // prod k(k+2)/(k+1)^2 = 1/2
        let term = |k: u64| {
            let kf = k as f64;
            (-1.0 / ((kf + 1.0) * (kf + 1.0))).ln_1p()
        };
        let r = eval_log_product(term, &TruncationPolicy::default()).unwrap();
        assert!(r.converged);
        assert!((r.log_value - 0.5f64.ln()).abs() < 1e-11);
        assert!(r.contains_log(0.5f64.ln()));
        assert!((r.tail_coefficient.unwrap() + 1.0).abs() < 1e-2);
    }

    #[test]
    fn zero_terms_converge_after_first_stage() {
        let r = eval_log_product(|_| 0.0, &TruncationPolicy::default()).unwrap();
        assert_eq!(r.log_value, 0.0);
        assert_eq!(r.value, 1.0);
        assert!(r.converged);
        assert_eq!(r.terms_used, 1024);
    }

    #[test]
    fn richardson_and_none_modes() {
        let term = |k: u64| {
            let kf = k as f64;
            (-1.0 / ((kf + 1.0) * (kf + 1.0))).ln_1p()
        };
        let rich = TruncationPolicy::new(1_000_000, 1e-9, TailMode::Richardson).unwrap();
        let r = eval_log_product(term, &rich).unwrap();
        assert!(r.contains_log(0.5f64.ln()));
        assert!((r.log_value - 0.5f64.ln()).abs() < 1e-9);

        let none = TruncationPolicy::new(100_000, 1e-9, TailMode::None).unwrap();
        let r = eval_log_product(term, &none).unwrap();
        assert!(!r.converged);
        assert_eq!(r.tail_estimate, 0.0);
        assert!(r.contains_log(0.5f64.ln()));
    }

    #[test]
    fn harmonic_terms_flagged_divergent() {
        let err = eval_log_product(|k| 1.0 / k as f64, &TruncationPolicy::default()).unwrap_err();
        match err {
            Error::DivergenceSuspected(partial) => {
                assert!(partial.log_value > 5.0);
                assert!(!partial.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
        // constant terms: |term| never decreases
        assert!(matches!(
            eval_log_product(|_| -1e-3, &TruncationPolicy::default()),
            Err(Error::DivergenceSuspected(_))
        ));
    }

    #[test]
    fn non_finite_term_is_an_error() {
        assert!(matches!(
            eval_log_product(|k| if k == 7 { f64::NAN } else { 0.0 }, &TruncationPolicy::default()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn upper_bound_sum_examples() {
        for &x in &[0.1, 1.0, 7.5] {
            assert_eq!(log_upper_bound_sum(0.0, x, 100).unwrap(), 0.0);
        }
        let b = log_upper_bound_sum(0.5, 1.0, 10_000).unwrap();
        assert!(b >= (std::f64::consts::PI / 2.0).ln());
        assert_eq!(log_upper_bound_sum(0.5, 0.5, 10_000).unwrap(), 0.0);
        assert!(log_upper_bound_sum(1.0, 1.0, 10).is_err());
        assert!(log_upper_bound_sum(0.5, 0.0, 10).is_err());
    }

    #[test]
    fn upper_bound_tail_is_conservative() {
        // a + b = 0 path: tail integral 1/(K - a)
        let coarse = log_upper_bound_sum(0.25, 1.5, 50).unwrap();
        let fine = log_upper_bound_sum(0.25, 1.5, 50_000).unwrap();
        assert!(coarse >= fine);
        let tiny = log_upper_bound_sum(0.3, 0.4, 200).unwrap();
        assert!(tiny.is_finite());
    }
}
