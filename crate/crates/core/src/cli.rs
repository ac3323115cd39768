//! Command-line front end. Every command emits one JSON [`OutputRecord`] on
//! stdout; without `--quiet` a few human-readable lines precede it.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{default_fd_step, dm_dp_fd};
use crate::engine::{TailMode, TruncationPolicy};
use crate::error::Error;
use crate::special::log_gamma;
use crate::verify::{self, Suite, VerifyConfig};
use crate::volume::{holder_conjugate, log_ball_volume, mprod_gamma, mprod_product, BallSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNEXPECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SWEEP_CSV_HEADER: &str =
    "p,q,m_gamma,m_product,rel_dev,dmdp_fd,mahler_margin,santalo_margin";

#[derive(Debug, Parser)]
#[command(name = "volprod", version, about = "Volume products of unit p-balls")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Hard cap on the number of product terms.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_terms: u64,
    /// Target relative width of the error bracket.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// Tail correction: none, first-order or richardson.
    #[arg(long, global = true, default_value = "first-order", value_parser = parse_tail)]
    pub tail: TailMode,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Print only the JSON record.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Omit wall-clock timing so output is byte-reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gamma,
    Product,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume of the unit p-ball in R^n.
    Volume {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_p)]
        p: f64,
    },
    /// Volume product M(n, p).
    Mprod {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_p)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Allowed relative deviation between the two routes.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Tabulate M(n, p) over an evenly spaced p grid.
    Sweep {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p_min: f64,
        #[arg(long)]
        p_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        format: SweepFormat,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },
}

fn parse_tail(s: &str) -> Result<TailMode, Error> {
    s.parse()
}

/// Accepts a float or `inf` / `infinity`.
pub fn parse_p(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| format!("`{s}` is not a number: {e}")),
    }
}

/// JSON number, with non-finite values as the strings `inf`, `-inf`, `nan`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn csv_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub policy: TruncationPolicy,
    pub wall_time_ms: Option<f64>,
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain { .. } | Error::Policy(_) => EXIT_USAGE,
            Error::DivergenceSuspected(_) | Error::Overflow { .. } => EXIT_UNEXPECTED,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

struct Done {
    record: OutputRecord,
    human: Vec<String>,
    code: i32,
    /// Replaces the record on stdout (sweep without `--out`).
    raw_stdout: Option<String>,
}

fn record(command: &str, inputs: Value, results: Value, policy: TruncationPolicy) -> OutputRecord {
    OutputRecord {
        command: command.into(),
        inputs,
        results,
        policy,
        wall_time_ms: None,
    }
}

fn eval_json(e: &crate::engine::ProductEval) -> Value {
    json!({
        "value": num(e.value),
        "log_value": num(e.log_value),
        "log_bracket": [num(e.error_bracket.0), num(e.error_bracket.1)],
        "terms_used": e.terms_used,
        "tail_estimate": num(e.tail_estimate),
        "converged": e.converged,
    })
}

fn cmd_volume(n: u32, p: f64, policy: TruncationPolicy) -> Result<Done, Failure> {
    let spec = BallSpec::new(n, p)?;
    let lv = log_ball_volume(&spec)?;
    let v = crate::volume::ball_volume(&spec)?;
    let human = vec![format!("|B_{p}^{n}| = {v:.16e}  (log {lv:.16e})")];
    Ok(Done {
        record: record(
            "volume",
            json!({"n": n, "p": num(p)}),
            json!({"volume": num(v), "log_volume": num(lv)}),
            policy,
        ),
        human,
        code: EXIT_OK,
        raw_stdout: None,
    })
}

fn cmd_mprod(n: u32, p: f64, method: Method, tol: f64, policy: TruncationPolicy) -> Result<Done, Failure> {
    if !(tol > 0.0) {
        return Err(Failure {
            code: EXIT_USAGE,
            msg: format!("--tol must be positive, got {tol}"),
        });
    }
    let pair = holder_conjugate(p)?;
    let mut results = serde_json::Map::new();
    results.insert("q".into(), num(pair.q()));
    let mut human = Vec::new();
    let mut code = EXIT_OK;
    let gamma = match method {
        Method::Gamma | Method::Both => {
            let g = mprod_gamma(n, p)?;
            results.insert("gamma".into(), num(g));
            human.push(format!("gamma route:   {g:.16e}"));
            Some(g)
        }
        Method::Product => None,
    };
    let product = match method {
        Method::Product | Method::Both => {
            let e = mprod_product(n, p, &policy)?;
            results.insert("product".into(), eval_json(&e));
            human.push(format!(
                "product route: {:.16e}  ({} terms, converged {})",
                e.value, e.terms_used, e.converged
            ));
            Some(e.value)
        }
        Method::Gamma => None,
    };
    if let (Some(g), Some(pr)) = (gamma, product) {
        let rel_dev = ((pr - g) / g).abs();
        let agree = rel_dev <= tol;
        results.insert("rel_dev".into(), num(rel_dev));
        results.insert("tolerance".into(), num(tol));
        results.insert("agree".into(), json!(agree));
        human.push(format!(
            "{} rel_dev {rel_dev:.3e} (tol {tol:e})",
            if agree { "PASS" } else { "FAIL" }
        ));
        if !agree {
            code = EXIT_UNEXPECTED;
        }
    }
    let method_name = format!("{method:?}").to_lowercase();
    Ok(Done {
        record: record(
            "mprod",
            json!({"n": n, "p": num(p), "method": method_name}),
            Value::Object(results),
            policy,
        ),
        human,
        code,
        raw_stdout: None,
    })
}

#[derive(Debug, Clone, Copy)]
struct SweepRow {
    p: f64,
    q: f64,
    m_gamma: f64,
    m_product: f64,
    rel_dev: f64,
    dmdp_fd: f64,
    mahler_margin: f64,
    santalo_margin: f64,
}

impl SweepRow {
    fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("p", self.p),
            ("q", self.q),
            ("m_gamma", self.m_gamma),
            ("m_product", self.m_product),
            ("rel_dev", self.rel_dev),
            ("dmdp_fd", self.dmdp_fd),
            ("mahler_margin", self.mahler_margin),
            ("santalo_margin", self.santalo_margin),
        ]
    }
}

fn sweep_row(n: u32, p: f64, lower: f64, upper: f64, policy: &TruncationPolicy) -> crate::Result<SweepRow> {
    let q = holder_conjugate(p)?.q();
    let m_gamma = mprod_gamma(n, p)?;
    let m_product = mprod_product(n, p, policy)?.value;
    // Shrink the stencil near p = 1; at p = 1 itself no central difference exists.
    let step = default_fd_step(p).min((p - 1.0) / 2.0);
    let dmdp_fd = if step > 0.0 { dm_dp_fd(n, p, Some(step))? } else { f64::NAN };
    Ok(SweepRow {
        p,
        q,
        m_gamma,
        m_product,
        rel_dev: ((m_product - m_gamma) / m_gamma).abs(),
        dmdp_fd,
        mahler_margin: m_gamma / lower - 1.0,
        santalo_margin: 1.0 - m_gamma / upper,
    })
}

/// Evenly spaced grid with both endpoints hit exactly.
pub fn sweep_grid(p_min: f64, p_max: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![p_min];
    }
    let last = steps - 1;
    (0..steps)
        .map(|i| {
            if i == last {
                p_max
            } else {
                p_min + (p_max - p_min) * i as f64 / last as f64
            }
        })
        .collect()
}

fn cmd_sweep(
    n: u32,
    p_min: f64,
    p_max: f64,
    steps: usize,
    out: Option<&PathBuf>,
    format: SweepFormat,
    policy: TruncationPolicy,
) -> Result<Done, Failure> {
    let usage = |msg: String| Failure { code: EXIT_USAGE, msg };
    if !(p_min >= 1.0 && p_min < p_max && p_max.is_finite()) {
        return Err(usage(format!(
            "need 1 <= p_min < p_max < inf, got [{p_min}, {p_max}]"
        )));
    }
    if steps < 2 {
        return Err(usage("--steps must be at least 2".into()));
    }
    if n == 0 {
        return Err(usage("--n must be at least 1".into()));
    }
    let lower = (n as f64 * 4f64.ln() - log_gamma(n as f64 + 1.0)?).exp();
    let upper = mprod_gamma(n, 2.0)?;
    let rows = sweep_grid(p_min, p_max, steps)
        .par_iter()
        .map(|&p| sweep_row(n, p, lower, upper, &policy))
        .collect::<crate::Result<Vec<_>>>()?;

    let inputs = json!({
        "n": n, "p_min": num(p_min), "p_max": num(p_max), "steps": steps,
        "format": format!("{format:?}").to_lowercase(),
    });
    let payload = match format {
        SweepFormat::Csv => {
            let mut s = String::from(SWEEP_CSV_HEADER);
            s.push('\n');
            for r in &rows {
                let line: Vec<String> = r.fields().iter().map(|&(_, v)| csv_num(v)).collect();
                let _ = writeln!(s, "{}", line.join(","));
            }
            s
        }
        SweepFormat::Json => {
            let rows_json: Vec<Value> = rows
                .iter()
                .map(|r| {
                    Value::Object(r.fields().iter().map(|&(k, v)| (k.to_string(), num(v))).collect())
                })
                .collect();
            let file = record("sweep", inputs.clone(), Value::Array(rows_json), policy);
            let mut s = serde_json::to_string_pretty(&file).expect("serializable");
            s.push('\n');
            s
        }
    };
    let max_rel_dev = rows.iter().map(|r| r.rel_dev).fold(0.0, f64::max);
    let mut human = vec![format!("{} rows, max rel_dev {max_rel_dev:.3e}", rows.len())];
    let raw_stdout = match out {
        Some(path) => {
            std::fs::write(path, &payload).map_err(|e| {
                usage(format!("cannot write {}: {e}", path.display()))
            })?;
            human.push(format!("wrote {}", path.display()));
            None
        }
        None => Some(payload),
    };
    Ok(Done {
        record: record(
            "sweep",
            inputs,
            json!({
                "rows": rows.len(),
                "max_rel_dev": num(max_rel_dev),
                "out": out.map(|p| p.display().to_string()),
            }),
            policy,
        ),
        human,
        code: EXIT_OK,
        raw_stdout,
    })
}

fn cmd_verify(suite: Suite, n_max: u32, policy: TruncationPolicy) -> Result<Done, Failure> {
    let outcome = verify::run(suite, &VerifyConfig { policy, n_max })?;
    let mut human = Vec::new();
    for s in &outcome.suites {
        for c in &s.checks {
            human.push(format!(
                "{} {}: {} (expected {})",
                if c.passed { "PASS" } else { "FAIL" },
                s.suite,
                c.id,
                c.expected
            ));
            if !c.passed {
                human.push(format!("     observed {}", c.observed));
            }
        }
    }
    for d in &outcome.discrepancy_ledger {
        human.push(format!("NOTE printed claim `{}` fails: {}", d.claim, d.observed));
    }
    let code = if outcome.passed { EXIT_OK } else { EXIT_UNEXPECTED };
    Ok(Done {
        record: record(
            "verify",
            json!({"suite": suite.name(), "n_max": n_max}),
            serde_json::to_value(&outcome).expect("serializable"),
            policy,
        ),
        human,
        code,
        raw_stdout: None,
    })
}

fn dispatch(cli: &Cli, policy: TruncationPolicy) -> Result<Done, Failure> {
    match &cli.command {
        Command::Volume { n, p } => cmd_volume(*n, *p, policy),
        Command::Mprod { n, p, method, tol } => cmd_mprod(*n, *p, *method, *tol, policy),
        Command::Sweep {
            n,
            p_min,
            p_max,
            steps,
            out,
            format,
        } => cmd_sweep(*n, *p_min, *p_max, *steps, out.as_ref(), *format, policy),
        Command::Verify { suite, n_max } => cmd_verify(*suite, *n_max, policy),
    }
}

/// Runs a parsed command, writing to `out` / `err`; returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let g = &cli.global;
    let policy = match TruncationPolicy::new(g.max_terms, g.rel_tol, g.tail) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = g.jobs {
        if j == 0 {
            let _ = writeln!(err, "error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return EXIT_UNEXPECTED;
        }
    };
    let start = Instant::now();
    let result = pool.install(|| dispatch(cli, policy));
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(mut done) => {
            if !g.no_timing {
                done.record.wall_time_ms = Some(elapsed);
            }
            let written = (|| -> std::io::Result<()> {
                if let Some(raw) = &done.raw_stdout {
                    out.write_all(raw.as_bytes())?;
                    return Ok(());
                }
                if !g.quiet {
                    for line in &done.human {
                        writeln!(out, "{line}")?;
                    }
                }
                let text = serde_json::to_string_pretty(&done.record).expect("serializable");
                writeln!(out, "{text}")
            })();
            if let Err(e) = written {
                let _ = writeln!(err, "error: writing output: {e}");
                return EXIT_USAGE;
            }
            done.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(std::iter::once("volprod").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = execute(&cli, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn parse_p_accepts_inf() {
        assert_eq!(parse_p("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_p("Infinity").unwrap(), f64::INFINITY);
        assert_eq!(parse_p("1.5").unwrap(), 1.5);
        assert!(parse_p("abc").is_err());
    }

    #[test]
    fn num_maps_non_finite() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NAN), json!("nan"));
        assert_eq!(num(2.5), json!(2.5));
    }

    #[test]
    fn grid_hits_endpoints() {
        let g = sweep_grid(1.0, 3.0, 5);
        assert_eq!(g, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(sweep_grid(1.5, 2.0, 2), vec![1.5, 2.0]);
    }

    #[test]
    fn volume_at_infinity_is_cube() {
        let (code, out) = run(&["--quiet", "--no-timing", "volume", "--n", "3", "--p", "inf"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["volume"], json!(8.0));
        assert_eq!(v["inputs"]["p"], json!("inf"));
        assert!(v["wall_time_ms"].is_null());
    }

    #[test]
    fn bad_domain_is_usage_error() {
        let (code, _) = run(&["volume", "--n", "3", "--p", "0.5"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn sweep_to_stdout_has_header() {
        let (code, out) = run(&["sweep", "--n", "2", "--p-min", "1", "--p-max", "2", "--steps", "3"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
        assert_eq!(lines.count(), 3);
    }
}
