//! Command-line surface over the q-coloring library: exact cylinder
//! probabilities, coefficient tables, marginal tables, seeded sampling,
//! and the verification suites.
//!
//! Exit status: 0 on success (and on passing verification), 1 when an
//! authoritative verification suite fails, 2 on usage errors. Advisory
//! (statistical) suite failures are reported but do not affect the exit
//! status.

use clap::{Parser, Subcommand, ValueEnum};
use qcoloring::chebyshev::{CoeffKind, CoeffTable, Fault};
use qcoloring::exactnum::{decimal_string, QAdjoined};
use qcoloring::measure::{CylinderMeasure, MeasureOptions, MemoMode, Word, DEFAULT_LENGTH_CAP};
use qcoloring::sampler::{ColoringStream, DEFAULT_WINDOW_CAP, RNG_ID};
use qcoloring::verify::{
    run_coeff_oracle_suite_with_fault, run_golden_suite_with_fault, run_identity_suite_with_fault,
    run_measure_suite_with_fault, run_sampler_suite, ExecMode, SuiteReport,
};
use serde_json::json;
use std::process::ExitCode;
use std::str::FromStr;

const SCHEMA: &str = "qcoloring.cli/1";
const FORMAT_ENV: &str = "QCOLORING_FORMAT";
const DECIMAL_DIGITS: usize = 12;

#[derive(Parser)]
#[command(
    name = "qcoloring",
    version,
    about = "Exact arithmetic for stationary 1-dependent q-colorings of the integers"
)]
struct Cli {
    /// Output format (defaults to the QCOLORING_FORMAT env var, then text)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact probability of a color word
    Prob {
        /// Number of colors, q >= 4
        #[arg(long)]
        q: u32,
        /// Comma-separated colors in 1..=q, e.g. "1,2,3" (empty for the empty word)
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        word: String,
        /// Maximum word length accepted by the evaluator
        #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
        length_cap: usize,
    },
    /// Sample a coloring with exact conditional draws
    Sample {
        #[arg(long)]
        q: u32,
        /// Number of colors to emit
        #[arg(long)]
        length: usize,
        /// RNG seed (chacha8)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sliding-window cap: a number, or "none" for the exact
        /// (untruncated) process
        #[arg(long, default_value_t = WindowCap(Some(DEFAULT_WINDOW_CAP)))]
        window_cap: WindowCap,
        /// Maximum window length for exact-mode conditioning
        #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
        length_cap: usize,
        /// Render the coloring as a compact character strip (text format)
        #[arg(long)]
        strip: bool,
    },
    /// Table of the coefficient sequences C(n) and D(n)
    Cheb {
        #[arg(long)]
        q: u32,
        /// Index range, e.g. "0..8" (inclusive) or "-4..4" or a single n
        #[arg(long, default_value = "0..8", allow_hyphen_values = true)]
        range: String,
    },
    /// All proper words of one length with their exact probabilities
    Marginal {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        len: usize,
    },
    /// Run a verification suite; exit status 1 iff an authoritative
    /// (exact) suite fails
    Verify {
        /// Suite to run
        #[arg(long, value_enum)]
        suite: Suite,
        /// q values, e.g. "4..10" (inclusive) or "5"
        #[arg(long)]
        q: String,
        /// Maximum word length for the measure suite
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Index bound for the two-argument coefficient identities
        #[arg(long, default_value_t = 30)]
        mn_range: i64,
        /// Index bound for the three-argument coefficient identity
        #[arg(long, default_value_t = 15)]
        jkl_range: i64,
        /// Largest index for the coefficient oracle comparison
        #[arg(long, default_value_t = 40)]
        max_n: usize,
        /// Sample count for the sampler suite
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Window length for the sampler suite
        #[arg(long, default_value_t = 3)]
        window_len: usize,
        /// Seed for the sampler suite
        #[arg(long, default_value_t = 713_705)]
        seed: u64,
        /// Worker threads: 0 = all cores, 1 = sequential
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Perturb the cached C(n) value at this index by 1 before
        /// running, to demonstrate that the suites detect corruption
        #[arg(long, hide = true)]
        inject_coeff_fault: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Golden,
    Identities,
    ChebOracle,
    Measure,
    Sampler,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Golden => "golden",
            Suite::Identities => "identities",
            Suite::ChebOracle => "cheb-oracle",
            Suite::Measure => "measure",
            Suite::Sampler => "sampler",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct WindowCap(Option<usize>);

impl FromStr for WindowCap {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "none" | "exact" => Ok(WindowCap(None)),
            other => {
                let n: usize = other
                    .parse()
                    .map_err(|_| format!("expected a positive integer or \"none\", got {other:?}"))?;
                if n == 0 {
                    return Err("window cap must be at least 1 (or \"none\")".into());
                }
                Ok(WindowCap(Some(n)))
            }
        }
    }
}

impl std::fmt::Display for WindowCap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "none"),
        }
    }
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe closes (e.g. `qcoloring ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let format = cli.format.unwrap_or_else(|| {
        match std::env::var(FORMAT_ENV).ok().as_deref() {
            Some("json") => Format::Json,
            _ => Format::Text,
        }
    });
    match run(cli.command, format) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_q(q: u32) -> Result<(), String> {
    if q < 4 {
        Err(format!("q must be at least 4, got {q}"))
    } else {
        Ok(())
    }
}

/// Parses "a..b" / "a..=b" (inclusive) or a single integer.
fn parse_range_i64(s: &str) -> Result<(i64, i64), String> {
    let t = s.trim();
    let (lo, hi) = match t.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (
                a.trim().parse::<i64>().map_err(|_| format!("bad range {t:?}"))?,
                b.trim().parse::<i64>().map_err(|_| format!("bad range {t:?}"))?,
            )
        }
        None => {
            let n = t.parse::<i64>().map_err(|_| format!("bad range {t:?}"))?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {t:?}"));
    }
    Ok((lo, hi))
}

fn parse_q_set(s: &str) -> Result<Vec<u32>, String> {
    let (lo, hi) = parse_range_i64(s)?;
    if lo < 4 {
        return Err(format!("q must be at least 4, got {lo}"));
    }
    if hi > u32::MAX as i64 {
        return Err(format!("q too large: {hi}"));
    }
    Ok((lo..=hi).map(|q| q as u32).collect())
}

fn envelope(command: &str, q: serde_json::Value, inputs: serde_json::Value) -> serde_json::Value {
    json!({ "schema": SCHEMA, "command": command, "q": q, "inputs": inputs })
}

fn run(command: Command, format: Format) -> Result<ExitCode, String> {
    match command {
        Command::Prob {
            q,
            word,
            length_cap,
        } => cmd_prob(q, &word, length_cap, format),
        Command::Sample {
            q,
            length,
            seed,
            window_cap,
            length_cap,
            strip,
        } => cmd_sample(q, length, seed, window_cap.0, length_cap, strip, format),
        Command::Cheb { q, range } => cmd_cheb(q, &range, format),
        Command::Marginal { q, len } => cmd_marginal(q, len, format),
        Command::Verify {
            suite,
            q,
            max_len,
            mn_range,
            jkl_range,
            max_n,
            samples,
            window_len,
            seed,
            jobs,
            inject_coeff_fault,
        } => cmd_verify(
            suite,
            &q,
            max_len,
            mn_range,
            jkl_range,
            max_n,
            samples,
            window_len,
            seed,
            jobs,
            inject_coeff_fault,
            format,
        ),
    }
}

fn cmd_prob(q: u32, word: &str, length_cap: usize, format: Format) -> Result<ExitCode, String> {
    check_q(q)?;
    let w = Word::parse(q, word).map_err(|e| e.to_string())?;
    let m = CylinderMeasure::with_options(
        q,
        MeasureOptions {
            length_cap,
            ..MeasureOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let p = m.prob(&w).map_err(|e| e.to_string())?;
    let decimal = decimal_string(&p, DECIMAL_DIGITS);
    match format {
        Format::Text => {
            println!("{p}");
            println!("≈ {decimal}");
        }
        Format::Json => {
            let mut v = envelope("prob", json!(q), json!({ "word": w.to_string() }));
            v["result"] = json!({ "p": p.to_string(), "decimal": decimal });
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn strip_char(c: u16) -> char {
    match c {
        1..=9 => (b'0' + c as u8) as char,
        10..=35 => (b'a' + (c - 10) as u8) as char,
        _ => '?',
    }
}

fn cmd_sample(
    q: u32,
    length: usize,
    seed: u64,
    window_cap: Option<usize>,
    length_cap: usize,
    strip: bool,
    format: Format,
) -> Result<ExitCode, String> {
    check_q(q)?;
    // canonical memo keys keep long streams fast at any q; the values are
    // identical to the exact-key path (verified in the test suite)
    let m = CylinderMeasure::with_options(
        q,
        MeasureOptions {
            length_cap,
            memo_mode: MemoMode::Canonical,
        },
    )
    .map_err(|e| e.to_string())?;
    let mut stream = ColoringStream::with_window_cap(&m, seed, window_cap);
    let coloring = stream.sample_n(length).map_err(|e| {
        format!("{e} (exact mode conditions on the whole window; use --window-cap N or raise --length-cap)")
    })?;
    let cap_str = match window_cap {
        Some(c) => c.to_string(),
        None => "none".to_string(),
    };
    match format {
        Format::Text => {
            println!("# q={q} seed={seed} rng={RNG_ID} window_cap={cap_str} length={length}");
            if strip {
                let s: String = coloring.colors().iter().map(|&c| strip_char(c)).collect();
                println!("{s}");
            } else {
                println!("{coloring}");
            }
        }
        Format::Json => {
            let mut v = envelope(
                "sample",
                json!(q),
                json!({
                    "length": length,
                    "seed": seed,
                    "rng": RNG_ID,
                    "window_cap": window_cap,
                }),
            );
            v["result"] = json!({ "colors": coloring.colors() });
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Decimal approximation of a ring element, collapsing √q exactly when q
/// is a perfect square and falling back to f64 otherwise. Display only.
fn approx(x: &QAdjoined) -> String {
    if let Some(r) = x.collapse() {
        decimal_string(&r, DECIMAL_DIGITS)
    } else {
        let v = x.rational_part().to_f64()
            + x.sqrt_coeff().to_f64() * (x.q() as f64).sqrt();
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn cmd_cheb(q: u32, range: &str, format: Format) -> Result<ExitCode, String> {
    check_q(q)?;
    let (lo, hi) = parse_range_i64(range)?;
    let table = CoeffTable::new(q).map_err(|e| e.to_string())?;
    let rows: Vec<(i64, QAdjoined, QAdjoined)> =
        (lo..=hi).map(|n| (n, table.c(n), table.d(n))).collect();
    match format {
        Format::Text => {
            let width = rows
                .iter()
                .map(|(_, c, _)| c.to_string().len())
                .max()
                .unwrap_or(8);
            println!("{:>4}  {:<width$}  {:>14}  {:<width$}  {:>14}", "n", "C(n)", "≈C", "D(n)", "≈D");
            for (n, c, d) in &rows {
                println!(
                    "{:>4}  {:<width$}  {:>14}  {:<width$}  {:>14}",
                    n,
                    c.to_string(),
                    approx(c),
                    d.to_string(),
                    approx(d),
                );
            }
        }
        Format::Json => {
            let mut v = envelope("cheb", json!(q), json!({ "range": format!("{lo}..{hi}") }));
            v["result"] = json!(rows
                .iter()
                .map(|(n, c, d)| json!({
                    "n": n,
                    "c": c.to_string(),
                    "c_decimal": approx(c),
                    "d": d.to_string(),
                    "d_decimal": approx(d),
                }))
                .collect::<Vec<_>>());
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_marginal(q: u32, len: usize, format: Format) -> Result<ExitCode, String> {
    check_q(q)?;
    let m = CylinderMeasure::with_options(
        q,
        MeasureOptions {
            length_cap: DEFAULT_LENGTH_CAP.max(len),
            ..MeasureOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let table = m.marginal_table(len).map_err(|e| e.to_string())?;
    match format {
        Format::Text => {
            let word_width = table
                .iter()
                .map(|(w, _)| w.to_string().len())
                .max()
                .unwrap_or(4)
                .max(4);
            let p_width = table
                .iter()
                .map(|(_, p)| p.to_string().len())
                .max()
                .unwrap_or(1);
            for (w, p) in &table {
                println!(
                    "{:<word_width$}  {:>p_width$}  ≈ {}",
                    w.to_string(),
                    p.to_string(),
                    decimal_string(p, DECIMAL_DIGITS)
                );
            }
        }
        Format::Json => {
            let mut v = envelope("marginal", json!(q), json!({ "len": len }));
            v["result"] = json!(table
                .iter()
                .map(|(w, p)| json!({
                    "word": w.to_string(),
                    "p": p.to_string(),
                    "decimal": decimal_string(p, DECIMAL_DIGITS),
                }))
                .collect::<Vec<_>>());
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Suite,
    q_spec: &str,
    max_len: usize,
    mn_range: i64,
    jkl_range: i64,
    max_n: usize,
    samples: usize,
    window_len: usize,
    seed: u64,
    jobs: usize,
    inject_coeff_fault: Option<usize>,
    format: Format,
) -> Result<ExitCode, String> {
    let q_set = parse_q_set(q_spec)?;
    let mode = if jobs == 1 {
        ExecMode::Sequential
    } else {
        ExecMode::default()
    };
    let fault = inject_coeff_fault.map(|index| Fault {
        kind: CoeffKind::C,
        index,
    });

    let run_all = |mode: ExecMode| -> Result<Vec<SuiteReport>, String> {
        let mut reports = Vec::new();
        let want = |s: Suite| suite == s || suite == Suite::All;
        if want(Suite::Golden) {
            reports
                .push(run_golden_suite_with_fault(&q_set, mode, fault).map_err(|e| e.to_string())?);
        }
        if want(Suite::Identities) {
            reports.push(
                run_identity_suite_with_fault(&q_set, mn_range, jkl_range, mode, fault)
                    .map_err(|e| e.to_string())?,
            );
        }
        if want(Suite::ChebOracle) {
            reports.push(
                run_coeff_oracle_suite_with_fault(&q_set, max_n, mode, fault)
                    .map_err(|e| e.to_string())?,
            );
        }
        if want(Suite::Measure) {
            reports.push(
                run_measure_suite_with_fault(&q_set, max_len, mode, fault)
                    .map_err(|e| e.to_string())?,
            );
        }
        if want(Suite::Sampler) {
            for &q in &q_set {
                reports.push(
                    run_sampler_suite(q, samples, window_len, seed).map_err(|e| e.to_string())?,
                );
            }
        }
        Ok(reports)
    };

    let reports = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| run_all(mode))?
    } else {
        run_all(mode)?
    };

    let authoritative_failure = reports.iter().any(|r| !r.advisory && !r.passed());
    match format {
        Format::Text => {
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", r.render_text(100));
            }
        }
        Format::Json => {
            let mut v = envelope(
                "verify",
                json!(q_set),
                json!({
                    "suite": suite.name(),
                    "max_len": max_len,
                    "mn_range": mn_range,
                    "jkl_range": jkl_range,
                    "max_n": max_n,
                    "samples": samples,
                    "window_len": window_len,
                    "seed": seed,
                }),
            );
            v["report"] = json!(reports.iter().map(|r| r.to_json()).collect::<Vec<_>>());
            v["passed"] = json!(!authoritative_failure);
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    Ok(if authoritative_failure {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
