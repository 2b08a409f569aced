//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or parse
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::family::{
    find_identity_failure, slope_check, verify_with_seed, PaperParams, SlopeCheck,
    VerificationReport, DEFAULT_SEED, REPORT_SCHEMA,
};
use crate::word::{Alphabet, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fgkit", version, about = "Free-group toolkit and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Word arithmetic on the command line.
    Word {
        #[arg(value_enum)]
        op: WordOp,
        /// Words in the text grammar, e.g. "y1^2 y3^-1".
        #[arg(required = true)]
        words: Vec<String>,
        /// Comma-separated generator names.
        #[arg(long, default_value = "y1,y2,y3")]
        names: String,
        /// Compare conjugacy classes without identifying inverses (canon only).
        #[arg(long)]
        oriented: bool,
    },
    /// Verify a single parameter pair.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        g: i64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify a grid of parameter pairs plus boundary-class distinctness.
    Sweep {
        /// Comma-separated values or inclusive ranges `a..b`.
        #[arg(long, default_value = "2,4,6,8")]
        g_list: String,
        #[arg(long, default_value = "3..12")]
        l_list: String,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        parallel: i64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the conjugation identities for i, j up to the given bounds.
    Identities {
        #[arg(long, allow_negative_numbers = true)]
        i_max: i64,
        #[arg(long, allow_negative_numbers = true)]
        j_max: i64,
        #[arg(long, default_value = "3..12")]
        l_list: String,
    },
}

#[derive(clap::Args, Debug)]
struct OutputArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Drop per-check timings so output is byte-identical across runs.
    #[arg(long)]
    no_timings: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum WordOp {
    Reduce,
    Invert,
    Concat,
    Cyclic,
    Canon,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Sweep parameters after validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub g_values: Vec<i64>,
    pub l_values: Vec<i64>,
    pub seed: u64,
    pub parallelism: usize,
    pub timings: bool,
}

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Whole-run output document.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub seed: u64,
    pub ok: bool,
    pub instances: Vec<VerificationReport>,
    pub distinctness: Vec<SlopeCheck>,
}

impl ReportDocument {
    fn new(seed: u64, instances: Vec<VerificationReport>, distinctness: Vec<SlopeCheck>) -> Self {
        let ok = instances.iter().all(|r| r.hard_ok) && distinctness.iter().all(SlopeCheck::ok);
        ReportDocument { schema: REPORT_SCHEMA, seed, ok, instances, distinctness }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report JSON");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Table => self.render_table(),
        }
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let timings = self.instances.iter().any(|r| r.timings.is_some());
        let mut header = vec![
            "kind", "g", "l", "injective", "image_rank", "closed_form_ok",
            "identities_36_37_ok", "block_letter_ok", "quotient_order", "paper_order",
            "paper_order_match", "hard_ok", "oriented", "distinct", "boundary_class",
        ];
        if timings {
            header.push("time_ms");
        }
        w.write_record(&header).expect("csv");
        for r in &self.instances {
            let mut row = vec![
                "instance".to_string(),
                r.params.g().to_string(),
                r.params.l().to_string(),
                r.injective.to_string(),
                r.image_rank.to_string(),
                r.closed_form_ok.to_string(),
                r.identities_36_37_ok.to_string(),
                r.block_letter_ok.to_string(),
                r.quotient_order.to_string(),
                r.paper_order.to_string(),
                r.paper_order_match.to_string(),
                r.hard_ok.to_string(),
                String::new(),
                String::new(),
                r.boundary_class.to_string(),
            ];
            if timings {
                row.push(format!("{:.3}", total_ms(r)));
            }
            w.write_record(&row).expect("csv");
        }
        for d in &self.distinctness {
            let mut row = vec![String::new(); header.len()];
            row[0] = "distinctness".into();
            row[1] = d.g.to_string();
            row[2] = join(&d.l_values, ";");
            row[11] = d.ok().to_string();
            row[12] = d.oriented.to_string();
            row[13] = d.distinct.to_string();
            w.write_record(&row).expect("csv");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
    }

    fn render_table(&self) -> String {
        let timings = self.instances.iter().any(|r| r.timings.is_some());
        let mut out = String::new();
        out.push_str(&format!("{REPORT_SCHEMA}  seed={}  ok={}\n", self.seed, self.ok));
        out.push_str(&format!(
            "{:>3} {:>3} {:>5} {:>4} {:>6} {:>6} {:>6} {:>8} {:>6} {:>5} {:>6}{}  boundary_class\n",
            "g", "l", "inj", "rank", "closed", "ident", "block", "quotient", "4l+4", "match",
            "hard", if timings { "  time_ms" } else { "" },
        ));
        for r in &self.instances {
            let class = r.boundary_class.to_string();
            let class = if class.len() > 60 { format!("{}...", &class[..57]) } else { class };
            out.push_str(&format!(
                "{:>3} {:>3} {:>5} {:>4} {:>6} {:>6} {:>6} {:>8} {:>6} {:>5} {:>6}{}  {}\n",
                r.params.g(),
                r.params.l(),
                r.injective,
                r.image_rank,
                r.closed_form_ok,
                r.identities_36_37_ok,
                r.block_letter_ok,
                r.quotient_order.to_string(),
                r.paper_order,
                r.paper_order_match,
                r.hard_ok,
                if timings { format!("  {:>7.1}", total_ms(r)) } else { String::new() },
                class,
            ));
        }
        for d in &self.distinctness {
            out.push_str(&format!(
                "distinctness g={} oriented={} l={{{}}}: distinct={} nontrivial={}\n",
                d.g,
                d.oriented,
                join(&d.l_values, ","),
                d.distinct,
                d.nontrivial
            ));
        }
        out
    }
}

fn total_ms(r: &VerificationReport) -> f64 {
    r.timings.as_ref().map(|t| t.values().sum()).unwrap_or(0.0)
}

fn join(values: &[i64], sep: &str) -> String {
    values.iter().map(i64::to_string).collect::<Vec<_>>().join(sep)
}

/// Parses `2,4,6` or `3..12` (inclusive) or mixtures like `3,5..7`.
pub fn parse_int_list(text: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| format!("bad range `{item}`"))?;
                let b: i64 = b.trim().parse().map_err(|_| format!("bad range `{item}`"))?;
                if a > b {
                    return Err(format!("empty range `{item}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| format!("bad integer `{item}`"))?),
        }
    }
    Ok(out)
}

pub fn run_sweep(config: &SweepConfig) -> ReportDocument {
    let params: Vec<PaperParams> = config
        .g_values
        .iter()
        .flat_map(|&g| config.l_values.iter().map(move |&l| (g, l)))
        .map(|(g, l)| PaperParams::new(g, l).expect("validated sweep config"))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .expect("thread pool");
    let (instances, distinctness) = pool.install(|| {
        let instances: Vec<VerificationReport> = params
            .par_iter()
            .map(|&p| {
                let r = verify_with_seed(p, config.seed);
                if config.timings {
                    r
                } else {
                    r.without_timings()
                }
            })
            .collect();
        let distinctness: Vec<SlopeCheck> = config
            .g_values
            .par_iter()
            .flat_map_iter(|&g| {
                [false, true].map(|oriented| {
                    slope_check(g, &config.l_values, oriented).expect("validated sweep config")
                })
            })
            .collect();
        (instances, distinctness)
    });
    ReportDocument::new(config.seed, instances, distinctness)
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI against the given streams and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, UsageError> {
    match cli.command {
        Command::Word { op, words, names, oriented } => {
            let alphabet = Alphabet::new(names.split(',').map(str::trim))?;
            let parsed = words
                .iter()
                .map(|w| Word::parse(w, &alphabet))
                .collect::<Result<Vec<_>, _>>()?;
            match op {
                WordOp::Reduce => {
                    for w in &parsed {
                        writeln!(out, "{w}")?;
                    }
                }
                WordOp::Invert => {
                    for w in &parsed {
                        writeln!(out, "{}", w.inverse())?;
                    }
                }
                WordOp::Concat => {
                    let mut acc = Word::identity(&alphabet);
                    for w in &parsed {
                        acc = acc.concat(w)?;
                    }
                    writeln!(out, "{acc}")?;
                }
                WordOp::Cyclic => {
                    for w in &parsed {
                        let (core, conj) = w.cyclic_reduce();
                        writeln!(out, "{core} ; {conj}")?;
                    }
                }
                WordOp::Canon => {
                    for w in &parsed {
                        writeln!(out, "{}", w.canonical_class(oriented))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { g, l, output } => {
            let p = PaperParams::new(g, l)?;
            let mut report = verify_with_seed(p, output.seed);
            if output.no_timings {
                report = report.without_timings();
            }
            let doc = ReportDocument::new(output.seed, vec![report], Vec::new());
            emit(&doc, &output, out, err)
        }
        Command::Sweep { g_list, l_list, parallel, output } => {
            let config = sweep_config(&g_list, &l_list, parallel, &output)?;
            let doc = run_sweep(&config);
            emit(&doc, &output, out, err)
        }
        Command::Identities { i_max, j_max, l_list } => {
            if i_max < 0 || j_max < 0 {
                return Err(UsageError("bounds must be non-negative".into()));
            }
            let ls = parse_int_list(&l_list)?;
            if ls.is_empty() {
                return Err(UsageError("l list is empty".into()));
            }
            if let Some(&bad) = ls.iter().find(|&&l| l < 3) {
                return Err(UsageError(format!("l must be ≥ 3 (got {bad})")));
            }
            for &l in &ls {
                if let Some(f) = find_identity_failure(i_max as usize, j_max as usize, l) {
                    writeln!(
                        out,
                        "FAIL branch={:?} i={} j={} l={}",
                        f.branch, f.i, f.j, f.l
                    )?;
                    return Ok(EXIT_CHECK_FAILED);
                }
            }
            writeln!(
                out,
                "ok: identities hold for i <= {i_max}, j <= {j_max}, l in {{{}}}",
                join(&ls, ",")
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn sweep_config(
    g_list: &str,
    l_list: &str,
    parallel: i64,
    output: &OutputArgs,
) -> Result<SweepConfig, UsageError> {
    let g_values = parse_int_list(g_list)?;
    let l_values = parse_int_list(l_list)?;
    if g_values.is_empty() {
        return Err(UsageError("g list is empty".into()));
    }
    if l_values.is_empty() {
        return Err(UsageError("l list is empty".into()));
    }
    for &g in &g_values {
        for &l in &l_values {
            PaperParams::new(g, l)?;
        }
    }
    if parallel < 1 {
        return Err(UsageError("parallelism must be positive".into()));
    }
    Ok(SweepConfig {
        g_values,
        l_values,
        seed: output.seed,
        parallelism: parallel as usize,
        timings: !output.no_timings,
    })
}

fn emit(
    doc: &ReportDocument,
    output: &OutputArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, UsageError> {
    let text = doc.render(output.format);
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes())?,
    }
    for r in &doc.instances {
        for w in &r.warnings {
            writeln!(err, "g={} l={}: {w}", r.params.g(), r.params.l())?;
        }
        for f in &r.failures {
            writeln!(err, "g={} l={}: FAIL {f}", r.params.g(), r.params.l())?;
        }
    }
    for d in doc.distinctness.iter().filter(|d| !d.ok()) {
        writeln!(err, "g={}: FAIL boundary classes collide: {:?}", d.g, d.collisions)?;
    }
    Ok(if doc.ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}
