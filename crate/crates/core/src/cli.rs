//! Command-line interface.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 usage error,
//! 3 internal inconsistency.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abelian2::{self, Abelian2Error, Group2, Subgroup};
use crate::arith;
use crate::form_class::{self, FormError, RankReport};
use crate::json::{de_bigint, ser_bigint};
use crate::quadfield::{FieldError, RealQuadratic};
use crate::selftest::{self, SelftestConfig};
use crate::unit_type::{self, CaseLabel, ClassificationReport, UnitTypeError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

/// Default upper limit on `--max` for `scan`.
pub const DEFAULT_SCAN_CEILING: i64 = 20_000;

#[derive(Debug, Parser)]
#[command(name = "quadunits", version, about = "Units, square classes and 2-ranks of real quadratic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the fundamental unit of Q(√d)
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        json: bool,
    },
    /// Tabulate units and 2-ranks for all squarefree d in a range
    Scan {
        #[arg(long)]
        min: i64,
        #[arg(long)]
        max: i64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Worker threads (defaults to the available parallelism)
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest accepted --max
        #[arg(long, default_value_t = DEFAULT_SCAN_CEILING)]
        ceiling: i64,
    },
    /// Narrow and wide class group 2-ranks of Q(√d)
    Ranks {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        json: bool,
    },
    /// Analyze an extension 0 → A → B → C → 0 of abelian 2-groups
    Abelian2 {
        /// Cyclic factors of B, e.g. "8,2"
        #[arg(long)]
        invariants: String,
        /// Generators of A separated by ';', e.g. "2,1;4,0"
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        subgroup: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant suites up to a ceiling on d
    Selftest {
        #[arg(long, default_value_t = 500)]
        max: i64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn inconsistent(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INCONSISTENT, message: message.into() }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::NotSquarefree(_) | FieldError::OutOfRange(_) => Failure::usage(e.to_string()),
            other => Failure::inconsistent(other.to_string()),
        }
    }
}

impl From<UnitTypeError> for Failure {
    fn from(e: UnitTypeError) -> Self {
        match e {
            UnitTypeError::Field(f) => f.into(),
            other => Failure::inconsistent(other.to_string()),
        }
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::inconsistent(e.to_string())
    }
}

impl From<Abelian2Error> for Failure {
    fn from(e: Abelian2Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure { code: EXIT_USAGE, message: format!("i/o error: {e}") }
}

/// One line of `scan` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub d: i64,
    #[serde(rename = "D")]
    pub disc: i64,
    #[serde(serialize_with = "ser_bigint", deserialize_with = "de_bigint")]
    pub eps_x: BigInt,
    #[serde(serialize_with = "ser_bigint", deserialize_with = "de_bigint")]
    pub eps_y: BigInt,
    pub unit_norm: i8,
    pub m: Option<i64>,
    pub case: CaseLabel,
    pub is_square_mod4: bool,
    pub is_sum_two_squares: bool,
    pub rho: u32,
    pub rho_plus: u32,
    pub rho_inf: u32,
    pub four_rank_plus: u32,
    pub splits: bool,
    pub omega_exists: bool,
}

pub const CSV_HEADER: &str = "d,D,eps_x,eps_y,unit_norm,m,case,is_square_mod4,is_sum_two_squares,rho,rho_plus,rho_inf,four_rank_plus,splits,omega_exists";

impl ScanRow {
    pub fn from_reports(c: &ClassificationReport, r: &RankReport) -> Self {
        ScanRow {
            d: c.d,
            disc: c.disc,
            eps_x: c.epsilon.x().clone(),
            eps_y: c.epsilon.y().clone(),
            unit_norm: c.unit_norm,
            m: c.m,
            case: c.case,
            is_square_mod4: c.is_square_mod4,
            is_sum_two_squares: c.is_sum_two_squares,
            rho: r.rho,
            rho_plus: r.rho_plus,
            rho_inf: r.rho_inf,
            four_rank_plus: r.four_rank_plus,
            splits: r.splits,
            omega_exists: r.omega_exists,
        }
    }

    pub fn to_csv(&self) -> String {
        let b = |v: bool| u8::from(v);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.disc,
            self.eps_x,
            self.eps_y,
            self.unit_norm,
            self.m.map(|m| m.to_string()).unwrap_or_default(),
            self.case.as_str(),
            b(self.is_square_mod4),
            b(self.is_sum_two_squares),
            self.rho,
            self.rho_plus,
            self.rho_inf,
            self.four_rank_plus,
            b(self.splits),
            b(self.omega_exists),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rows serialize")
    }

    pub fn from_json(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }
}

/// Classification and rank report for one squarefree `d`.
pub fn scan_row(d: i64) -> Result<ScanRow, String> {
    let k = RealQuadratic::new(d).map_err(|e| e.to_string())?;
    let c = unit_type::classify(&k).map_err(|e| e.to_string())?;
    let r = form_class::rank_report(&k).map_err(|e| e.to_string())?;
    Ok(ScanRow::from_reports(&c, &r))
}

/// Rows for every squarefree `d` in `[min, max]`, in ascending order.
pub fn scan_rows(min: i64, max: i64, jobs: usize) -> Result<Vec<ScanRow>, (i64, String)> {
    use rayon::prelude::*;
    let ds: Vec<i64> = (min..=max).filter(|&d| arith::is_squarefree(d).unwrap_or(false)).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    let results: Vec<Result<ScanRow, (i64, String)>> =
        pool.install(|| ds.par_iter().map(|&d| scan_row(d).map_err(|e| (d, e))).collect());
    results.into_iter().collect()
}

/// Renders rows as CSV (with header) or JSON Lines.
pub fn render_rows(rows: &[ScanRow], format: Format) -> String {
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str(CSV_HEADER);
        out.push('\n');
    }
    for row in rows {
        let line = match format {
            Format::Csv => row.to_csv(),
            Format::Json => row.to_json(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn case_summary(rows: &[ScanRow]) -> String {
    let mut counts: BTreeMap<CaseLabel, usize> = CaseLabel::ALL.iter().map(|&c| (c, 0)).collect();
    for row in rows {
        *counts.entry(row.case).or_default() += 1;
    }
    let parts: Vec<String> = counts.iter().map(|(c, n)| format!("{}={n}", c.as_str())).collect();
    format!("# {} fields; cases: {}", rows.len(), parts.join(" "))
}

fn yes_no(v: bool) -> &'static str {
    if v {
        "yes"
    } else {
        "no"
    }
}

fn render_classification(r: &ClassificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d = {}, D = {}", r.d, r.disc);
    let _ = writeln!(s, "fundamental unit: {}  (norm {:+})", r.epsilon, r.unit_norm);
    let _ = writeln!(s, "N(eps + 1) = {}", r.norm_eps_plus_one);
    match r.m {
        Some(m) => {
            let _ = writeln!(s, "m = {m}, D/m has squarefree part {}", r.m_complement.unwrap_or(0));
        }
        None => {
            let _ = writeln!(s, "m: undefined (unit of norm -1)");
        }
    }
    let _ = writeln!(s, "case: {}", r.case);
    let _ = write!(s, "square mod 4: {}", yes_no(r.is_square_mod4));
    if let (true, Some(w)) = (r.is_square_mod4, &r.square_mod4_witness) {
        let _ = write!(s, "  (alpha = {}, beta = {})", w.alpha, w.beta);
    }
    s.push('\n');
    let _ = write!(s, "sum of two squares: {}", yes_no(r.is_sum_two_squares));
    if let Some(w) = &r.two_squares_witness {
        let _ = write!(s, "  ({})^2 + ({})^2", w.x, w.y);
    }
    s.push('\n');
    if let Some(h) = &r.hilbert90_witness {
        let _ = writeln!(s, "alpha with sigma(alpha) = eps*alpha: {}  (norm {})", h.alpha, h.m);
    }
    if r.is_square_mod4 {
        let _ = writeln!(s, "global multiplicative square mod 4: {}", yes_no(r.global_mult_square_mod4));
    }
    s
}

fn render_ranks(d: i64, disc: i64, r: &RankReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d = {d}, D = {disc}");
    let _ = writeln!(s, "narrow class group C+ = {}  (h+ = {})", r.narrow, r.h_plus);
    let _ = writeln!(s, "class group C = {}  (h = {})", r.wide, r.h);
    let _ = writeln!(
        s,
        "rho = {}, rho+ = {}, rho_inf = {}, 4-rank(C+) = {}",
        r.rho, r.rho_plus, r.rho_inf, r.four_rank_plus
    );
    let _ = writeln!(s, "unit norm {:+}, element of norm -1: {}", r.unit_norm, yes_no(r.omega_exists));
    let _ = writeln!(s, "0 -> P/P+ -> C+ -> C -> 0 splits: {}", yes_no(r.splits));
    s
}

fn parse_invariants(text: &str) -> Result<Group2, Failure> {
    let factors = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| Failure::usage(format!("bad invariant factor '{t}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Group2::new(factors)?)
}

fn parse_subgroup(b: &Group2, text: &str) -> Result<Subgroup, Failure> {
    let mut gens = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let v = part
            .split(',')
            .map(str::trim)
            .map(|t| t.parse::<i64>().map_err(|_| Failure::usage(format!("bad generator entry '{t}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        gens.push(v);
    }
    Ok(Subgroup::new(b, &gens)?)
}

fn render_extension(b: &Group2, a: &Subgroup, r: &abelian2::ExtensionReport) -> String {
    let mut s = String::new();
    let gens: Vec<String> = a
        .generators()
        .iter()
        .map(|g| format!("({})", g.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    let _ = writeln!(s, "B = {b}");
    let _ = writeln!(s, "A = <{}> = {}", gens.join(", "), r.a_structure);
    let _ = writeln!(s, "C = B/A = {}", r.c_structure);
    let _ = writeln!(
        s,
        "rank A = {}, rank B = {}, rank C = {}, rank A1 = {}, rank A/A1 = {}",
        r.rank_a, r.rank_b, r.rank_c, r.rank_a1, r.rank_a_mod_a1
    );
    let _ = writeln!(s, "(a) 4-rank B = {} >= rank A + rank C - rank B = {}", r.four_rank_b, r.four_rank_bound);
    match (r.max_summand_rank, r.splits) {
        (Some(k), Some(split)) => {
            let _ = writeln!(s, "(b) maximal rank of a subgroup of A that is a direct summand of B: {k}");
            let _ = writeln!(s, "(b) splits: {}", yes_no(split));
        }
        _ => {
            let _ = writeln!(s, "(b) not applicable: A not elementary");
        }
    }
    s
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(io_failure)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Classify { d, json } => {
            let k = RealQuadratic::new(d)?;
            let report = unit_type::classify(&k)?;
            let text = if json {
                serde_json::to_string(&report).expect("report serializes") + "\n"
            } else {
                render_classification(&report)
            };
            emit(out, &text)?;
        }
        Command::Scan { min, max, format, jobs, out: path, ceiling } => {
            if min < 2 || min > max {
                return Err(Failure::usage(format!("need 1 < min <= max (got min = {min}, max = {max})")));
            }
            if max > ceiling {
                return Err(Failure::usage(format!("max = {max} exceeds the ceiling {ceiling}; raise --ceiling")));
            }
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if jobs == 0 {
                return Err(Failure::usage("--jobs must be positive"));
            }
            let rows = scan_rows(min, max, jobs)
                .map_err(|(d, e)| Failure::inconsistent(format!("d = {d}: {e}")))?;
            let text = render_rows(&rows, format);
            match path {
                Some(p) => std::fs::write(&p, text).map_err(io_failure)?,
                None => emit(out, &text)?,
            }
            let _ = writeln!(err, "{}", case_summary(&rows));
        }
        Command::Ranks { d, json } => {
            let k = RealQuadratic::new(d)?;
            let report = form_class::rank_report(&k)?;
            let text = if json {
                serde_json::to_string(&report).expect("report serializes") + "\n"
            } else {
                render_ranks(k.d(), k.disc(), &report)
            };
            emit(out, &text)?;
        }
        Command::Abelian2 { invariants, subgroup, json } => {
            let b = parse_invariants(&invariants)?;
            let a = parse_subgroup(&b, &subgroup)?;
            let report = abelian2::analyze_extension(&b, &a)?;
            let text = if json {
                serde_json::to_string(&report).expect("report serializes") + "\n"
            } else {
                render_extension(&b, &a, &report)
            };
            emit(out, &text)?;
        }
        Command::Selftest { max, inject_fault } => {
            if max < 2 {
                let _ = writeln!(err, "warning: --max {max} leaves nothing to check; vacuous pass");
            }
            let summary = selftest::run(&SelftestConfig { max_d: max, inject_fault });
            let mut text = String::new();
            for suite in &summary.suites {
                let _ = writeln!(text, "{suite}");
            }
            let verdict = if summary.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(text, "selftest up to d = {max}: {verdict} ({} checks)", summary.total_checks());
            emit(out, &text)?;
            if !summary.passed() {
                return Ok(EXIT_INVARIANT);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
