//! The `covercert` command line, as a library so it can be driven in-process.
//!
//! Exit codes:
//!
//! | code | verify       | certify                  | search               | bounds, primes |
//! |------|--------------|--------------------------|----------------------|----------------|
//! | 0    | COVERS       | CERTIFIED_NOT_COVERING   | FOUND or EXHAUSTED   | success        |
//! | 1    | NOT_COVERING | INCONCLUSIVE             | BUDGET               |                |
//! | 2    | usage or input error, for every subcommand                                 |
//!
//! `certify` exits 0 when it obtains a certificate that the system does not
//! cover. That is the opposite sense from `verify`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use covercert::bounds::{
    self, coarse_step, fine_step, series_enclosure, Constants, Enclosure, Rounding, Series, Variant,
};
use covercert::covering::{CoveringSystem, SystemFile};
use covercert::distortion::{certify, Certificate, Deltas, Mode};
use covercert::polyring::{count_irreducibles, irreducibles_of_degree};
use covercert::rational::{self, rat, Rational};
use covercert::search::{canonical_reduce, search, Outcome, SearchMode, SearchSpec};
use covercert::{Error, FieldCtx, DEFAULT_CAP};
use serde::{Deserialize, Serialize};

/// Environment variable overriding the enumeration cap.
pub const CAP_VAR: &str = "COVERCERT_CAP";

#[derive(Parser, Debug)]
#[command(name = "covercert", version, about = "Verify, refute and search covering systems of F_q[x]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustively check whether a system covers F_q[x].
    Verify {
        path: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the distortion method and try to certify that a system does not cover.
    Certify {
        path: PathBuf,
        /// One threshold for every stage, e.g. 1/2.
        #[arg(long, conflicts_with = "deltas")]
        delta: Option<String>,
        /// Comma-separated thresholds, one per prime of the lcm.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = ModeArg::Second)]
        mode: ModeArg,
        #[arg(long)]
        json: bool,
    },
    /// Series enclosures, derived constants and the field-size threshold.
    Bounds {
        #[arg(long, default_value_t = 0)]
        g: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// Cutoff for the series; defaults to the variant's.
        #[arg(long)]
        q0: Option<String>,
        /// Width of the series enclosures.
        #[arg(long, default_value = "1/10000")]
        precision: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Paper)]
        variant: VariantArg,
        /// Re-derive the constants rounding to 0.0001 instead of 0.01.
        #[arg(long)]
        fine: bool,
        #[arg(long)]
        json: bool,
    },
    /// Count (and optionally list) monic irreducibles of one degree.
    Primes {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json: bool,
    },
    /// Backtracking search for covering systems.
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        max_degree: usize,
        /// Distinct moduli; same as --multiplicity 1.
        #[arg(long, conflicts_with = "multiplicity")]
        distinct: bool,
        #[arg(long)]
        multiplicity: Option<usize>,
        #[arg(long, value_enum, default_value_t = SearchModeArg::First)]
        mode: SearchModeArg,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        symmetry: Switch,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Second,
    Mixed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Paper,
    #[value(name = "refined-724")]
    Refined724,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SearchModeArg {
    First,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(code: i32, stdout: String) -> Self {
        Output {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(stderr: String) -> Self {
        Output {
            code: 2,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output::usage(text)
            } else {
                Output::ok(0, text)
            };
        }
    };
    let cap = match enumeration_cap() {
        Ok(cap) => cap,
        Err(msg) => return Output::usage(format!("error: {msg}\n")),
    };
    match dispatch(cli.command, cap) {
        Ok(out) => out,
        Err(e) => Output::usage(format!("error: {e}\n")),
    }
}

fn enumeration_cap() -> Result<u64, String> {
    match std::env::var(CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| format!("{CAP_VAR} must be a positive integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn dispatch(command: Command, cap: u64) -> Result<Output, Error> {
    match command {
        Command::Verify { path, threads, json } => verify_cmd(&path, threads, json, cap),
        Command::Certify {
            path,
            delta,
            deltas,
            mode,
            json,
        } => certify_cmd(&path, delta, deltas, mode, json, cap),
        Command::Bounds {
            g,
            s,
            q0,
            precision,
            variant,
            fine,
            json,
        } => bounds_cmd(g, s, q0, &precision, variant, fine, json),
        Command::Primes {
            p,
            k,
            degree,
            list,
            json,
        } => primes_cmd(p, k, degree, list, json, cap),
        Command::Search {
            p,
            k,
            max_degree,
            distinct,
            multiplicity,
            mode,
            budget,
            symmetry,
            threads,
            json,
        } => {
            let mut spec = SearchSpec::new(FieldCtx::new(p, k)?, max_degree);
            spec.multiplicity_cap = if distinct { 1 } else { multiplicity.unwrap_or(1) };
            spec.mode = match mode {
                SearchModeArg::First => SearchMode::First,
                SearchModeArg::Exhaustive => SearchMode::Exhaustive,
            };
            spec.budget = budget;
            spec.symmetry = matches!(symmetry, Switch::On);
            spec.threads = threads.max(1);
            spec.cap = cap;
            search_cmd(&spec, json)
        }
    }
}

fn load(path: &PathBuf, cap: u64) -> Result<CoveringSystem, Error> {
    let text = std::fs::read(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    CoveringSystem::load_with_cap(&text, cap)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Output of `verify --json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub p: u64,
    pub k: u32,
    pub congruences: usize,
    pub multiplicity: usize,
    pub lcm: String,
    /// `COVERS` or `NOT_COVERING`.
    pub verdict: String,
    /// First uncovered residue in enumeration order.
    pub witness: Option<String>,
    #[serde(with = "rational::serde_text")]
    pub uncovered_density: Rational,
}

fn verify_cmd(path: &PathBuf, threads: usize, json: bool, cap: u64) -> Result<Output, Error> {
    let sys = load(path, cap)?;
    let ctx = sys.ctx();
    let coverage = sys.covers_with_threads(threads.max(1))?;
    let report = VerifyReport {
        p: ctx.p() as u64,
        k: ctx.k(),
        congruences: sys.congruences().len(),
        multiplicity: sys.multiplicity(),
        lcm: sys.lcm().format(ctx),
        verdict: if coverage.covers { "COVERS" } else { "NOT_COVERING" }.into(),
        witness: coverage.witness.as_ref().map(|w| w.format(ctx)),
        uncovered_density: sys.uncovered_density()?,
    };
    let code = if coverage.covers { 0 } else { 1 };
    if json {
        return Ok(Output::ok(code, to_json(&report)));
    }
    let mut out = String::new();
    writeln!(out, "{}", report.verdict).unwrap();
    writeln!(out, "  field          GF({}^{})", report.p, report.k).unwrap();
    writeln!(out, "  congruences    {}", report.congruences).unwrap();
    writeln!(out, "  multiplicity   {}", report.multiplicity).unwrap();
    writeln!(out, "  lcm            {}", report.lcm).unwrap();
    writeln!(
        out,
        "  uncovered      {} ({})",
        rational::to_text(&report.uncovered_density),
        rational::to_decimal(&report.uncovered_density, 6)
    )
    .unwrap();
    if let Some(w) = &report.witness {
        writeln!(out, "  witness        {w}").unwrap();
    }
    Ok(Output::ok(code, out))
}

fn certify_cmd(
    path: &PathBuf,
    delta: Option<String>,
    deltas: Option<Vec<String>>,
    mode: ModeArg,
    json: bool,
    cap: u64,
) -> Result<Output, Error> {
    let sys = load(path, cap)?;
    let schedule = match (delta, deltas) {
        (Some(d), _) => Deltas::Uniform(rational::parse(&d)?),
        (None, Some(list)) => Deltas::PerStage(list.iter().map(|d| rational::parse(d)).collect::<Result<_, _>>()?),
        (None, None) => Deltas::default(),
    };
    let mode = match mode {
        ModeArg::Second => Mode::Second,
        ModeArg::Mixed => Mode::Mixed,
    };
    let cert = certify(&sys, &schedule, mode)?;
    let code = match cert.verdict {
        covercert::distortion::Verdict::CertifiedNotCovering => 0,
        covercert::distortion::Verdict::Inconclusive => 1,
    };
    if json {
        return Ok(Output::ok(code, to_json(&cert)));
    }
    Ok(Output::ok(code, certificate_table(&cert)))
}

fn certificate_table(cert: &Certificate) -> String {
    let mut out = String::new();
    writeln!(out, "{}", cert.verdict).unwrap();
    writeln!(
        out,
        "  {:>3}  {:<16} {:>3}  {:>8}  {:>12}  {:>12}  {:>12}",
        "j", "prime", "nu", "delta", "M1", "M2", "term"
    )
    .unwrap();
    for row in &cert.stages {
        writeln!(
            out,
            "  {:>3}  {:<16} {:>3}  {:>8}  {:>12}  {:>12}  {:>12}",
            row.j,
            row.prime,
            row.nu,
            rational::to_text(&row.delta),
            rational::to_decimal(&row.m1, 8),
            rational::to_decimal(&row.m2, 8),
            rational::to_decimal(&row.term, 8)
        )
        .unwrap();
    }
    writeln!(
        out,
        "  sum            {} ({})",
        rational::to_text(&cert.criterion_sum),
        rational::to_decimal(&cert.criterion_sum, 8)
    )
    .unwrap();
    writeln!(
        out,
        "  P_J(covered)   {} ({})",
        rational::to_text(&cert.covered_mass),
        rational::to_decimal(&cert.covered_mass, 8)
    )
    .unwrap();
    out
}

/// One series line of the bounds report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub name: String,
    pub formula: String,
    pub enclosure: Enclosure,
}

/// A recomputed threshold next to the figure printed for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub computed: String,
    pub claimed: String,
    pub agrees: bool,
}

/// Output of `bounds --json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub g: u32,
    pub s: u32,
    #[serde(with = "rational::serde_text")]
    pub q0: Rational,
    #[serde(with = "rational::serde_text")]
    pub precision: Rational,
    pub variant: Variant,
    #[serde(with = "rational::serde_text")]
    pub rounding_step: Rational,
    pub series: Vec<SeriesRow>,
    pub constants: Constants,
    /// Whether the printed constants are at least the derived ones.
    pub printed_constants_dominate: bool,
    /// Right-hand side of the reciprocal-sum bound at degree cutoff 1.
    #[serde(with = "rational::serde_text")]
    pub mertens_log_bound_at_1: Rational,
    /// Right-hand side of the squared-reciprocal bound at `q = q0`.
    #[serde(with = "rational::serde_text")]
    pub mertens_square_bound_at_q0: Rational,
    /// Second-moment bound for a degree-1 prime at `q = q0`.
    pub second_moment_bound_deg1: Enclosure,
    pub threshold_value: Enclosure,
    /// Least integer field size the bound applies to.
    pub threshold: String,
    pub comparisons: Vec<Comparison>,
}

/// Builds the bounds report. The printed constants are used as-is for the
/// default variant at `q0 = 700` with coarse rounding; every other
/// combination re-derives them.
pub fn bounds_report(
    g: u32,
    s: u32,
    q0: Option<Rational>,
    precision: Rational,
    variant: Variant,
    fine: bool,
) -> Result<BoundsReport, Error> {
    let q0 = q0.unwrap_or_else(|| variant.q0());
    let fine = fine || variant == Variant::Refined724;
    let step = if fine { fine_step() } else { coarse_step() };
    let derived = Constants::derive(&Rounding::new(q0.clone(), step.clone()))?;
    let printed = Constants::paper();
    let constants = if variant == Variant::Paper && !fine && q0 == printed.q0 {
        printed.clone()
    } else {
        derived.constants.clone()
    };

    let mut series = Vec::with_capacity(5);
    for s in Series::ALL {
        series.push(SeriesRow {
            name: s.name().into(),
            formula: s.formula().into(),
            enclosure: series_enclosure(s, &q0, &precision)?,
        });
    }
    let threshold = bounds::threshold_with(&constants, g, s)?;
    let tiny = rat(1, 1_000_000_000_000);

    let mut comparisons = Vec::new();
    let mut compare = |label: &str, computed: &BigInt, claimed: u64| {
        comparisons.push(Comparison {
            label: label.into(),
            computed: computed.to_string(),
            claimed: claimed.to_string(),
            agrees: *computed == claimed.into(),
        });
    };
    if g == 0 && s == 1 {
        match (variant, fine) {
            (Variant::Paper, false) => compare("distinct moduli, printed constants", &threshold.q, 759),
            (Variant::Paper, true) => {
                compare("constants rounded to 0.0001", &threshold.q, 739);
                let held = held_prefactor(&q0)?;
                compare("constants rounded to 0.0001, prefactor kept at 0.01", &held, 739);
            }
            (Variant::Refined724, _) => {
                compare("q0 = 724, constants rounded to 0.0001", &threshold.q, 725);
                let held = held_prefactor(&q0)?;
                compare("q0 = 724, constants rounded to 0.0001, prefactor kept at 0.01", &held, 725);
            }
        }
    }

    Ok(BoundsReport {
        g,
        s,
        printed_constants_dominate: printed.dominates(&derived.constants),
        mertens_log_bound_at_1: constants.mertens_log_bound(1, g)?,
        mertens_square_bound_at_q0: constants.mertens_square_bound(&q0, g),
        second_moment_bound_deg1: constants.second_moment_bound(1, &q0, g, s, &tiny)?,
        threshold_value: threshold.value,
        threshold: threshold.q.to_string(),
        q0,
        precision,
        variant,
        rounding_step: step,
        series,
        constants,
        comparisons,
    })
}

/// Threshold with fine rounding everywhere except the prefactor.
fn held_prefactor(q0: &Rational) -> Result<BigInt, Error> {
    let rounding = Rounding {
        q0: q0.clone(),
        step: fine_step(),
        prefactor_step: coarse_step(),
    };
    Ok(bounds::threshold_with(&Constants::derive(&rounding)?.constants, 0, 1)?.q)
}

fn bounds_cmd(
    g: u32,
    s: u32,
    q0: Option<String>,
    precision: &str,
    variant: VariantArg,
    fine: bool,
    json: bool,
) -> Result<Output, Error> {
    let q0 = q0.map(|v| rational::parse(&v)).transpose()?;
    let precision = rational::parse(precision)?;
    if s == 0 {
        return Err(Error::InvalidInput("--s must be at least 1".into()));
    }
    let variant = match variant {
        VariantArg::Paper => Variant::Paper,
        VariantArg::Refined724 => Variant::Refined724,
    };
    let report = bounds_report(g, s, q0, precision, variant, fine)?;
    if json {
        return Ok(Output::ok(0, to_json(&report)));
    }
    Ok(Output::ok(0, bounds_table(&report)))
}

fn bounds_table(r: &BoundsReport) -> String {
    let mut out = String::new();
    let dec = |v: &Rational| rational::to_decimal(v, 6);
    writeln!(
        out,
        "series at q0 = {} (width <= {})",
        rational::to_text(&r.q0),
        rational::to_text(&r.precision)
    )
    .unwrap();
    for row in &r.series {
        writeln!(out, "  {}  {:<40} {}", row.name, row.formula, row.enclosure).unwrap();
    }
    writeln!(out, "constants (rounded up to {})", rational::to_text(&r.rounding_step)).unwrap();
    for (name, value) in r.constants.table() {
        writeln!(out, "  {:<16} {:>12}  {}", name, rational::to_text(value), dec(value)).unwrap();
    }
    writeln!(
        out,
        "  printed constants dominate derived: {}",
        if r.printed_constants_dominate { "yes" } else { "no" }
    )
    .unwrap();
    writeln!(out, "mertens bounds (g = {})", r.g).unwrap();
    writeln!(
        out,
        "  sum 1/|P|, deg P <= N   log N + {}",
        dec(&r.mertens_log_bound_at_1)
    )
    .unwrap();
    writeln!(
        out,
        "  sum 1/|P|^2 at q = q0   {:>12}  {}",
        rational::to_text(&r.mertens_square_bound_at_q0),
        rational::to_decimal(&r.mertens_square_bound_at_q0, 10)
    )
    .unwrap();
    writeln!(out, "second moment, deg P = 1, q = q0, s = {}", r.s).unwrap();
    writeln!(out, "  M2 <= {}", r.second_moment_bound_deg1).unwrap();
    writeln!(out, "threshold (g = {}, s = {})", r.g, r.s).unwrap();
    writeln!(out, "  value  {}", r.threshold_value).unwrap();
    writeln!(out, "  q >=   {}", r.threshold).unwrap();
    for c in &r.comparisons {
        writeln!(
            out,
            "  {}: computed {}, printed {} ({})",
            c.label,
            c.computed,
            c.claimed,
            if c.agrees { "agrees" } else { "differs" }
        )
        .unwrap();
    }
    out
}

/// Output of `primes --json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimesReport {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub degree: u32,
    pub count: String,
    /// Prime-counting upper bound, present for `q >= 4`.
    pub upper_bound: Option<String>,
    pub irreducibles: Option<Vec<String>>,
}

fn primes_cmd(p: u64, k: u32, degree: u32, list: bool, json: bool, cap: u64) -> Result<Output, Error> {
    let ctx = FieldCtx::new(p, k)?;
    if degree == 0 {
        return Err(Error::InvalidInput("--degree must be at least 1".into()));
    }
    let q = ctx.q() as u64;
    let irreducibles = if list {
        Some(
            irreducibles_of_degree(&ctx, degree as usize, cap)?
                .iter()
                .map(|f| f.format(&ctx))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let report = PrimesReport {
        p,
        k,
        q,
        degree,
        count: count_irreducibles(q, degree).to_string(),
        upper_bound: if q >= 4 {
            Some(rational::to_text(&bounds::pi_upper(q, degree, 0)?))
        } else {
            None
        },
        irreducibles,
    };
    if json {
        return Ok(Output::ok(0, to_json(&report)));
    }
    let mut out = String::new();
    writeln!(out, "monic irreducibles of degree {} over GF({})", degree, q).unwrap();
    writeln!(out, "  count        {}", report.count).unwrap();
    if let Some(b) = &report.upper_bound {
        let v = rational::parse(b)?;
        writeln!(out, "  upper bound  {}", rational::to_decimal(&v, 4)).unwrap();
    }
    for f in report.irreducibles.iter().flatten() {
        writeln!(out, "  {f}").unwrap();
    }
    Ok(Output::ok(0, out))
}

/// Output of `search --json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    /// `FOUND`, `EXHAUSTED` or `BUDGET`.
    pub outcome: String,
    pub nodes: u64,
    pub system: Option<SystemFile>,
    /// Least representative of the found system's symmetry orbit.
    pub canonical: Option<SystemFile>,
    pub proof: Option<String>,
}

fn search_cmd(spec: &SearchSpec, json: bool) -> Result<Output, Error> {
    let result = search(spec)?;
    let (system, canonical) = match &result.outcome {
        Outcome::Found(sys) => (Some(sys.to_file()), Some(canonical_reduce(sys)?.to_file())),
        _ => (None, None),
    };
    let report = SearchReport {
        outcome: result.outcome.label().into(),
        nodes: result.nodes,
        system,
        canonical,
        proof: result.proof.clone(),
    };
    let code = match result.outcome {
        Outcome::Budget => 1,
        _ => 0,
    };
    if json {
        return Ok(Output::ok(code, to_json(&report)));
    }
    let mut out = String::new();
    writeln!(out, "{} after {} nodes", report.outcome, report.nodes).unwrap();
    if let Outcome::Found(sys) = &result.outcome {
        for c in sys.congruences() {
            writeln!(out, "  {}", c.format(sys.ctx())).unwrap();
        }
        out.push_str(&sys.to_json());
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    if let Some(proof) = &report.proof {
        writeln!(out, "  {proof}").unwrap();
    }
    Ok(Output::ok(code, out))
}
