//! Command-line front end. `main.rs` only forwards to [`run`].

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bailey::{self, builtin_pair, parse_chain, PairParams, XArg, BUILTIN_PAIRS};
use crate::dsl::{load_spec, Diagnostic};
use crate::error::Error;
use crate::identities::{
    builtin_case, catalog, run_builtin, verify_case, BuiltinParams, IdentityCase, Reading, VerifyReport, FAMILIES,
};
use crate::qseries::{Mismatch, SeriesDump, XSeries};
use crate::rational::{fmt_rational, int, parse_rational, Rational};

#[derive(Parser, Debug)]
#[command(name = "qnahm", version, about = "Exact verification of Nahm-sum identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify builtin identities or the identities of a .qid file.
    Verify(VerifyArgs),
    /// Print one side of an identity as a truncated series.
    Expand(ExpandArgs),
    /// List builtin families and the default catalog.
    List,
    /// Replay a Bailey pair through a chain of transforms.
    Bailey(BaileyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Lhs,
    Rhs,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational number p or p/q"))
}

/// Selects the identity and its parameters.
#[derive(Args, Debug, Clone, Default)]
pub struct Source {
    /// Builtin family name, or `all` for the default catalog.
    #[arg(long, conflicts_with = "file")]
    pub builtin: Option<String>,
    /// A .qid file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub lambda: Option<Rational>,
    #[arg(long)]
    pub which: Option<String>,
    #[arg(long, value_parser = rational_arg)]
    pub a: Option<Rational>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    #[arg(long)]
    pub r: Option<u8>,
    /// Case name for families with named cases (section4).
    #[arg(long)]
    pub case: Option<String>,
    /// Andrews reading: classical or literal.
    #[arg(long)]
    pub reading: Option<String>,
    /// Truncation exponent in the printed variable q.
    #[arg(long)]
    pub order: Option<i64>,
    /// Keep the eta-style prefactors instead of clearing them.
    #[arg(long)]
    pub raw_eta: bool,
}

impl Source {
    fn params(&self) -> Result<BuiltinParams, Error> {
        Ok(BuiltinParams {
            k: self.k,
            lambda: self.lambda.clone(),
            which: self.which.clone(),
            a: self.a.clone(),
            s: self.s,
            i: self.i,
            n: self.n,
            r: self.r,
            case: self.case.clone(),
            reading: self.reading.as_deref().map(str::parse::<Reading>).transpose()?,
        })
    }

    fn trunc(&self) -> Option<Rational> {
        self.order.map(int)
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub report: Format,
    /// Number of worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Compare one side against a series dump written by `expand --format json`.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Side::Lhs)]
    pub side: Side,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, value_enum, default_value_t = Side::Lhs)]
    pub side: Side,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BaileyArgs {
    /// Starting pair: one of unit, even, odd, two-q-square, q-square-plus, random.
    #[arg(long, default_value = "unit")]
    pub pair: String,
    /// Comma-separated steps, e.g. `s1,lift,reduce`.
    #[arg(long, default_value = "")]
    pub chain: String,
    /// Also check the limiting identity of the final pair.
    #[arg(long)]
    pub limit: bool,
    /// Prefix length minus one.
    #[arg(long, default_value_t = 9)]
    pub len: usize,
    /// Pair parameter `q^e`.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true, default_value = "0")]
    pub e: Rational,
    /// `formal`, or a rational r for x = q^r.
    #[arg(long, default_value = "formal", allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, value_parser = rational_arg, default_value = "2")]
    pub a: Rational,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Replay the full chain behind identity 1..4 at --k and --lambda instead.
    #[arg(long, conflicts_with_all = ["parity"])]
    pub proof: Option<u8>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub lambda: Option<Rational>,
    /// Replay the x-formal chain for the even or odd class of tildeA(k, a).
    #[arg(long, value_parser = ["even", "odd"])]
    pub parity: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub order: i64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub report: Format,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match cli.command {
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::Expand(a) => cmd_expand(&a, out, err),
        Command::List => cmd_list(out),
        Command::Bailey(a) => cmd_bailey(&a, out, err),
    }
}

enum Loaded {
    Cases(Vec<IdentityCase>),
    Builtin(String, BuiltinParams),
    All,
}

fn load(src: &Source, err: &mut dyn Write) -> Result<Loaded, i32> {
    if let Some(path) = &src.file {
        let text = std::fs::read_to_string(path).map_err(|e| {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            3
        })?;
        return load_spec(&text).map(Loaded::Cases).map_err(|d: Diagnostic| {
            let code = d.exit_code();
            let _ = writeln!(err, "{}", d.with_file(path.display().to_string()));
            code
        });
    }
    let params = src.params().map_err(|e| report_error(err, &e))?;
    match src.builtin.as_deref() {
        Some("all") => Ok(Loaded::All),
        Some(name) => Ok(Loaded::Builtin(name.to_string(), params)),
        None => {
            let _ = writeln!(err, "error: give --builtin NAME, --builtin all or --file PATH");
            Err(2)
        }
    }
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    e.exit_code()
}

fn emit_reports(reports: &[VerifyReport], fmt: Format, out: &mut dyn Write) {
    match fmt {
        Format::Text => {
            for r in reports {
                let _ = writeln!(out, "{}", r.line());
                for n in &r.notes {
                    let _ = writeln!(out, "    note: {n}");
                }
            }
            let ok = reports.iter().filter(|r| r.is_match()).count();
            let _ = writeln!(out, "{ok}/{} verified", reports.len());
        }
        Format::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(reports).expect("reports serialize"));
        }
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let loaded = match load(&a.src, err) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let trunc = a.src.trunc();
    if let Some(g) = &a.golden {
        return verify_golden(&loaded, &a.src, g, a.side, a.report, out, err);
    }
    let raw = a.src.raw_eta;
    let compute = move || -> Vec<VerifyReport> {
        use rayon::prelude::*;
        match loaded {
            Loaded::All => catalog().par_iter().map(|e| e.run(trunc.as_ref(), raw)).collect(),
            Loaded::Builtin(name, p) => vec![run_builtin(&name, &p, trunc.as_ref(), raw)],
            Loaded::Cases(cases) => cases.par_iter().map(|c| verify_case(c, trunc.as_ref())).collect(),
        }
    };
    // rayon's collect keeps input order, so the output never depends on scheduling
    let reports = match a.jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build() {
            Ok(pool) => pool.install(compute),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start {j} workers: {e}");
                return 3;
            }
        },
        None => compute(),
    };
    emit_reports(&reports, a.report, out);
    reports.iter().map(VerifyReport::exit_code).max().unwrap_or(0)
}

/// The single case a golden comparison or an expansion is about.
fn single_case(loaded: Loaded, src: &Source, err: &mut dyn Write) -> Result<IdentityCase, i32> {
    match loaded {
        Loaded::All => {
            let _ = writeln!(err, "error: this command needs a single identity, not `all`");
            Err(3)
        }
        Loaded::Builtin(name, p) => match builtin_case(&name, &p, src.raw_eta) {
            Ok(Some(c)) => Ok(c),
            Ok(None) => {
                let _ = writeln!(err, "error: `{name}` is a structural check without series sides");
                Err(3)
            }
            Err(e) => Err(report_error(err, &e)),
        },
        Loaded::Cases(mut cs) => {
            if cs.len() != 1 {
                let _ = writeln!(err, "error: this command needs a file with one identity, found {}", cs.len());
                return Err(3);
            }
            Ok(cs.remove(0))
        }
    }
}

fn side_series(case: &IdentityCase, side: Side, trunc: &Rational) -> crate::Result<XSeries> {
    match side {
        Side::Lhs => case.lhs_series(trunc),
        Side::Rhs => case.rhs_series(trunc),
    }
}

#[derive(Serialize)]
struct GoldenReport<'a> {
    name: &'a str,
    side: &'static str,
    golden: String,
    status: &'static str,
    first_mismatch: Option<Mismatch>,
}

fn verify_golden(
    loaded: &Loaded,
    src: &Source,
    path: &PathBuf,
    side: Side,
    fmt: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let loaded = match loaded {
        Loaded::All => Loaded::All,
        Loaded::Builtin(n, p) => Loaded::Builtin(n.clone(), p.clone()),
        Loaded::Cases(c) => Loaded::Cases(c.clone()),
    };
    let case = match single_case(loaded, src, err) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let golden: SeriesDump = match std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
    {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(err, "error: cannot load golden file {}: {e}", path.display());
            return 3;
        }
    };
    let g = golden.to_xseries();
    let trunc = src.trunc().or_else(|| g.trunc()).unwrap_or_else(|| case.trunc.clone());
    let s = match side_series(&case, side, &trunc) {
        Ok(s) => s,
        Err(e) => return report_error(err, &e),
    };
    let m = s.first_mismatch(&g);
    let side_name = if side == Side::Lhs { "lhs" } else { "rhs" };
    let rep = GoldenReport {
        name: &case.name,
        side: side_name,
        golden: path.display().to_string(),
        status: if m.is_none() { "match" } else { "mismatch" },
        first_mismatch: m.clone(),
    };
    match fmt {
        Format::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rep).expect("serializes"));
        }
        Format::Text => {
            let _ = match &m {
                None => writeln!(out, "{} {side_name} against {}: match", case.name, rep.golden),
                Some(m) => writeln!(
                    out,
                    "{} {side_name} against {}: mismatch at x-degree {} exponent {}: computed {} golden {}",
                    case.name, rep.golden, m.x_degree, m.exponent, m.lhs, m.rhs
                ),
            };
        }
    }
    i32::from(m.is_some())
}

fn cmd_expand(a: &ExpandArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let case = match load(&a.src, err).and_then(|l| single_case(l, &a.src, err)) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let trunc = a.src.trunc().unwrap_or_else(|| case.trunc.clone());
    let s = match side_series(&case, a.side, &trunc) {
        Ok(s) => s,
        Err(e) => return report_error(err, &e),
    };
    let dump = SeriesDump::from_xseries(&s);
    match a.format {
        Format::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&dump).expect("serializes"));
        }
        Format::Text => {
            let _ = writeln!(out, "# {} {} to q^{}", case.name, if a.side == Side::Lhs { "lhs" } else { "rhs" }, fmt_rational(&trunc));
            let _ = writeln!(out, "# x_degree exponent coefficient");
            for r in &dump.terms {
                let e = fmt_rational(&Rational::new(r.1.into(), r.2.into()));
                let c = fmt_rational(&Rational::new(r.3 .0.clone(), r.4 .0.clone()));
                let _ = writeln!(out, "{} {e} {c}", r.0);
            }
        }
    }
    0
}

fn cmd_list(out: &mut dyn Write) -> i32 {
    let _ = writeln!(out, "families:");
    for (name, desc) in FAMILIES {
        let _ = writeln!(out, "  {name:<12} {desc}");
    }
    let _ = writeln!(out, "default catalog (verify --builtin all):");
    for e in catalog() {
        let _ = writeln!(out, "  {}", e.label());
    }
    let _ = writeln!(out, "bailey pairs: {}", BUILTIN_PAIRS.join(", "));
    0
}

#[derive(Serialize)]
struct BaileyReport {
    pair: String,
    steps: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Option<usize>,
    relation: &'static str,
    relation_mismatch: Option<(usize, Mismatch)>,
    limit: &'static str,
    limit_mismatch: Option<Mismatch>,
}

fn cmd_bailey(a: &BaileyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match bailey_report(a) {
        Ok(rep) => {
            match a.report {
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rep).expect("serializes"));
                }
                Format::Text => {
                    let steps = if rep.steps.is_empty() { "none".to_string() } else { rep.steps.join(",") };
                    let _ = match (&rep.e, rep.length) {
                        (Some(e), Some(n)) => writeln!(out, "pair {} steps {steps}: final e = {e}, n <= {n}", rep.pair),
                        _ => writeln!(out, "{} steps {steps}", rep.pair),
                    };
                    let _ = match &rep.relation_mismatch {
                        None => writeln!(out, "bailey relation: {}", rep.relation),
                        Some((n, m)) => writeln!(out, "bailey relation: mismatch at n = {n}, x^{} q^{}: {} vs {}", m.x_degree, m.exponent, m.lhs, m.rhs),
                    };
                    let _ = match &rep.limit_mismatch {
                        None => writeln!(out, "limit identity: {}", rep.limit),
                        Some(m) => writeln!(out, "limit identity: mismatch at x^{} q^{}: {} vs {}", m.x_degree, m.exponent, m.lhs, m.rhs),
                    };
                }
            }
            i32::from(rep.relation_mismatch.is_some() || rep.limit_mismatch.is_some())
        }
        Err(e) => report_error(err, &e),
    }
}

fn bailey_report(a: &BaileyArgs) -> crate::Result<BaileyReport> {
    let trunc = int(a.order);
    let replay = |r: bailey::ChainReplay, pair: String| BaileyReport {
        pair,
        steps: r.steps.iter().map(|s| s.name()).collect(),
        e: None,
        length: None,
        relation: if r.pair_check.is_none() { "match" } else { "mismatch" },
        limit_mismatch: r.sides.mismatch(),
        limit: if r.sides.mismatch().is_none() { "match" } else { "mismatch" },
        relation_mismatch: r.pair_check.map(|p| (p.n, p.mismatch)),
    };
    if let Some(w) = a.proof {
        let lambda = a.lambda.clone().ok_or_else(|| Error::InvalidParameter("--proof needs --lambda".into()))?;
        let r = bailey::proof_chain(w, a.k, &lambda, &trunc)?;
        return Ok(replay(r, format!("proof chain {w} (k = {}, lambda = {})", a.k, fmt_rational(&lambda))));
    }
    if let Some(p) = &a.parity {
        let r = bailey::parity_chain(a.k, &a.a, p == "odd", &trunc)?;
        return Ok(replay(r, format!("{p} class chain (k = {}, a = {})", a.k, fmt_rational(&a.a))));
    }
    let x = if a.x == "formal" {
        XArg::Formal
    } else {
        XArg::QPower(parse_rational(&a.x).ok_or_else(|| Error::InvalidParameter(format!("--x must be `formal` or a rational, got `{}`", a.x)))?)
    };
    let params = PairParams { k: a.k, a: a.a.clone(), e: a.e.clone(), x, len: a.len, seed: a.seed };
    let steps = parse_chain(&a.chain)?;
    let p = bailey::apply_chain(&builtin_pair(&a.pair, &params, &trunc)?, &steps)?;
    let rel = bailey::verify_bailey(&p)?;
    let lim = if a.limit { Some(bailey::limit_identity(&p, &trunc)?.mismatch()) } else { None };
    Ok(BaileyReport {
        pair: a.pair.clone(),
        steps: steps.iter().map(|s| s.name()).collect(),
        e: Some(fmt_rational(p.param_exp())),
        length: Some(p.max_index()),
        relation: if rel.is_none() { "match" } else { "mismatch" },
        relation_mismatch: rel.map(|m| (m.n, m.mismatch)),
        limit: match &lim {
            None => "skipped",
            Some(None) => "match",
            Some(Some(_)) => "mismatch",
        },
        limit_mismatch: lim.flatten(),
    })
}
