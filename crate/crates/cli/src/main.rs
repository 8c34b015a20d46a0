//! `fpure`: F-pure thresholds of forms over finite fields from the shell.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fpure::fptengine::{fpt_general, FptReport, FptValue};
use fpure::forms::parse_form;
use fpure::genericfpt::generic_fpt;
use fpure::gfpoly::FieldSpec;
use fpure::ratbase::Rat;
use fpure::strata::{
    candidates_with, census, trinomial_families, trinomial_witness_search, verify_paper, CandidateTable, CensusOptions,
    CensusReport, Family, VerifyOptions, WitnessOutcome, DEFAULT_CANDIDATE_CAP,
};
use fpure::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_ANOMALY: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "fpure", version, about = "F-pure thresholds of homogeneous polynomials over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads; 0 uses one per core.
    #[arg(long, env = "FPURE_WORKERS", default_value_t = 0, global = true)]
    workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Threshold of one form.
    Fpt(FptArgs),
    /// Threshold of a generic form of degree d in n variables.
    Generic(GenericArgs),
    /// Thresholds of every binary form of degree d over F_{p^k}.
    Census(CensusArgs),
    /// Truncations of 2/d a reduced form may take.
    Candidates(CandidateArgs),
    /// Search a trinomial family for a form with a given threshold.
    Witness(WitnessArgs),
    /// Compare computed strata with the tables for degrees 3 to 8.
    VerifyPaper(VerifyArgs),
}

#[derive(Args, Debug)]
struct FptArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// The form, e.g. `x^5+y^5` or `x1*x2+t*x3^2`.
    #[arg(long)]
    poly: String,
    /// Depth of the interval fallback.
    #[arg(long, default_value_t = 8)]
    e_cap: u32,
}

#[derive(Args, Debug)]
struct GenericArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    d: u64,
    #[arg(long)]
    p: u64,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Skip non-reduced forms.
    #[arg(long)]
    reduced_only: bool,
    #[arg(long, default_value_t = 3)]
    e_cap: u32,
    /// Largest number of forms to enumerate; `1e8` style is accepted.
    #[arg(long, default_value = "1e8", value_parser = parse_count)]
    budget: u128,
}

#[derive(Args, Debug)]
struct CandidateArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    p: u64,
    /// Bound on L when p divides the denominator of 2/d.
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    e_cap: u32,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    p: u64,
    /// The threshold sought, a truncation of 2/d.
    #[arg(long)]
    target: Rat,
    /// `i,j,m` for `x^i y^j (x^{2m} + a x^m y^m + y^{2m})`; all families of
    /// degree d when absent.
    #[arg(long)]
    family: Option<Family>,
    /// Largest extension degree searched.
    #[arg(long, default_value_t = 3)]
    k_max: u32,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Degrees: `4`, `3,5` or `3..8`.
    #[arg(long, default_value = "3..8", value_parser = parse_degrees)]
    d: Degrees,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11,13")]
    primes: Vec<u64>,
    /// Largest census over F_p run exhaustively; larger rows are sampled.
    #[arg(long, default_value = "1e7", value_parser = parse_count)]
    budget: u128,
    #[arg(long, default_value_t = 3)]
    k_max: u32,
    /// Forms drawn per value when sampling.
    #[arg(long, default_value_t = 4000)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    e_cap: u32,
}

#[derive(Clone, Debug)]
struct Degrees(Vec<u32>);

fn parse_degrees(s: &str) -> Result<Degrees, String> {
    let s = s.trim();
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad degree {t:?}: {e}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty degree range {s}"));
        }
        return Ok(Degrees((a..=b).collect()));
    }
    s.split(',').map(num).collect::<Result<Vec<_>, _>>().map(Degrees)
}

/// A positive count, as an integer or `m e k` meaning `m·10^k`.
fn parse_count(s: &str) -> Result<u128, String> {
    let s = s.trim().replace('_', "");
    let n = match s.split_once(['e', 'E']) {
        Some((m, k)) => {
            let m: u128 = m.parse().map_err(|_| format!("bad count {s:?}"))?;
            let k: u32 = k.parse().map_err(|_| format!("bad count {s:?}"))?;
            10u128.checked_pow(k).and_then(|t| t.checked_mul(m)).ok_or(format!("count {s} overflows"))?
        }
        None => s.parse().map_err(|_| format!("bad count {s:?}"))?,
    };
    if n == 0 {
        return Err("budget must be positive".into());
    }
    Ok(n)
}

/// Why a command stopped.
enum Failure {
    Lib(Error),
    Mismatch(String),
    Anomaly(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Lib(Error::Invalid(format!("csv: {e}")))
    }
}

type Out = Result<String, Failure>;

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> Out
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?).unwrap())
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn cmd_fpt(a: &FptArgs, fmt: Format) -> Out {
    let field = FieldSpec::new(a.p, a.k)?;
    let f = parse_form(&a.poly, &field, Some(2))?;
    let r = fpt_general(&f, a.e_cap)?;
    let rep = FptReport::new(&f, &r);
    Ok(match fmt {
        Format::Text => r.summary() + "\n",
        Format::Json => json(&rep),
        Format::Csv => {
            let (lo, hi) = match &r.value {
                FptValue::Interval { lo, hi } => (lo.to_string(), hi.to_string()),
                FptValue::Exact(_) => (String::new(), String::new()),
            };
            csv_rows(
                &["form", "field", "status", "value", "lo", "hi", "method", "L"],
                [[rep.form, rep.field, rep.status.into(), opt(&rep.value), lo, hi, rep.method.to_string(), opt(&rep.place)]],
            )?
        }
    })
}

fn cmd_generic(a: &GenericArgs, fmt: Format) -> Out {
    let rep = generic_fpt(a.n, a.d, a.p)?;
    Ok(match fmt {
        Format::Text => format!("{rep}\n"),
        Format::Json => json(&rep),
        Format::Csv => csv_rows(
            &["L", "N_L", "remainder", "cond_a", "cond_b"],
            rep.inequality_trace.iter().map(|t| {
                [t.l.to_string(), t.n_l.to_string(), t.remainder.to_string(), t.cond_a.to_string(), t.cond_b.to_string()]
            }),
        )?,
    })
}

fn census_text(rep: &CensusReport) -> String {
    let mut s = format!(
        "degree {} over {}: {} forms, {} reduced, {} skipped, {} unresolved\n",
        rep.d, rep.field, rep.total, rep.reduced, rep.skipped, rep.unresolved
    );
    let map: Vec<String> = rep
        .values
        .iter()
        .map(|v| format!("{}: {}", v.value, v.reduced_witness.as_deref().unwrap_or(&v.witness)))
        .collect();
    let _ = writeln!(s, "{{{}}}", map.join(", "));
    for v in &rep.values {
        let _ = writeln!(s, "  {}  reduced {}  non-reduced {}", v.value, v.count_reduced, v.count_nonreduced);
    }
    for a in &rep.anomalies {
        let _ = writeln!(s, "anomaly: {a}");
    }
    s
}

fn cmd_census(a: &CensusArgs, fmt: Format) -> Out {
    let opts = CensusOptions { reduced_only: a.reduced_only, e_cap: a.e_cap, budget: a.budget };
    let rep = census(a.d, a.p, a.k, &opts)?;
    let out = match fmt {
        Format::Text => census_text(&rep),
        Format::Json => json(&rep),
        Format::Csv => rep.to_csv()?,
    };
    if rep.anomalies.is_empty() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Anomaly(format!("{} forms contradict the candidate table", rep.anomalies.len())))
    }
}

fn candidates_text(t: &CandidateTable) -> String {
    let mut s = format!("2/{} = {}/{} over F_{}: L ≤ {}, generic value {}\n", t.d, t.a, t.b, t.p, t.l_bound, t.generic);
    let _ = writeln!(s, "{:>3}  {:<16} {:<3} {:<3} {:<3} {:<5} {:<5} verdict", "L", "value", "I", "II", "III", "bms", "above");
    let yn = |b: bool| if b { "yes" } else { "no" };
    for e in &t.entries {
        let verdict = if e.verdict == fpure::strata::Verdict::Admissible { "admissible" } else { "inadmissible" };
        let _ = writeln!(
            s,
            "{:>3}  {:<16} {:<3} {:<3} {:<3} {:<5} {:<5} {verdict}",
            e.l,
            e.value.to_string(),
            yn(e.cond_i),
            yn(e.cond_ii),
            yn(e.cond_iii),
            yn(e.bms_excluded),
            yn(e.above_generic)
        );
    }
    let adm: Vec<String> = t.admissible.iter().map(Rat::to_string).collect();
    let _ = writeln!(s, "admissible: {{{}}}", adm.join(", "));
    s
}

fn cmd_candidates(a: &CandidateArgs, fmt: Format) -> Out {
    let t = candidates_with(a.d, a.p, a.e_cap)?;
    Ok(match fmt {
        Format::Text => candidates_text(&t),
        Format::Json => json(&t),
        Format::Csv => t.to_csv()?,
    })
}

fn cmd_witness(a: &WitnessArgs, fmt: Format) -> Out {
    let families = match a.family {
        Some(f) => vec![f],
        None => trinomial_families(a.d),
    };
    if families.is_empty() {
        return Err(Error::Invalid(format!("no trinomial family has degree {}", a.d)).into());
    }
    let mut outcomes: Vec<WitnessOutcome> = Vec::new();
    for fam in families {
        let out = trinomial_witness_search(a.p, a.d, &a.target, fam, a.k_max)?;
        let done = out.found.is_some();
        outcomes.push(out);
        if done {
            break;
        }
    }
    let last = outcomes.last().unwrap();
    Ok(match fmt {
        Format::Text => {
            let mut s = String::new();
            for o in &outcomes {
                let _ = writeln!(s, "{o}");
                for r in &o.rejected {
                    let _ = writeln!(s, "  rejected a={}, {}: {}", r.a, r.field, r.reason);
                }
            }
            if let Some(w) = &last.found {
                let _ = writeln!(s, "{} has threshold {}", w.form, w.fpt);
            }
            s
        }
        Format::Json => json(&outcomes),
        Format::Csv => csv_rows(
            &["family", "L", "N", "obstruction", "k_max", "a", "field", "form", "fpt"],
            outcomes.iter().map(|o| {
                let w = o.found.as_ref();
                [
                    o.family.to_string(),
                    o.place.to_string(),
                    o.n.clone(),
                    o.obstruction.clone(),
                    o.k_max.to_string(),
                    w.and_then(|w| w.a.clone()).unwrap_or_default(),
                    w.map(|w| w.field.clone()).unwrap_or_default(),
                    w.map(|w| w.form.clone()).unwrap_or_default(),
                    w.map(|w| w.fpt.to_string()).unwrap_or_default(),
                ]
            }),
        )?,
    })
}

fn cmd_verify(a: &VerifyArgs, seed: u64, fmt: Format) -> Out {
    let opts = VerifyOptions { budget: a.budget, k_max: a.k_max, samples: a.samples, seed, e_cap: a.e_cap };
    let rep = verify_paper(&a.d.0, &a.primes, &opts)?;
    let out = match fmt {
        Format::Text => rep.matrix(),
        Format::Json => json(&rep),
        Format::Csv => csv_rows(
            &["d", "p", "expected", "computed", "exhaustive", "pass"],
            rep.rows.iter().map(|r| {
                let list = |v: &[Rat]| v.iter().map(Rat::to_string).collect::<Vec<_>>().join(" ");
                [
                    r.d.to_string(),
                    r.p.to_string(),
                    list(&r.expected),
                    list(&r.computed),
                    r.exhaustive.to_string(),
                    r.pass.to_string(),
                ]
            }),
        )?,
    };
    if rep.pass {
        return Ok(out);
    }
    print!("{out}");
    if rep.rows.iter().any(|r| !r.anomalies.is_empty()) {
        Err(Failure::Anomaly("the census contradicts the candidate table".into()))
    } else {
        let bad = rep.rows.iter().filter(|r| !r.pass).count();
        Err(Failure::Mismatch(format!("{bad} rows differ from the tables")))
    }
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Fpt(a) => cmd_fpt(a, cli.format),
        Command::Generic(a) => cmd_generic(a, cli.format),
        Command::Census(a) => cmd_census(a, cli.format),
        Command::Candidates(a) => cmd_candidates(a, cli.format),
        Command::Witness(a) => cmd_witness(a, cli.format),
        Command::VerifyPaper(a) => cmd_verify(a, cli.seed, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start workers: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Budget { .. } => EXIT_BUDGET,
                Error::Anomaly(_) => EXIT_ANOMALY,
                _ => EXIT_VALIDATION,
            })
        }
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(Failure::Anomaly(m)) => {
            eprintln!("anomaly: {m}");
            ExitCode::from(EXIT_ANOMALY)
        }
    }
}
