//! `ppp`: command-line front end for primary pseudo-polynomial computations.
//!
//! Exit codes: 0 success or certified, 1 refuted or nothing found, 2 usage or
//! input error, 3 disagreement between the direct and Hall certifiers.

mod seqio;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use ppp::arith::{parse_rational, ArithTables};
use ppp::bounds::{bounds_report, DeltaSpec, PrecisionCtx};
use ppp::certify::{certify_primary_direct, certify_primary_hall, certify_pseudo_hall, CertReport};
use ppp::construct::{construct_genuine, GrowthFn};
use ppp::egfinv::{egf_triple, u_over_factorial};
use ppp::recur::{apply_recurrence, guess_recurrence, verify_recurrence, GuessBudget, PolyRecurrence};
use ppp::transforms::{binomial_transform, inverse_binomial_transform};
use ppp::{Error, IntSequence};

const PRECISION_ENV: &str = "PPP_PRECISION_BITS";

#[derive(Parser)]
#[command(name = "ppp", version, about = "Exact tools for primary pseudo-polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SieveKind {
    Primorial,
    Lcm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CertMode {
    PrimaryDirect,
    PrimaryHall,
    PseudoHall,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Print P_0..P_N or d_0..d_N, one per line.
    Sieve {
        #[arg(long, value_enum)]
        kind: SieveKind,
        #[arg(long)]
        n: u64,
    },
    /// Binomial transform b_n = sum (-1)^(n-k) C(n,k) a_k.
    Transform {
        /// Sequence file (stdin when omitted).
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Inverse transform a_n = sum C(n,k) b_k.
    InverseTransform {
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check a prefix for the (primary) pseudo-polynomial property.
    Certify {
        #[arg(long, value_enum)]
        mode: CertMode,
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Build a genuine primary pseudo-polynomial with phi(n) <= A_n <= phi(n) + 2 P_n.
    Construct {
        /// primorial, geometric:NUM/DEN or file:PATH (one rational per line).
        #[arg(long)]
        phi: String,
        #[arg(long)]
        n: usize,
        /// Print the per-step table (C_n, u_n, v_n, w_n, B_n, A_n).
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the JSON triple (b, c, u) of the EGF-reciprocal construction.
    EgfInvert {
        input: Option<PathBuf>,
        /// Also print u_n / n! to this many decimals.
        #[arg(long)]
        ratios: Option<usize>,
    },
    /// Guess a recurrence with polynomial coefficients.
    Guess {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        s_max: usize,
        #[arg(long, default_value_t = 4)]
        d_max: usize,
        #[arg(long, default_value_t = GuessBudget::DEFAULT_MARGIN)]
        margin: usize,
    },
    /// Check a recurrence against a prefix.
    Verify {
        /// Recurrence JSON file.
        #[arg(long)]
        rec: PathBuf,
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Extend initial terms to a_0..a_N with a recurrence.
    Apply {
        #[arg(long)]
        rec: PathBuf,
        #[arg(long)]
        n: usize,
        input: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Effective constants (d, rho, eps, J, H) for given c and delta.
    Bounds {
        #[arg(long, default_value = "1")]
        c: String,
        /// NUM/DEN, a decimal, or exp:NUM/DEN for delta = e^(NUM/DEN).
        #[arg(long)]
        delta: String,
        /// Working precision in bits (overrides PPP_PRECISION_BITS).
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long)]
        json: bool,
    },
}

type Outcome = std::result::Result<u8, Error>;

fn read_input(path: &Option<PathBuf>) -> Result<String, Error> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn read_sequence(path: &Option<PathBuf>) -> Result<IntSequence, Error> {
    seqio::parse_sequence(&read_input(path)?)
}

fn read_recurrence(path: &Path) -> Result<PolyRecurrence, Error> {
    let text = read_input(&Some(path.to_path_buf()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("recurrence JSON: {e}")))?;
    PolyRecurrence::from_json(&v)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) ends output quietly.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        std::process::exit(0);
    }
}

fn print_json(v: &Value) {
    emit(&format!(
        "{}\n",
        serde_json::to_string(v).expect("JSON values serialize")
    ));
}

fn print_sequence(s: &IntSequence, json: bool) {
    if json {
        print_json(&seqio::to_json(s));
    } else {
        emit(&seqio::emit_lines(s));
    }
}

fn print_report(r: &CertReport, json: bool) {
    if json {
        print_json(&r.to_json());
    } else {
        emit(&format!("{r}\n"));
    }
}

fn parse_phi(spec: &str) -> Result<GrowthFn, Error> {
    if spec == "primorial" {
        return Ok(GrowthFn::Primorial);
    }
    if let Some(q) = spec.strip_prefix("geometric:") {
        return Ok(GrowthFn::Geometric(parse_rational(q)?));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = read_input(&Some(PathBuf::from(path)))?;
        let values = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(parse_rational)
            .collect::<Result<Vec<BigRational>, Error>>()?;
        return Ok(GrowthFn::Table(values));
    }
    Err(Error::Parse(format!(
        "unknown phi {spec:?}; expected primorial, geometric:NUM/DEN or file:PATH"
    )))
}

fn precision_ctx(flag: Option<u32>) -> Result<PrecisionCtx, Error> {
    let bits = match flag {
        Some(b) => Some(b),
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("{PRECISION_ENV}={v:?} is not a bit count")))?,
            ),
            Err(_) => None,
        },
    };
    Ok(bits.map_or_else(PrecisionCtx::default, PrecisionCtx::with_bits))
}

fn certify(mode: CertMode, a: &IntSequence, json: bool) -> Outcome {
    let single = |r: CertReport| {
        print_report(&r, json);
        Ok(if r.is_certified() { 0 } else { 1 })
    };
    match mode {
        CertMode::PrimaryDirect => single(certify_primary_direct(a)?),
        CertMode::PrimaryHall => single(certify_primary_hall(a)?),
        CertMode::PseudoHall => single(certify_pseudo_hall(a)?),
        CertMode::Both => {
            let direct = certify_primary_direct(a)?;
            let hall = certify_primary_hall(a)?;
            let agree = direct.is_certified() == hall.is_certified();
            if json {
                print_json(&json!({
                    "agree": agree,
                    "primary_direct": direct.to_json(),
                    "primary_hall": hall.to_json(),
                }));
            } else {
                emit(&format!("{direct}\n{hall}\n"));
            }
            if !agree {
                eprintln!("error: direct and Hall certifiers disagree");
                return Ok(3);
            }
            Ok(if direct.is_certified() { 0 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Sieve { kind, n } => {
            let t = ArithTables::new(n)?;
            let values = match kind {
                SieveKind::Primorial => t.primorials(),
                SieveKind::Lcm => t.lcms(),
            };
            let mut out = String::new();
            for v in values {
                out.push_str(&v.to_string());
                out.push('\n');
            }
            emit(&out);
            Ok(0)
        }
        Command::Transform { input, json } => {
            print_sequence(&binomial_transform(&read_sequence(&input)?)?, json);
            Ok(0)
        }
        Command::InverseTransform { input, json } => {
            print_sequence(&inverse_binomial_transform(&read_sequence(&input)?)?, json);
            Ok(0)
        }
        Command::Certify { mode, input, json } => certify(mode, &read_sequence(&input)?, json),
        Command::Construct { phi, n, trace, json } => {
            let c = construct_genuine(&parse_phi(&phi)?, n)?;
            if json {
                let mut v = json!({
                    "A": seqio::to_json(&c.a)["terms"],
                    "B": seqio::to_json(&c.b)["terms"],
                });
                if trace {
                    v["trace"] = c.trace.to_json();
                }
                print_json(&v);
            } else if trace {
                emit(&c.trace.to_table());
            } else {
                print_sequence(&c.a, false);
            }
            Ok(0)
        }
        Command::EgfInvert { input, ratios } => {
            let t = egf_triple(&read_sequence(&input)?)?;
            let mut v = t.to_json();
            if let Some(digits) = ratios {
                v["u_over_factorial"] = json!(u_over_factorial(&t.u, digits));
            }
            print_json(&v);
            Ok(0)
        }
        Command::Guess {
            input,
            s_max,
            d_max,
            margin,
        } => {
            let a = read_sequence(&input)?;
            let budget = GuessBudget {
                s_max,
                d_max,
                verify_margin: margin,
            };
            match guess_recurrence(&a, &budget)? {
                Some(r) => {
                    print_json(&r.to_json());
                    eprintln!("{r}  (verified on indices 0..={} only)", a.len() - 1);
                    Ok(0)
                }
                None => {
                    eprintln!("no recurrence with S <= {s_max}, D <= {d_max} fits this prefix");
                    Ok(1)
                }
            }
        }
        Command::Verify { rec, input, json } => {
            let r = read_recurrence(&rec)?;
            let report = verify_recurrence(&read_sequence(&input)?, &r)?;
            print_report(&report, json);
            Ok(if report.is_certified() { 0 } else { 1 })
        }
        Command::Apply { rec, n, input, json } => {
            let r = read_recurrence(&rec)?;
            print_sequence(&apply_recurrence(&r, &read_sequence(&input)?, n)?, json);
            Ok(0)
        }
        Command::Bounds {
            c,
            delta,
            precision,
            json,
        } => {
            let ctx = precision_ctx(precision)?;
            let c = parse_rational(&c)?;
            let delta = DeltaSpec::parse(&delta)?;
            let report = bounds_report(&c, &delta, &ctx)?;
            if json {
                print_json(&report.to_json());
            } else {
                emit(&format!("{report}\n"));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    ExitCode::from(code)
}
