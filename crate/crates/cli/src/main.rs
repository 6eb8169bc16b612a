use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use prelie_core::hopf::{coproduct, star_product};
use prelie_core::magnus::{magnus_fixed_point, magnus_via_log};
use prelie_core::odemagnus::{error_report, PolyMatrix};
use prelie_core::solomon::{completeness_defect, soln, GradedProjectionFamily};
use prelie_core::verify::{run_suite, Suite, VerifyConfig};
use prelie_core::{Alphabet, Element, Error, TensorElement, TruncationOrder};

const MAX_ORDER: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "prelie", version, about = "Pre-Lie Magnus expansion and Solomon idempotents on rooted trees")]
struct Cli {
    /// Truncation order N (maximum total tree degree)
    #[arg(short = 'n', long, global = true, default_value_t = 4)]
    order: usize,

    /// Comma-separated generator labels
    #[arg(long, global = true, default_value = "a")]
    generators: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Log,
    FixedPoint,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Magnus element Ω truncated at the order
    Magnus {
        #[arg(long, value_enum, default_value_t = RouteArg::Log)]
        route: RouteArg,
    },
    /// Apply the Solomon idempotent sol_k
    Solomon {
        #[arg(long = "i", value_name = "K")]
        index: usize,
        #[arg(short, long)]
        input: String,
    },
    /// PBW decomposition sol_1(E), ..., sol_N(E) with the completeness check
    Pbw {
        #[arg(short, long)]
        input: String,
    },
    /// The ∗-product of two elements
    Star {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// The coproduct of an element
    Coproduct {
        #[arg(short, long)]
        input: String,
    },
    /// Run invariant suites
    Verify {
        /// prelie, hopf, idempotents, magnus, ode or all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Compare the truncated Magnus solution of X' = A(t) X with a
    /// Runge-Kutta reference
    Ode {
        /// JSON file {"dim": d, "entries": [["poly", ...], ...]}
        #[arg(long)]
        matrix: PathBuf,
        /// Evaluation times (rational, comma-separated or repeated)
        #[arg(long, value_delimiter = ',', required = true)]
        time: Vec<String>,
        #[arg(long, default_value = "1/1000")]
        step: String,
    },
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse_error() {
            Failure::Usage(e.into())
        } else {
            Failure::Domain(e.into())
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

/// Accepts `p/q`, integers and plain decimals such as `0.25`.
fn parse_rational(s: &str) -> Result<BigRational, Failure> {
    let s = s.trim();
    let bad = || usage(format!("invalid number `{s}`"));
    match s.split_once('.') {
        Some((int, frac)) => {
            let digits = BigRational::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
            let scale = BigRational::from_integer(10.into()).pow(frac.len() as i32);
            Ok(digits / scale)
        }
        None => BigRational::from_str(s).map_err(|_| bad()),
    }
}

fn order(requested: usize) -> Result<TruncationOrder, Failure> {
    if requested == 0 {
        return Err(usage("truncation order must be at least 1"));
    }
    let n = if requested > MAX_ORDER {
        eprintln!("warning: order {requested} exceeds the cap {MAX_ORDER}; using {MAX_ORDER}");
        MAX_ORDER
    } else {
        if requested > 6 {
            eprintln!("warning: order {requested} may be slow; term counts grow very quickly");
        }
        requested
    };
    Ok(TruncationOrder::new(n)?)
}

fn emit_element(e: &Element, format: Format) -> String {
    match format {
        Format::Text if e.is_zero() => "0".to_string(),
        Format::Text => e.term_lines().join("\n"),
        Format::Json => serde_json::to_string_pretty(&e.to_json()).expect("serializable"),
    }
}

fn emit_tensor(t: &TensorElement, format: Format) -> String {
    match format {
        Format::Text if t.is_zero() => "0".to_string(),
        Format::Text => t.term_lines().join("\n"),
        Format::Json => serde_json::to_string_pretty(&t.to_json()).expect("serializable"),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let alphabet = Alphabet::parse(&cli.generators).map_err(|e| Failure::Usage(e.into()))?;
    let parse = |s: &str| Element::parse(s, &alphabet);
    let format = cli.format;
    match cli.command {
        Command::Magnus { route } => {
            let n = order(cli.order)?;
            let result = match route {
                RouteArg::Log => magnus_via_log(n),
                RouteArg::FixedPoint => magnus_fixed_point(n),
            };
            Ok(emit_element(&result.omega, format))
        }
        Command::Solomon { index, input } => {
            let n = order(cli.order)?;
            let u = parse(&input)?;
            Ok(emit_element(&soln(index, &u, n), format))
        }
        Command::Pbw { input } => {
            let n = order(cli.order)?;
            let u = parse(&input)?;
            let components = GradedProjectionFamily::new(n).components(&u);
            let ok = completeness_defect(&u, n).is_zero();
            Ok(match format {
                Format::Text => {
                    let mut out = Vec::new();
                    for (i, c) in components.iter().enumerate() {
                        out.push(format!("sol_{}: {c}", i + 1));
                    }
                    out.push(format!("sum check: {}", if ok { "ok" } else { "FAILED" }));
                    out.join("\n")
                }
                Format::Json => serde_json::to_string_pretty(&json!({
                    "components": components.iter().map(Element::to_json).collect::<Vec<_>>(),
                    "sum_check": ok,
                }))
                .expect("serializable"),
            })
        }
        Command::Star { lhs, rhs } => {
            let n = order(cli.order)?;
            let (u, v) = (parse(&lhs)?, parse(&rhs)?);
            Ok(emit_element(&star_product(&u, &v, n), format))
        }
        Command::Coproduct { input } => {
            let u = parse(&input)?;
            Ok(emit_tensor(&coproduct(&u), format))
        }
        Command::Verify { suite, max_degree, samples, seed } => {
            let suites = Suite::parse_list(&suite).map_err(|e| Failure::Usage(e.into()))?;
            if max_degree == 0 {
                return Err(usage("--max-degree must be at least 1"));
            }
            let cfg = VerifyConfig { max_degree, alphabet, samples, seed };
            let reports: Vec<_> = suites.into_iter().map(|s| run_suite(s, &cfg)).collect();
            let failed: usize = reports.iter().map(|r| r.failed()).sum();
            let text = match format {
                Format::Text => reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"),
                Format::Json => serde_json::to_string_pretty(&reports).expect("serializable"),
            };
            if failed > 0 {
                println!("{text}");
                return Err(Failure::Domain(anyhow!("{failed} check(s) failed")));
            }
            Ok(text)
        }
        Command::Ode { matrix, time, step } => {
            let n = order(cli.order)?;
            let raw = fs::read_to_string(&matrix)
                .with_context(|| format!("reading {}", matrix.display()))
                .map_err(Failure::Usage)?;
            let a = PolyMatrix::from_json_str(&raw)?;
            let times = time.iter().map(|t| parse_rational(t)).collect::<Result<Vec<_>, _>>()?;
            let step = parse_rational(&step)?;
            let report = error_report(&a, n, &times, &step)?;
            Ok(match format {
                Format::Text => report.to_string(),
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
