//! Command-line interface.
//!
//! Every command prints one JSON document followed by a newline. Exit codes:
//! 0 success, 1 malformed input, 2 a mathematical check failed, 3 a negative
//! decision, 4 a budget or size limit was hit.

use crate::brace::{BraceError, BraceOptions, PermutationBrace};
use crate::classify::{enumerate_pq, enumerate_pqr, ClassifyError};
use crate::cycle_set::{verify_ybe, CycleSet, JsonError};
use crate::extension::{
    cocycle_rows, cohomologous, equivariant_representative, indecomposability_criterion,
    semidirect_check, twisted_cocycle_witness, twisted_extension, ExtensionError, ExtensionSpec,
};
use crate::group::{GroupError, DEFAULT_SIZE_LIMIT};
use crate::modular::gcd;
use crate::oracle::{crosscheck_pq, enumerate_all, OracleError, OracleOptions};
use crate::report::Report;
use crate::structure::{
    is_indecomposable, is_isomorphic, mpl, retraction, soc_ker_report, StructureError,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::io::{Read, Write};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "cycleset",
    version,
    about = "Finite cycle sets and set-theoretic solutions of the Yang-Baxter equation"
)]
pub struct Cli {
    /// Worker threads for the enumerators.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Run full-domain checks instead of generator-level or sampled ones.
    #[arg(long, global = true)]
    pub exhaustive: bool,
    /// Largest permutation group that may be materialized.
    #[arg(long, global = true, default_value_t = DEFAULT_SIZE_LIMIT)]
    pub group_limit: usize,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a cycle set and its solution.
    Verify { input: String },
    /// Structural invariants of a cycle set.
    Info { input: String },
    /// The retraction and the projection onto it.
    Retract { input: String },
    /// Decide whether two cycle sets are isomorphic.
    Iso { first: String, second: String },
    /// Build a twisted extension from a module and Φ.
    Extend { spec: String },
    /// Enumerate a classified family.
    #[command(subcommand)]
    Classify(ClassifyCommand),
    /// Brute-force enumeration (same as `oracle enumerate`).
    Enumerate(EnumerateArgs),
    /// Brute-force enumeration and cross-checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Twisted cocycle, equivariant representative and cohomology checks.
    Lvcheck { spec: String },
}

#[derive(Debug, Subcommand)]
pub enum ClassifyCommand {
    /// Indecomposable cycle sets of size pq with multipermutation level 2.
    Pq {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Indecomposable cycle sets of size pqr with multipermutation level 3.
    Pqr {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u64,
        /// Parameter tuples per family and prime assignment.
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    Enumerate(EnumerateArgs),
    /// Compare the oracle's size-pq classes with the pq classification.
    Crosscheck {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub indecomposable: bool,
    #[arg(long)]
    pub upto_iso: bool,
    /// Include the cycle sets, not only the count.
    #[arg(long)]
    pub list: bool,
    #[arg(long, default_value_t = 5)]
    pub limit_all: usize,
    #[arg(long, default_value_t = 6)]
    pub limit_indecomposable: usize,
}

/// A finished command: exit code and JSON payload.
pub struct Outcome {
    pub code: i32,
    pub value: Value,
    /// Single-line output, used for long lists.
    pub compact: bool,
}

impl Outcome {
    fn new(code: i32, value: Value) -> Outcome {
        Outcome {
            code,
            value,
            compact: false,
        }
    }
}

/// A command that could not run; the message goes to stderr.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn malformed(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_MALFORMED,
            message: message.to_string(),
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        Failure {
            code: EXIT_LIMIT,
            message: e.to_string(),
        }
    }
}

impl From<BraceError> for Failure {
    fn from(e: BraceError) -> Self {
        match e {
            BraceError::Group(g) => g.into(),
            other => Failure {
                code: EXIT_CHECK_FAILED,
                message: other.to_string(),
            },
        }
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::Group(g) => g.into(),
            other => Failure {
                code: EXIT_CHECK_FAILED,
                message: other.to_string(),
            },
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Group(g) => g.into(),
            ClassifyError::Brace(b) => (*b).into(),
            ClassifyError::Structure(s) => s.into(),
            ClassifyError::InvalidParameters(_) => Failure::malformed(e),
            other => Failure {
                code: EXIT_CHECK_FAILED,
                message: other.to_string(),
            },
        }
    }
}

impl From<ExtensionError> for Failure {
    fn from(e: ExtensionError) -> Self {
        match e {
            ExtensionError::Shape(_) => Failure::malformed(e),
            ExtensionError::Group(g) => g.into(),
            ExtensionError::Brace(b) => (*b).into(),
            ExtensionError::SearchTooLarge(_) => Failure {
                code: EXIT_LIMIT,
                message: e.to_string(),
            },
            other => Failure {
                code: EXIT_CHECK_FAILED,
                message: other.to_string(),
            },
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::LimitExceeded { .. } => Failure {
                code: EXIT_LIMIT,
                message: e.to_string(),
            },
            OracleError::NotPq(_) => Failure::malformed(e),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(Failure::malformed)?;
    } else {
        s = std::fs::read_to_string(path)
            .map_err(|e| Failure::malformed(format!("{path}: {e}")))?;
    }
    Ok(s)
}

/// Reads a cycle set; axiom violations are reported as a failed check.
fn read_cycle_set(path: &str) -> Result<CycleSet, Failure> {
    CycleSet::from_json(&read_input(path)?).map_err(|e| match &e {
        JsonError::Invalid(inner) if inner.is_axiom_failure() => Failure {
            code: EXIT_CHECK_FAILED,
            message: e.to_string(),
        },
        _ => Failure::malformed(e),
    })
}

fn read_spec(path: &str) -> Result<ExtensionSpec, Failure> {
    serde_json::from_str(&read_input(path)?).map_err(Failure::malformed)
}

fn brace_options(cli: &Cli) -> BraceOptions {
    BraceOptions {
        size_limit: cli.group_limit,
        exhaustive_up_to: if cli.exhaustive { usize::MAX } else { 200 },
        ..BraceOptions::default()
    }
}

fn report_outcome(report: Report) -> Outcome {
    Outcome::new(
        if report.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        },
        json!(report),
    )
}

fn verify(cli: &Cli, input: &str) -> Result<Outcome, Failure> {
    let x = match read_cycle_set(input) {
        Ok(x) => x,
        Err(f) if f.code == EXIT_CHECK_FAILED => {
            let mut r = Report::new();
            r.check("cycle_set", false, || json!(f.message));
            return Ok(report_outcome(r));
        }
        Err(f) => return Err(f),
    };
    let mut report = Report::new();
    report.metric("n", x.n());
    report.merge("solution", verify_ybe(&x.to_solution()));
    match PermutationBrace::build(&x, cli.group_limit) {
        Ok(brace) => {
            report.merge("brace", brace.verify(&brace_options(cli)));
            report.merge("socle", soc_ker_report(&x, &brace));
        }
        Err(BraceError::Group(g)) => report.metric("brace_skipped", g.to_string()),
        Err(e) => report.check("brace", false, || json!(e.to_string())),
    }
    Ok(report_outcome(report))
}

fn info(cli: &Cli, input: &str) -> Result<Outcome, Failure> {
    let x = read_cycle_set(input)?;
    let brace = PermutationBrace::build(&x, cli.group_limit)?;
    let indecomposable = is_indecomposable(&x);
    Ok(Outcome::new(
        EXIT_OK,
        json!({
            "n": x.n(),
            "indecomposable": indecomposable,
            "mpl": mpl(&x)?,
            "group_order": brace.order(),
            "socle_order": brace.socle().len(),
            "uniconnected": indecomposable && brace.order() == x.n(),
            "additive_invariants": brace.additive_invariants(),
        }),
    ))
}

fn retract(input: &str) -> Result<Outcome, Failure> {
    let x = read_cycle_set(input)?;
    let (r, proj) = retraction(&x)?;
    Ok(Outcome::new(
        EXIT_OK,
        json!({ "retraction": r, "projection": proj.map }),
    ))
}

fn iso(first: &str, second: &str) -> Result<Outcome, Failure> {
    let x = read_cycle_set(first)?;
    let y = read_cycle_set(second)?;
    Ok(match is_isomorphic(&x, &y) {
        Some(map) => Outcome::new(EXIT_OK, json!({ "isomorphic": true, "bijection": map })),
        None => Outcome::new(EXIT_NEGATIVE, json!({ "isomorphic": false })),
    })
}

fn extend(cli: &Cli, path: &str) -> Result<Outcome, Failure> {
    let spec = read_spec(path)?;
    let m = spec.module()?;
    let phi = spec.phi(&m)?;
    let (y, proj) = twisted_extension(&m, &phi)?;
    let indecomposable = is_indecomposable(&y);
    let mut code = EXIT_OK;
    let coprime =
        (0..m.base().n()).all(|x| gcd(m.group().order() as u64, m.component_size(x) as u64) == 1);
    let criterion = if coprime && is_indecomposable(m.base()) {
        let c = indecomposability_criterion(&m, &phi)?;
        if c != indecomposable {
            code = EXIT_CHECK_FAILED;
        }
        json!(c)
    } else {
        Value::Null
    };
    let semidirect = if coprime && indecomposable {
        let r = semidirect_check(&m, &phi, cli.group_limit)?;
        if !r.passed() {
            code = EXIT_CHECK_FAILED;
        }
        json!(r)
    } else {
        json!({ "skipped": "requires an indecomposable coprime extension" })
    };
    Ok(Outcome::new(
        code,
        json!({
            "extension": y,
            "projection": proj.map,
            "indecomposable": indecomposable,
            "criterion": criterion,
            "semidirect": semidirect,
        }),
    ))
}

fn lvcheck(path: &str) -> Result<Outcome, Failure> {
    let spec = read_spec(path)?;
    let m = spec.module()?;
    let phi = spec.phi(&m)?;
    let gamma = spec.gamma(&m)?;
    let mut out = serde_json::Map::new();
    let witness = twisted_cocycle_witness(&m, &phi);
    out.insert("twisted_cocycle".into(), json!(witness.is_none()));
    if let Some((x, y, z)) = witness {
        out.insert("witness".into(), json!([x, y, z]));
        return Ok(Outcome::new(EXIT_CHECK_FAILED, Value::Object(out)));
    }
    let mut code = EXIT_OK;
    match equivariant_representative(&m, &phi) {
        Ok(rep) => {
            out.insert("representative".into(), json!(cocycle_rows(&m, &rep)));
        }
        Err(ExtensionError::NoRepresentativeFound) => {
            out.insert("representative".into(), Value::Null);
            code = EXIT_NEGATIVE;
        }
        Err(e @ ExtensionError::NotUnique { .. }) => {
            out.insert("representative_error".into(), json!(e.to_string()));
            code = EXIT_CHECK_FAILED;
        }
        Err(e @ ExtensionError::CoprimalityViolation { .. }) => {
            out.insert("representative_error".into(), json!(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }
    if let Some(g) = gamma {
        match cohomologous(&m, &phi, &g)? {
            Some(c) => {
                out.insert("cohomologous".into(), json!({ "c": c }));
            }
            None => {
                out.insert("cohomologous".into(), Value::Null);
                if code == EXIT_OK {
                    code = EXIT_NEGATIVE;
                }
            }
        }
    }
    Ok(Outcome::new(code, Value::Object(out)))
}

fn enumerate(cli: &Cli, args: &EnumerateArgs) -> Result<Outcome, Failure> {
    let opts = OracleOptions {
        indecomposable: args.indecomposable,
        up_to_iso: args.upto_iso,
        jobs: cli.jobs,
        limit_all: args.limit_all,
        limit_indecomposable: args.limit_indecomposable,
    };
    let e = enumerate_all(args.n, &opts)?;
    let mut value = json!({
        "n": args.n,
        "indecomposable": args.indecomposable,
        "upto_iso": args.upto_iso,
        "count": e.members.len(),
    });
    if args.list {
        value["members"] = json!(e.members);
    }
    Ok(Outcome {
        code: EXIT_OK,
        value,
        compact: args.list,
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Verify { input } => verify(cli, input),
        Command::Info { input } => info(cli, input),
        Command::Retract { input } => retract(input),
        Command::Iso { first, second } => iso(first, second),
        Command::Extend { spec } => extend(cli, spec),
        Command::Lvcheck { spec } => lvcheck(spec),
        Command::Classify(ClassifyCommand::Pq { p, q }) => Ok(Outcome {
            code: EXIT_OK,
            value: json!(enumerate_pq(*p, *q)?),
            compact: true,
        }),
        Command::Classify(ClassifyCommand::Pqr { p, q, r, budget }) => {
            let e = enumerate_pqr(*p, *q, *r, *budget)?;
            if e.truncated {
                eprintln!("budget of {budget} parameter tuples reached; the list is partial");
            }
            Ok(Outcome {
                code: if e.truncated { EXIT_LIMIT } else { EXIT_OK },
                value: json!(e.members),
                compact: true,
            })
        }
        Command::Enumerate(args) | Command::Oracle(OracleCommand::Enumerate(args)) => {
            enumerate(cli, args)
        }
        Command::Oracle(OracleCommand::Crosscheck { n }) => {
            let opts = OracleOptions {
                jobs: cli.jobs,
                ..OracleOptions::default()
            };
            Ok(report_outcome(crosscheck_pq(*n, &opts)?))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let mut text = if outcome.compact {
                serde_json::to_string(&outcome.value)
            } else {
                serde_json::to_string_pretty(&outcome.value)
            }
            .expect("serializable");
            text.push('\n');
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_MALFORMED;
            }
            outcome.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "cycleset", "classify", "pqr", "--p", "2", "--q", "3", "--r", "7", "--jobs", "2",
        ])
        .unwrap();
        assert_eq!(cli.jobs, 2);
        assert!(matches!(
            cli.command,
            Command::Classify(ClassifyCommand::Pqr { budget: 200, .. })
        ));
        assert!(Cli::try_parse_from(["cycleset", "verify", "x.json", "--bogus"]).is_err());
    }

    #[test]
    fn unknown_flag_is_malformed() {
        assert_eq!(run(["cycleset", "info", "-", "--nope"]), EXIT_MALFORMED);
        assert_eq!(
            run(["cycleset", "info", "/nonexistent/file.json"]),
            EXIT_MALFORMED
        );
    }
}
