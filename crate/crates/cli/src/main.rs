mod commands;
mod schema;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

/// Exit status for malformed input (sysexits EX_DATAERR).
const EXIT_MALFORMED: u8 = 64;
/// The requested feature is outside what the library handles.
const EXIT_UNSUPPORTED: u8 = 69;
/// A resource bound refused the computation (sysexits EX_TEMPFAIL).
const EXIT_RESOURCE: u8 = 75;

#[derive(Parser, Debug)]
#[command(name = "pencilkit", version, about = "Pencils of quadrics, hyperelliptic Jacobians and isotropic subspaces")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Print the JSON schemas of inputs and outputs and exit.
    #[arg(long)]
    schema: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
pub struct PencilArg {
    /// Pencil JSON file, or - for stdin.
    #[arg(long)]
    pencil: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Curve JSON file, or - for stdin.
    #[arg(long, conflicts_with_all = ["f", "field"])]
    curve: Option<PathBuf>,
    /// The polynomial f, e.g. "t^6-1".
    #[arg(long, requires = "field")]
    f: Option<String>,
    /// An odd prime.
    #[arg(long, requires = "f")]
    field: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Discriminant polynomial (-1)^(n+1) det(t Q1 - Q2).
    Disc(PencilArg),
    /// Whether the discriminant is squarefree of full degree.
    Nonsingular(PencilArg),
    /// Simultaneous diagonalization over the splitting field.
    Diagonalize(PencilArg),
    /// The group of sign-change automorphisms defined over F_(p^level).
    Aut {
        #[command(flatten)]
        pencil: PencilArg,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// The map from 2-torsion classes of y^2 = f to automorphisms.
    Theta(PencilArg),
    /// The standard soluble pencil of a monic squarefree f.
    Arulwang {
        #[arg(long)]
        f: String,
        /// Q or an odd prime.
        #[arg(long)]
        field: String,
        /// Apply a random change of basis drawn from --seed.
        #[arg(long)]
        conjugate: bool,
    },
    /// Points of y^2 = f over F_(p^m).
    CurveCount {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Order of the Jacobian and the zeta numerator.
    JacOrder(CurveArgs),
    /// Rational 2-torsion of the Jacobian as root subsets.
    TwoTorsion(CurveArgs),
    /// s-dimensional subspaces isotropic for both forms.
    Isotropic {
        #[command(flatten)]
        pencil: PencilArg,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Whether an n-dimensional common isotropic subspace exists.
    Soluble(PencilArg),
    /// Compare the number of isotropic n-planes with the Jacobian order.
    VerifyJg {
        #[command(flatten)]
        pencil: PencilArg,
        /// Reduce a rational pencil modulo this prime.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Twist a pencil by a cocycle.
    Twist {
        #[command(flatten)]
        pencil: PencilArg,
        /// Cocycle JSON file, or - for stdin.
        #[arg(long)]
        cocycle: PathBuf,
    },
    /// Local and global analysis of the base locus of a rational pencil.
    AnalyzeX {
        #[command(flatten)]
        pencil: PencilArg,
        /// Test every prime up to this bound besides the bad primes.
        #[arg(long, default_value_t = 13)]
        prime_bound: u64,
        #[arg(long, default_value_t = 10)]
        height: u32,
        #[arg(long, default_value_t = 20_000_000)]
        node_budget: i64,
        #[arg(long, default_value_t = 16)]
        max_precision: u32,
    },
    /// Rational points of the base locus up to a height.
    PointSearch {
        #[command(flatten)]
        pencil: PencilArg,
        #[arg(long, default_value_t = 10)]
        height: u32,
    },
}

/// Result document plus exit status.
pub struct Outcome {
    pub value: Value,
    pub code: u8,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Self { value, code: 0 }
    }
}

fn error_outcome(err: &anyhow::Error) -> Outcome {
    let (kind, code) = match err.downcast_ref::<pencilkit::Error>() {
        Some(pencilkit::Error::Resource(_)) => ("resource", EXIT_RESOURCE),
        Some(pencilkit::Error::ExtensionGrowth(_)) => ("extension-growth", EXIT_RESOURCE),
        Some(pencilkit::Error::Unsupported(_)) => ("unsupported", EXIT_UNSUPPORTED),
        Some(pencilkit::Error::DimensionMismatch { .. }) => ("dimension-mismatch", EXIT_MALFORMED),
        Some(pencilkit::Error::SingularLeadingForm) => ("singular-leading-form", EXIT_MALFORMED),
        Some(pencilkit::Error::SingularPencil) => ("singular-pencil", EXIT_MALFORMED),
        Some(pencilkit::Error::InvalidCocycle(_)) => ("invalid-cocycle", EXIT_MALFORMED),
        _ => ("invalid-input", EXIT_MALFORMED),
    };
    Outcome { value: json!({ "error": { "kind": kind, "message": format!("{err:#}") } }), code }
}

fn emit(value: &Value, output: Option<&PathBuf>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let v = json!({ "error": { "kind": "usage", "message": e.to_string().trim_end() } });
            let _ = emit(&v, None);
            return ExitCode::from(EXIT_MALFORMED);
        }
    };
    if cli.schema {
        let _ = emit(&schema::schemas(), cli.output.as_ref());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        let v = json!({ "error": { "kind": "usage", "message": "no subcommand given; see --help" } });
        let _ = emit(&v, None);
        return ExitCode::from(EXIT_MALFORMED);
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            let _ = emit(&json!({ "error": { "kind": "usage", "message": "--workers must be positive" } }), None);
            return ExitCode::from(EXIT_MALFORMED);
        }
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let outcome = commands::run(command, cli.seed).unwrap_or_else(|e| error_outcome(&e));
    if let Err(e) = emit(&outcome.value, cli.output.as_ref()) {
        eprintln!("{e:#}");
        return ExitCode::from(74);
    }
    ExitCode::from(outcome.code)
}
