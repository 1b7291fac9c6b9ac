use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use llprobe::exact::{
    build_binary_vector, build_multiclass_matrix, build_twin_prime_vector, decode_binary,
    decode_binary_from_decimal, decode_multiclass, decode_twin_prime,
};
use llprobe::mia::{fixed_precision_attack, one_query_attack, AttackOutcome};
use llprobe::precision::{min_digits_for_separation, plan_attack, rounded_answer, DEFAULT_SEARCH_BUDGET};
use llprobe::protocol::{serve, OracleMode, ProcessOracle};
use llprobe::scoring::{exact_score, exact_score_multiclass};
use llprobe::wire::{Entries, PlanDoc, ReportDoc, ScoreDoc, VectorDoc, VectorKind};
use llprobe::{AttackMode, CandidateSet, ClassLabeling, Curator, ExactScore, Labeling, MembershipVector, Rational};

const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Parser)]
#[command(name = "llprobe", version, about = "Recover hidden labels from Log-Loss scores")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a crafted prediction vector or matrix as JSON.
    Build(BuildArgs),
    /// Score a prediction document against a labeling.
    Score(ScoreArgs),
    /// Recover a labeling from a score document.
    Decode(DecodeArgs),
    /// Answer SCORE requests on stdin/stdout for a hidden labeling.
    OracleServe(ServeArgs),
    /// Run a membership-inference attack against a random hidden membership.
    AttackDemo(DemoArgs),
    /// Print the batch schedule for a fixed-precision attack.
    Plan(PlanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Twin,
    Binary,
    Multiclass,
}

#[derive(Args)]
struct BuildArgs {
    kind: BuildKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Number of classes (multiclass only).
    #[arg(long = "k", short = 'K', value_parser = clap::value_parser!(u64).range(2..))]
    k: Option<u64>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Vector document, or `-` for stdin.
    file: PathBuf,
    /// Bitstring such as `101`, or comma-separated classes for a matrix.
    #[arg(long)]
    labels: String,
    /// Report rounded (LL, AUC) at this many significant digits instead of the exact score.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    phi: Option<u32>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Score document, or `-` for stdin.
    file: PathBuf,
    #[arg(long)]
    kind: BuildKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    #[arg(long = "k", short = 'K', value_parser = clap::value_parser!(u64).range(2..))]
    k: Option<u64>,
}

#[derive(Args)]
struct ServeArgs {
    /// File holding the hidden bitstring.
    #[arg(long)]
    hidden: PathBuf,
    /// Round answers to this many significant digits; exact answers otherwise.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    phi: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoMode {
    Twin,
    Binary,
    Fixed,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long)]
    mode: DemoMode,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    phi: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Run the curator as a child process speaking the line protocol.
    #[arg(long)]
    via_process: bool,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("precision").required(true).args(["delta", "phi"])))]
struct PlanArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Smallest score difference that must stay visible, e.g. `0.002`.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    phi: Option<u32>,
    /// Build the lookup tables and print the schedule actually used.
    #[arg(long)]
    realize: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Build(a) => build(a),
        Cmd::Score(a) => score(a),
        Cmd::Decode(a) => decode(a),
        Cmd::OracleServe(a) => oracle_serve(a),
        Cmd::AttackDemo(a) => attack_demo(a),
        Cmd::Plan(a) => plan(a),
    }
}

fn print_json<T: serde::Serialize>(doc: &T) -> Result<()> {
    println!("{}", serde_json::to_string(doc)?);
    Ok(())
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn build(a: BuildArgs) -> Result<()> {
    let n = a.n as usize;
    if a.k.is_some() && !matches!(a.kind, BuildKind::Multiclass) {
        bail!("--k only applies to multiclass");
    }
    let doc = match a.kind {
        BuildKind::Twin => VectorDoc::from_vector(VectorKind::Twin, &build_twin_prime_vector(n)?),
        BuildKind::Binary => VectorDoc::from_vector(VectorKind::Binary, build_binary_vector(n)?.vector()),
        BuildKind::Multiclass => {
            let k = a.k.context("multiclass needs --k")? as usize;
            VectorDoc::from_matrix(&build_multiclass_matrix(n, k)?)
        }
    };
    print_json(&doc)
}

fn score(a: ScoreArgs) -> Result<()> {
    let doc: VectorDoc = serde_json::from_str(&read_input(&a.file)?).context("parsing vector document")?;
    let out = match (&doc.entries, a.phi) {
        (Entries::Matrix(_), None) => {
            let m = doc.to_matrix()?;
            let labels = ClassLabeling::parse(&a.labels, m.class_count())?;
            ScoreDoc::exact(&exact_score_multiclass(&m, &labels)?)
        }
        (Entries::Matrix(_), Some(_)) => bail!("rounded scores are only defined for binary labels"),
        (Entries::Vector(_), phi) => {
            let x = doc.to_vector()?;
            let labels: Labeling = a.labels.parse()?;
            match phi {
                None => ScoreDoc::exact(&exact_score(&x, &labels)?),
                Some(phi) => ScoreDoc::decimal(&rounded_answer(&x, &labels, phi)?, phi),
            }
        }
    };
    print_json(&out)
}

fn decode(a: DecodeArgs) -> Result<()> {
    let doc: ScoreDoc = serde_json::from_str(&read_input(&a.file)?).context("parsing score document")?;
    let n = a.n.map(|n| n as usize).or(doc.n);
    let exact = || -> Result<ExactScore> {
        let mut d = doc.clone();
        d.n = n;
        Ok(d.to_exact()?)
    };
    let text = match a.kind {
        BuildKind::Twin => decode_twin_prime(&exact()?)?.to_string(),
        BuildKind::Binary if doc.escore.is_some() => decode_binary(&exact()?)?.to_string(),
        BuildKind::Binary => {
            let n = n.context("decoding a rounded score needs --n")?;
            decode_binary_from_decimal(&doc.to_log_loss()?, n)?.to_string()
        }
        BuildKind::Multiclass => {
            let n = n.context("multiclass decoding needs --n")?;
            let k = a.k.context("multiclass decoding needs --k")? as usize;
            decode_multiclass(&exact()?, n, k)?.to_string()
        }
    };
    println!("{text}");
    Ok(())
}

fn read_hidden(path: &Path) -> Result<Labeling> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.trim().parse()?)
}

fn oracle_serve(a: ServeArgs) -> Result<()> {
    let hidden = read_hidden(&a.hidden)?;
    let mode = match a.phi {
        Some(phi) => OracleMode::Decimal { phi },
        None => OracleMode::Exact,
    };
    let stdin = io::stdin();
    serve(&hidden, mode, stdin.lock(), io::stdout().lock())?;
    Ok(())
}

fn attack_demo(a: DemoArgs) -> Result<()> {
    let n = a.n as usize;
    let (mode, phi) = match (a.mode, a.phi) {
        (DemoMode::Twin, None) => (AttackMode::ExactTwin, None),
        (DemoMode::Binary, None) => (AttackMode::ExactBinary, None),
        (DemoMode::Fixed, Some(phi)) => (AttackMode::FixedPrecision, Some(phi)),
        (DemoMode::Fixed, None) => bail!("--mode fixed needs --phi"),
        (_, Some(_)) => bail!("--phi only applies to --mode fixed"),
    };
    let candidates = CandidateSet::numbered(n)?;
    let curator = Curator::new(MembershipVector::random(n, a.seed)?);

    let outcome = if a.via_process {
        remote_attack(&candidates, &curator, mode, phi)?
    } else {
        match phi {
            Some(phi) => fixed_precision_attack(&candidates, &mut curator.decimal_oracle(phi), phi)?,
            None => one_query_attack(&candidates, &mut curator.exact_oracle(), mode)?,
        }
    };
    let report = curator.evaluate(outcome);

    let mut err = io::stderr().lock();
    writeln!(err, "mode:      {}", report.mode)?;
    writeln!(err, "n:         {n}")?;
    if let Some(phi) = phi {
        writeln!(err, "phi:       {phi}")?;
    }
    writeln!(err, "seed:      {}", a.seed)?;
    writeln!(err, "queries:   {}", report.queries_used)?;
    writeln!(err, "correct:   {}/{}", report.correct, report.total)?;
    writeln!(err, "accuracy:  {}", report.accuracy())?;
    let members = report.recovered.members(&candidates);
    writeln!(err, "members:   {}", if members.is_empty() { "(none)".into() } else { members.join(" ") })?;
    print_json(&ReportDoc::new(&report, phi, a.seed))
}

/// The hidden bits go to a private temporary file read by the child; the
/// attack itself only sees the child's answers.
fn remote_attack(
    candidates: &CandidateSet,
    curator: &Curator,
    mode: AttackMode,
    phi: Option<u32>,
) -> Result<AttackOutcome> {
    let mut hidden = tempfile::NamedTempFile::new()?;
    writeln!(hidden, "{}", curator.hidden().bits())?;
    hidden.flush()?;

    let mut cmd = Command::new(std::env::current_exe()?);
    cmd.arg("oracle-serve").arg("--hidden").arg(hidden.path());
    if let Some(phi) = phi {
        cmd.arg("--phi").arg(phi.to_string());
    }
    let mut oracle = ProcessOracle::spawn(cmd, phi.unwrap_or(0))?;
    let outcome = match phi {
        Some(phi) => fixed_precision_attack(candidates, &mut oracle, phi)?,
        None => one_query_attack(candidates, &mut oracle, mode)?,
    };
    oracle.shutdown()?;
    Ok(outcome)
}

fn plan(a: PlanArgs) -> Result<()> {
    let n = a.n as usize;
    let phi = match (&a.delta, a.phi) {
        (Some(d), None) => {
            let delta = Rational::from_decimal_str(d)?;
            min_digits_for_separation(&delta)?
        }
        (None, Some(phi)) => phi,
        _ => unreachable!("clap enforces exactly one of --delta and --phi"),
    };
    let mut doc = if a.realize {
        PlanDoc::realized(&plan_attack(n, phi, DEFAULT_SEARCH_BUDGET)?)
    } else {
        PlanDoc::nominal(n, phi)
    };
    doc.delta = a.delta;
    print_json(&doc)
}
