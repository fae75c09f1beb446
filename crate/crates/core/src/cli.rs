//! The `mtgw` command line. [`run`] parses arguments and executes a
//! subcommand without touching the process, so it can be driven from
//! tests; the binary only prints the [`Outcome`] and exits.
//!
//! Exit codes: 0 when everything passes, 1 when a mathematical condition
//! fails, 2 when the input is malformed or unreadable.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::checker;
use crate::constructor::{construct_mu, verify_reversibility};
use crate::covers::{self, FiniteGraph};
use crate::error::Error;
use crate::format::{self, MeasureFile, Verification};
use crate::model::{GWSpec, Mode, RootMeasure};
use crate::norelabel;
use crate::parametrizer;
use crate::simulator::{self, FlowEstimate, AGREEMENT_THRESHOLD};
use crate::vector::{Label, SupportClass};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mtgw", version, about = "Reversible measures on multi-type Galton-Watson trees")]
pub struct Cli {
    /// Machine-readable JSON output for every report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a reversible measure exists for a spec.
    Check { spec: PathBuf },
    /// Build the reversible measure of a spec. `-` writes to stdout.
    Construct { spec: PathBuf, out: PathBuf },
    /// Build a measure from a support template and free weights.
    Parametrize { template: PathBuf, params: PathBuf, out: PathBuf },
    /// Lift a finite graph (adjacency list) to its cover measure.
    Cover {
        graph: PathBuf,
        out: PathBuf,
        /// Also write the pair digraph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Largest graph accepted.
        #[arg(long, default_value_t = covers::DEFAULT_VERTEX_BOUND)]
        bound: usize,
    },
    /// Monte Carlo flow (or mass-transport) estimates against exact values.
    Simulate {
        measure: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Source class, e.g. "1:(1,1)".
        #[arg(long, required_unless_present = "mtp")]
        from: Option<SupportClass>,
        /// Target class.
        #[arg(long, required_unless_present = "mtp")]
        to: Option<SupportClass>,
        /// Label pair for the degree-biased transport check.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        mtp: Option<Vec<Label>>,
    },
    /// Check detailed balance of a measure file exactly.
    Verify { measure: PathBuf },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn new(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn error(err: &Error) -> Self {
        Outcome { code: exit_code(err), stdout: String::new(), stderr: format!("error: {err}\n") }
    }
}

/// 1 for failed conditions, 2 for bad input.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ChecksNotPassed(_)
        | Error::DisconnectedBalanceGraph
        | Error::InvalidTemplate(_)
        | Error::NoAdmissibleTarget { .. }
        | Error::InconsistentRatios
        | Error::PlainRejected(_)
        | Error::PlainCyclesFailed(_)
        | Error::IllDefinedLabeling { .. } => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(err) => {
            let code = if err.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = err.render().to_string();
            if code == EXIT_PASS {
                Outcome::new(code, text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let json = cli.json;
    let result = match &cli.command {
        Command::Check { spec } => cmd_check(spec),
        Command::Construct { spec, out } => cmd_construct(spec, out, json),
        Command::Parametrize { template, params, out } => cmd_parametrize(template, params, out, json),
        Command::Cover { graph, out, dot, bound } => cmd_cover(graph, out, dot.as_deref(), *bound, json),
        Command::Simulate { measure, trials, seed, from, to, mtp } => {
            cmd_simulate(measure, *trials, *seed, from.as_ref(), to.as_ref(), mtp.as_deref(), json)
        }
        Command::Verify { measure } => cmd_verify(measure, json),
    };
    result.unwrap_or_else(|err| Outcome::error(&err))
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

/// Writes `text` to `path`, or returns it for stdout when `path` is `-`.
fn write_out(path: &Path, text: &str) -> Result<Option<String>, Error> {
    if path == Path::new("-") {
        Ok(Some(text.to_string()))
    } else {
        fs::write(path, text)?;
        Ok(None)
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String, Error> {
    format::to_canonical_json(value)
}

/// Either report kind, serialized as-is.
#[derive(Serialize)]
#[serde(untagged)]
enum AnyReport {
    Pair(checker::CheckReport),
    Plain(norelabel::PlainCheckReport),
}

impl AnyReport {
    fn of(nu: &GWSpec) -> Result<Self, Error> {
        Ok(match nu.mode() {
            Mode::Pair => AnyReport::Pair(checker::check(nu)?),
            Mode::Plain => AnyReport::Plain(norelabel::check_plain(nu)?),
        })
    }

    fn passed(&self) -> bool {
        match self {
            AnyReport::Pair(r) => r.passed,
            AnyReport::Plain(r) => r.passed,
        }
    }
}

fn cmd_check(spec: &Path) -> Result<Outcome, Error> {
    let nu = format::parse_spec(&read(spec)?)?;
    let report = AnyReport::of(&nu)?;
    let code = if report.passed() { EXIT_PASS } else { EXIT_FAIL };
    Ok(Outcome::new(code, pretty(&report)?))
}

/// Stamps `mu` with its exact verification and writes it.
fn write_measure(mu: RootMeasure, out: &Path, json: bool) -> Result<Outcome, Error> {
    let report = verify_reversibility(&mu);
    let verification = Verification::from(&report);
    let file = MeasureFile { measure: mu, verification: Some(verification) };
    let text = file.emit()?;
    let code = if verification.passed { EXIT_PASS } else { EXIT_FAIL };
    if let Some(stdout) = write_out(out, &text)? {
        return Ok(Outcome::new(code, stdout));
    }
    let mu = &file.measure;
    let stdout = if json {
        pretty(&json!({
            "out": out.display().to_string(),
            "root": (1..=mu.n()).map(|i| mu.root_prob(i).to_string()).collect::<Vec<_>>(),
            "verification": verification,
        }))?
    } else {
        let mut s = format!("wrote {}\n", out.display());
        for i in 1..=mu.n() {
            let _ = writeln!(s, "  mu({i}) = {}", mu.root_prob(i));
        }
        let _ = writeln!(
            s,
            "  detailed balance: {} ({} class pairs)",
            if verification.passed { "exact" } else { "FAILED" },
            verification.checked_pairs
        );
        s
    };
    Ok(Outcome::new(code, stdout))
}

fn cmd_construct(spec: &Path, out: &Path, json: bool) -> Result<Outcome, Error> {
    let nu = format::parse_spec(&read(spec)?)?;
    let report = AnyReport::of(&nu)?;
    if !report.passed() {
        return Ok(Outcome::new(EXIT_FAIL, pretty(&report)?));
    }
    let mu = match nu.mode() {
        Mode::Pair => construct_mu(&nu)?,
        Mode::Plain => norelabel::construct_from_gw(&nu)?,
    };
    write_measure(mu, out, json)
}

fn cmd_parametrize(template: &Path, params: &Path, out: &Path, json: bool) -> Result<Outcome, Error> {
    let template = format::parse_template(&read(template)?)?;
    let params = format::parse_params(&read(params)?)?;
    if let Err(failure) = template.validate() {
        let report = json!({ "template": { "status": "fail", "failure": failure } });
        return Ok(Outcome::new(EXIT_FAIL, pretty(&report)?));
    }
    write_measure(parametrizer::parametrize(&template, &params)?, out, json)
}

fn cmd_cover(graph: &Path, out: &Path, dot: Option<&Path>, bound: usize, json: bool) -> Result<Outcome, Error> {
    let g = FiniteGraph::parse_adjacency(&read(graph)?)?;
    let labels = covers::label_vertices_bounded(&g, bound)?;
    if let Some(dot) = dot {
        fs::write(dot, covers::pair_digraph(&g, &labels)?.to_dot())?;
    }
    let mut outcome = write_measure(covers::lift_measure(&g, &labels)?, out, json)?;
    if out != Path::new("-") && !json {
        let labels: Vec<String> = labels.labels().iter().map(ToString::to_string).collect();
        outcome.stdout = format!("vertex labels: {}\n{}", labels.join(" "), outcome.stdout);
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct EstimateRecord<'a> {
    check: &'static str,
    direction: &'static str,
    subject: String,
    #[serde(flatten)]
    estimate: &'a FlowEstimate,
    z: f64,
    threshold: f64,
    passed: bool,
}

fn cmd_simulate(
    measure: &Path,
    trials: u64,
    seed: u64,
    from: Option<&SupportClass>,
    to: Option<&SupportClass>,
    mtp: Option<&[Label]>,
    json: bool,
) -> Result<Outcome, Error> {
    if trials < 2 {
        return Err(Error::Parse("need at least 2 trials".into()));
    }
    let mu = format::parse_measure(&read(measure)?)?;
    let mut estimates = Vec::new();
    if let (Some(from), Some(to)) = (from, to) {
        let (fwd, back) = simulator::estimate_flow(&mu, from, to, trials, seed)?;
        estimates.push(("flow", "forward", format!("{from} -> {to}"), fwd));
        estimates.push(("flow", "backward", format!("{to} -> {from}"), back));
    }
    if let Some(&[i, j]) = mtp {
        let (send, receive) = simulator::mtp_check(&mu, i, j, trials, seed)?;
        estimates.push(("mass_transport", "forward", format!("{i} -> {j}"), send));
        estimates.push(("mass_transport", "backward", format!("{j} -> {i}"), receive));
    }
    let records: Vec<EstimateRecord> = estimates
        .iter()
        .map(|(check, direction, subject, e)| EstimateRecord {
            check,
            direction,
            subject: subject.clone(),
            estimate: e,
            z: e.z_score(),
            threshold: AGREEMENT_THRESHOLD,
            passed: e.agrees(),
        })
        .collect();
    let all_passed = records.iter().all(|r| r.passed);
    let code = if all_passed { EXIT_PASS } else { EXIT_FAIL };
    let stdout = if json {
        pretty(&records)?
    } else {
        let mut s = String::new();
        for r in &records {
            let _ = writeln!(
                s,
                "{} {} {}: mean {:.6} ± {:.6} (exact {} = {:.6}), z = {:.2}, {}",
                r.check,
                r.direction,
                r.subject,
                r.estimate.mean,
                r.estimate.std_error,
                r.estimate.reference,
                r.estimate.reference.to_f64(),
                r.z,
                if r.passed { "ok" } else { "FAIL" },
            );
        }
        if let Some(first) = records.first() {
            let _ = writeln!(s, "trials {}, seed {}, generator {}", first.estimate.trials, seed, first.estimate.generator);
        }
        s
    };
    Ok(Outcome::new(code, stdout))
}

fn cmd_verify(measure: &Path, json: bool) -> Result<Outcome, Error> {
    let mu = format::parse_measure(&read(measure)?)?;
    let report = verify_reversibility(&mu);
    let code = if report.passed() { EXIT_PASS } else { EXIT_FAIL };
    let stdout = if json {
        pretty(&json!({ "passed": report.passed(), "report": report }))?
    } else if report.passed() {
        format!("detailed balance holds exactly ({} class pairs)\n", report.checked_pairs)
    } else {
        let mut s = String::from("detailed balance FAILS\n");
        for v in &report.balance {
            let _ = writeln!(s, "  {} <-> {}: {} != {}", v.from, v.to, v.lhs, v.rhs);
        }
        for v in &report.support {
            let _ = writeln!(s, "  support: {}", serde_json::to_string(v)?);
        }
        s
    };
    Ok(Outcome::new(code, stdout))
}
