//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::constructions::{self, Construction, ConstructionError, VerificationReport};
use crate::tchains::{generate_class_t, hj_expand};
use crate::topology::{self, ConnectionGraph};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "blowdown", version, about = "Exact checks for rational blow-down constructions")]
pub struct Cli {
    /// Emit a JSON report envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chain of the configuration C_{p,q} and its lens order.
    Cpq { p: u64, q: u64 },
    /// Class-T chain utilities.
    Tchain {
        #[command(subcommand)]
        action: TchainAction,
    },
    /// Discrepancies, f*K_X expansion, K^2 and nef table for a construction file.
    Contract {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Invariants of the blown-down manifold for a construction file.
    Invariants { file: PathBuf },
    /// gcd closure on a connection graph file.
    Pi1 { graph: PathBuf },
    /// Run every check of a built-in construction or a dataset file.
    Verify {
        name: Option<String>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// List built-in constructions.
    List,
}

#[derive(Debug, Subcommand)]
pub enum TchainAction {
    /// All class-T chains up to the given length.
    Gen {
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub inputs_digest: String,
    pub results: Value,
    pub summary: Summary,
    pub version: String,
}

/// What a command produced, before rendering.
pub struct Outcome {
    pub command: String,
    pub inputs: Vec<u8>,
    pub results: Value,
    pub text: String,
    pub checks: usize,
    pub failed: usize,
}

impl Outcome {
    fn new(command: &str, inputs: Vec<u8>, results: Value, text: String) -> Self {
        Outcome { command: command.into(), inputs, results, text, checks: 0, failed: 0 }
    }

    pub fn envelope(&self) -> ReportEnvelope {
        ReportEnvelope {
            command: self.command.clone(),
            inputs_digest: hex(&Sha256::digest(&self.inputs)),
            results: self.results.clone(),
            summary: Summary { checks: self.checks, failed: self.failed, pass: self.failed == 0 },
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.failed == 0 {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, String),
    #[error("cannot parse {0}: {1}")]
    Parse(PathBuf, String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Construction(
                ConstructionError::Lattice(_) | ConstructionError::Contraction(_) | ConstructionError::Topology(_),
            ) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))
}

fn digest_input(parts: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::new();
    for p in parts {
        out.extend_from_slice(&(p.len() as u64).to_le_bytes());
        out.extend_from_slice(p);
    }
    out
}

fn load_file(path: &Path) -> Result<(Construction, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))?;
    let c = Construction::from_json(&text, &path.display().to_string())?;
    Ok((c, bytes))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Cpq { p, q } => cpq(*p, *q),
        Command::Tchain { action: TchainAction::Gen { max_len } } => tchain_gen(*max_len),
        Command::Contract { file, .. } => contract(file),
        Command::Invariants { file } => invariants(file),
        Command::Pi1 { graph } => pi1(graph),
        Command::Verify { name, dataset } => verify(name.as_deref(), dataset.as_deref()),
        Command::List => Ok(list()),
    }
}

fn cpq(p: u64, q: u64) -> Result<Outcome, CliError> {
    let chain = hj_expand(p, q).map_err(|e| CliError::Usage(e.to_string()))?;
    let entries: Vec<String> = chain.entries().iter().map(u32::to_string).collect();
    let order = p * p;
    let text = format!("{}\nlens order {order}\n", entries.join(" "));
    let results = json!({ "p": p, "q": q, "chain": chain.entries(), "lens_order": order });
    Ok(Outcome::new("cpq", digest_input(&[&p.to_le_bytes(), &q.to_le_bytes()]), results, text))
}

fn tchain_gen(max_len: usize) -> Result<Outcome, CliError> {
    let chains = generate_class_t(max_len);
    let mut text = String::new();
    let mut rows = Vec::with_capacity(chains.len());
    for c in &chains {
        let entries: Vec<String> = c.entries().iter().map(u32::to_string).collect();
        let g = c.general_params().expect("generated chains are class T");
        let wahl = c.params().map_or_else(|| "-".to_string(), |w| format!("p={} q={}", w.p, w.q));
        let _ = writeln!(text, "{}\td={} n={} a={}\t{wahl}", entries.join(" "), g.d, g.n, g.a);
        rows.push(json!({
            "chain": c.entries(),
            "d": g.d, "n": g.n, "a": g.a,
            "p": c.params().map(|w| w.p),
            "q": c.params().map(|w| w.q),
        }));
    }
    let results = json!({ "max_len": max_len, "count": chains.len(), "chains": rows });
    Ok(Outcome::new("tchain gen", digest_input(&[&(max_len as u64).to_le_bytes()]), results, text))
}

fn contract(file: &Path) -> Result<Outcome, CliError> {
    let (c, bytes) = load_file(file)?;
    let a = constructions::analyze(&c)?;
    let cr = &a.contraction;
    let mut text = String::new();
    for ch in &cr.chains {
        let entries: Vec<String> = ch.entries.iter().map(u32::to_string).collect();
        let _ = writeln!(text, "{}  [{}]  det {}", ch.name, entries.join(" "), ch.artin.determinant);
        for (curve, d) in ch.curves.iter().zip(&ch.discrepancies) {
            let _ = writeln!(text, "  d({curve}) = {d}");
        }
    }
    let expansion = a.expansion_rendered(&c);
    if !expansion.is_empty() {
        let _ = writeln!(text, "f*K_X =");
        for (curve, v) in &expansion {
            let _ = writeln!(text, "  {v} {curve}");
        }
    }
    let _ = writeln!(text, "K_Z^2 = {}", cr.k_squared_z);
    let _ = writeln!(text, "K^2 = {}", cr.k_squared);
    let _ = writeln!(text, "orthogonal to all chain curves: {}", cr.orthogonal);
    for n in &cr.nef {
        let _ = writeln!(text, "  f*K_X . {} = {}", n.curve, n.value);
    }
    let results = json!({
        "construction": c.name,
        "contraction": cr,
        "expansion": expansion.iter().map(|(k, v)| json!({ "curve": k, "value": v })).collect::<Vec<_>>(),
    });
    let mut out = Outcome::new("contract", digest_input(&[&bytes]), results, text);
    out.checks = 1;
    out.failed = usize::from(!cr.orthogonal);
    Ok(out)
}

fn invariants(file: &Path) -> Result<Outcome, CliError> {
    let (c, bytes) = load_file(file)?;
    let a = constructions::analyze(&c)?;
    let r = &a.invariants;
    let mut text = String::new();
    let _ = writeln!(text, "e = {}", r.e);
    let _ = writeln!(text, "sigma = {}", r.sigma);
    let _ = writeln!(text, "b2+ = {}, b2- = {}", r.b2_plus, r.b2_minus);
    let _ = writeln!(text, "K^2 = {}", r.k_squared);
    let _ = writeln!(text, "chi = {}  (Noether: {} + {} = {})", r.chi, r.k_squared, r.e, 12 * r.chi);
    let _ = writeln!(text, "parity = {}", r.parity);
    if let Some(t) = r.pi1_trivial {
        let _ = writeln!(text, "pi1 trivial = {t}");
    }
    let (excl, value) = topology::rationality_exclusion(r.k_squared, r.chi);
    let _ = writeln!(text, "chi(2K) = {value}{}", if excl { " > 0" } else { "" });
    let _ = writeln!(text, "fingerprint = {}", r.fingerprint.as_deref().unwrap_or("none"));
    let results = json!({
        "construction": c.name,
        "invariants": r,
        "chi_2k": value,
        "rationality_excluded": excl,
    });
    let mut out = Outcome::new("invariants", digest_input(&[&bytes]), results, text);
    out.checks = 1;
    out.failed = usize::from(r.k_squared + r.e != 12 * r.chi);
    Ok(out)
}

fn pi1(path: &Path) -> Result<Outcome, CliError> {
    let bytes = read(path)?;
    let text_in = String::from_utf8_lossy(&bytes);
    let graph = ConnectionGraph::from_json(&text_in).map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))?;
    let r = topology::pi1_closure(&graph).map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))?;
    let mut text = String::new();
    for step in &r.log {
        let _ = writeln!(text, "{step}");
    }
    let _ = writeln!(text, "{}", if r.trivial { "trivial" } else { "not forced trivial" });
    Ok(Outcome::new("pi1", digest_input(&[&bytes]), serde_json::to_value(&r).expect("serializable"), text))
}

fn verify(name: Option<&str>, dataset: Option<&Path>) -> Result<Outcome, CliError> {
    let (c, bytes) = match (name, dataset) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give a construction name or --dataset, not both".into())),
        (None, None) => return Err(CliError::Usage("verify needs a construction name or --dataset <path>".into())),
        (Some(n), None) => {
            let c = constructions::load_builtin(n)?;
            let bytes = c.to_json().into_bytes();
            (c, bytes)
        }
        (None, Some(p)) => load_file(p)?,
    };
    let report = constructions::verify(&c);
    let text = render_report(&report);
    let failed = report.failures().len();
    let mut out =
        Outcome::new("verify", digest_input(&[&bytes]), serde_json::to_value(&report).expect("serializable"), text);
    out.checks = report.checks.len();
    out.failed = failed;
    Ok(out)
}

pub fn render_report(report: &VerificationReport) -> String {
    let mut text = format!("{}\n", report.construction);
    for c in &report.checks {
        let _ = writeln!(text, "  {}", c.line());
    }
    if let Some(inv) = &report.invariants {
        let _ = writeln!(
            text,
            "K^2 = {}, b2+ = {}, b2- = {}, chi = {}, fingerprint {}",
            inv.k_squared,
            inv.b2_plus,
            inv.b2_minus,
            inv.chi,
            inv.fingerprint.as_deref().unwrap_or("none")
        );
    }
    let failed = report.failures().len();
    let _ = writeln!(text, "{} checks, {failed} failed", report.checks.len());
    text
}

fn list() -> Outcome {
    let names = constructions::list_builtins();
    let mut text = String::new();
    let mut rows = Vec::new();
    for n in &names {
        match constructions::load_builtin(n) {
            Ok(c) => {
                let _ = writeln!(text, "{n}\t{}", c.description);
                rows.push(json!({ "name": n, "description": c.description, "chains": c.chains.len() }));
            }
            Err(e) => {
                let _ = writeln!(text, "{n}\t(unreadable: {e})");
                rows.push(json!({ "name": n, "error": e.to_string() }));
            }
        }
    }
    Outcome::new("list", digest_input(&[names.join("\n").as_bytes()]), json!({ "constructions": rows }), text)
}

/// Parses `args`, runs the command and writes the report to `out`.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let json_mode = cli.json || matches!(cli.command, Command::Contract { report: ReportFormat::Json, .. });
    match run(&cli) {
        Ok(outcome) => {
            if json_mode {
                let s = serde_json::to_string_pretty(&outcome.envelope()).expect("serializable");
                let _ = writeln!(out, "{s}");
            } else {
                let _ = out.write_all(outcome.text.as_bytes());
            }
            outcome.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = main_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(std::iter::once("blowdown").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
    }

    #[test]
    fn cpq_text() {
        let (code, out) = run_args(&["cpq", "7", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "9 2 2 2 2 2\nlens order 49\n");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "nosuch"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["cpq", "4", "2"]).0, EXIT_USAGE);
    }

    #[test]
    fn envelope_round_trips() {
        let (_, out) = run_args(&["--json", "cpq", "19", "5"]);
        let env: ReportEnvelope = serde_json::from_str(&out).unwrap();
        assert_eq!(env.results["chain"], json!([4, 7, 2, 2, 3, 2, 2]));
        assert_eq!(serde_json::to_string_pretty(&env).unwrap() + "\n", out);
    }
}
