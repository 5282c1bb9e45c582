use crate::boxfile::BoxFile;
use crate::error::CliError;
use crate::report::{parse_party, party_name, sha256_hex, BoxBlock, FunctionalBlock, MultipliersBlock, Report, Source, Witness};
use boxlab::bell::{cglmp, chsh_functional, DEFAULT_STRATEGY_CAP};
use boxlab::incompat::{entropy_bound_check, incompatibility, ObservablePair};
use boxlab::isotropic::{depolarize, make_isotropic, shrink};
use boxlab::locality::{is_local_with, secrecy_content_with, LocalityOptions};
use boxlab::rational::{format_rational, parse_rational};
use boxlab::shareability::{
    generalized_isotropic, generalized_pr, is_m_shareable, monogamy_scan, polygamy_example, ExtensionProblem,
    ExtensionWitness,
};
use boxlab::{CorrelationBox, LocalityVerdict, Rational, SecrecyVerdict};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const STRATEGY_CAP_ENV: &str = "BOXLAB_STRATEGY_CAP";

#[derive(Debug, Parser)]
#[command(name = "boxlab", version, about = "Exact analysis of nonsignaling correlation boxes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a named box to a file (or stdout).
    Make(MakeArgs),
    /// Run one analysis on a box file. Exit 0 if the property holds, 1 if not.
    Analyze(AnalyzeArgs),
    /// Re-check the witness in a report against its box file.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MakeKind {
    /// PR box, a + b = xy (mod 2)
    Pr,
    /// Isotropic box C PR + (1 - C) uniform (needs --C)
    Iso,
    /// Generalized PR box with A outputs (needs --A)
    Gpr,
    /// Generalized isotropic box (needs --C and --A; --pa/--pb default to uniform)
    Giso,
    /// Tripartite box whose AB and AC marginals are both nonlocal
    Polygamy,
}

#[derive(Debug, Args)]
pub struct MakeArgs {
    pub kind: MakeKind,
    #[arg(long = "C", value_name = "p/q")]
    pub c: Option<String>,
    #[arg(long = "A", value_name = "n")]
    pub a: Option<usize>,
    /// Alice's noise distribution for giso, comma separated.
    #[arg(long)]
    pub pa: Option<String>,
    /// Bob's noise distribution for giso, comma separated.
    #[arg(long)]
    pub pb: Option<String>,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Ns,
    Local,
    Chsh,
    Cglmp,
    Shareable,
    Incompat,
    Entropy,
    Secrecy,
    Depolarize,
    Shrink,
    MonogamyScan,
}

impl Analysis {
    fn name(self) -> &'static str {
        match self {
            Analysis::Ns => "ns",
            Analysis::Local => "local",
            Analysis::Chsh => "chsh",
            Analysis::Cglmp => "cglmp",
            Analysis::Shareable => "shareable",
            Analysis::Incompat => "incompat",
            Analysis::Entropy => "entropy",
            Analysis::Secrecy => "secrecy",
            Analysis::Depolarize => "depolarize",
            Analysis::Shrink => "shrink",
            Analysis::MonogamyScan => "monogamy-scan",
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub which: Analysis,
    /// Box file; not used by monogamy-scan.
    pub file: Option<PathBuf>,
    /// Number of copies for shareable.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Party: the shared one for shareable, the observed one for incompat and entropy.
    #[arg(long, default_value = "B")]
    pub party: String,
    #[arg(long, default_value_t = 0)]
    pub y0: usize,
    #[arg(long, default_value_t = 1)]
    pub y1: usize,
    #[arg(long, value_name = "p/q")]
    pub epsilon: Option<String>,
    /// Comma-separated CHSH values for monogamy-scan.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true, default_value = "-1,-1/2,0,1/4,1/2,3/4,1")]
    pub beta_grid: String,
    /// Outputs per input for cglmp; defaults to the box's output count.
    #[arg(long)]
    pub d: Option<usize>,
    /// Write the machine-readable report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print the machine-readable report instead of the summary.
    #[arg(long)]
    pub json: bool,
    /// Write the transformed box (depolarize, shrink) here.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub report: PathBuf,
    /// Use this box file instead of the path recorded in the report.
    #[arg(long = "box")]
    pub box_path: Option<PathBuf>,
}

/// What a command printed and the exit code it asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Make(args) => cmd_make(&args),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Verify(args) => cmd_verify(&args),
    }
}

pub fn strategy_cap() -> Result<u128, CliError> {
    match std::env::var(STRATEGY_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{STRATEGY_CAP_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_STRATEGY_CAP),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn rational_arg(flag: &str, value: Option<&str>) -> Result<Rational, CliError> {
    let v = value.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))?;
    parse_rational(v).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn rational_list(flag: &str, value: &str) -> Result<Vec<Rational>, CliError> {
    value
        .split(',')
        .map(|t| parse_rational(t).map_err(|e| CliError::Usage(format!("--{flag}: {e}"))))
        .collect()
}

pub fn make_box(args: &MakeArgs) -> Result<BoxFile, CliError> {
    let outputs = || args.a.ok_or_else(|| CliError::Usage("--A is required".into()));
    let file = match args.kind {
        MakeKind::Pr => BoxFile::named(make_isotropic(Rational::from_integer(1.into()))?, "pr"),
        MakeKind::Iso => {
            let c = rational_arg("C", args.c.as_deref())?;
            BoxFile::named(make_isotropic(c.clone())?, &format!("iso C={c}"))
        }
        MakeKind::Gpr => {
            let a = outputs()?;
            BoxFile::named(generalized_pr(a)?, &format!("gpr A={a}"))
        }
        MakeKind::Giso => {
            let a = outputs()?;
            let c = rational_arg("C", args.c.as_deref())?;
            let uniform = || vec![Rational::new(1.into(), (a as i64).into()); a];
            let pa = args.pa.as_deref().map(|v| rational_list("pa", v)).transpose()?.unwrap_or_else(uniform);
            let pb = args.pb.as_deref().map(|v| rational_list("pb", v)).transpose()?.unwrap_or_else(uniform);
            BoxFile::named(generalized_isotropic(a, &c, &pa, &pb)?, &format!("giso A={a} C={c}"))
        }
        MakeKind::Polygamy => BoxFile::named(polygamy_example(), "polygamy"),
    };
    Ok(file)
}

fn cmd_make(args: &MakeArgs) -> Result<Outcome, CliError> {
    let text = make_box(args)?.to_text();
    match &args.output {
        Some(path) => {
            write(path, &text)?;
            Ok(Outcome { code: 0, stdout: format!("wrote {}\n", path.display()) })
        }
        None => Ok(Outcome { code: 0, stdout: text }),
    }
}

fn observable_pair(args: &AnalyzeArgs) -> Result<ObservablePair, CliError> {
    Ok(ObservablePair::new(parse_party(&args.party)?.index(), args.y0, args.y1))
}

/// Runs one analysis on an in-memory box (`None` only for monogamy-scan).
pub fn analyze(which: Analysis, b: Option<&CorrelationBox>, args: &AnalyzeArgs, cap: u128) -> Result<Report, CliError> {
    let start = Instant::now();
    let need_box = || b.ok_or_else(|| CliError::Usage(format!("analyze {} needs a box file", which.name())));
    let opts = LocalityOptions { strategy_cap: cap };
    let mut params = BTreeMap::new();
    let mut summary = Vec::new();
    let (holds, witness) = match which {
        Analysis::Ns => match need_box()?.signaling_witness() {
            None => {
                summary.push("nonsignaling: yes".into());
                (true, Witness::Nonsignaling)
            }
            Some(w) => {
                summary.push(format!("nonsignaling: no ({w})"));
                (false, Witness::Signaling { description: w.to_string() })
            }
        },
        Analysis::Local => match is_local_with(need_box()?, &opts)? {
            LocalityVerdict::Local(model) => {
                summary.push(format!("local: yes ({} deterministic strategies)", model.len()));
                (true, Witness::local_model(&model))
            }
            LocalityVerdict::Nonlocal(cert) => {
                summary.push(format!("local: no (certificate violation {})", cert.violation));
                (false, Witness::certificate(&cert))
            }
        },
        Analysis::Secrecy => match secrecy_content_with(need_box()?, &opts)? {
            SecrecyVerdict::NoSecrecy(model) => {
                summary.push(format!("secrecy: no (Eve holds a {}-outcome local model)", model.len()));
                (false, Witness::local_model(&model))
            }
            SecrecyVerdict::Secrecy(cert) => {
                summary.push(format!("secrecy: yes (nonlocal, certificate violation {})", cert.violation));
                (true, Witness::certificate(&cert))
            }
        },
        Analysis::Chsh | Analysis::Cglmp => {
            let b = need_box()?;
            let f = if which == Analysis::Chsh {
                chsh_functional()
            } else {
                let d = args.d.unwrap_or(b.scenario().outputs()[0]);
                params.insert("d".into(), d.to_string());
                cglmp(d)?
            };
            let value = f.evaluate(b)?;
            summary.push(format!("{}: {value}", which.name()));
            let holds = value <= Rational::from_integer(0.into());
            summary.push(format!("violated: {}", if holds { "no" } else { "yes" }));
            (holds, Witness::Value { functional: FunctionalBlock::from_functional(&f), value: format_rational(&value) })
        }
        Analysis::Shareable => {
            let party = parse_party(&args.party)?;
            params.insert("m".into(), args.m.to_string());
            params.insert("party".into(), party_name(party).into());
            let problem = ExtensionProblem::new(need_box()?.clone(), party, args.m)?;
            let name = party_name(party).to_string();
            match is_m_shareable(&problem)? {
                ExtensionWitness::Extension(ext) => {
                    summary.push(format!("{}-shareable wrt {name}: yes", args.m));
                    (true, Witness::Extension { party: name, copies: args.m, extension: BoxBlock::from_box(&ext) })
                }
                ExtensionWitness::Infeasible(farkas) => {
                    summary.push(format!("{}-shareable wrt {name}: no (Farkas certificate)", args.m));
                    let farkas = MultipliersBlock::from_multipliers(&farkas.0);
                    (false, Witness::ExtensionInfeasible { party: name, copies: args.m, farkas })
                }
            }
        }
        Analysis::Incompat => {
            let pair = observable_pair(args)?;
            let result = incompatibility(need_box()?, &pair)?;
            summary.push(format!("incompatibility: {}", result.eta));
            let holds = result.eta == Rational::from_integer(0.into());
            summary.push(format!("compatible: {}", if holds { "yes" } else { "no" }));
            (holds, Witness::decomposition(pair, &result))
        }
        Analysis::Entropy => {
            let pair = observable_pair(args)?;
            let b = need_box()?;
            let report = entropy_bound_check(b, &pair)?;
            let result = incompatibility(b, &pair)?;
            summary.push(format!("incompatibility: {}", report.inc));
            summary.push(format!("H(b0) = {:.12}, H(b1) = {:.12}, h(inc/2) = {:.12}", report.h0, report.h1, report.bound));
            summary.push(format!("bounds hold: {}", if report.holds() { "yes" } else { "no" }));
            (report.holds(), Witness::decomposition(pair, &result))
        }
        Analysis::Depolarize => {
            let out = depolarize(need_box()?)?;
            summary.push(format!("depolarized CHSH: {}", boxlab::bell::chsh(&out)?));
            (true, Witness::Transformed { epsilon: None, output: BoxBlock::from_box(&out) })
        }
        Analysis::Shrink => {
            let eps = rational_arg("epsilon", args.epsilon.as_deref())?;
            params.insert("epsilon".into(), format_rational(&eps));
            let out = shrink(need_box()?, &eps)?;
            summary.push(format!("shrunk CHSH: {}", boxlab::bell::chsh(&out)?));
            (true, Witness::Transformed { epsilon: Some(format_rational(&eps)), output: BoxBlock::from_box(&out) })
        }
        Analysis::MonogamyScan => {
            let betas = rational_list("beta-grid", &args.beta_grid)?;
            params.insert("beta-grid".into(), args.beta_grid.clone());
            let rows = monogamy_scan(&betas)?;
            let cells: Vec<[String; 2]> =
                rows.iter().map(|(b, v)| [format_rational(b), format_rational(v)]).collect();
            let width = cells.iter().map(|c| c[0].len()).max().unwrap_or(0).max("chsh(AB) >=".len());
            summary.push(format!("{:>width$}  max chsh(AC)", "chsh(AB) >="));
            for [beta, value] in &cells {
                summary.push(format!("{beta:>width$}  {value}"));
            }
            (true, Witness::Scan { rows: cells })
        }
    };
    Ok(Report {
        command: which.name().into(),
        source: None,
        params,
        holds,
        summary,
        witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let cap = strategy_cap()?;
    let loaded = match &args.file {
        Some(path) => {
            let bytes = read(path)?;
            let text = String::from_utf8_lossy(&bytes);
            let file = BoxFile::parse(&text).map_err(|source| CliError::Parse { path: path.clone(), source })?;
            let stored = std::fs::canonicalize(path).unwrap_or_else(|_| path.clone());
            Some((file, Source { path: stored, sha256: sha256_hex(&bytes) }))
        }
        None => None,
    };
    let mut report = analyze(args.which, loaded.as_ref().map(|(f, _)| &f.correlation), args, cap)?;
    report.source = loaded.map(|(_, s)| s);

    if let Some(path) = &args.output {
        match &report.witness {
            Witness::Transformed { output, .. } => {
                let mut file = BoxFile::new(output.to_box()?);
                file.name = Some(report.command.clone());
                write(path, &file.to_text())?;
            }
            _ => return Err(CliError::Usage(format!("-o applies to depolarize and shrink, not {}", report.command))),
        }
    }
    let text = report.to_text();
    if let Some(path) = &args.report {
        write(path, &text)?;
    }
    let stdout = if args.json {
        text
    } else {
        let mut out = String::new();
        for line in &report.summary {
            writeln!(out, "{line}").unwrap();
        }
        out
    };
    Ok(Outcome { code: if report.holds { 0 } else { 1 }, stdout })
}

/// Loads the report's box (checking its digest) and re-checks the witness.
pub fn verify_report(report: &Report, box_override: Option<&Path>) -> Result<bool, CliError> {
    let b = match &report.source {
        Some(source) => {
            let path = box_override.unwrap_or(&source.path);
            let bytes = read(path)?;
            let found = sha256_hex(&bytes);
            if found != source.sha256 {
                return Err(CliError::StaleDigest { path: path.to_path_buf(), expected: source.sha256.clone(), found });
            }
            let text = String::from_utf8_lossy(&bytes);
            Some(BoxFile::parse(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })?.correlation)
        }
        None => None,
    };
    report.verify(b.as_ref(), strategy_cap()?)
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let text = String::from_utf8_lossy(&read(&args.report)?).into_owned();
    let report = Report::parse(&text)?;
    let ok = verify_report(&report, args.box_path.as_deref())?;
    let stdout = format!("{}: {}\n", report.command, if ok { "verified" } else { "FAILED" });
    Ok(Outcome { code: if ok { 0 } else { 1 }, stdout })
}
