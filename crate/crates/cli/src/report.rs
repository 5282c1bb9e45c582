//! Machine-readable analysis reports: a magic line followed by JSON.
//! Every witness is stored in exact `p/q` form and re-checked by
//! [`Report::verify`] against the box file it names.

use crate::error::CliError;
use boxlab::bell::chsh_functional;
use boxlab::incompat::{binary_entropy, output_entropy, IncompatibilityResult, ObservablePair, ENTROPY_SLACK};
use boxlab::isotropic::{depolarize, shrink};
use boxlab::locality::{eve_extension, product_given_eve, Certificate};
use boxlab::lp::{verify_certificate, FarkasCertificate, LpOutcome, Multipliers};
use boxlab::rational::{format_rational, parse_rational, to_f64};
use boxlab::shareability::{extension_lp, monogamy_scan, validate_extension, ExtensionProblem, SharedParty};
use boxlab::{BellFunctional, CorrelationBox, DeterministicStrategy, LocalModel, Rational, Scenario};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const REPORT_MAGIC: &str = "BOXLAB-REPORT 1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn fmt_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn parse_all(values: &[String]) -> Result<Vec<Rational>, CliError> {
    values.iter().map(|v| parse_one(v)).collect()
}

fn parse_one(value: &str) -> Result<Rational, CliError> {
    parse_rational(value).map_err(|e| CliError::Report(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxBlock {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub table: Vec<String>,
}

impl BoxBlock {
    pub fn from_box(b: &CorrelationBox) -> Self {
        let s = b.scenario();
        BoxBlock { inputs: s.inputs().to_vec(), outputs: s.outputs().to_vec(), table: fmt_all(b.table()) }
    }

    pub fn to_box(&self) -> Result<CorrelationBox, CliError> {
        let s = Scenario::new(self.inputs.clone(), self.outputs.clone())?;
        Ok(CorrelationBox::new(s, parse_all(&self.table)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalBlock {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub coefficients: Vec<String>,
    pub offset: String,
}

impl FunctionalBlock {
    pub fn from_functional(f: &BellFunctional) -> Self {
        let s = f.scenario();
        FunctionalBlock {
            inputs: s.inputs().to_vec(),
            outputs: s.outputs().to_vec(),
            coefficients: fmt_all(f.coefficients()),
            offset: format_rational(f.offset()),
        }
    }

    pub fn to_functional(&self) -> Result<BellFunctional, CliError> {
        let s = Scenario::new(self.inputs.clone(), self.outputs.clone())?;
        Ok(BellFunctional::new(s, parse_all(&self.coefficients)?, parse_one(&self.offset)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipliersBlock {
    pub eq: Vec<String>,
    pub ineq: Vec<String>,
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

impl MultipliersBlock {
    pub fn from_multipliers(m: &Multipliers) -> Self {
        MultipliersBlock { eq: fmt_all(&m.eq), ineq: fmt_all(&m.ineq), lower: fmt_all(&m.lower), upper: fmt_all(&m.upper) }
    }

    pub fn to_multipliers(&self) -> Result<Multipliers, CliError> {
        Ok(Multipliers {
            eq: parse_all(&self.eq)?,
            ineq: parse_all(&self.ineq)?,
            lower: parse_all(&self.lower)?,
            upper: parse_all(&self.upper)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBlock {
    pub party: usize,
    pub y0: usize,
    pub y1: usize,
}

impl From<ObservablePair> for PairBlock {
    fn from(p: ObservablePair) -> Self {
        PairBlock { party: p.party, y0: p.y0, y1: p.y1 }
    }
}

impl From<PairBlock> for ObservablePair {
    fn from(p: PairBlock) -> Self {
        ObservablePair::new(p.party, p.y0, p.y1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Nonsignaling,
    Signaling {
        description: String,
    },
    LocalModel {
        strategies: Vec<Vec<Vec<usize>>>,
        weights: Vec<String>,
    },
    BellCertificate {
        functional: FunctionalBlock,
        violation: String,
    },
    Value {
        functional: FunctionalBlock,
        value: String,
    },
    Extension {
        party: String,
        copies: usize,
        extension: BoxBlock,
    },
    ExtensionInfeasible {
        party: String,
        copies: usize,
        farkas: MultipliersBlock,
    },
    Decomposition {
        pair: PairBlock,
        eta: String,
        incompatible_part: Vec<String>,
        compatible_joint: Vec<String>,
    },
    Transformed {
        epsilon: Option<String>,
        output: BoxBlock,
    },
    Scan {
        rows: Vec<[String; 2]>,
    },
}

impl Witness {
    pub fn local_model(model: &LocalModel) -> Self {
        Witness::LocalModel {
            strategies: model.strategies().iter().map(|d| d.responses.clone()).collect(),
            weights: fmt_all(model.weights()),
        }
    }

    pub fn certificate(cert: &Certificate) -> Self {
        Witness::BellCertificate {
            functional: FunctionalBlock::from_functional(&cert.functional),
            violation: format_rational(&cert.violation),
        }
    }

    pub fn decomposition(pair: ObservablePair, result: &IncompatibilityResult) -> Self {
        Witness::Decomposition {
            pair: pair.into(),
            eta: format_rational(&result.eta),
            incompatible_part: fmt_all(&result.incompatible_part),
            compatible_joint: fmt_all(&result.compatible_joint),
        }
    }
}

pub fn party_name(p: SharedParty) -> &'static str {
    match p {
        SharedParty::A => "A",
        SharedParty::B => "B",
    }
}

pub fn parse_party(name: &str) -> Result<SharedParty, CliError> {
    match name {
        "A" | "a" | "0" => Ok(SharedParty::A),
        "B" | "b" | "1" => Ok(SharedParty::B),
        other => Err(CliError::Usage(format!("party must be A or B, got {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Analysis name, e.g. `local` or `shareable`.
    pub command: String,
    pub source: Option<Source>,
    pub params: BTreeMap<String, String>,
    /// Whether the analysed property holds; decides the exit code.
    pub holds: bool,
    pub summary: Vec<String>,
    pub witness: Witness,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn to_text(&self) -> String {
        let json = serde_json::to_string_pretty(self).expect("reports serialize");
        format!("{REPORT_MAGIC}\n{json}\n")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (magic, body) = text.split_once('\n').unwrap_or((text, ""));
        if magic.trim() != REPORT_MAGIC {
            return Err(CliError::Report(format!("expected {REPORT_MAGIC:?}, found {:?}", magic.trim())));
        }
        serde_json::from_str(body).map_err(|e| CliError::Report(e.to_string()))
    }

    /// Re-checks the witness against `b` (the box the report was made from,
    /// already digest-checked by the caller). Only the monogamy scan, which
    /// carries no box, is re-solved.
    pub fn verify(&self, b: Option<&CorrelationBox>, cap: u128) -> Result<bool, CliError> {
        let need_box = || b.ok_or_else(|| CliError::Report(format!("{} report needs its box", self.command)));
        let ok = match (self.command.as_str(), &self.witness) {
            ("ns", Witness::Nonsignaling) => self.holds && need_box()?.is_nonsignaling(),
            ("ns", Witness::Signaling { .. }) => !self.holds && !need_box()?.is_nonsignaling(),
            ("local", Witness::LocalModel { strategies, weights }) => {
                self.holds && model_from(strategies, weights)?.is_some_and(|m| m.reproduces(need_box().unwrap()))
            }
            ("local", Witness::BellCertificate { functional, violation }) => {
                !self.holds && certificate_holds(need_box()?, functional, violation, cap)?
            }
            ("secrecy", Witness::LocalModel { strategies, weights }) => {
                let b = need_box()?;
                match model_from(strategies, weights)? {
                    Some(model) if !self.holds && model.reproduces(b) => {
                        let ext = eve_extension(b, &model)?;
                        ext.is_nonsignaling() && product_given_eve(&ext)?
                    }
                    _ => false,
                }
            }
            ("secrecy", Witness::BellCertificate { functional, violation }) => {
                self.holds && certificate_holds(need_box()?, functional, violation, cap)?
            }
            ("chsh" | "cglmp", Witness::Value { functional, value }) => {
                let f = functional.to_functional()?;
                let value = parse_one(value)?;
                let identity = self.command != "chsh" || f == chsh_functional();
                let (local, _) = f.local_bound(cap)?;
                identity
                    && local <= Rational::from_integer(0.into())
                    && f.evaluate(need_box()?)? == value
                    && self.holds == (value <= Rational::from_integer(0.into()))
            }
            ("shareable", Witness::Extension { party, copies, extension }) => {
                let ext = extension.to_box()?;
                self.holds && validate_extension(&ext, need_box()?, parse_party(party)?, *copies).is_ok()
            }
            ("shareable", Witness::ExtensionInfeasible { party, copies, farkas }) => {
                let problem = ExtensionProblem::new(need_box()?.clone(), parse_party(party)?, *copies)?;
                let lp = extension_lp(&problem)?;
                let outcome = LpOutcome::Infeasible { farkas: FarkasCertificate(farkas.to_multipliers()?) };
                !self.holds && verify_certificate(&lp, &outcome)
            }
            ("incompat" | "entropy", Witness::Decomposition { pair, eta, incompatible_part, compatible_joint }) => {
                let b = need_box()?;
                let pair: ObservablePair = (*pair).into();
                let result = IncompatibilityResult {
                    eta: parse_one(eta)?,
                    restricted: pair.restricted(b)?,
                    incompatible_part: parse_all(incompatible_part)?,
                    compatible_joint: parse_all(compatible_joint)?,
                };
                let expected = if self.command == "incompat" {
                    result.eta == Rational::from_integer(0.into())
                } else {
                    let bound = binary_entropy(to_f64(&result.eta) / 2.0);
                    output_entropy(b, pair.party, pair.y0)? + ENTROPY_SLACK >= bound
                        && output_entropy(b, pair.party, pair.y1)? + ENTROPY_SLACK >= bound
                };
                result.verify() && self.holds == expected
            }
            ("depolarize", Witness::Transformed { epsilon: None, output }) => {
                self.holds && depolarize(need_box()?)? == output.to_box()?
            }
            ("shrink", Witness::Transformed { epsilon: Some(eps), output }) => {
                let eps = parse_one(eps)?;
                self.holds && shrink(need_box()?, &eps)? == output.to_box()?
            }
            ("monogamy-scan", Witness::Scan { rows }) => {
                let betas: Vec<Rational> = rows.iter().map(|r| parse_one(&r[0])).collect::<Result<_, _>>()?;
                let recomputed = monogamy_scan(&betas)?;
                self.holds
                    && recomputed.len() == rows.len()
                    && recomputed.iter().zip(rows).all(|((_, v), r)| format_rational(v) == r[1])
            }
            _ => return Err(CliError::Report(format!("witness does not fit a {} report", self.command))),
        };
        Ok(ok)
    }
}

fn model_from(strategies: &[Vec<Vec<usize>>], weights: &[String]) -> Result<Option<LocalModel>, CliError> {
    let strategies = strategies.iter().map(|r| DeterministicStrategy { responses: r.clone() }).collect();
    Ok(LocalModel::new(strategies, parse_all(weights)?).ok())
}

fn certificate_holds(b: &CorrelationBox, functional: &FunctionalBlock, violation: &str, cap: u128) -> Result<bool, CliError> {
    let cert = Certificate { functional: functional.to_functional()?, violation: parse_one(violation)? };
    Ok(cert.verify(b, cap)?)
}
