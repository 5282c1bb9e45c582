//! Text box files.
//!
//! ```text
//! BOXLAB-BOX 1
//! name: pr
//! inputs: 2 2
//! outputs: 2 2
//! table:
//! 1/2 0 0 1/2
//! 1/2 0 0 1/2
//! 1/2 0 0 1/2
//! 0 1/2 1/2 0
//! ```
//!
//! The table is flat in canonical order (one line per input tuple when
//! written); entries are `p/q` fractions or exact decimals. `#` starts a
//! comment.

use boxlab::rational::{format_rational, parse_rational};
use boxlab::{CorrelationBox, Rational, Scenario};
use std::fmt::Write as _;

pub const BOX_MAGIC: &str = "BOXLAB-BOX 1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn parse_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxFile {
    pub name: Option<String>,
    pub provenance: Option<String>,
    pub correlation: CorrelationBox,
}

impl BoxFile {
    pub fn new(correlation: CorrelationBox) -> Self {
        BoxFile { name: None, provenance: None, correlation }
    }

    pub fn named(correlation: CorrelationBox, name: &str) -> Self {
        BoxFile { name: Some(name.to_string()), provenance: None, correlation }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, BOX_MAGIC)) => {}
            Some((n, other)) => return Err(parse_err(n, format!("expected {BOX_MAGIC:?}, found {other:?}"))),
            None => return Err(parse_err(1, "empty file")),
        }
        let (mut name, mut provenance, mut inputs, mut outputs) = (None, None, None, None);
        let mut table_line = None;
        for (n, line) in lines.by_ref() {
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| parse_err(n, format!("expected `key: value`, found {line:?}")))?;
            let value = value.trim();
            match key.trim() {
                "name" => name = Some(value.to_string()),
                "provenance" => provenance = Some(value.to_string()),
                "inputs" => inputs = Some(parse_sizes(n, value)?),
                "outputs" => outputs = Some(parse_sizes(n, value)?),
                "table" => {
                    if !value.is_empty() {
                        return Err(parse_err(n, "table entries start on the next line"));
                    }
                    table_line = Some(n);
                    break;
                }
                other => return Err(parse_err(n, format!("unknown field {other:?}"))),
            }
        }
        let table_line = table_line.ok_or_else(|| parse_err(text.lines().count().max(1), "missing `table:`"))?;
        let inputs = inputs.ok_or_else(|| parse_err(table_line, "missing `inputs:` header"))?;
        let outputs = outputs.ok_or_else(|| parse_err(table_line, "missing `outputs:` header"))?;
        let scenario = Scenario::new(inputs, outputs).map_err(|e| parse_err(table_line, e.to_string()))?;

        let mut table: Vec<Rational> = Vec::with_capacity(scenario.table_len());
        let mut last = table_line;
        for (n, line) in lines {
            last = n;
            for token in line.split_whitespace() {
                table.push(parse_rational(token).map_err(|e| parse_err(n, e.to_string()))?);
            }
        }
        let correlation = CorrelationBox::new(scenario, table).map_err(|e| parse_err(last, e.to_string()))?;
        Ok(BoxFile { name, provenance, correlation })
    }

    /// Canonical text: every value in lowest terms, one line per input tuple.
    pub fn to_text(&self) -> String {
        let s = self.correlation.scenario();
        let join = |v: &[usize]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("{BOX_MAGIC}\n");
        if let Some(name) = &self.name {
            writeln!(out, "name: {name}").unwrap();
        }
        if let Some(p) = &self.provenance {
            writeln!(out, "provenance: {p}").unwrap();
        }
        writeln!(out, "inputs: {}", join(s.inputs())).unwrap();
        writeln!(out, "outputs: {}", join(s.outputs())).unwrap();
        out.push_str("table:\n");
        for row in self.correlation.table().chunks(s.num_output_tuples()) {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_sizes(line: usize, value: &str) -> Result<Vec<usize>, ParseError> {
    value
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(line, format!("bad size {t:?}"))))
        .collect()
}
