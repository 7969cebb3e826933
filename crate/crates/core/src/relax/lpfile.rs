//! CPLEX LP text export of the model, and a reader for the subset it writes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::IpModel;
use crate::error::{Error, Result};

fn push_terms(out: &mut String, model: &IpModel, terms: impl Iterator<Item = (usize, f64)>) {
    let mut first = true;
    for (v, c) in terms {
        let sign = if c < 0.0 { "-" } else { "+" };
        if first {
            if c < 0.0 {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        let _ = write!(out, " {} {}", c.abs(), model.var_name(v));
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// The model in LP format: binary variables when `integral`, otherwise
/// `[0, 1]` bounds.
pub fn to_lp(model: &IpModel, integral: bool) -> String {
    let mut out = String::from("\\ reward-penalty selection model\nMaximize\n obj:");
    push_terms(&mut out, model, model.objective.iter().copied().enumerate());
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        push_terms(&mut out, model, row.terms.iter().copied());
        let _ = writeln!(out, " <= {}", row.rhs);
    }
    let names: Vec<String> = (0..model.var_count()).map(|v| model.var_name(v)).collect();
    if integral {
        out.push_str("Binary\n");
        for chunk in names.chunks(10) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    } else {
        out.push_str("Bounds\n");
        for name in &names {
            let _ = writeln!(out, " 0 <= {name} <= 1");
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub op: String,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LpFile {
    pub maximize: bool,
    pub objective: Vec<(String, f64)>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<(String, f64, f64)>,
    pub binaries: Vec<String>,
}

impl LpFile {
    /// Distinct variable names, in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = Vec::new();
        let all = self
            .objective
            .iter()
            .map(|(n, _)| n)
            .chain(self.rows.iter().flat_map(|r| r.terms.iter().map(|(n, _)| n)))
            .chain(self.bounds.iter().map(|(n, _, _)| n))
            .chain(&self.binaries);
        for name in all {
            if !seen.contains(name) {
                seen.push(name.clone());
            }
        }
        seen
    }
}

fn parse_linear(text: &str) -> Result<Vec<(String, f64)>> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coeff: Option<f64> = None;
    for tok in text.split_whitespace() {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(c) = tok.parse::<f64>() {
                    coeff = Some(c);
                } else {
                    terms.push((tok.to_string(), sign * coeff.take().unwrap_or(1.0)));
                    sign = 1.0;
                }
            }
        }
    }
    if let Some(c) = coeff {
        if c != 0.0 || !terms.is_empty() {
            return Err(Error::Parse(format!("dangling coefficient {c} in {text:?}")));
        }
    }
    Ok(terms)
}

#[derive(PartialEq)]
enum Section {
    Head,
    Objective,
    Constraints,
    Bounds,
    Binary,
    Done,
}

pub fn parse_lp(text: &str) -> Result<LpFile> {
    let mut file = LpFile::default();
    let mut section = Section::Head;
    for raw in text.lines() {
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "maximize" | "maximise" | "max" => {
                file.maximize = true;
                section = Section::Objective;
                continue;
            }
            "minimize" | "minimise" | "min" => {
                section = Section::Objective;
                continue;
            }
            "subject to" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "binary" | "binaries" | "bin" => {
                section = Section::Binary;
                continue;
            }
            "end" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                let body = line.split_once(':').map_or(line, |(_, b)| b);
                file.objective.extend(parse_linear(body)?);
            }
            Section::Constraints => {
                let (name, body) = line
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("constraint without a name: {line:?}")))?;
                let (op, at) = ["<=", ">=", "="]
                    .iter()
                    .find_map(|op| body.find(op).map(|at| (*op, at)))
                    .ok_or_else(|| Error::Parse(format!("constraint without a comparison: {line:?}")))?;
                let rhs = body[at + op.len()..]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad right-hand side in {line:?}")))?;
                file.rows.push(LpRow {
                    name: name.trim().to_string(),
                    terms: parse_linear(&body[..at])?,
                    op: op.to_string(),
                    rhs,
                });
            }
            Section::Bounds => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    [lo, "<=", name, "<=", hi] => {
                        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad bound {s:?}")));
                        file.bounds.push((name.to_string(), num(lo)?, num(hi)?));
                    }
                    _ => return Err(Error::Parse(format!("unsupported bound line {line:?}"))),
                }
            }
            Section::Binary => file.binaries.extend(line.split_whitespace().map(str::to_string)),
            Section::Head | Section::Done => return Err(Error::Parse(format!("unexpected line {line:?}"))),
        }
    }
    if section != Section::Done {
        return Err(Error::Parse("missing End".into()));
    }
    Ok(file)
}
