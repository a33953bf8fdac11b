//! CPLEX LP text export and a parser for the subset it emits.
//!
//! ```text
//! \ comment
//! Minimize
//!  obj: 3 x_0_0_0 + 5 x_0_1_0
//! Subject To
//!  assign_0: x_0_0_0 = 1
//!  cap_0_0: 1 x_0_0_0 + 2 x_0_1_0 <= 1
//! End
//! ```
//!
//! Variables are nonnegative (the LP default), so no `Bounds` section is written. Numbers use
//! the shortest decimal form that reads back to the same `f64`. Long expressions wrap onto
//! continuation lines that start with a space.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{row_name, var_name, LpModel, Sense};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    for (k, (coef, name)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coef < 0.0 { "-" } else { "+" };
        if k == 0 {
            if coef < 0.0 {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        let _ = write!(out, " {} {}", coef.abs(), name);
    }
}

/// Writes `model` as CPLEX LP text. Output is a pure function of the model.
pub fn export_model(model: &LpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ crowdsched assignment LP: {} variables, {} rows, {} workers, {} tasks",
        model.num_vars(),
        model.num_rows(),
        model.m(),
        model.n()
    );
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model.cost.iter().enumerate().map(|(v, &c)| (c, var_name(&model.vars[v]))));
    out.push_str("\nSubject To\n");

    let mut row_terms: Vec<Vec<(f64, String)>> = (0..model.num_rows()).map(|_| Vec::new()).collect();
    for v in 0..model.num_vars() {
        for (r, a) in model.column(v) {
            row_terms[r].push((a, var_name(&model.vars[v])));
        }
    }
    for (r, terms) in row_terms.into_iter().enumerate() {
        let _ = write!(out, " {}:", row_name(&model.rows[r]));
        if terms.is_empty() {
            // Keeps infeasible empty rows representable.
            out.push_str(" 0 x_empty");
        }
        write_terms(&mut out, terms.into_iter());
        let op = match model.sense[r] {
            Sense::Eq => "=",
            Sense::Le => "<=",
        };
        let _ = writeln!(out, " {op} {}", model.rhs[r]);
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub name: String,
    /// `(variable index, coefficient)` in order of appearance.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization LP over nonnegative variables, as read from LP text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedModel {
    pub vars: Vec<String>,
    pub objective: Vec<f64>,
    pub rows: Vec<ParsedRow>,
}

impl ParsedModel {
    fn var(&mut self, name: &str) -> usize {
        match self.vars.iter().position(|v| v == name) {
            Some(k) => k,
            None => {
                self.vars.push(name.to_string());
                self.objective.push(0.0);
                self.vars.len() - 1
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Done,
}

fn parse_err(line: usize, msg: impl core::fmt::Display) -> Error {
    Error::InvalidArgument(format!("LP text line {line}: {msg}"))
}

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| parse_err(line, format_args!("expected a number, found `{tok}`")))
}

/// Reads LP text in the dialect written by [`export_model`] (minimization, `=`/`<=`/`>=`
/// constraints, implicit nonnegative bounds).
pub fn parse_model(text: &str) -> Result<ParsedModel> {
    let mut model = ParsedModel::default();
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    let mut section = Section::Preamble;
    let mut objective_tokens: Vec<(usize, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('\\').next().unwrap_or("");
        let lower = body.trim().to_ascii_lowercase();
        match lower.as_str() {
            "" => continue,
            "minimize" | "minimise" | "min" => {
                section = Section::Objective;
                continue;
            }
            "maximize" | "maximise" | "max" => return Err(parse_err(line, "only minimization is supported")),
            "subject to" | "such that" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "end" => {
                section = Section::Done;
                continue;
            }
            "bounds" | "general" | "generals" | "binary" | "binaries" => {
                return Err(parse_err(line, format_args!("unsupported section `{}`", body.trim())));
            }
            _ => {}
        }
        let toks = body.split_whitespace().map(|t| (line, t));
        match section {
            Section::Preamble => return Err(parse_err(line, "content before the objective section")),
            Section::Objective => objective_tokens.extend(toks),
            Section::Constraints => tokens.extend(toks),
            Section::Done => return Err(parse_err(line, "content after End")),
        }
    }
    if section != Section::Done {
        return Err(parse_err(text.lines().count(), "missing End"));
    }

    let mut obj = objective_tokens.as_slice();
    if let Some(&(_, t)) = obj.first() {
        if t.ends_with(':') {
            obj = &obj[1..];
        }
    }
    let (terms, rest) = parse_terms(obj)?;
    if let Some(&(line, t)) = rest.first() {
        return Err(parse_err(line, format_args!("unexpected `{t}` in objective")));
    }
    for (name, c) in terms {
        let v = model.var(name);
        model.objective[v] += c;
    }

    let mut rest = tokens.as_slice();
    while let Some(&(line, label)) = rest.first() {
        let name = label
            .strip_suffix(':')
            .ok_or_else(|| parse_err(line, format_args!("expected a constraint label, found `{label}`")))?;
        let (terms, after) = parse_terms(&rest[1..])?;
        let (&(line, op), after) =
            after.split_first().ok_or_else(|| parse_err(line, "constraint without a sense"))?;
        let sense = match op {
            "=" => Sense::Eq,
            "<=" | "=<" | "<" => Sense::Le,
            ">=" | "=>" | ">" => {
                return Err(parse_err(line, "`>=` rows are not produced by the exporter"));
            }
            other => return Err(parse_err(line, format_args!("expected a sense, found `{other}`"))),
        };
        let (&(line, rhs_tok), after) = after.split_first().ok_or_else(|| parse_err(line, "missing right-hand side"))?;
        let rhs = parse_number(rhs_tok, line)?;
        let mut coeffs = Vec::with_capacity(terms.len());
        for (var, c) in terms {
            if var == "x_empty" && c == 0.0 {
                continue;
            }
            coeffs.push((model.var(var), c));
        }
        model.rows.push(ParsedRow { name: name.to_string(), coeffs, sense, rhs });
        rest = after;
    }
    Ok(model)
}

type Terms<'a> = Vec<(&'a str, f64)>;

/// Reads `[±] [coef] name` terms until a token that cannot start a term.
fn parse_terms<'a, 'b>(mut toks: &'b [(usize, &'a str)]) -> Result<(Terms<'a>, &'b [(usize, &'a str)])> {
    let mut terms = Vec::new();
    loop {
        let Some(&(line, t)) = toks.first() else { break };
        let mut sign = 1.0;
        let mut k = 0;
        if t == "+" || t == "-" {
            if t == "-" {
                sign = -1.0;
            }
            k = 1;
        } else if matches!(t, "=" | "<=" | ">=" | "=<" | "=>" | "<" | ">") || t.ends_with(':') {
            break;
        }
        let Some(&(line2, tok)) = toks.get(k) else {
            return Err(parse_err(line, "dangling sign"));
        };
        let (coef, name_at) = match tok.parse::<f64>() {
            Ok(c) => (c, k + 1),
            Err(_) => (1.0, k),
        };
        let Some(&(line3, name)) = toks.get(name_at) else {
            return Err(parse_err(line2, "coefficient without a variable"));
        };
        if name.parse::<f64>().is_ok() || name.ends_with(':') || matches!(name, "+" | "-" | "=" | "<=") {
            return Err(parse_err(line3, format_args!("expected a variable name, found `{name}`")));
        }
        terms.push((name, sign * coef));
        toks = &toks[name_at + 1..];
    }
    Ok((terms, toks))
}
