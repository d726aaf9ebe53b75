//! CPLEX-style LP text format and a plain `name value` solution format.
//!
//! Only the subset needed for continuous models is supported: an objective
//! section, `Subject To`, `Bounds` and `End`. The writer lists every variable
//! in the objective (zero coefficients included) so reading a file back
//! preserves variable order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::model::{LinearProgram, ObjectiveSense, Sense, VarId};
use crate::solution::{LpSolution, Status};
use crate::LpError;

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || "_!\"#$%&()/,;?@`'{}|~".contains(c) => {}
        _ => return false,
    }
    s.chars().all(|c| c.is_ascii_alphanumeric() || "_!\"#$%&()/,.;?@`'{}|~".contains(c))
        && !matches!(s.to_ascii_lowercase().as_str(), "free" | "inf" | "infinity" | "st" | "end" | "bounds")
}

/// Names as written to file: the model's own when usable and unique.
fn var_names(lp: &LinearProgram) -> Vec<String> {
    let mut seen = HashMap::new();
    let mut ok = true;
    for v in &lp.variables {
        if !valid_name(&v.name) || seen.insert(v.name.as_str(), ()).is_some() {
            ok = false;
            break;
        }
    }
    if ok {
        lp.variables.iter().map(|v| v.name.clone()).collect()
    } else {
        (0..lp.num_vars()).map(|j| format!("v{j}")).collect()
    }
}

fn row_names(lp: &LinearProgram) -> Vec<String> {
    let mut seen = HashMap::new();
    let ok = lp.constraints.iter().all(|c| valid_name(&c.name) && seen.insert(c.name.as_str(), ()).is_none());
    if ok {
        lp.constraints.iter().map(|c| c.name.clone()).collect()
    } else {
        (0..lp.num_constraints()).map(|i| format!("r{i}")).collect()
    }
}

fn push_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    let mut first = true;
    let mut on_line = 0;
    for (a, name) in terms {
        if on_line == 8 {
            out.push_str("\n   ");
            on_line = 0;
        }
        if a < 0.0 || (a == 0.0 && a.is_sign_negative()) {
            let _ = write!(out, " - {} {}", -a, name);
        } else if first {
            let _ = write!(out, " {} {}", a, name);
        } else {
            let _ = write!(out, " + {} {}", a, name);
        }
        first = false;
        on_line += 1;
    }
    if first {
        out.push_str(" 0");
    }
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

pub fn model_to_string(lp: &LinearProgram) -> String {
    let names = var_names(lp);
    let rows = row_names(lp);
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", lp.name);
    out.push_str(match lp.sense {
        ObjectiveSense::Minimize => "Minimize\n",
        ObjectiveSense::Maximize => "Maximize\n",
    });
    if lp.num_vars() > 0 {
        out.push_str(" obj:");
        push_terms(&mut out, lp.variables.iter().zip(&names).map(|(v, n)| (v.objective, n.clone())));
        out.push('\n');
    }
    out.push_str("Subject To\n");
    for (c, rn) in lp.constraints.iter().zip(&rows) {
        let _ = write!(out, " {rn}:");
        push_terms(&mut out, c.coeffs.iter().map(|&(v, a)| (a, names[v.0].clone())));
        let _ = writeln!(out, " {} {}", c.sense, fmt_num(c.rhs));
    }
    out.push_str("Bounds\n");
    for (v, n) in lp.variables.iter().zip(&names) {
        let (l, u) = (v.lower, v.upper);
        if l == 0.0 && u == f64::INFINITY {
            continue;
        }
        if l == u {
            let _ = writeln!(out, " {n} = {}", fmt_num(l));
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            let _ = writeln!(out, " {n} free");
        } else if u == f64::INFINITY {
            let _ = writeln!(out, " {n} >= {}", fmt_num(l));
        } else {
            let _ = writeln!(out, " {} <= {n} <= {}", fmt_num(l), fmt_num(u));
        }
    }
    out.push_str("End\n");
    out
}

pub fn write_model(lp: &LinearProgram, path: impl AsRef<Path>) -> Result<(), LpError> {
    fs::write(path, model_to_string(lp))?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    End,
}

fn parse_number(tok: &str) -> Option<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().ok(),
    }
}

fn parse_sense(tok: &str) -> Option<Sense> {
    match tok {
        "<=" | "<" | "=<" => Some(Sense::Le),
        ">=" | ">" | "=>" => Some(Sense::Ge),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

struct Reader {
    lp: LinearProgram,
    index: HashMap<String, VarId>,
}

impl Reader {
    fn var(&mut self, name: &str) -> VarId {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.lp.add_var(name, 0.0, f64::INFINITY, 0.0);
        self.index.insert(name.to_string(), v);
        v
    }

    /// Parses `[+|-] [coef] name` terms. Returns the terms and the number of
    /// tokens consumed; stops at a sense operator.
    fn terms(&mut self, toks: &[(usize, String)]) -> Result<(Vec<(VarId, f64)>, usize), LpError> {
        let mut out = Vec::new();
        let mut i = 0;
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        while i < toks.len() {
            let (line, t) = (&toks[i].0, toks[i].1.as_str());
            if parse_sense(t).is_some() {
                break;
            }
            match t {
                "+" => sign = 1.0,
                "-" => sign = -sign,
                _ => {
                    if let Some(v) = t.parse::<f64>().ok().filter(|_| coef.is_none()) {
                        coef = Some(v);
                    } else if valid_name(t) {
                        let var = self.var(t);
                        out.push((var, sign * coef.unwrap_or(1.0)));
                        sign = 1.0;
                        coef = None;
                    } else {
                        return Err(LpError::Parse { line: *line, msg: format!("unexpected token '{t}'") });
                    }
                }
            }
            i += 1;
        }
        if let Some(c) = coef {
            // A bare constant (e.g. an empty objective written as `0`).
            if c != 0.0 {
                let line = toks.last().map(|t| t.0).unwrap_or(0);
                return Err(LpError::Parse { line, msg: "constant terms are not supported".into() });
            }
        }
        Ok((out, i))
    }
}

pub fn parse_model(text: &str) -> Result<LinearProgram, LpError> {
    let mut rd = Reader { lp: LinearProgram::new(ObjectiveSense::Minimize), index: HashMap::new() };
    let mut section = Section::None;
    let mut objective_toks: Vec<(usize, String)> = Vec::new();
    let mut constraint_toks: Vec<(usize, String)> = Vec::new();
    let mut bound_lines: Vec<(usize, Vec<String>)> = Vec::new();
    let mut name_seen = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('\\') {
            if !name_seen && section == Section::None {
                let n = rest.trim();
                if !n.is_empty() {
                    rd.lp.name = n.to_string();
                }
                name_seen = true;
            }
            continue;
        }
        let lower = content.to_ascii_lowercase();
        match lower.as_str() {
            "minimize" | "minimise" | "min" => {
                rd.lp.sense = ObjectiveSense::Minimize;
                section = Section::Objective;
                continue;
            }
            "maximize" | "maximise" | "max" => {
                rd.lp.sense = ObjectiveSense::Maximize;
                section = Section::Objective;
                continue;
            }
            "subject to" | "such that" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "end" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        // Split "a:" and operators glued to numbers is not needed for our
        // own output, but tolerate "name:term".
        let toks: Vec<String> = content
            .replace(':', ": ")
            .split_whitespace()
            .map(str::to_string)
            .collect();
        match section {
            Section::Objective => objective_toks.extend(toks.into_iter().map(|t| (line, t))),
            Section::Constraints => constraint_toks.extend(toks.into_iter().map(|t| (line, t))),
            Section::Bounds => bound_lines.push((line, toks)),
            Section::None => return Err(LpError::Parse { line, msg: "content before objective section".into() }),
            Section::End => return Err(LpError::Parse { line, msg: "content after End".into() }),
        }
    }
    if section != Section::End {
        return Err(LpError::Parse { line: text.lines().count(), msg: "missing End".into() });
    }

    // Objective
    let mut toks = objective_toks.as_slice();
    if let Some((_, t)) = toks.first() {
        if t.ends_with(':') {
            toks = &toks[1..];
        }
    }
    let (obj, used) = rd.terms(toks)?;
    if used != toks.len() {
        return Err(LpError::Parse { line: toks[used].0, msg: "operator in objective".into() });
    }
    for (v, a) in obj {
        rd.lp.variables[v.0].objective += a;
    }

    // Constraints
    let mut i = 0;
    let ctoks = constraint_toks;
    while i < ctoks.len() {
        let mut name = format!("r{}", rd.lp.num_constraints());
        if ctoks[i].1.ends_with(':') {
            name = ctoks[i].1.trim_end_matches(':').to_string();
            i += 1;
        }
        let (coeffs, used) = rd.terms(&ctoks[i..])?;
        i += used;
        let line = ctoks.get(i.min(ctoks.len() - 1)).map(|t| t.0).unwrap_or(0);
        let sense = ctoks
            .get(i)
            .and_then(|t| parse_sense(&t.1))
            .ok_or_else(|| LpError::Parse { line, msg: format!("constraint {name} lacks a sense") })?;
        i += 1;
        let mut rhs_sign = 1.0;
        if ctoks.get(i).map(|t| t.1.as_str()) == Some("-") {
            rhs_sign = -1.0;
            i += 1;
        } else if ctoks.get(i).map(|t| t.1.as_str()) == Some("+") {
            i += 1;
        }
        let rhs = ctoks
            .get(i)
            .and_then(|t| parse_number(&t.1))
            .ok_or_else(|| LpError::Parse { line, msg: format!("constraint {name} lacks a right-hand side") })?;
        i += 1;
        rd.lp.add_constraint(name, coeffs, sense, rhs_sign * rhs);
    }

    // Bounds
    for (line, toks) in bound_lines {
        let bad = || LpError::Parse { line, msg: format!("malformed bound '{}'", toks.join(" ")) };
        let t: Vec<&str> = toks.iter().map(String::as_str).collect();
        match t.as_slice() {
            [n, f] if f.eq_ignore_ascii_case("free") => {
                let v = rd.var(n);
                rd.lp.variables[v.0].lower = f64::NEG_INFINITY;
                rd.lp.variables[v.0].upper = f64::INFINITY;
            }
            [l, "<=", n, "<=", u] => {
                let (l, u) = (parse_number(l).ok_or_else(bad)?, parse_number(u).ok_or_else(bad)?);
                let v = rd.var(n);
                rd.lp.variables[v.0].lower = l;
                rd.lp.variables[v.0].upper = u;
            }
            [n, op, val] => {
                let val = parse_number(val).ok_or_else(bad)?;
                let v = rd.var(n);
                let var = &mut rd.lp.variables[v.0];
                match parse_sense(op).ok_or_else(bad)? {
                    Sense::Le => var.upper = val,
                    Sense::Ge => var.lower = val,
                    Sense::Eq => {
                        var.lower = val;
                        var.upper = val;
                    }
                }
            }
            _ => return Err(bad()),
        }
    }
    rd.lp.validate()?;
    Ok(rd.lp)
}

pub fn read_model(path: impl AsRef<Path>) -> Result<LinearProgram, LpError> {
    parse_model(&fs::read_to_string(path)?)
}

/// Writes `status <Status>` followed by one `name value` line per variable.
pub fn write_solution(lp: &LinearProgram, sol: &LpSolution, path: impl AsRef<Path>) -> Result<(), LpError> {
    let names = var_names(lp);
    let mut out = format!("status {}\n", sol.status);
    for (n, v) in names.iter().zip(&sol.primal) {
        let _ = writeln!(out, "{n} {v}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a solution file produced by [`write_solution`] or an external
/// solver script. Missing variables default to zero; duals are left empty.
pub fn read_solution(path: impl AsRef<Path>, lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let text = fs::read_to_string(path)?;
    let names = var_names(lp);
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(j, n)| (n.as_str(), j)).collect();
    let mut status = None;
    let mut primal = vec![0.0; lp.num_vars()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["status", s] => {
                status = Some(s.parse::<Status>().map_err(|msg| LpError::Parse { line, msg })?);
            }
            [name, value] => {
                let j = *index
                    .get(name)
                    .ok_or_else(|| LpError::Parse { line, msg: format!("unknown variable '{name}'") })?;
                primal[j] = value
                    .parse()
                    .map_err(|_| LpError::Parse { line, msg: format!("bad value '{value}'") })?;
            }
            _ => return Err(LpError::Parse { line, msg: format!("unexpected line '{raw}'") }),
        }
    }
    let status = status.ok_or(LpError::Parse { line: 1, msg: "missing status line".into() })?;
    Ok(LpSolution {
        status,
        objective: lp.objective_value(&primal),
        primal,
        dual: Vec::new(),
        reduced_costs: Vec::new(),
        iterations: 0,
    })
}
