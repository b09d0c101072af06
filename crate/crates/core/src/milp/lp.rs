//! CPLEX LP text format.
//!
//! The writer lists every column in the Bounds section in declaration
//! order (binaries included, as `0 <= y <= 1`) so the reader restores the
//! original column order. Long rows wrap onto indented continuation lines.

use std::fmt::Write as _;
use std::path::Path;

use super::{MilpModel, ObjSense, Sense, VarKind};
use crate::error::{Error, Result};

const WRAP: usize = 200;

/// Shortest exact integer form when possible, otherwise 17 significant
/// digits with trailing mantissa zeros removed.
pub fn format_coef(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    if v == f64::INFINITY {
        return "+inf".into();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".into();
    }
    let s = format!("{v:.16e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    if exp == "0" {
        mant.to_string()
    } else {
        format!("{mant}e{exp}")
    }
}

fn push_terms(out: &mut String, m: &MilpModel, coefs: &[(usize, f64)]) {
    let mut line_len = out.len() - out.rfind('\n').map_or(0, |i| i + 1);
    for (k, &(j, a)) in coefs.iter().enumerate() {
        let name = &m.variables[j].name;
        let mag = a.abs();
        let body = if mag == 1.0 {
            name.clone()
        } else {
            format!("{} {name}", format_coef(mag))
        };
        let term = match (k, a < 0.0) {
            (0, false) => body,
            (0, true) => format!("- {body}"),
            (_, false) => format!(" + {body}"),
            (_, true) => format!(" - {body}"),
        };
        if line_len + term.len() > WRAP {
            out.push_str("\n  ");
            line_len = 2;
        }
        line_len += term.len();
        out.push_str(&term);
    }
}

fn placeholder(m: &MilpModel) -> String {
    m.variables.first().map_or(String::new(), |v| format!("0 {}", v.name))
}

/// Serializes `m`. Deterministic: rows and columns keep model order.
pub fn lp_string(m: &MilpModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "\\ Problem: {}", m.name);
    s.push_str(match m.sense {
        ObjSense::Minimize => "Minimize\n",
        ObjSense::Maximize => "Maximize\n",
    });
    s.push_str(" obj: ");
    if m.objective.is_empty() {
        s.push_str(&placeholder(m));
    } else {
        push_terms(&mut s, m, &m.objective);
    }
    s.push_str("\nSubject To\n");
    for c in &m.constraints {
        let _ = write!(s, " {}: ", c.name);
        if c.coefs.is_empty() {
            s.push_str(&placeholder(m));
        } else {
            push_terms(&mut s, m, &c.coefs);
        }
        let _ = writeln!(s, " {} {}", c.sense.symbol(), format_coef(c.rhs));
    }
    s.push_str("Bounds\n");
    for v in &m.variables {
        let _ = match (v.lb.is_finite(), v.ub.is_finite()) {
            (true, true) => writeln!(s, " {} <= {} <= {}", format_coef(v.lb), v.name, format_coef(v.ub)),
            (true, false) => writeln!(s, " {} >= {}", v.name, format_coef(v.lb)),
            (false, true) => writeln!(s, " -inf <= {} <= {}", v.name, format_coef(v.ub)),
            (false, false) => writeln!(s, " {} free", v.name),
        };
    }
    let bins: Vec<&str> = m
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !bins.is_empty() {
        s.push_str("Binaries\n");
        for b in bins {
            let _ = writeln!(s, " {b}");
        }
    }
    s.push_str("End\n");
    s
}

pub fn write_lp(m: &MilpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, lp_string(m)).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Head,
    Objective,
    Rows,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" | "maximize" | "maximise" | "max" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Rows),
        "bounds" | "bound" => Some(Section::Bounds),
        "binaries" | "binary" | "bin" => Some(Section::Binaries),
        "generals" | "general" | "gen" => Some(Section::Generals),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| Error::parse(line, format!("expected a number, got '{tok}'"))),
    }
}

fn parse_sense(tok: &str) -> Option<Sense> {
    match tok {
        "<=" | "=<" | "<" => Some(Sense::Le),
        ">=" | "=>" | ">" => Some(Sense::Ge),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

struct Reader {
    m: MilpModel,
}

impl Reader {
    fn col(&mut self, name: &str) -> usize {
        match self.m.var(name) {
            Some(j) => j,
            None => self.m.add_continuous(name, 0.0, f64::INFINITY),
        }
    }

    /// Parses `[+|-] [coef] name ...` up to the end of `toks`.
    fn terms(&mut self, toks: &[(usize, &str)]) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let mut sign = 1.0;
            let (line, mut t) = toks[i];
            if t == "+" || t == "-" {
                if t == "-" {
                    sign = -1.0;
                }
                i += 1;
                t = toks.get(i).ok_or_else(|| Error::parse(line, "dangling sign"))?.1;
            }
            let mut coef = 1.0;
            if let Ok(c) = t.parse::<f64>() {
                coef = c;
                i += 1;
                t = toks.get(i).ok_or_else(|| Error::parse(line, "coefficient without a variable"))?.1;
            }
            let j = self.col(t);
            out.push((j, sign * coef));
            i += 1;
        }
        Ok(out)
    }
}

/// Tokens of a section, with their line numbers.
fn tokens(lines: &[(usize, &str)]) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for &(no, l) in lines {
        for t in l.split_whitespace() {
            // Split a glued label such as "c1:x" into "c1:" and "x".
            match t.find(':') {
                Some(p) if p + 1 < t.len() => {
                    out.push((no, t[..=p].to_string()));
                    out.push((no, t[p + 1..].to_string()));
                }
                _ => out.push((no, t.to_string())),
            }
        }
    }
    out
}

/// Parses the LP subset written by [`write_lp`]: named rows, whitespace
/// between tokens, `<=`/`>=`/`=` senses, Bounds, Binaries and Generals.
pub fn parse_lp(text: &str) -> Result<MilpModel> {
    let mut name = String::from("model");
    let mut sense = ObjSense::Minimize;
    let mut sections: Vec<(Section, Vec<(usize, &str)>)> = vec![(Section::Head, Vec::new())];
    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let line = raw.trim();
        if let Some(c) = line.strip_prefix('\\') {
            if let Some(n) = c.trim().strip_prefix("Problem:") {
                name = n.trim().to_string();
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if let Some(s) = section_of(line) {
            if s == Section::Objective && line.to_ascii_lowercase().starts_with("max") {
                sense = ObjSense::Maximize;
            }
            sections.push((s, Vec::new()));
            continue;
        }
        sections.last_mut().expect("head section").1.push((no, line));
    }
    if !sections.iter().any(|(s, _)| *s == Section::End) {
        return Err(Error::parse(text.lines().count(), "missing End"));
    }
    let mut r = Reader { m: MilpModel::new(name) };
    r.m.sense = sense;
    // Bounds first so columns come back in declaration order.
    for (s, lines) in &sections {
        if *s != Section::Bounds {
            continue;
        }
        for &(no, l) in lines {
            let t: Vec<&str> = l.split_whitespace().collect();
            match t.as_slice() {
                [v, "free"] => {
                    let j = r.col(v);
                    r.m.variables[j].lb = f64::NEG_INFINITY;
                    r.m.variables[j].ub = f64::INFINITY;
                }
                [lo, "<=", v, "<=", hi] => {
                    let (lo, hi) = (parse_num(lo, no)?, parse_num(hi, no)?);
                    let j = r.col(v);
                    r.m.variables[j].lb = lo;
                    r.m.variables[j].ub = hi;
                }
                [v, op, x] => {
                    let x = parse_num(x, no)?;
                    let j = r.col(v);
                    match parse_sense(op) {
                        Some(Sense::Ge) => r.m.variables[j].lb = x,
                        Some(Sense::Le) => r.m.variables[j].ub = x,
                        Some(Sense::Eq) => {
                            r.m.variables[j].lb = x;
                            r.m.variables[j].ub = x;
                        }
                        None => return Err(Error::parse(no, format!("bad bound '{l}'"))),
                    }
                }
                _ => return Err(Error::parse(no, format!("bad bound '{l}'"))),
            }
        }
    }
    for (s, lines) in &sections {
        match s {
            Section::Binaries | Section::Generals => {
                for &(_, l) in lines {
                    for v in l.split_whitespace() {
                        let j = r.col(v);
                        let var = &mut r.m.variables[j];
                        if *s == Section::Binaries {
                            var.kind = VarKind::Binary;
                            var.lb = var.lb.max(0.0);
                            var.ub = var.ub.min(1.0);
                        } else if var.lb >= 0.0 && var.ub <= 1.0 {
                            var.kind = VarKind::Binary;
                        }
                    }
                }
            }
            Section::Objective => {
                let toks = tokens(lines);
                let body: Vec<(usize, &str)> = toks
                    .iter()
                    .filter(|(_, t)| !t.ends_with(':'))
                    .map(|(n, t)| (*n, t.as_str()))
                    .collect();
                let mut obj = r.terms(&body)?;
                obj.retain(|&(_, a)| a != 0.0);
                r.m.objective = obj;
            }
            Section::Rows => {
                let toks = tokens(lines);
                let mut i = 0;
                let mut unnamed = 0;
                while i < toks.len() {
                    let (no, ref t) = toks[i];
                    let rname = if let Some(n) = t.strip_suffix(':') {
                        i += 1;
                        n.to_string()
                    } else {
                        unnamed += 1;
                        format!("R{unnamed}")
                    };
                    let start = i;
                    while i < toks.len() && parse_sense(&toks[i].1).is_none() {
                        i += 1;
                    }
                    if i + 1 >= toks.len() {
                        return Err(Error::parse(no, format!("row {rname} has no sense or right-hand side")));
                    }
                    let body: Vec<(usize, &str)> = toks[start..i].iter().map(|(n, t)| (*n, t.as_str())).collect();
                    let sense = parse_sense(&toks[i].1).expect("checked");
                    let rhs = parse_num(&toks[i + 1].1, toks[i + 1].0)?;
                    i += 2;
                    let coefs = r.terms(&body)?;
                    r.m.add_constraint(rname, coefs, sense, rhs);
                }
            }
            _ => {}
        }
    }
    let mut lam: Vec<(usize, usize)> = r
        .m
        .variables
        .iter()
        .enumerate()
        .filter_map(|(j, v)| v.name.strip_prefix("lam_")?.parse().ok().map(|k: usize| (k, j)))
        .collect();
    lam.sort_unstable();
    if lam.iter().enumerate().all(|(i, &(k, _))| i == k) {
        r.m.lambda = lam.into_iter().map(|(_, j)| j).collect();
    }
    Ok(r.m)
}

pub fn read_lp(path: impl AsRef<Path>) -> Result<MilpModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lp(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_format() {
        assert_eq!(format_coef(3.0), "3");
        assert_eq!(format_coef(-2.0), "-2");
        assert_eq!(format_coef(0.5), "5e-1");
        assert_eq!(format_coef(0.1), "1.0000000000000001e-1");
        assert_eq!(format_coef(1234.5), "1.2345e3");
        for v in [0.1, 1.0 / 3.0, -7.25e-9, 123456.789, f64::MAX] {
            assert_eq!(format_coef(v).parse::<f64>().unwrap(), v);
        }
    }

    fn sample() -> MilpModel {
        let mut m = MilpModel::new("sample");
        let x = m.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY);
        let y = m.add_binary("y1");
        let w = m.add_continuous("w", 0.0, f64::INFINITY);
        m.sense = ObjSense::Maximize;
        m.objective = vec![(x, 1.0), (w, -0.25)];
        m.add_constraint("c1", vec![(x, 1.0), (y, -3.0)], Sense::Le, 2.5);
        m.add_constraint("c2", vec![(w, 1.0)], Sense::Ge, -1.0);
        m.add_constraint("c3", vec![], Sense::Eq, 0.0);
        m
    }

    #[test]
    fn text_layout() {
        let s = lp_string(&sample());
        assert_eq!(
            s,
            "\\ Problem: sample\nMaximize\n obj: x - 2.5e-1 w\nSubject To\n c1: x - 3 y1 <= 2.5\n c2: w >= -1\n c3: 0 x = 0\nBounds\n x free\n 0 <= y1 <= 1\n w >= 0\nBinaries\n y1\nEnd\n"
        );
        let mut f = MilpModel::new("f");
        f.add_continuous("x0", 0.0, 1.0);
        assert!(lp_string(&f).contains("Minimize\n obj: 0 x0\n"));
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let back = parse_lp(&lp_string(&m)).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.size(), m.size());
    }

    #[test]
    fn long_rows_wrap_and_parse() {
        let mut m = MilpModel::new("wide");
        let cols: Vec<usize> = (0..300).map(|i| m.add_continuous(format!("lam_{i}"), 0.0, 1.0)).collect();
        m.lambda = cols.clone();
        m.add_constraint("sum", cols.iter().map(|&j| (j, 1.0 / 3.0)).collect(), Sense::Eq, 1.0);
        let s = lp_string(&m);
        assert!(s.lines().all(|l| l.len() <= WRAP + 40));
        assert_eq!(parse_lp(&s).unwrap(), m);
    }

    #[test]
    fn errors() {
        assert!(parse_lp("Minimize\n obj: x\n").is_err());
        assert!(matches!(parse_lp("Minimize\n obj: x\nSubject To\n c: x +\nEnd\n"), Err(Error::Parse { .. })));
    }
}
