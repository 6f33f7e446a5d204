//! Plain-text output documents.
//!
//! A document is a header of `# key: value` lines followed by named
//! sections. `[table NAME]` opens a CSV table (header row first, no quoting,
//! so cells may not contain commas); `[report NAME]` opens a `key: value`
//! tree where a bare `key:` introduces children indented by two spaces.
//! Floats are written in shortest round-trip form and exact rationals as
//! `num/den`, so [`Document::parse`] inverts [`Document::emit`].

use std::fmt::{self, Write as _};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(String),
    Nested(Vec<(String, Value)>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: impl Into<String>, v: impl fmt::Display) -> &mut Self {
        self.entries.push((key.into(), Value::Scalar(v.to_string())));
        self
    }

    pub fn put_f64(&mut self, key: impl Into<String>, x: f64) -> &mut Self {
        self.put(key, num(x))
    }

    pub fn nest(&mut self, key: impl Into<String>, r: Report) -> &mut Self {
        self.entries.push((key.into(), Value::Nested(r.entries)));
        self
    }

    /// Scalar at a dotted path.
    pub fn get(&self, path: &str) -> Option<&str> {
        let mut entries = &self.entries;
        let mut parts = path.split('.').peekable();
        while let Some(p) = parts.next() {
            let v = &entries.iter().find(|(k, _)| k == p)?.1;
            match (v, parts.peek()) {
                (Value::Scalar(s), None) => return Some(s),
                (Value::Nested(e), Some(_)) => entries = e,
                _ => return None,
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Table(Table),
    Report(Report),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub header: Vec<(String, String)>,
    pub sections: Vec<Section>,
}

/// Shortest round-trip decimal, switching to exponent form for very large
/// or small magnitudes.
pub fn num(x: f64) -> String {
    let m = x.abs();
    if m == 0.0 || !m.is_finite() || (1e-4..1e15).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Document {
    pub fn table(&mut self, name: impl Into<String>, t: Table) {
        self.sections.push(Section {
            name: name.into(),
            body: Body::Table(t),
        });
    }

    pub fn report(&mut self, name: impl Into<String>, r: Report) {
        self.sections.push(Section {
            name: name.into(),
            body: Body::Report(r),
        });
    }

    pub fn get_table(&self, name: &str) -> Option<&Table> {
        self.sections.iter().find_map(|s| match &s.body {
            Body::Table(t) if s.name == name => Some(t),
            _ => None,
        })
    }

    pub fn get_report(&self, name: &str) -> Option<&Report> {
        self.sections.iter().find_map(|s| match &s.body {
            Body::Report(r) if s.name == name => Some(r),
            _ => None,
        })
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for s in &self.sections {
            match &s.body {
                Body::Table(t) => {
                    let _ = writeln!(out, "[table {}]", s.name);
                    let _ = writeln!(out, "{}", t.columns.join(","));
                    for r in &t.rows {
                        let _ = writeln!(out, "{}", r.join(","));
                    }
                }
                Body::Report(r) => {
                    let _ = writeln!(out, "[report {}]", s.name);
                    emit_entries(&mut out, &r.entries, 0);
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut lines = text.lines().peekable();
        while let Some(l) = lines.next_if(|l| l.starts_with("# ")) {
            let (k, v) = l[2..]
                .split_once(": ")
                .ok_or_else(|| CliError::Parse(format!("header line {l:?}")))?;
            doc.header.push((k.to_string(), v.to_string()));
        }
        while let Some(l) = lines.next() {
            let opener = |kind: &str| l.strip_prefix(kind).and_then(|r| r.strip_suffix(']'));
            let body: Vec<&str> = {
                let mut v = Vec::new();
                while let Some(x) = lines.next_if(|x| !is_opener(x)) {
                    v.push(x);
                }
                v
            };
            if let Some(name) = opener("[table ") {
                let (head, rows) = body
                    .split_first()
                    .ok_or_else(|| CliError::Parse(format!("table {name} has no header")))?;
                let columns: Vec<String> = head.split(',').map(String::from).collect();
                let rows = rows
                    .iter()
                    .map(|r| {
                        let cells: Vec<String> = r.split(',').map(String::from).collect();
                        if cells.len() == columns.len() {
                            Ok(cells)
                        } else {
                            Err(CliError::Parse(format!("row {r:?} in table {name}")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                doc.table(name, Table { columns, rows });
            } else if let Some(name) = opener("[report ") {
                let mut pos = 0;
                let entries = parse_entries(&body, &mut pos, 0)?;
                if pos != body.len() {
                    return Err(CliError::Parse(format!("report {name}: line {:?}", body[pos])));
                }
                doc.report(name, Report { entries });
            } else {
                return Err(CliError::Parse(format!("unexpected line {l:?}")));
            }
        }
        Ok(doc)
    }
}

fn is_opener(l: &str) -> bool {
    (l.starts_with("[table ") || l.starts_with("[report ")) && l.ends_with(']')
}

fn emit_entries(out: &mut String, entries: &[(String, Value)], depth: usize) {
    let pad = "  ".repeat(depth);
    for (k, v) in entries {
        match v {
            Value::Scalar(s) => {
                let _ = writeln!(out, "{pad}{k}: {s}");
            }
            Value::Nested(e) => {
                let _ = writeln!(out, "{pad}{k}:");
                emit_entries(out, e, depth + 1);
            }
        }
    }
}

fn parse_entries(lines: &[&str], pos: &mut usize, depth: usize) -> Result<Vec<(String, Value)>> {
    let pad = "  ".repeat(depth);
    let mut out = Vec::new();
    while *pos < lines.len() {
        let Some(rest) = lines[*pos].strip_prefix(&pad) else { break };
        if rest.starts_with(' ') {
            return Err(CliError::Parse(format!("bad indent: {:?}", lines[*pos])));
        }
        *pos += 1;
        if let Some(key) = rest.strip_suffix(':') {
            if !key.contains(": ") {
                let children = parse_entries(lines, pos, depth + 1)?;
                out.push((key.to_string(), Value::Nested(children)));
                continue;
            }
        }
        let (k, v) = rest
            .split_once(": ")
            .ok_or_else(|| CliError::Parse(format!("expected key: value, got {rest:?}")))?;
        out.push((k.to_string(), Value::Scalar(v.to_string())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_document() {
        let mut d = Document::default();
        d.header.push(("command".into(), "spectrum".into()));
        let mut t = Table::new(["k", "omega"]);
        t.push(vec!["1".into(), num(2.0)]);
        d.table("spectrum", t);
        let mut inner = Report::new();
        inner.put("det", "5/1024");
        let mut r = Report::new();
        r.put_f64("tol", 1e-20).nest("block", inner).nest("empty", Report::new());
        d.report("kam", r);
        let text = d.emit();
        assert_eq!(
            text,
            "# command: spectrum\n[table spectrum]\nk,omega\n1,2\n[report kam]\ntol: 1e-20\nblock:\n  det: 5/1024\nempty:\n"
        );
        let back = Document::parse(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.get_report("kam").unwrap().get("block.det"), Some("5/1024"));
        assert_eq!(back.get_table("spectrum").unwrap().column("omega").unwrap(), ["2"]);
    }

    #[test]
    fn number_format() {
        for x in [0.0, 1.0, -2.5, 1e-20, 3.2e17, 0.1 + 0.2, f64::MIN_POSITIVE, 1e-4, 123456.789] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(num(1e-20), "1e-20");
        assert_eq!(num(0.5), "0.5");
    }

    #[test]
    fn malformed() {
        assert!(Document::parse("[table t]\n").is_err());
        assert!(Document::parse("[table t]\na,b\n1\n").is_err());
        assert!(Document::parse("stray\n").is_err());
        assert!(Document::parse("[report r]\nno separator\n").is_err());
        assert!(Document::parse("[report r]\n   x: 1\n").is_err());
    }
}
