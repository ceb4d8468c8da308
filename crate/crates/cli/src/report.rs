//! Reports: titled tables rendered either as aligned text or as JSON.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

pub struct Report {
    pub command: String,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    /// `Some(false)` when the computed verdict is negative.
    pub verdict: Option<bool>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            tables: Vec::new(),
            notes: Vec::new(),
            verdict: None,
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Conjunction with any verdict recorded so far.
    pub fn verdict(&mut self, ok: bool) {
        self.verdict = Some(self.verdict.unwrap_or(true) && ok);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            let _ = writeln!(out, "== {} ==", t.name);
            let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for r in &t.rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                parts.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(&t.columns));
            let _ = writeln!(out, "{}", line(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>()));
            for r in &t.rows {
                let _ = writeln!(out, "{}", line(r));
            }
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        if let Some(v) = self.verdict {
            let _ = writeln!(out, "verdict: {}", if v { "ok" } else { "failed" });
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| {
                        let mut m = Map::new();
                        for (c, v) in t.columns.iter().zip(r) {
                            m.insert(c.clone(), Value::String(v.clone()));
                        }
                        Value::Object(m)
                    })
                    .collect();
                json!({ "name": t.name, "columns": t.columns, "rows": rows })
            })
            .collect();
        json!({
            "command": self.command,
            "tables": tables,
            "notes": self.notes,
            "verdict": self.verdict,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("string keys only");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_is_aligned() {
        let mut r = Report::new("demo");
        let mut t = Table::new("t", &["a", "long"]);
        t.row(vec!["1/3".into(), "x".into()]);
        r.tables.push(t);
        r.verdict(true);
        r.verdict(false);
        let s = r.to_text();
        assert!(s.contains("a    long\n---  ----\n1/3  x\n"), "{s}");
        assert!(s.ends_with("verdict: failed\n"));
        assert_eq!(r.to_json()["tables"][0]["rows"][0]["a"], "1/3");
    }
}
