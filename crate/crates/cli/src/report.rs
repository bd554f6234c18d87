use std::fmt::Write as _;
use std::time::Duration;

/// A titled table of pre-rendered cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn render(&self, out: &mut String) {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}:", self.title).unwrap();
        writeln!(out, "  {}", line(&self.headers)).unwrap();
        for row in &self.rows {
            writeln!(out, "  {}", line(row)).unwrap();
        }
    }

    fn render_kv(&self, out: &mut String) {
        let key = self.title.replace(' ', "_");
        for (i, row) in self.rows.iter().enumerate() {
            for (h, cell) in self.headers.iter().zip(row) {
                writeln!(out, "{key}.{i}.{}={cell}", h.replace(' ', "_")).unwrap();
            }
        }
    }
}

/// Everything a command prints. Rendering is a pure function of the
/// contents, so equal inputs give byte-identical output.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub command: String,
    pub catalog_version: String,
    pub assumptions: Vec<String>,
    pub tables: Vec<Table>,
    pub summary: Vec<(String, String)>,
    pub wall_time: Option<Duration>,
}

impl RunReport {
    pub fn new(command: String, catalog_version: &str) -> Self {
        Self {
            command,
            catalog_version: catalog_version.to_string(),
            ..Self::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn assume(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.assumptions.contains(&note) {
            self.assumptions.push(note);
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        writeln!(out, "catalog version: {}", self.catalog_version).unwrap();
        if self.assumptions.is_empty() {
            writeln!(out, "assumptions: none").unwrap();
        } else {
            writeln!(out, "assumptions:").unwrap();
            for a in &self.assumptions {
                writeln!(out, "  - {a}").unwrap();
            }
        }
        for t in &self.tables {
            out.push('\n');
            t.render(&mut out);
        }
        if !self.summary.is_empty() {
            out.push('\n');
            let w = self.summary.iter().map(|(k, _)| k.len() + 1).max().unwrap_or(0);
            for (k, v) in &self.summary {
                writeln!(out, "{:<w$}  {v}", format!("{k}:")).unwrap();
            }
        }
        if let Some(t) = self.wall_time {
            writeln!(out, "\nwall time: {:.3} s", t.as_secs_f64()).unwrap();
        }
        out
    }

    /// `key=value` lines for machine diffing.
    pub fn render_kv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command={}", self.command).unwrap();
        writeln!(out, "catalog_version={}", self.catalog_version).unwrap();
        for (i, a) in self.assumptions.iter().enumerate() {
            writeln!(out, "assumption.{i}={a}").unwrap();
        }
        for t in &self.tables {
            t.render_kv(&mut out);
        }
        for (k, v) in &self.summary {
            writeln!(out, "{}={v}", k.replace(' ', "_")).unwrap();
        }
        if let Some(t) = self.wall_time {
            writeln!(out, "wall_time_s={:.3}", t.as_secs_f64()).unwrap();
        }
        out
    }
}
