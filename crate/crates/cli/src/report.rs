//! Reports: titled tables and free-form notes, rendered either as aligned
//! text or as tab-separated `key=value` records.

use std::fmt::Write;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Records,
}

#[derive(Debug, Clone, Default)]
pub struct Section {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    /// Render rows as indented blocks instead of aligned columns.
    pub stacked: bool,
}

impl Section {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Section {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn stacked(title: impl Into<String>, columns: &[&str]) -> Self {
        Section {
            stacked: true,
            ..Section::new(title, columns)
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let row: Vec<String> = cells.into_iter().map(|c| c.to_string()).collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn push(&mut self, section: Section) {
        self.sections.push(section);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Records => self.records(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "== {}", s.title);
            if s.stacked {
                for row in &s.rows {
                    let _ = writeln!(out, "[{}] {}", row[0], row[1]);
                    for (c, v) in s.columns.iter().zip(row).skip(2) {
                        let _ = writeln!(out, "    {c}: {v}");
                    }
                }
            } else if !s.columns.is_empty() && !s.rows.is_empty() {
                let mut widths: Vec<usize> = s.columns.iter().map(|c| c.chars().count()).collect();
                for row in &s.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.chars().count());
                    }
                }
                let line = |cells: &[String]| {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, &w)| format!("{c:<w$}"))
                        .collect();
                    padded.join("  ").trim_end().to_string()
                };
                let _ = writeln!(out, "{}", line(&s.columns));
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                let _ = writeln!(out, "{}", rule.join("  "));
                for row in &s.rows {
                    let _ = writeln!(out, "{}", line(row));
                }
            }
            for n in &s.notes {
                let _ = writeln!(out, "{n}");
            }
        }
        out
    }

    fn records(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            for row in &s.rows {
                let fields: Vec<String> = s
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| format!("{c}={}", escape(v)))
                    .collect();
                let _ = writeln!(out, "{}\t{}", s.title, fields.join("\t"));
            }
            for n in &s.notes {
                let _ = writeln!(out, "{}\tnote={}", s.title, escape(n));
            }
        }
        out
    }
}

fn escape(v: &str) -> String {
    v.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n")
}
