//! Two renderings of the same document: aligned text tables for reading and
//! `key = value` lines for machines and golden files.

use qdm_core::render::render_scalar;
use qdm_core::series::MatrixSeries;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Body {
    Value(String),
    Grid { rows: Vec<String>, cols: Vec<String>, cells: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Block {
    key: String,
    title: String,
    body: Body,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    blocks: Vec<Block>,
}

impl Document {
    pub fn value(&mut self, key: impl Into<String>, title: impl Into<String>, value: impl Into<String>) {
        self.blocks.push(Block { key: key.into(), title: title.into(), body: Body::Value(value.into()) });
    }

    pub fn grid(
        &mut self,
        key: impl Into<String>,
        title: impl Into<String>,
        rows: Vec<String>,
        cols: Vec<String>,
        cells: Vec<Vec<String>>,
    ) {
        self.blocks.push(Block { key: key.into(), title: title.into(), body: Body::Grid { rows, cols, cells } });
    }

    /// A matrix series with rows and columns labelled by basis names.
    pub fn matrix(&mut self, key: impl Into<String>, title: impl Into<String>, m: &MatrixSeries, labels: &[String]) {
        let n = labels.len();
        let cells = (0..n).map(|i| (0..n).map(|j| render_scalar(&m.entry(i, j))).collect()).collect();
        self.grid(key, title, labels.to_vec(), labels.to_vec(), cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => self.render_structured(),
            Format::Table => self.render_table(),
        }
    }

    fn render_structured(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            match &b.body {
                Body::Value(v) => out.push_str(&format!("{} = {v}\n", b.key)),
                Body::Grid { cells, .. } => {
                    for (i, row) in cells.iter().enumerate() {
                        for (j, c) in row.iter().enumerate() {
                            out.push_str(&format!("{}[{},{}] = {c}\n", b.key, i + 1, j + 1));
                        }
                    }
                }
            }
        }
        out
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        let width = self
            .blocks
            .iter()
            .filter(|b| matches!(b.body, Body::Value(_)))
            .map(|b| b.title.chars().count())
            .max()
            .unwrap_or(0);
        for b in &self.blocks {
            match &b.body {
                Body::Value(v) => out.push_str(&format!("{:<width$}  {v}\n", b.title)),
                Body::Grid { rows, cols, cells } => {
                    out.push_str(&format!("\n{}\n", b.title));
                    let mut table =
                        vec![std::iter::once(String::new()).chain(cols.iter().cloned()).collect::<Vec<_>>()];
                    for (label, row) in rows.iter().zip(cells) {
                        table.push(std::iter::once(label.clone()).chain(row.iter().cloned()).collect());
                    }
                    let widths: Vec<usize> = (0..=cols.len())
                        .map(|j| table.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
                        .collect();
                    for r in &table {
                        let line: Vec<String> = r.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
                        out.push_str(line.join("  ").trim_end());
                        out.push('\n');
                    }
                }
            }
        }
        out
    }
}

/// Splits structured output into `(key, value)` pairs in order.
pub fn parse_structured(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once(" = ")
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| CliError::Parse(format!("malformed line `{l}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdm_core::render::parse_scalar;
    use qdm_core::series::Cutoff;

    #[test]
    fn structured_round_trips_series() {
        let cut = Cutoff::new(vec![2, 2]);
        let s = parse_scalar("1 - 1/2*h^-1*q2 + 3*h*lambda*q1*q2", &cut).unwrap();
        let mut doc = Document::default();
        doc.value("f", "f", render_scalar(&s));
        doc.value("zero", "zero", "0");
        let parsed = parse_structured(&doc.render(Format::Structured)).unwrap();
        assert_eq!(parse_scalar(&parsed[0].1, &cut).unwrap(), s);
        assert_eq!(parsed[1], ("zero".to_string(), "0".to_string()));
    }

    #[test]
    fn tables_are_aligned() {
        let mut doc = Document::default();
        doc.grid(
            "m",
            "M",
            vec!["1".into(), "p1".into()],
            vec!["1".into(), "p1".into()],
            vec![vec!["0".into(), "q1".into()], vec!["1".into(), "-q1".into()]],
        );
        assert_eq!(doc.render(Format::Table), "\nM\n    1  p1\n1   0  q1\np1  1  -q1\n");
        assert_eq!(doc.render(Format::Structured), "m[1,1] = 0\nm[1,2] = q1\nm[2,1] = 1\nm[2,2] = -q1\n");
    }
}
