//! Result tables rendered as TSV or aligned text.

use crate::args::Format;

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Fixed-point with `precision` decimals, or scientific notation with
/// `precision` significant digits for nonzero magnitudes below 1e-4.
pub fn format_number(v: f64, precision: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{:.*e}", precision.saturating_sub(1), v)
    } else {
        format!("{:.*}", precision, v)
    }
}

/// Two significant digits, the precision most published rates are quoted at.
fn rounded(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format_number(v, 2);
    }
    if v.abs() < 1e-4 {
        return format!("{:.1e}", v);
    }
    let decimals = (1 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{:.*}", decimals, v)
}

#[derive(Debug, Clone)]
pub struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
        self
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Tsv => self.render_tsv(precision),
            Format::Pretty => self.render_pretty(precision),
        }
    }

    fn render_tsv(&self, precision: usize) -> String {
        let mut out = self.headers.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_number(*v, precision),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => s.replace(['\t', '\n'], " "),
                    Cell::Missing => "NA".into(),
                })
                .collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    fn render_pretty(&self, precision: usize) -> String {
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Num(v) => format!("{} (≈{})", format_number(*v, precision), rounded(*v)),
                        Cell::Int(v) => v.to_string(),
                        Cell::Text(s) => s.clone(),
                        Cell::Missing => "-".into(),
                    })
                    .collect()
            })
            .collect();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &body {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            let mut s = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = line(self.headers.clone());
        out.push_str(&line(
            widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect(),
        ));
        for row in &body {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
        }
        out
    }
}
