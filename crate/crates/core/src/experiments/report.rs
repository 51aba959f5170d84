//! Result tables and their CSV / Markdown rendering.
//!
//! All fractional values are rounded half-up at the fourth decimal before
//! printing. Footers carry the seed, class counts and the dataset
//! fingerprint so a report is reproducible from its own metadata; nothing
//! time-dependent is written, which keeps repeated runs byte-identical.

use std::path::{Path, PathBuf};

use crate::error::Result;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    /// Fractional metric, printed with 4-decimal half-up rounding.
    Number(f64),
    /// Exact count, printed as an integer.
    Count(u64),
    Empty,
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub cells: Vec<Cell>,
    /// Set on screening rows that pass the guideline filter.
    pub selected: bool,
}

impl ReportRow {
    pub fn new(cells: Vec<Cell>) -> Self {
        ReportRow { cells, selected: false }
    }
}

/// One rendered table plus footer metadata.
#[derive(Debug, Clone)]
pub struct Report {
    /// File stem for emitted artifacts, e.g. `exp1_metrics`.
    pub id: String,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    /// Ordered key/value footer lines.
    pub footer: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            other => Err(crate::error::Error::Argument(format!(
                "unknown format '{other}', expected csv | md"
            ))),
        }
    }
}

/// Round half away from zero at the fourth decimal.
pub fn round_half_up_4(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    sign * (x.abs() * 10_000.0 + 0.5).floor() / 10_000.0
}

pub fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Text(s) => s.clone(),
        Cell::Number(x) => format!("{:.4}", round_half_up_4(*x)),
        Cell::Count(c) => c.to_string(),
        Cell::Empty => String::new(),
    }
}

impl Report {
    /// Copy of the report keeping only guideline-selected rows.
    pub fn selected_only(&self, id: impl Into<String>) -> Report {
        Report {
            id: id.into(),
            columns: self.columns.clone(),
            rows: self.rows.iter().filter(|r| r.selected).cloned().collect(),
            footer: self.footer.clone(),
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.render_csv(),
            ReportFormat::Markdown => self.render_markdown(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_line(&self.columns.iter().map(|c| c.clone()).collect::<Vec<_>>()));
        for row in &self.rows {
            let cells: Vec<String> = row.cells.iter().map(format_cell).collect();
            out.push_str(&csv_line(&cells));
        }
        out.push('\n');
        for (key, value) in &self.footer {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        out
    }

    fn render_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&md_line(&self.columns));
        let dashes: Vec<String> = self.columns.iter().map(|_| "---".to_string()).collect();
        out.push_str(&md_line(&dashes));
        for row in &self.rows {
            let cells: Vec<String> = row.cells.iter().map(format_cell).collect();
            out.push_str(&md_line(&cells));
        }
        out.push('\n');
        for (key, value) in &self.footer {
            out.push_str(&format!("- {key}: {value}\n"));
        }
        out
    }
}

fn csv_field(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_line<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = fields.iter().map(|f| csv_field(f.as_ref())).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn md_line<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = String::from("|");
    for f in fields {
        line.push(' ');
        line.push_str(&f.as_ref().replace('|', "\\|"));
        line.push_str(" |");
    }
    line.push('\n');
    line
}

/// Write the report to `<dir>/<id>.<ext>` and return the path.
pub fn emit_report(report: &Report, format: ReportFormat, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let path = dir.as_ref().join(format!("{}.{}", report.id, format.extension()));
    std::fs::write(&path, report.render(format))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_up_at_the_fourth_decimal() {
        assert_eq!(round_half_up_4(95.0 / 129.0), 0.7364);
        assert_eq!(format_cell(&Cell::Number(95.0 / 129.0)), "0.7364");
        assert_eq!(format_cell(&Cell::Number(0.73643)), "0.7364");
        assert_eq!(format_cell(&Cell::Number(0.00005)), "0.0001");
        assert_eq!(format_cell(&Cell::Number(-0.00005)), "-0.0001");
        assert_eq!(format_cell(&Cell::Number(2.0 / 3.0)), "0.6667");
        assert_eq!(format_cell(&Cell::Number(0.0)), "0.0000");
        assert_eq!(format_cell(&Cell::Count(7236)), "7236");
    }

    fn demo_report() -> Report {
        Report {
            id: "demo".into(),
            columns: vec!["Name".into(), "Recall".into(), "TP".into()],
            rows: vec![
                ReportRow::new(vec![
                    Cell::Text("svm, linear".into()),
                    Cell::Number(95.0 / 129.0),
                    Cell::Count(95),
                ]),
                ReportRow::new(vec![
                    Cell::Text("gbm".into()),
                    Cell::Number(98.0 / 129.0),
                    Cell::Count(98),
                ]),
            ],
            footer: vec![("seed".into(), "42".into())],
        }
    }

    #[test]
    fn csv_quotes_fields_with_commas_and_keeps_the_footer() {
        let text = demo_report().render(ReportFormat::Csv);
        assert!(text.starts_with("Name,Recall,TP\n"));
        assert!(text.contains("\"svm, linear\",0.7364,95\n"));
        assert!(text.contains("# seed: 42\n"));
    }

    #[test]
    fn markdown_and_csv_carry_identical_values() {
        let report = demo_report();
        let csv = report.render(ReportFormat::Csv);
        let md = report.render(ReportFormat::Markdown);

        // parse the markdown table body
        let md_rows: Vec<Vec<String>> = md
            .lines()
            .skip(2)
            .take_while(|l| l.starts_with('|'))
            .map(|l| {
                l.trim_matches('|')
                    .split(" | ")
                    .map(|c| c.trim().to_string())
                    .collect()
            })
            .collect();
        // parse the csv body (quoted fields only appear in the name column)
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(csv.as_bytes());
        let csv_rows: Vec<Vec<String>> = reader
            .records()
            .filter_map(|r| r.ok())
            .filter(|r| r.len() > 1)
            .map(|r| r.iter().map(|c| c.to_string()).collect())
            .collect();
        assert_eq!(md_rows, csv_rows);
    }

    #[test]
    fn emit_writes_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = emit_report(&demo_report(), ReportFormat::Csv, dir.path()).unwrap();
        assert!(path.ends_with("demo.csv"));
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.contains("# seed: 42"));
    }

    #[test]
    fn selected_only_filters_rows() {
        let mut r = demo_report();
        r.rows[1].selected = true;
        let sel = r.selected_only("demo_selected");
        assert_eq!(sel.rows.len(), 1);
        assert_eq!(sel.columns, r.columns);
    }
}
