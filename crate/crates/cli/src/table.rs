//! Result tables and their CSV, JSON and gnuplot renderings.

use std::fmt;

use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // shortest representation that parses back to the same f64
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            Cell::Bool(b) => Some(f64::from(u8::from(*b))),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub tool_version: String,
    pub scenario_digest: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Metadata,
}

/// Prefix of the CSV comment line carrying the generation time.
pub const TIMESTAMP_PREFIX: &str = "# generated: ";

impl ResultTable {
    pub fn new(kind: &str, columns: &[&str], metadata: Metadata) -> Self {
        Self {
            kind: kind.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width differs from header in {}",
            self.kind
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// First non-finite numeric cell, as `(row, column)`.
    pub fn first_non_finite(&self) -> Option<(usize, &str)> {
        self.rows.iter().enumerate().find_map(|(i, row)| {
            row.iter()
                .zip(&self.columns)
                .find(|(c, _)| matches!(c, Cell::Num(v) if !v.is_finite()))
                .map(|(_, name)| (i, name.as_str()))
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# tool: ricci-dynamo {}\n# kind: {}\n# scenario_digest: {}\n{}{}\n",
            self.metadata.tool_version,
            self.kind,
            self.metadata.scenario_digest,
            TIMESTAMP_PREFIX,
            self.metadata.timestamp
        );
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("cells are utf-8"));
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "metadata": {
                "tool_version": self.metadata.tool_version,
                "kind": self.kind,
                "scenario_digest": self.metadata.scenario_digest,
                "generated": self.metadata.timestamp,
            },
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    GrowthCurve,
    SpectrumScatter,
    RegimeMap,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::GrowthCurve => "growth_curve",
            PlotKind::SpectrumScatter => "spectrum_scatter",
            PlotKind::RegimeMap => "regime_map",
        }
    }

    /// Columns copied to the plot file, in order.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            PlotKind::GrowthCurve => &["t", "log_energy"],
            PlotKind::SpectrumScatter => &["re", "im", "source_code"],
            PlotKind::RegimeMap => &["rho", "R", "regime_code"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaMismatch {
    pub kind: PlotKind,
    pub missing: Vec<String>,
}

impl fmt::Display for SchemaMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} plot needs missing column(s): {}",
            self.kind.name(),
            self.missing.join(", ")
        )
    }
}

impl std::error::Error for SchemaMismatch {}

/// Whitespace-delimited plot data with a commented header.
///
/// Rows with a `row_kind` column other than `root` are skipped, and a blank
/// line separates consecutive `point` values so gnuplot sees one block per
/// sweep point.
pub fn emit_plotdata(table: &ResultTable, kind: PlotKind) -> Result<String, SchemaMismatch> {
    let wanted = kind.columns();
    let missing: Vec<String> = wanted
        .iter()
        .filter(|c| table.column(c).is_none())
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(SchemaMismatch { kind, missing });
    }
    let idx: Vec<usize> = wanted.iter().map(|c| table.column(c).expect("checked")).collect();
    let row_kind = table.column("row_kind");
    let point = table.column("point");
    let mut out = format!(
        "# kind: {}\n# columns: {}\n# scenario_digest: {}\n",
        kind.name(),
        wanted.join(" "),
        table.metadata.scenario_digest
    );
    let mut last_point: Option<&Cell> = None;
    for row in &table.rows {
        if let Some(k) = row_kind {
            if row[k] != Cell::Text("root".into()) {
                continue;
            }
        }
        if let Some(p) = point {
            if last_point.is_some_and(|lp| *lp != row[p]) && kind == PlotKind::GrowthCurve {
                out.push_str("\n\n");
            }
            last_point = Some(&row[p]);
        }
        let fields: Vec<String> = idx
            .iter()
            .map(|&i| match row[i].as_f64() {
                Some(v) => format!("{v:?}"),
                None => row[i].csv(),
            })
            .collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata {
            tool_version: "0.0.0".into(),
            scenario_digest: "abc".into(),
            timestamp: "now".into(),
        }
    }

    #[test]
    fn csv_has_comment_header_and_roundtrips_floats() {
        let mut t = ResultTable::new("spectrum", &["point", "re", "label"], meta());
        let v = 0.1 + 0.2;
        t.push(vec![0usize.into(), v.into(), "a,b".into()]);
        let csv = t.to_csv();
        assert!(csv.starts_with("# tool: ricci-dynamo 0.0.0\n"));
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "point,re,label");
        assert_eq!(body[1], "0,0.30000000000000004,\"a,b\"");
        assert_eq!(body[1].split(',').nth(1).unwrap().parse::<f64>().unwrap(), v);
    }

    #[test]
    fn plot_schema_mismatch_lists_columns() {
        let t = ResultTable::new("evolve", &["point", "t"], meta());
        let err = emit_plotdata(&t, PlotKind::GrowthCurve).unwrap_err();
        assert_eq!(err.missing, vec!["log_energy".to_string()]);
        let err = emit_plotdata(&t, PlotKind::RegimeMap).unwrap_err();
        assert_eq!(err.missing.len(), 3);
    }

    #[test]
    fn growth_curve_blocks() {
        let mut t = ResultTable::new("evolve", &["point", "t", "log_energy"], meta());
        for p in 0..2usize {
            for k in 0..2 {
                t.push(vec![p.into(), (k as f64).into(), (-(k as f64)).into()]);
            }
        }
        let dat = emit_plotdata(&t, PlotKind::GrowthCurve).unwrap();
        let body: Vec<&str> = dat.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["0.0 -0.0", "1.0 -1.0", "", "", "0.0 -0.0", "1.0 -1.0"]);
    }

    #[test]
    fn non_finite_cells_are_found() {
        let mut t = ResultTable::new("x", &["a", "b"], meta());
        t.push(vec![1.0.into(), f64::NAN.into()]);
        assert_eq!(t.first_non_finite(), Some((0, "b")));
    }
}
