//! Flat result tables with deterministic CSV and JSON-lines rendering.
//!
//! CSV: UTF-8, LF line endings, '.' decimal separator, floats printed with
//! 17 significant digits so parsing them back is lossless. Header comment
//! lines carry the schema name and version, the seed, the system, the row
//! gates, and free-form notes (proxy depth and fit summaries). The JSON
//! mirror holds the same metadata in its first line and one object per row.

use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable that overrides the output directory when no
/// explicit directory is given.
pub const OUTPUT_DIR_ENV: &str = "ERGOSHADOW_OUTPUT_DIR";

/// Output directory resolution: explicit flag, then the environment
/// override, then `ergoshadow-out` in the working directory.
pub fn resolve_output_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from("ergoshadow-out")
}

/// One table value.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => csv_escape(s),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Bool(v) => serde_json::Value::from(*v),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One table row; cells are positional against the table's columns.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow(pub Vec<Cell>);

/// A rendered experiment: metadata plus rows under a fixed column schema.
#[derive(Clone, Debug)]
pub struct ExperimentTable {
    pub schema: String,
    pub version: u32,
    pub seed: u64,
    pub system: String,
    /// Human-readable statement of the row pass gates.
    pub gates: String,
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    pub fn new(
        schema: impl Into<String>,
        seed: u64,
        system: impl Into<String>,
        gates: impl Into<String>,
        columns: Vec<&'static str>,
    ) -> Self {
        ExperimentTable {
            schema: schema.into(),
            version: 1,
            seed,
            system: system.into(),
            gates: gates.into(),
            notes: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row width must match the column schema"
        );
        self.rows.push(ExperimentRow(cells));
    }

    /// Number of rows whose `pass` column is false (0 when absent).
    pub fn failures(&self) -> usize {
        let Some(idx) = self.columns.iter().position(|c| *c == "pass") else {
            return 0;
        };
        self.rows
            .iter()
            .filter(|r| matches!(r.0[idx], Cell::Bool(false)))
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema: {} v{}\n", self.schema, self.version));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# system: {}\n", self.system));
        out.push_str(&format!("# gates: {}\n", self.gates));
        for n in &self.notes {
            out.push_str(&format!("# note: {n}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.0.iter().map(Cell::to_csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let header = serde_json::json!({
            "schema": self.schema,
            "version": self.version,
            "seed": self.seed,
            "system": self.system,
            "gates": self.gates,
            "notes": self.notes,
            "columns": self.columns,
            "rows": self.rows.len(),
        });
        let mut out = header.to_string();
        out.push('\n');
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (col, cell) in self.columns.iter().zip(&row.0) {
                obj.insert((*col).to_string(), cell.to_json());
            }
            out.push_str(&serde_json::Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }

    /// Writes `<schema>.csv` and `<schema>.jsonl` under `dir`, creating the
    /// directory if needed. Returns the two paths.
    pub fn write_files(&self, dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.schema));
        let jsonl_path = dir.join(format!("{}.jsonl", self.schema));
        let mut csv = std::fs::File::create(&csv_path)?;
        csv.write_all(self.to_csv().as_bytes())?;
        let mut jsonl = std::fs::File::create(&jsonl_path)?;
        jsonl.write_all(self.to_jsonl().as_bytes())?;
        Ok((csv_path, jsonl_path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentTable {
        let mut t = ExperimentTable::new(
            "demo",
            42,
            "symbolic test",
            "pass = x < 1",
            vec!["alpha", "count", "pass", "note"],
        );
        t.note("first note");
        t.push(vec![
            Cell::Float(0.5),
            Cell::Int(7),
            Cell::Bool(true),
            Cell::Text(String::new()),
        ]);
        t.push(vec![
            Cell::Float(1.0 / 3.0),
            Cell::Int(-1),
            Cell::Bool(false),
            Cell::Text("seam, \"quoted\"".to_string()),
        ]);
        t
    }

    #[test]
    fn csv_layout_and_float_width() {
        let text = sample().to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema: demo v1");
        assert_eq!(lines[1], "# seed: 42");
        assert_eq!(lines[2], "# system: symbolic test");
        assert_eq!(lines[3], "# gates: pass = x < 1");
        assert_eq!(lines[4], "# note: first note");
        assert_eq!(lines[5], "alpha,count,pass,note");
        assert!(lines[6].starts_with("5.0000000000000000e-1,7,true,"));
        // 17 significant digits parse back losslessly.
        let third = lines[7].split(',').next().unwrap();
        assert_eq!(third.parse::<f64>().unwrap(), 1.0 / 3.0);
        assert!(lines[7].ends_with("\"seam, \"\"quoted\"\"\""));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn jsonl_mirrors_the_rows() {
        let t = sample();
        let text = t.to_jsonl();
        let mut lines = text.lines();
        let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(header["schema"], "demo");
        assert_eq!(header["seed"], 42);
        assert_eq!(header["rows"], 2);
        let row: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(row["alpha"], 0.5);
        assert_eq!(row["count"], 7);
        assert_eq!(row["pass"], true);
    }

    #[test]
    fn failures_counts_false_pass_cells() {
        assert_eq!(sample().failures(), 1);
        let empty = ExperimentTable::new("x", 0, "s", "g", vec!["a"]);
        assert_eq!(empty.failures(), 0);
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = sample();
        let b = sample();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_jsonl(), b.to_jsonl());
    }

    #[test]
    fn write_files_round_trips_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let t = sample();
        let (csv_path, jsonl_path) = t.write_files(dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), t.to_csv());
        assert_eq!(std::fs::read_to_string(&jsonl_path).unwrap(), t.to_jsonl());
    }

    #[test]
    fn output_dir_resolution_prefers_the_flag() {
        let flagged = resolve_output_dir(Some(Path::new("/tmp/explicit")));
        assert_eq!(flagged, PathBuf::from("/tmp/explicit"));
        // Without a flag the result is either the env override or the
        // default; both are absolute statements about this process's env.
        let fallback = resolve_output_dir(None);
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => assert_eq!(fallback, PathBuf::from(v)),
            _ => assert_eq!(fallback, PathBuf::from("ergoshadow-out")),
        }
    }
}
