//! Experiment outputs: measured series, fitted constants and their CSV and
//! JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::solver::NORMALIZATION_NOTE;

/// A named table of measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Outcome of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub series: Vec<Series>,
    /// Maxima over samples and trials.
    pub fitted: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// JSON summary written beside the CSV.
#[derive(Serialize)]
struct Summary<'a> {
    name: &'a str,
    parameters: &'a BTreeMap<String, Value>,
    fitted: &'a BTreeMap<String, f64>,
    tolerances: &'a BTreeMap<String, f64>,
    pass: bool,
    notes: &'a [String],
    csv: String,
}

impl ExperimentResult {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            series: Vec::new(),
            fitted: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            pass: false,
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.into(), v);
    }

    pub fn fit(&mut self, key: &str, value: f64) {
        self.fitted.insert(key.into(), value);
    }

    pub fn tol(&mut self, key: &str, value: f64) {
        self.tolerances.insert(key.into(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// One line: name, verdict and fitted constants.
    pub fn summary_line(&self) -> String {
        let mut line = format!("{}: {}", self.name, if self.pass { "PASS" } else { "FAIL" });
        for (k, v) in &self.fitted {
            let _ = write!(line, " {k}={v:.4e}");
        }
        line
    }

    /// CSV with the tolerances and fitted constants in header comments and
    /// one block per series, blocks separated by two blank lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment: {}", self.name);
        let _ = writeln!(out, "# {NORMALIZATION_NOTE}");
        let params = serde_json::to_string(&self.parameters).unwrap_or_default();
        let _ = writeln!(out, "# parameters: {params}");
        for (k, v) in &self.tolerances {
            let _ = writeln!(out, "# tolerance: {k}={v:e}");
        }
        for (k, v) in &self.fitted {
            let _ = writeln!(out, "# fitted: {k}={v:e}");
        }
        let _ = writeln!(out, "# pass: {}", self.pass);
        for (i, s) in self.series.iter().enumerate() {
            if i > 0 {
                out.push_str("\n\n");
            }
            let _ = writeln!(out, "# series: {}", s.name);
            let _ = writeln!(out, "{}", s.columns.join(","));
            for row in &s.rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let summary = Summary {
            name: &self.name,
            parameters: &self.parameters,
            fitted: &self.fitted,
            tolerances: &self.tolerances,
            pass: self.pass,
            notes: &self.notes,
            csv: format!("{}.csv", self.name),
        };
        serde_json::to_string_pretty(&summary).unwrap_or_default() + "\n"
    }

    /// gnuplot script plotting every column of every series against the
    /// first.
    pub fn plot_script(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "set datafile separator ','");
        let _ = writeln!(out, "set key outside");
        for (i, s) in self.series.iter().enumerate() {
            let _ = writeln!(out, "set title '{} / {}'", self.name, s.name);
            let _ = writeln!(out, "set xlabel '{}'", s.columns[0]);
            let plots: Vec<String> = (1..s.columns.len())
                .map(|c| {
                    format!("'{}.csv' index {i} every ::1 using 1:{} with linespoints title '{}'", self.name, c + 1, s.columns[c])
                })
                .collect();
            if !plots.is_empty() {
                let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
                let _ = writeln!(out, "pause -1");
            }
        }
        out
    }

    /// Writes `<name>.csv`, `<name>.json` and optionally `<name>.gp` into
    /// `dir`, each atomically.
    pub fn write(&self, dir: &Path, plot_script: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut files = vec![
            write_atomic(&dir.join(format!("{}.csv", self.name)), self.to_csv().as_bytes())?,
            write_atomic(&dir.join(format!("{}.json", self.name)), self.to_json().as_bytes())?,
        ];
        if plot_script {
            files.push(write_atomic(&dir.join(format!("{}.gp", self.name)), self.plot_script().as_bytes())?);
        }
        Ok(files)
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<PathBuf> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(path.to_path_buf())
}
