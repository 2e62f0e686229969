//! Check rows and their CSV/JSON serialization.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use loopax::mc::McEstimate;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub parameters: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    /// The pass rule in words, with the tolerance it applies.
    pub rule: String,
    pub stderr: Option<f64>,
    pub passed: bool,
}

impl CheckRow {
    /// `|value − reference| ≤ tolerance`.
    pub fn absolute(name: impl Into<String>, parameters: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            parameters: parameters.into(),
            value,
            reference,
            tolerance,
            rule: format!("|value - reference| <= {tolerance:e}"),
            stderr: None,
            passed: (value - reference).abs() <= tolerance,
        }
    }

    /// `|value − reference| ≤ tolerance · max(1, |reference|)`.
    pub fn relative(name: impl Into<String>, parameters: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let bound = tolerance * reference.abs().max(1.0);
        Self {
            rule: format!("|value - reference| <= {tolerance:e} * max(1, |reference|)"),
            passed: (value - reference).abs() <= bound,
            ..Self::absolute(name, parameters, value, reference, tolerance)
        }
    }

    /// A boolean property, reported as `1` (holds) against the reference `1`.
    pub fn holds(name: impl Into<String>, parameters: impl Into<String>, holds: bool) -> Self {
        Self { rule: "property holds (value = 1)".into(), ..Self::absolute(name, parameters, if holds { 1.0 } else { 0.0 }, 1.0, 0.0) }
    }

    /// Monte Carlo mean within `k` standard errors of a reference.
    pub fn within_sigmas(
        name: impl Into<String>,
        parameters: impl Into<String>,
        est: &McEstimate<f64>,
        reference: Complex64,
        k: f64,
    ) -> Self {
        let mut parameters = parameters.into();
        if est.mean.im != 0.0 || reference.im != 0.0 {
            parameters = format!("{parameters}; mean_im={:e}; reference_im={:e}", est.mean.im, reference.im);
        }
        Self {
            name: name.into(),
            parameters,
            value: est.mean.re,
            reference: reference.re,
            tolerance: k * est.stderr,
            rule: format!("|mean - reference| <= {k} * stderr (complex modulus)"),
            stderr: Some(est.stderr),
            passed: est.within_sigmas(reference, k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub cutoff: Option<usize>,
    pub version: String,
    pub sensitivity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub description: String,
    pub environment: Environment,
    pub rows: Vec<CheckRow>,
}

const CSV_HEADER: [&str; 8] = ["name", "parameters", "value", "reference", "tolerance", "rule", "stderr", "passed"];

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed).count()
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_csv(&self, out: impl Write) -> anyhow::Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes `<dir>/<experiment>.csv` and/or `.json`; both when `format` is `None`.
pub fn emit(report: &Report, dir: &Path, format: Option<Format>) -> anyhow::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    if format != Some(Format::Json) {
        let path = dir.join(format!("{}.csv", report.experiment));
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        report.write_csv(file)?;
        written.push(path);
    }
    if format != Some(Format::Csv) {
        let path = dir.join(format!("{}.json", report.experiment));
        std::fs::write(&path, report.to_json()? + "\n").with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: Vec<CheckRow>) -> Report {
        Report {
            experiment: "demo".into(),
            description: "demo".into(),
            environment: Environment { seed: 1, cutoff: Some(16), version: "0".into(), sensitivity: false },
            rows,
        }
    }

    #[test]
    fn empty_report_is_header_only_csv() {
        let mut buf = Vec::new();
        report(Vec::new()).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,parameters,value,reference,tolerance,rule,stderr,passed\n");
    }

    #[test]
    fn csv_has_one_line_per_row_and_json_round_trips() {
        let r = report(vec![
            CheckRow::absolute("a", "x=1", 0.5, 0.5, 1e-9),
            CheckRow::relative("b", "", 101.0, 100.0, 1e-3),
            CheckRow::holds("c", "", true),
        ]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
        assert_eq!(Report::from_json(&r.to_json().unwrap()).unwrap(), r);
        assert!(!r.passed());
        assert_eq!(r.failures(), 1);
    }
}
