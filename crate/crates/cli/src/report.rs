//! Structured text reports.
//!
//! A report is a line-oriented document: a provenance header followed by
//! named sections (scalars, labeled vectors, labeled matrices, permutation
//! tests). Numbers are rendered with 12 significant digits in a canonical
//! shortest form, so parsing a report and re-serializing it reproduces the
//! bytes exactly and golden files diff cleanly.

use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::CliError;

const HEADER: &str = "diadem report v1";
const SIG_DIGITS: usize = 12;

/// Canonical 12-significant-digit rendering (the `%g` family: fixed
/// notation for moderate exponents, scientific otherwise, trailing zeros
/// trimmed).
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let neg = x < 0.0;
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x.abs());
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    debug_assert_eq!(digits.len(), SIG_DIGITS);

    let body = if exp >= -4 && exp < SIG_DIGITS as i32 {
        if exp >= 0 {
            let ip = exp as usize + 1;
            let frac = digits[ip..].trim_end_matches('0');
            if frac.is_empty() {
                digits[..ip].to_string()
            } else {
                format!("{}.{frac}", &digits[..ip])
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            let joined = format!("{zeros}{digits}");
            format!("0.{}", joined.trim_end_matches('0'))
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{}e{exp}", &digits[..1])
        } else {
            format!("{}.{frac}e{exp}", &digits[..1])
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(sha256_hex(&bytes))
}

/// A permutation-test block of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSection {
    pub name: String,
    pub observed: f64,
    pub p_value: f64,
    pub n_perm: usize,
    pub seed: u64,
    pub permuted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Scalar {
        name: String,
        value: f64,
    },
    Vector {
        name: String,
        entries: Vec<(String, f64)>,
    },
    Matrix {
        name: String,
        cols: Vec<String>,
        rows: Vec<(String, Vec<f64>)>,
    },
    Test(TestSection),
}

/// Method-tagged result bundle with provenance; serializes losslessly.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub method: String,
    pub config_sha256: String,
    pub inputs: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub sections: Vec<Section>,
}

impl AnalysisReport {
    pub fn new(method: &str, config_sha256: String) -> Self {
        Self {
            method: method.to_string(),
            config_sha256,
            inputs: Vec::new(),
            warnings: Vec::new(),
            sections: Vec::new(),
        }
    }

    pub fn push_scalar(&mut self, name: &str, value: f64) {
        self.sections.push(Section::Scalar {
            name: name.to_string(),
            value,
        });
    }

    pub fn push_vector(&mut self, name: &str, entries: Vec<(String, f64)>) {
        self.sections.push(Section::Vector {
            name: name.to_string(),
            entries,
        });
    }

    pub fn push_matrix(
        &mut self,
        name: &str,
        cols: Vec<String>,
        rows: Vec<(String, Vec<f64>)>,
    ) {
        self.sections.push(Section::Matrix {
            name: name.to_string(),
            cols,
            rows,
        });
    }

    pub fn push_test(&mut self, test: TestSection) {
        self.sections.push(Section::Test(test));
    }

    pub fn matrices(&self) -> impl Iterator<Item = (&str, &[String], &[(String, Vec<f64>)])> {
        self.sections.iter().filter_map(|s| match s {
            Section::Matrix { name, cols, rows } => Some((name.as_str(), &cols[..], &rows[..])),
            _ => None,
        })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        out.push_str(&format!("method = {}\n", self.method));
        out.push_str(&format!("config_sha256 = {}\n", self.config_sha256));
        for (name, digest) in &self.inputs {
            out.push_str(&format!("input {name} = {digest}\n"));
        }
        for warning in &self.warnings {
            out.push_str(&format!("warning = {warning}\n"));
        }
        for section in &self.sections {
            out.push('\n');
            match section {
                Section::Scalar { name, value } => {
                    out.push_str(&format!("[scalar {name}]\n{}\n", fmt_g(*value)));
                }
                Section::Vector { name, entries } => {
                    out.push_str(&format!("[vector {name}]\n"));
                    for (label, value) in entries {
                        out.push_str(&format!("{label} = {}\n", fmt_g(*value)));
                    }
                }
                Section::Matrix { name, cols, rows } => {
                    out.push_str(&format!("[matrix {name}]\n"));
                    out.push_str(&format!("cols = {}\n", cols.join(",")));
                    for (label, values) in rows {
                        let rendered: Vec<String> = values.iter().map(|v| fmt_g(*v)).collect();
                        out.push_str(&format!("{label} = {}\n", rendered.join(",")));
                    }
                }
                Section::Test(t) => {
                    out.push_str(&format!("[test {}]\n", t.name));
                    out.push_str(&format!("observed = {}\n", fmt_g(t.observed)));
                    out.push_str(&format!("p_value = {}\n", fmt_g(t.p_value)));
                    out.push_str(&format!("n_perm = {}\n", t.n_perm));
                    out.push_str(&format!("seed = {}\n", t.seed));
                    let rendered: Vec<String> = t.permuted.iter().map(|v| fmt_g(*v)).collect();
                    out.push_str(&format!("permuted = {}\n", rendered.join(",")));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<AnalysisReport, CliError> {
        let bad = |line: usize, reason: &str| CliError::Parse {
            file: "report".into(),
            line,
            reason: reason.into(),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l == HEADER => {}
            _ => return Err(bad(1, "missing report header")),
        }
        let mut report = AnalysisReport::new("", String::new());
        let mut current: Option<Section> = None;

        fn flush(report: &mut AnalysisReport, current: &mut Option<Section>) {
            if let Some(section) = current.take() {
                report.sections.push(section);
            }
        }

        for (i, raw) in lines {
            let line_no = i + 1;
            let line = raw.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                flush(&mut report, &mut current);
                let rest = rest
                    .strip_suffix(']')
                    .ok_or_else(|| bad(line_no, "unterminated section header"))?;
                let (kind, name) = rest
                    .split_once(' ')
                    .ok_or_else(|| bad(line_no, "section header needs a name"))?;
                current = Some(match kind {
                    "scalar" => Section::Scalar {
                        name: name.to_string(),
                        value: f64::NAN,
                    },
                    "vector" => Section::Vector {
                        name: name.to_string(),
                        entries: Vec::new(),
                    },
                    "matrix" => Section::Matrix {
                        name: name.to_string(),
                        cols: Vec::new(),
                        rows: Vec::new(),
                    },
                    "test" => Section::Test(TestSection {
                        name: name.to_string(),
                        observed: f64::NAN,
                        p_value: f64::NAN,
                        n_perm: 0,
                        seed: 0,
                        permuted: Vec::new(),
                    }),
                    other => return Err(bad(line_no, &format!("unknown section `{other}`"))),
                });
                continue;
            }
            match &mut current {
                None => {
                    // header key = value
                    let (key, value) = line
                        .split_once(" = ")
                        .ok_or_else(|| bad(line_no, "expected `key = value`"))?;
                    if key == "method" {
                        report.method = value.to_string();
                    } else if key == "config_sha256" {
                        report.config_sha256 = value.to_string();
                    } else if key == "warning" {
                        report.warnings.push(value.to_string());
                    } else if let Some(name) = key.strip_prefix("input ") {
                        report.inputs.push((name.to_string(), value.to_string()));
                    } else {
                        return Err(bad(line_no, &format!("unknown header key `{key}`")));
                    }
                }
                Some(Section::Scalar { value, .. }) => {
                    *value = line
                        .parse()
                        .map_err(|_| bad(line_no, "scalar is not a number"))?;
                }
                Some(Section::Vector { entries, .. }) => {
                    let (label, value) = line
                        .split_once(" = ")
                        .ok_or_else(|| bad(line_no, "expected `label = value`"))?;
                    let value = value
                        .parse()
                        .map_err(|_| bad(line_no, "vector entry is not a number"))?;
                    entries.push((label.to_string(), value));
                }
                Some(Section::Matrix { cols, rows, .. }) => {
                    let (label, value) = line
                        .split_once(" = ")
                        .ok_or_else(|| bad(line_no, "expected `label = values`"))?;
                    if label == "cols" && cols.is_empty() {
                        *cols = value.split(',').map(str::to_string).collect();
                    } else {
                        let parsed: Result<Vec<f64>, _> =
                            value.split(',').map(str::parse).collect();
                        rows.push((
                            label.to_string(),
                            parsed.map_err(|_| bad(line_no, "matrix row is not numeric"))?,
                        ));
                    }
                }
                Some(Section::Test(t)) => {
                    let (key, value) = line
                        .split_once(" = ")
                        .ok_or_else(|| bad(line_no, "expected `key = value`"))?;
                    match key {
                        "observed" => {
                            t.observed =
                                value.parse().map_err(|_| bad(line_no, "bad observed"))?
                        }
                        "p_value" => {
                            t.p_value = value.parse().map_err(|_| bad(line_no, "bad p_value"))?
                        }
                        "n_perm" => {
                            t.n_perm = value.parse().map_err(|_| bad(line_no, "bad n_perm"))?
                        }
                        "seed" => t.seed = value.parse().map_err(|_| bad(line_no, "bad seed"))?,
                        "permuted" => {
                            let parsed: Result<Vec<f64>, _> =
                                value.split(',').map(str::parse).collect();
                            t.permuted =
                                parsed.map_err(|_| bad(line_no, "bad permuted values"))?;
                        }
                        other => return Err(bad(line_no, &format!("unknown test key `{other}`"))),
                    }
                }
            }
        }
        flush(&mut report, &mut current);
        Ok(report)
    }
}
