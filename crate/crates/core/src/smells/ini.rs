//! Detection result files in the `.ini` layout of the SAD detector.
//!
//! Each occurrence of a smell becomes one numbered block, so a class with
//! two offending methods is listed twice and reads back with count 2.

use std::fmt::Write as _;
use std::path::Path;

use regex::Regex;
use thiserror::Error;

use super::engine::SmellDetection;
use super::{class_name_of, Smell, SmellCountTable};

const HEADER: &str = "# Results of the detection";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IniError {
    #[error("cannot infer a design smell from file name '{0}'")]
    UnknownSmellInFileName(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IniWarning {
    /// The file lists detections but the class-path pattern matched none of them.
    PatternMatchesNothing { file: String },
}

pub fn ini_file_name(project: &str, smell: Smell) -> String {
    format!("DetectionResults in {project} for {smell}.ini")
}

/// Pattern for project-prefixed dotted class paths, the generic form of
/// `k9mail[a-zA-Z0-9.-]+`.
pub fn default_class_pattern(project: &str) -> Regex {
    Regex::new(&format!("{}[A-Za-z0-9_.$-]*", regex::escape(project))).expect("escaped pattern is valid")
}

fn number(v: f64) -> String {
    format!("{v:?}")
}

fn bound_suffix(level: &str) -> &'static str {
    match level {
        "LOW" | "VERY_LOW" => "MinBound",
        "EQUAL" => "Equals",
        _ => "MaxBound",
    }
}

/// Renders the detections of one smell. Blocks are numbered from 0 in the
/// order given.
pub fn emit_ini(smell: Smell, detections: &[SmellDetection]) -> String {
    let mut out = format!("{HEADER}\n");
    let class_rule = format!("{smell}Class");
    let mut n = 0usize;
    for d in detections.iter().filter(|d| d.smell == smell) {
        for occ in &d.occurrences {
            let prefix = format!("{n}.100.{class_rule}-0");
            let _ = write!(out, "\n# ------>{smell} num: {n}\n\n{n}.100.Name = {smell}\n\n#{class_rule}\n");
            let _ = writeln!(out, "{prefix} = {}", d.canonical_key);
            for w in &occ.witnesses {
                let bound = format!("{}_{}", w.label, bound_suffix(&w.level));
                let _ = writeln!(out, "{prefix}.{}-0 = {}", w.label, number(w.value));
                let _ = writeln!(out, "{prefix}.{bound}-0 = {{{bound}={}}}", number(w.threshold));
            }
            n += 1;
        }
    }
    out
}

fn smell_from_file_name(name: &str) -> Option<Smell> {
    let base = Path::new(name).file_name()?.to_str()?;
    let stem = base.strip_suffix(".ini")?;
    let (_, smell) = stem.rsplit_once(" for ")?;
    smell.trim().parse().ok()
}

/// Counts, per class and smell, how often `pattern` matches the values of
/// the class lines of each file.
pub fn parse_ini(
    files: &[(String, String)],
    pattern: &Regex,
) -> Result<(SmellCountTable, Vec<IniWarning>), IniError> {
    let mut table = SmellCountTable::new();
    let mut warnings = Vec::new();
    for (name, text) in files {
        let smell = smell_from_file_name(name).ok_or_else(|| IniError::UnknownSmellInFileName(name.clone()))?;
        let mut blocks = 0usize;
        let mut matched = 0usize;
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else { continue };
            let key = key.trim();
            if key.ends_with(".Name") {
                blocks += 1;
                continue;
            }
            // class lines are `<n>.100.<Rule>-<i>`; witness lines have a fourth segment
            if key.split('.').count() != 3 {
                continue;
            }
            for m in pattern.find_iter(value.trim()) {
                let class_key = m.as_str();
                table.ensure_row(class_key, class_name_of(class_key));
                table.add(class_key, smell, 1);
                matched += 1;
            }
        }
        if blocks > 0 && matched == 0 {
            warnings.push(IniWarning::PatternMatchesNothing { file: name.clone() });
        }
    }
    Ok((table, warnings))
}
