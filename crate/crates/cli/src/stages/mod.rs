pub mod analyze;
pub mod classify;
pub mod detect;
pub mod integrate;
pub mod mine;
pub mod scan;

use serde::{Deserialize, Serialize};
use stereosmell::dataset::{key_prefix, CorpusManifest, ProjectEntry, ProjectKind};

use crate::workspace::{Workspace, PROJECTS};
use crate::CliError;

pub(crate) fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

/// Runs a CSV writer into memory.
pub(crate) fn to_bytes<E: std::fmt::Display>(f: impl FnOnce(&mut Vec<u8>) -> Result<(), E>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(data_err)?;
    Ok(buf)
}

/// One line of `projects.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct ProjectRow {
    pub name: String,
    pub key_prefix: String,
    pub kind: ProjectKind,
    pub version: String,
    pub pattern: String,
    pub root: String,
    pub files: usize,
    pub classes: usize,
    pub loc: u64,
}

pub(crate) fn read_projects(ws: &Workspace) -> Result<Vec<ProjectRow>, CliError> {
    let text = ws.read(PROJECTS, "scan")?;
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>().map_err(data_err)
}

/// The manifest as recorded by the scan.
pub(crate) fn manifest_of(rows: &[ProjectRow]) -> CorpusManifest {
    CorpusManifest {
        projects: rows
            .iter()
            .map(|r| ProjectEntry {
                name: r.name.clone(),
                root: r.root.clone().into(),
                kind: r.kind,
                class_path_pattern: r.pattern.clone(),
                version: r.version.clone(),
            })
            .collect(),
    }
}

/// First key segment, as produced for scanned classes.
pub(crate) fn project_prefix_of(key: &str) -> &str {
    key.split('.').next().unwrap_or(key)
}

pub(crate) fn prefix_for(name: &str) -> String {
    key_prefix(name)
}
