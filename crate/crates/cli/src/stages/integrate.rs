use std::fs;
use std::path::Path;

use stereosmell::dataset::{filter_smelly, integrate, read_records_csv, tag_projects, write_records_csv, Integration};
use stereosmell::roles::read_labels_csv;
use stereosmell::smells::SmellCountTable;

use super::{data_err, manifest_of, read_projects, to_bytes};
use crate::workspace::{Comment, Workspace, PROJECTS, RECORDS, ROLES, SMELLS, UNMATCHED};
use crate::{CliError, Config};

pub fn run(ws: &Workspace, config: &Config, import: Option<&Path>) -> Result<(), CliError> {
    let mut integration = match import {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let records = read_records_csv(text.as_bytes()).map_err(data_err)?;
            Integration { records, unmatched: Vec::new() }
        }
        None => {
            let smells = SmellCountTable::read_csv(ws.read(SMELLS, "detect")?.as_bytes()).map_err(data_err)?;
            let roles = read_labels_csv(ws.read(ROLES, "classify")?.as_bytes()).map_err(data_err)?;
            integrate(&smells, &roles)
        }
    };
    if ws.exists(PROJECTS) {
        tag_projects(&mut integration.records, &manifest_of(&read_projects(ws)?));
    }
    if config.filter_smelly_only.unwrap_or(false) {
        integration.records = filter_smelly(&integration.records);
    }
    ws.write(RECORDS, Comment::Hash, &to_bytes(|buf| write_records_csv(buf, &integration.records))?)?;
    ws.write(UNMATCHED, Comment::Hash, integration.unmatched_report().as_bytes())
}
