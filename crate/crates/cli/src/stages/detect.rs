use std::fs;
use std::path::Path;

use regex::Regex;
use stereosmell::smells::{
    default_rule_cards, detect_all, emit_ini, ini_file_name, parse_ini, parse_rule_cards, IniWarning, RuleCard, Smell,
    SmellCountTable, SmellSubject,
};

use super::scan::{read_methods, read_metrics};
use super::{data_err, read_projects, to_bytes};
use crate::workspace::{Comment, Workspace, INI_DIR, METHODS, METRICS, SMELLS};
use crate::{CliError, Config};

/// Every regular file of `dir`, in name order, concatenated.
fn load_cards(dir: &Path) -> Result<Vec<RuleCard>, CliError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("rule cards {}: {e}", dir.display())))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut text = String::new();
    for p in &paths {
        text.push_str(&fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?);
        text.push('\n');
    }
    parse_rule_cards(&text).map_err(|e| CliError::Config(format!("rule cards: {e}")))
}

pub fn run(ws: &Workspace, config: &Config, from_ini: Option<&Path>) -> Result<(), CliError> {
    let projects = read_projects(ws)?;
    let classes = read_metrics(&ws.read(METRICS, "scan")?)?;
    let table = match from_ini {
        Some(dir) => {
            let mut table = SmellCountTable::new();
            for c in &classes {
                table.ensure_row(&c.key, &c.class_name);
            }
            for p in &projects {
                let project_dir = dir.join(&p.key_prefix);
                let mut files = Vec::new();
                if project_dir.is_dir() {
                    let mut paths: Vec<_> = fs::read_dir(&project_dir)
                        .map_err(data_err)?
                        .filter_map(Result::ok)
                        .map(|e| e.path())
                        .filter(|p| p.extension().is_some_and(|x| x == "ini"))
                        .collect();
                    paths.sort();
                    for path in paths {
                        let text = fs::read_to_string(&path).map_err(data_err)?;
                        files.push((path.file_name().unwrap_or_default().to_string_lossy().into_owned(), text));
                    }
                }
                let pattern = Regex::new(&p.pattern).map_err(|e| CliError::Config(format!("{}: {e}", p.name)))?;
                let (parsed, warnings) = parse_ini(&files, &pattern).map_err(data_err)?;
                for IniWarning::PatternMatchesNothing { file } in warnings {
                    log::warn!("{}: pattern matches nothing in {file}", p.name);
                }
                for (key, smell, count) in parsed.triples() {
                    let name = parsed.row(&key).map(|r| r.class_name.clone()).unwrap_or_default();
                    table.ensure_row(&key, &name);
                    table.add(&key, smell, count);
                }
            }
            table
        }
        None => {
            let cards = match &config.rule_cards {
                Some(dir) => load_cards(dir)?,
                None => default_rule_cards(),
            };
            let mut methods = read_methods(&ws.read(METHODS, "scan")?)?;
            let subjects: Vec<SmellSubject> = classes
                .into_iter()
                .map(|c| SmellSubject {
                    methods: methods.remove(&c.key).unwrap_or_default(),
                    canonical_key: c.key,
                    class_name: c.class_name,
                    metrics: c.metrics,
                })
                .collect();
            let (table, detections) = detect_all(&cards, &subjects).map_err(|e| CliError::Config(e.to_string()))?;
            ws.remove_dir(INI_DIR)?;
            for p in &projects {
                let own: Vec<_> = detections
                    .iter()
                    .filter(|d| super::project_prefix_of(&d.canonical_key) == p.key_prefix)
                    .cloned()
                    .collect();
                for smell in Smell::ALL {
                    let rel = format!("{INI_DIR}/{}/{}", p.key_prefix, ini_file_name(&p.key_prefix, smell));
                    ws.write(&rel, Comment::Hash, emit_ini(smell, &own).as_bytes())?;
                }
            }
            table
        }
    };
    ws.write(SMELLS, Comment::Hash, &to_bytes(|buf| table.write_csv(buf))?)
}
