use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use stereosmell::roles::{
    predict, read_features_csv, read_labels_csv, train as fit, write_predictions_csv, ForestModel, LabeledExample,
    TrainParams, FEATURE_NAMES,
};

use super::{data_err, to_bytes};
use crate::workspace::{read_json, write_json, Comment, Workspace, FEATURES, MODEL, ROLES};
use crate::{stage_seed, CliError, Config};

fn model_path(ws: &Workspace, config: &Config) -> PathBuf {
    config.model.clone().unwrap_or_else(|| ws.path(MODEL))
}

pub fn run(ws: &Workspace, config: &Config) -> Result<(), CliError> {
    let path = model_path(ws, config);
    if !path.is_file() {
        return Err(CliError::ModelNotFound(format!("no classifier model at {}; run `train` or pass --model", path.display())));
    }
    let model: ForestModel = read_json(&path)?;
    let features = read_features_csv(ws.read(FEATURES, "scan")?.as_bytes()).map_err(data_err)?;
    let rows = features
        .iter()
        .map(|(fv, _)| predict(&model, fv).map(|p| (fv.canonical_key.clone(), p)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    ws.write(ROLES, Comment::Hash, &to_bytes(|buf| write_predictions_csv(buf, &rows))?)
}

/// Labelled examples from either a full feature table or bare labels
/// joined with the scanned features.
fn examples(ws: &Workspace, labeled: &Path) -> Result<Vec<LabeledExample>, CliError> {
    let text = fs::read_to_string(labeled).map_err(|e| CliError::Config(format!("{}: {e}", labeled.display())))?;
    let has_features = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .is_some_and(|header| FEATURE_NAMES.iter().all(|f| header.split(',').any(|h| h.trim() == *f)));
    if has_features {
        let rows = read_features_csv(text.as_bytes()).map_err(data_err)?;
        return Ok(rows.into_iter().filter_map(|(features, label)| Some(LabeledExample { features, label: label? })).collect());
    }
    let labels: BTreeMap<String, _> = read_labels_csv(text.as_bytes()).map_err(data_err)?.into_iter().collect();
    let features = read_features_csv(ws.read(FEATURES, "scan")?.as_bytes()).map_err(data_err)?;
    let mut out = Vec::new();
    for (fv, _) in features {
        if let Some(&label) = labels.get(&fv.canonical_key) {
            out.push(LabeledExample { features: fv, label });
        }
    }
    if out.len() < labels.len() {
        log::warn!("{} labelled classes have no scanned features", labels.len() - out.len());
    }
    Ok(out)
}

pub fn train(
    ws: &Workspace,
    config: &Config,
    labeled: &Path,
    trees: usize,
    max_depth: Option<usize>,
    oversample: bool,
) -> Result<(), CliError> {
    let seed = stage_seed(config.require_seed("train")?, "train");
    if trees == 0 {
        return Err(CliError::Usage("--trees must be at least 1".into()));
    }
    let examples = examples(ws, labeled)?;
    let params = TrainParams { trees, max_depth, oversample, ..TrainParams::new(seed) };
    let (model, warnings) = fit(&examples, &params).map_err(data_err)?;
    for w in warnings {
        log::warn!("{w:?}");
    }
    write_json(&model_path(ws, config), MODEL, &model)
}
