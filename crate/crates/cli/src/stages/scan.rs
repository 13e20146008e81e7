use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use stereosmell::dataset::load_manifest;
use stereosmell::model::{build_type_graph, compute_metrics, full_class_path, parse_source, MethodMetrics, MetricVector, SourceUnit};
use stereosmell::roles::{extract_features, write_features_csv, FeatureVector, StereotypeLabel};
use stereosmell::smells::class_name_of;
use walkdir::WalkDir;

use super::{data_err, prefix_for, to_bytes, ProjectRow};
use crate::workspace::{Comment, Workspace, FEATURES, METHODS, METRICS, PROJECTS, SCAN_ERRORS};
use crate::{CliError, Config};

/// A scanned class as stored in `metrics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ScannedClass {
    pub key: String,
    pub class_name: String,
    pub project: String,
    pub metrics: MetricVector,
}

fn java_files(root: &Path) -> Vec<(String, std::path::PathBuf)> {
    WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "java"))
        .filter_map(|e| {
            let rel = e.path().strip_prefix(root).ok()?;
            let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            Some((rel, e.path().to_path_buf()))
        })
        .collect()
}

fn metric_columns() -> Vec<String> {
    match serde_json::to_value(MetricVector::default()) {
        Ok(serde_json::Value::Object(map)) => map.keys().cloned().collect(),
        _ => unreachable!("metric vectors serialize to objects"),
    }
}

pub(crate) fn write_metrics(classes: &[ScannedClass]) -> Result<Vec<u8>, CliError> {
    let columns = metric_columns();
    to_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        let mut header = vec!["FullClassPath".to_string(), "Classname".into(), "project".into()];
        header.extend(columns.iter().cloned());
        w.write_record(&header)?;
        for c in classes {
            let value = serde_json::to_value(&c.metrics).expect("metric vectors serialize");
            let mut rec = vec![full_class_path(&c.key), c.class_name.clone(), c.project.clone()];
            rec.extend(columns.iter().map(|k| value[k].to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)
    })
}

pub(crate) fn read_metrics(text: &str) -> Result<Vec<ScannedClass>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(data_err)?.clone();
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(data_err)?;
        let mut obj = serde_json::Map::new();
        for (h, v) in headers.iter().zip(rec.iter()).skip(3) {
            let value = serde_json::from_str(v).map_err(|e| CliError::Data(format!("metrics.csv: {h}: {e}")))?;
            obj.insert(h.to_string(), value);
        }
        let metrics = serde_json::from_value(obj.into()).map_err(|e| CliError::Data(format!("metrics.csv: {e}")))?;
        out.push(ScannedClass {
            key: stereosmell::model::key_from_class_path(&rec[0]).to_string(),
            class_name: rec[1].to_string(),
            project: rec[2].to_string(),
            metrics,
        });
    }
    Ok(out)
}

pub(crate) fn read_methods(text: &str) -> Result<BTreeMap<String, Vec<MethodMetrics>>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out: BTreeMap<String, Vec<MethodMetrics>> = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(data_err)?;
        let num = |i: usize| rec[i].parse::<usize>().map_err(|_| CliError::Data(format!("methods.csv: bad number '{}'", &rec[i])));
        let m = MethodMetrics { name: rec[1].to_string(), params: num(2)?, loc: num(3)?, cyclomatic: num(4)?, chain: num(5)? };
        out.entry(stereosmell::model::key_from_class_path(&rec[0]).to_string()).or_default().push(m);
    }
    Ok(out)
}

pub fn run(ws: &Workspace, config: &Config) -> Result<(), CliError> {
    let manifest_path = config.manifest.as_deref().ok_or_else(|| CliError::Usage("scan needs --manifest".into()))?;
    let text = fs::read_to_string(manifest_path)
        .map_err(|e| CliError::Config(format!("cannot read manifest {}: {e}", manifest_path.display())))?;
    let manifest = load_manifest(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let mut projects = Vec::new();
    let mut classes = Vec::new();
    let mut methods: Vec<(String, MethodMetrics)> = Vec::new();
    let mut features: Vec<(FeatureVector, Option<StereotypeLabel>)> = Vec::new();
    let mut errors = String::new();
    for p in &manifest.projects {
        let prefix = prefix_for(&p.name);
        let files = java_files(&base.join(&p.root));
        let mut units: Vec<SourceUnit> = Vec::new();
        for (rel, path) in &files {
            let bytes = fs::read(path).map_err(data_err)?;
            match parse_source(&String::from_utf8_lossy(&bytes), &format!("{prefix}/{rel}")) {
                Ok(u) => units.push(u),
                Err(e) => {
                    log::warn!("{}: {rel}: {e}", p.name);
                    errors.push_str(&format!("{}\t{rel}\t{e}\n", p.name));
                }
            }
        }
        let count: usize = units.iter().map(|u| u.types.len()).sum();
        if count == 0 {
            return Err(CliError::NoClasses(format!("project '{}' yields no classes under {}", p.name, p.root.display())));
        }
        let graph = build_type_graph(&units).map_err(|e| CliError::Data(format!("{}: {e}", p.name)))?;
        let mut loc = 0u64;
        for class in units.iter().flat_map(|u| &u.types) {
            let mv = compute_metrics(class, &graph);
            loc += class.loc as u64;
            features.push((extract_features(class, &mv), None));
            methods.extend(class.methods.iter().map(|m| (class.canonical_key.clone(), MethodMetrics::from(m))));
            classes.push(ScannedClass {
                key: class.canonical_key.clone(),
                class_name: class_name_of(&class.canonical_key).to_string(),
                project: p.name.clone(),
                metrics: mv,
            });
        }
        projects.push(ProjectRow {
            name: p.name.clone(),
            key_prefix: prefix,
            kind: p.kind,
            version: p.version.clone(),
            pattern: p.class_path_pattern.clone(),
            root: p.root.to_string_lossy().into_owned(),
            files: files.len(),
            classes: count,
            loc,
        });
    }
    classes.sort_by(|a, b| a.key.cmp(&b.key));
    features.sort_by(|a, b| a.0.canonical_key.cmp(&b.0.canonical_key));
    methods.sort_by(|a, b| a.0.cmp(&b.0));

    ws.write(PROJECTS, Comment::Hash, &to_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        for p in &projects {
            w.serialize(p)?;
        }
        w.flush().map_err(csv::Error::from)
    })?)?;
    ws.write(METRICS, Comment::Hash, &write_metrics(&classes)?)?;
    ws.write(METHODS, Comment::Hash, &to_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["FullClassPath", "method", "params", "loc", "cyclomatic", "chain"])?;
        for (key, m) in &methods {
            w.write_record([
                full_class_path(key),
                m.name.clone(),
                m.params.to_string(),
                m.loc.to_string(),
                m.cyclomatic.to_string(),
                m.chain.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)
    })?)?;
    ws.write(FEATURES, Comment::Hash, &to_bytes(|buf| write_features_csv(buf, &features))?)?;
    ws.write(SCAN_ERRORS, Comment::Hash, errors.as_bytes())?;
    Ok(())
}
