//! Corpus manifest, the smell/role join and the per-class record table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::path::PathBuf;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{full_class_path, key_from_class_path};
use crate::roles::StereotypeLabel;
use crate::smells::{class_name_of, default_class_pattern, Smell, SmellCountTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectKind {
    Desktop,
    Mobile,
}

impl ProjectKind {
    pub const ALL: [ProjectKind; 2] = [ProjectKind::Desktop, ProjectKind::Mobile];

    pub fn name(self) -> &'static str {
        match self {
            ProjectKind::Desktop => "desktop",
            ProjectKind::Mobile => "mobile",
        }
    }
}

impl fmt::Display for ProjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProjectKind {
    type Err = ManifestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "desktop" => Ok(ProjectKind::Desktop),
            "mobile" => Ok(ProjectKind::Mobile),
            _ => Err(ManifestError::BadKind(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("duplicate project '{0}'")]
    DuplicateProject(String),
    #[error("project kind must be desktop or mobile, got '{0}'")]
    BadKind(String),
    #[error("project '{project}': bad class path pattern: {source}")]
    BadPattern { project: String, source: regex::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectEntry {
    pub name: String,
    pub root: PathBuf,
    pub kind: ProjectKind,
    pub class_path_pattern: String,
    pub version: String,
}

impl ProjectEntry {
    /// First segment of every canonical key from this project: the name with
    /// characters outside `[A-Za-z0-9_-]` replaced by `-`.
    pub fn key_prefix(&self) -> String {
        key_prefix(&self.name)
    }

    pub fn pattern(&self) -> Regex {
        Regex::new(&self.class_path_pattern).expect("validated when the manifest was loaded")
    }
}

pub fn key_prefix(project: &str) -> String {
    project
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '-' })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    pub projects: Vec<ProjectEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default, rename = "project")]
    projects: Vec<RawProject>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProject {
    name: String,
    root: PathBuf,
    kind: String,
    pattern: Option<String>,
    #[serde(default)]
    version: String,
}

/// Parses a manifest of `[[project]]` tables with `name`, `root`, `kind`
/// and optional `pattern` and `version`.
pub fn load_manifest(text: &str) -> Result<CorpusManifest, ManifestError> {
    let raw: RawManifest = toml::from_str(text)?;
    let mut seen = BTreeSet::new();
    let mut projects = Vec::new();
    for p in raw.projects {
        if !seen.insert(p.name.clone()) {
            return Err(ManifestError::DuplicateProject(p.name));
        }
        let kind = p.kind.parse()?;
        let class_path_pattern = match p.pattern {
            Some(pat) => {
                Regex::new(&pat).map_err(|source| ManifestError::BadPattern {
                    project: p.name.clone(),
                    source,
                })?;
                pat
            }
            None => default_class_pattern(&key_prefix(&p.name)).as_str().to_string(),
        };
        projects.push(ProjectEntry {
            name: p.name,
            root: p.root,
            kind,
            class_path_pattern,
            version: p.version,
        });
    }
    Ok(CorpusManifest { projects })
}

impl CorpusManifest {
    pub fn get(&self, name: &str) -> Option<&ProjectEntry> {
        self.projects.iter().find(|p| p.name == name)
    }

    /// The project whose key prefix is the first segment of `key`.
    pub fn project_of(&self, key: &str) -> Option<&ProjectEntry> {
        let first = key.split('.').next()?;
        self.projects.iter().find(|p| p.key_prefix() == first)
    }

    pub fn count(&self, kind: ProjectKind) -> usize {
        self.projects.iter().filter(|p| p.kind == kind).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineGrainedRecord {
    pub canonical_key: String,
    pub class_name: String,
    pub project: String,
    pub kind: Option<ProjectKind>,
    pub label: StereotypeLabel,
    /// Indexed by [`Smell::index`].
    pub counts: [u32; 18],
}

impl FineGrainedRecord {
    pub fn count(&self, smell: Smell) -> u32 {
        self.counts[smell.index()]
    }

    pub fn is_smelly(&self) -> bool {
        self.counts.iter().any(|&c| c > 0)
    }

    pub fn smells(&self) -> impl Iterator<Item = Smell> + '_ {
        Smell::ALL.into_iter().filter(|s| self.counts[s.index()] > 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Unmatched {
    SmellsOnly,
    RolesOnly,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Integration {
    pub records: Vec<FineGrainedRecord>,
    /// Keys present on one side only, sorted by key.
    pub unmatched: Vec<(String, Unmatched)>,
}

impl Integration {
    /// One `<side>\t<FullClassPath>` line per unmatched key.
    pub fn unmatched_report(&self) -> String {
        self.unmatched
            .iter()
            .map(|(k, side)| {
                let side = match side {
                    Unmatched::SmellsOnly => "smells-only",
                    Unmatched::RolesOnly => "roles-only",
                };
                format!("{side}\t{}\n", full_class_path(k))
            })
            .collect()
    }
}

/// Inner join on canonical key. Zero-smell classes are kept. `project`
/// defaults to the key's first segment and `kind` is left unset; see
/// [`tag_projects`].
pub fn integrate(smells: &SmellCountTable, roles: &[(String, StereotypeLabel)]) -> Integration {
    let mut labels: BTreeMap<&str, StereotypeLabel> = BTreeMap::new();
    for (key, label) in roles {
        if let Some(prev) = labels.insert(key.as_str(), *label) {
            if prev != *label {
                log::warn!("conflicting labels for {key}; keeping {label}");
            }
        }
    }
    let mut out = Integration::default();
    for (key, row) in smells.rows() {
        match labels.get(key) {
            Some(&label) => out.records.push(FineGrainedRecord {
                canonical_key: key.to_string(),
                class_name: row.class_name.clone(),
                project: key.split('.').next().unwrap_or_default().to_string(),
                kind: None,
                label,
                counts: row.counts,
            }),
            None => out.unmatched.push((key.to_string(), Unmatched::SmellsOnly)),
        }
    }
    for key in labels.keys() {
        if smells.row(key).is_none() {
            out.unmatched.push((key.to_string(), Unmatched::RolesOnly));
        }
    }
    out.unmatched.sort();
    out
}

/// Fills `project` and `kind` from the manifest entry owning each key.
pub fn tag_projects(records: &mut [FineGrainedRecord], manifest: &CorpusManifest) {
    for r in records {
        if let Some(p) = manifest.project_of(&r.canonical_key) {
            r.project = p.name.clone();
            r.kind = Some(p.kind);
        }
    }
}

pub fn filter_smelly(records: &[FineGrainedRecord]) -> Vec<FineGrainedRecord> {
    records.iter().filter(|r| r.is_smelly()).cloned().collect()
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
}

/// Writes `FullClassPath, Classname, label, <18 smells>, project, kind`.
pub fn write_records_csv<W: io::Write>(out: W, records: &[FineGrainedRecord]) -> Result<(), RecordError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["FullClassPath", "Classname", "label"];
    header.extend(Smell::CSV_ORDER.iter().map(|s| s.name()));
    header.extend(["project", "kind"]);
    w.write_record(&header)?;
    for r in records {
        let mut rec = vec![full_class_path(&r.canonical_key), r.class_name.clone(), r.label.display_name().to_string()];
        rec.extend(Smell::CSV_ORDER.iter().map(|s| r.count(*s).to_string()));
        rec.push(r.project.clone());
        rec.push(r.kind.map(|k| k.name().to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a record table; columns are matched by name, `Classname`,
/// `project` and `kind` are optional.
pub fn read_records_csv<R: io::Read>(input: R) -> Result<Vec<FineGrainedRecord>, RecordError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = r.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let need = |name: &str| find(name).ok_or_else(|| RecordError::SchemaMismatch(format!("missing column {name}")));
    let path_col = need("FullClassPath")?;
    let label_col = need("label")?;
    let smell_cols: Vec<(Smell, usize)> = Smell::ALL
        .into_iter()
        .map(|s| need(s.name()).map(|c| (s, c)))
        .collect::<Result<_, _>>()?;
    let (name_col, project_col, kind_col) = (find("Classname"), find("project"), find("kind"));

    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |m: String| RecordError::SchemaMismatch(format!("line {line}: {m}"));
        let canonical_key = key_from_class_path(rec[path_col].trim()).to_string();
        let mut counts = [0u32; 18];
        for &(smell, c) in &smell_cols {
            counts[smell.index()] = rec[c].trim().parse().map_err(|_| bad(format!("bad count '{}'", &rec[c])))?;
        }
        let label = rec[label_col].trim().parse().map_err(|e: crate::roles::UnknownLabel| bad(e.to_string()))?;
        let kind = match kind_col.map(|c| rec[c].trim()) {
            Some(k) if !k.is_empty() => Some(k.parse().map_err(|e: ManifestError| bad(e.to_string()))?),
            _ => None,
        };
        out.push(FineGrainedRecord {
            class_name: name_col.map_or_else(|| class_name_of(&canonical_key).to_string(), |c| rec[c].to_string()),
            project: project_col.map_or_else(
                || canonical_key.split('.').next().unwrap_or_default().to_string(),
                |c| rec[c].to_string(),
            ),
            canonical_key,
            kind,
            label,
            counts,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CORPUS_PROJECTS: &str = include_str!("../tests/data/corpus_projects.toml");

    #[test]
    fn single_project() {
        let m = load_manifest("[[project]]\nname = \"jpass\"\nroot = \"corpus/jpass\"\nkind = \"desktop\"\n").unwrap();
        assert_eq!(m.projects.len(), 1);
        assert_eq!(m.projects[0].kind, ProjectKind::Desktop);
        assert_eq!(m.projects[0].class_path_pattern, "jpass[A-Za-z0-9_.$-]*");
    }

    #[test]
    fn duplicate_and_bad_kind() {
        let dup = "[[project]]\nname = \"a\"\nroot = \"x\"\nkind = \"mobile\"\n[[project]]\nname = \"a\"\nroot = \"y\"\nkind = \"mobile\"\n";
        assert!(matches!(load_manifest(dup), Err(ManifestError::DuplicateProject(n)) if n == "a"));
        let bad = "[[project]]\nname = \"a\"\nroot = \"x\"\nkind = \"web\"\n";
        assert!(matches!(load_manifest(bad), Err(ManifestError::BadKind(_))));
    }

    #[test]
    fn published_corpus_manifest() {
        let m = load_manifest(CORPUS_PROJECTS).unwrap();
        assert_eq!(m.projects.len(), 30);
        assert_eq!((m.count(ProjectKind::Desktop), m.count(ProjectKind::Mobile)), (15, 15));
        assert_eq!(m.get("K9 Mail").unwrap().version, "5.600");
        assert_eq!(m.get("Mars Simulation").unwrap().key_prefix(), "Mars-Simulation");
    }

    fn smell_table(rows: &[(&str, &[(Smell, u32)])]) -> SmellCountTable {
        let mut t = SmellCountTable::new();
        for (key, cells) in rows {
            t.ensure_row(key, class_name_of(key));
            for &(s, c) in *cells {
                t.add(key, s, c);
            }
        }
        t
    }

    #[test]
    fn auth_type_joins() {
        let key = "k9mail-library.src.main.java.com.fsck.k9.mail.AuthType";
        let smells = smell_table(&[(key, &[(Smell::Blob, 3), (Smell::LongMethod, 1)])]);
        let roles = vec![(key.to_string(), "Service Provider".parse().unwrap())];
        let out = integrate(&smells, &roles);
        assert_eq!(out.records.len(), 1);
        let r = &out.records[0];
        assert_eq!((r.label, r.count(Smell::Blob), r.class_name.as_str()), (StereotypeLabel::ServiceProvider, 3, "AuthType"));

        let mut buf = Vec::new();
        write_records_csv(&mut buf, &out.records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("FullClassPath,Classname,label,Blob,LongMethod,LazyClass,"));
        assert!(text.contains(&format!("{key}.java,AuthType,Service Provider,3,1,0,")));
    }

    #[test]
    fn one_sided_keys_are_reported() {
        let smells = smell_table(&[("p.A", &[]), ("p.B", &[(Smell::Blob, 1)])]);
        let roles = vec![("p.A".to_string(), StereotypeLabel::Controller), ("p.C".to_string(), StereotypeLabel::Coordinator)];
        let out = integrate(&smells, &roles);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].canonical_key, "p.A");
        assert_eq!(out.unmatched, [("p.B".into(), Unmatched::SmellsOnly), ("p.C".into(), Unmatched::RolesOnly)]);
        assert_eq!(out.unmatched_report(), "smells-only\tp.B.java\nroles-only\tp.C.java\n");
    }

    #[test]
    fn five_keys_three_overlaps() {
        let smells = smell_table(&[("p.A", &[]), ("p.B", &[]), ("p.C", &[]), ("p.D", &[]), ("p.E", &[])]);
        let roles: Vec<_> = ["p.B", "p.D", "p.E", "p.Z"]
            .iter()
            .map(|k| (k.to_string(), StereotypeLabel::Interfacer))
            .collect();
        assert_eq!(integrate(&smells, &roles).records.len(), 3);
    }

    #[test]
    fn tagging_and_filter() {
        let m = load_manifest("[[project]]\nname = \"Angry IP\"\nroot = \"a\"\nkind = \"desktop\"\n").unwrap();
        let smells = smell_table(&[("Angry-IP.src.Scan", &[(Smell::Blob, 1)]), ("Angry-IP.src.Ok", &[])]);
        let roles = vec![
            ("Angry-IP.src.Scan".to_string(), StereotypeLabel::Controller),
            ("Angry-IP.src.Ok".to_string(), StereotypeLabel::Structurer),
        ];
        let mut records = integrate(&smells, &roles).records;
        tag_projects(&mut records, &m);
        assert!(records.iter().all(|r| r.project == "Angry IP" && r.kind == Some(ProjectKind::Desktop)));
        let smelly = filter_smelly(&records);
        assert_eq!(smelly.len(), 1);
        assert_eq!(smelly[0].class_name, "Scan");
    }

    #[test]
    fn empty_records_are_header_only() {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(read_records_csv(&buf[..]).unwrap().is_empty());
    }

    #[test]
    fn missing_column_is_schema_mismatch() {
        let text = "FullClassPath,Classname,label,Blob\np.A.java,A,Controller,1\n";
        assert!(matches!(read_records_csv(text.as_bytes()), Err(RecordError::SchemaMismatch(_))));
    }

    #[test]
    fn tolerant_import_without_optional_columns() {
        let mut header = vec!["label".to_string(), "FullClassPath".to_string()];
        header.extend(Smell::ALL.iter().map(|s| s.name().to_string()));
        let mut row = vec!["IH".to_string(), "proj.src.Bean.java".to_string()];
        row.extend((0..18).map(|i| (i % 2).to_string()));
        let text = format!("{}\n{}\n", header.join(","), row.join(","));
        let r = &read_records_csv(text.as_bytes()).unwrap()[0];
        assert_eq!((r.class_name.as_str(), r.project.as_str(), r.kind), ("Bean", "proj", None));
        assert_eq!(r.label, StereotypeLabel::InformationHolder);
        assert_eq!(r.count(Smell::BaseClassKnowsDerivedClass), 1);
    }

    fn arb_record() -> impl Strategy<Value = FineGrainedRecord> {
        (
            "[a-z]{1,5}(\\.[A-Z][a-z]{0,6}){1,3}",
            0usize..6,
            proptest::option::of(prop_oneof![Just(ProjectKind::Desktop), Just(ProjectKind::Mobile)]),
            proptest::array::uniform18(0u32..5),
        )
            .prop_map(|(key, label, kind, counts)| FineGrainedRecord {
                class_name: class_name_of(&key).to_string(),
                project: key.split('.').next().unwrap().to_string(),
                canonical_key: key,
                kind,
                label: StereotypeLabel::ALL[label],
                counts,
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(records in proptest::collection::vec(arb_record(), 0..10)) {
            let mut buf = Vec::new();
            write_records_csv(&mut buf, &records).unwrap();
            prop_assert_eq!(read_records_csv(&buf[..]).unwrap(), records);
        }

        #[test]
        fn join_size_and_symmetry(
            a in proptest::collection::btree_set("[a-d]\\.[A-D]", 0..10),
            b in proptest::collection::btree_set("[a-d]\\.[A-D]", 0..10),
        ) {
            let table = |keys: &BTreeSet<String>| {
                let mut t = SmellCountTable::new();
                for k in keys { t.ensure_row(k, class_name_of(k)); }
                t
            };
            let labels = |keys: &BTreeSet<String>| keys.iter().map(|k| (k.clone(), StereotypeLabel::Coordinator)).collect::<Vec<_>>();
            let ab: Vec<String> = integrate(&table(&a), &labels(&b)).records.into_iter().map(|r| r.canonical_key).collect();
            let ba: Vec<String> = integrate(&table(&b), &labels(&a)).records.into_iter().map(|r| r.canonical_key).collect();
            prop_assert_eq!(ab.len(), a.intersection(&b).count());
            prop_assert_eq!(ab, ba);
        }
    }
}
