//! Role-stereotype features and classification.

mod eval;
mod forest;

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{evaluate, scores, Evaluation, LabelScores};
pub use forest::{feature_order_hash, predict, train, ForestError, ForestModel, Node, Prediction, TrainParams, TrainWarning};

use crate::model::{full_class_path, key_from_class_path, ClassModel, MetricVector, Visibility};

/// The six role stereotypes, in tie-breaking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StereotypeLabel {
    Coordinator,
    Structurer,
    Controller,
    InformationHolder,
    Interfacer,
    ServiceProvider,
}

impl StereotypeLabel {
    pub const ALL: [StereotypeLabel; 6] = [
        StereotypeLabel::Coordinator,
        StereotypeLabel::Structurer,
        StereotypeLabel::Controller,
        StereotypeLabel::InformationHolder,
        StereotypeLabel::Interfacer,
        StereotypeLabel::ServiceProvider,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Spelling with a space, as in "Service Provider".
    pub fn display_name(self) -> &'static str {
        match self {
            StereotypeLabel::Coordinator => "Coordinator",
            StereotypeLabel::Structurer => "Structurer",
            StereotypeLabel::Controller => "Controller",
            StereotypeLabel::InformationHolder => "Information Holder",
            StereotypeLabel::Interfacer => "Interfacer",
            StereotypeLabel::ServiceProvider => "Service Provider",
        }
    }

    pub fn abbreviation(self) -> &'static str {
        match self {
            StereotypeLabel::Coordinator => "CO",
            StereotypeLabel::Structurer => "ST",
            StereotypeLabel::Controller => "CT",
            StereotypeLabel::InformationHolder => "IH",
            StereotypeLabel::Interfacer => "IT",
            StereotypeLabel::ServiceProvider => "SP",
        }
    }
}

impl fmt::Display for StereotypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown role stereotype '{0}'")]
pub struct UnknownLabel(pub String);

impl FromStr for StereotypeLabel {
    type Err = UnknownLabel;

    /// Accepts "Service Provider", "ServiceProvider", "service_provider" or "SP".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squashed: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        StereotypeLabel::ALL
            .into_iter()
            .find(|l| {
                let full: String = l.display_name().chars().filter(|c| !c.is_whitespace()).collect();
                squashed == full.to_lowercase() || squashed == l.abbreviation().to_lowercase()
            })
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

pub const NUM_FEATURES: usize = 23;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "loc",
    "nom",
    "numAttr",
    "numPublicMethods",
    "numPrivateAttrs",
    "numStaticMethods",
    "numStaticAttrs",
    "numGetters",
    "numSetters",
    "avgParams",
    "maxParams",
    "totalCC",
    "avgCC",
    "numInvocations",
    "numDistinctInvokedNames",
    "numConditionals",
    "numLoops",
    "numReturns",
    "dit",
    "numInterfaces",
    "isAbstract",
    "accessorRatio",
    "numOverridden",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub canonical_key: String,
    pub values: [f64; NUM_FEATURES],
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub label: StereotypeLabel,
}

pub fn extract_features(class: &ClassModel, mv: &MetricVector) -> FeatureVector {
    let methods = &class.methods;
    let count = |pred: &dyn Fn(&crate::model::MethodModel) -> bool| methods.iter().filter(|m| pred(m)).count() as f64;
    let getters = count(&|m| m.is_getter());
    let setters = count(&|m| m.is_setter());
    let invoked: Vec<&String> = methods.iter().flat_map(|m| m.invoked_names.iter()).collect();
    let mut distinct = invoked.clone();
    distinct.sort();
    distinct.dedup();
    let nom = mv.nom as f64;

    let values = [
        mv.loc as f64,
        nom,
        mv.nof as f64,
        count(&|m| m.visibility == Visibility::Public),
        class.fields.iter().filter(|f| f.visibility == Visibility::Private).count() as f64,
        count(&|m| m.is_static),
        class.fields.iter().filter(|f| f.is_static).count() as f64,
        getters,
        setters,
        mv.avg_params,
        mv.max_params as f64,
        mv.total_cc as f64,
        mv.avg_cc,
        invoked.len() as f64,
        distinct.len() as f64,
        methods.iter().map(|m| m.conditionals).sum::<usize>() as f64,
        methods.iter().map(|m| m.loops).sum::<usize>() as f64,
        methods.iter().map(|m| m.returns).sum::<usize>() as f64,
        mv.dit as f64,
        mv.num_interfaces as f64,
        if mv.is_abstract { 1.0 } else { 0.0 },
        if nom == 0.0 { 0.0 } else { (getters + setters) / nom },
        mv.num_overridden as f64,
    ];
    FeatureVector {
        canonical_key: class.canonical_key.clone(),
        values,
    }
}

#[derive(Debug, Error)]
pub enum RoleDataError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    BadValue { line: u64, message: String },
}

/// Writes `FullClassPath, Classname, <23 features>` and, when labels are
/// given, a trailing `label` column.
pub fn write_features_csv<W: io::Write>(
    out: W,
    rows: &[(FeatureVector, Option<StereotypeLabel>)],
) -> Result<(), RoleDataError> {
    let labeled = rows.iter().any(|(_, l)| l.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["FullClassPath", "Classname"];
    header.extend(FEATURE_NAMES);
    if labeled {
        header.push("label");
    }
    w.write_record(&header)?;
    for (fv, label) in rows {
        let mut rec = vec![
            full_class_path(&fv.canonical_key),
            crate::smells::class_name_of(&fv.canonical_key).to_string(),
        ];
        rec.extend(fv.values.iter().map(|v| v.to_string()));
        if labeled {
            rec.push(label.map(|l| l.display_name().to_string()).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a feature table; the `label` column is optional. Columns are
/// matched by name.
pub fn read_features_csv<R: io::Read>(input: R) -> Result<Vec<(FeatureVector, Option<StereotypeLabel>)>, RoleDataError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = r.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let path_col = find("FullClassPath").ok_or_else(|| RoleDataError::MissingColumn("FullClassPath".into()))?;
    let feature_cols: Vec<usize> = FEATURE_NAMES
        .iter()
        .map(|n| find(n).ok_or_else(|| RoleDataError::MissingColumn(n.to_string())))
        .collect::<Result<_, _>>()?;
    let label_col = find("label");
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| RoleDataError::BadValue { line, message };
        let mut values = [0.0f64; NUM_FEATURES];
        for (v, &c) in values.iter_mut().zip(&feature_cols) {
            *v = rec[c].trim().parse().map_err(|_| bad(format!("bad number '{}'", &rec[c])))?;
            if !v.is_finite() {
                return Err(bad(format!("non-finite value '{}'", &rec[c])));
            }
        }
        let label = match label_col.map(|c| rec[c].trim()) {
            Some(s) if !s.is_empty() => Some(s.parse::<StereotypeLabel>().map_err(|e| bad(e.to_string()))?),
            _ => None,
        };
        let fv = FeatureVector {
            canonical_key: key_from_class_path(rec[path_col].trim()).to_string(),
            values,
        };
        out.push((fv, label));
    }
    Ok(out)
}

/// Writes `FullClassPath, label, p0..p5`.
pub fn write_predictions_csv<W: io::Write>(out: W, rows: &[(String, Prediction)]) -> Result<(), RoleDataError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["FullClassPath", "label", "p0", "p1", "p2", "p3", "p4", "p5"])?;
    for (key, p) in rows {
        let mut rec = vec![full_class_path(key), p.label.display_name().to_string()];
        rec.extend(p.probabilities.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `FullClassPath, label` pairs, ignoring any other column.
pub fn read_labels_csv<R: io::Read>(input: R) -> Result<Vec<(String, StereotypeLabel)>, RoleDataError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| RoleDataError::MissingColumn(name.into()))
    };
    let (path_col, label_col) = (find("FullClassPath")?, find("label")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let label = rec[label_col]
            .trim()
            .parse()
            .map_err(|e: UnknownLabel| RoleDataError::BadValue { line, message: e.to_string() })?;
        out.push((key_from_class_path(rec[path_col].trim()).to_string(), label));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_type_graph, compute_metrics, parse_source};

    fn features_of(src: &str, path: &str) -> FeatureVector {
        let unit = parse_source(src, path).unwrap();
        let graph = build_type_graph(std::slice::from_ref(&unit)).unwrap();
        let class = &unit.types[0];
        extract_features(class, &compute_metrics(class, &graph))
    }

    #[test]
    fn label_spellings() {
        for l in StereotypeLabel::ALL {
            assert_eq!(l.display_name().parse::<StereotypeLabel>().unwrap(), l);
            assert_eq!(l.abbreviation().parse::<StereotypeLabel>().unwrap(), l);
            assert_eq!(format!("{l:?}").parse::<StereotypeLabel>().unwrap(), l);
        }
        assert!("Manager".parse::<StereotypeLabel>().is_err());
    }

    #[test]
    fn empty_class_features() {
        let fv = features_of("class E {}", "E.java");
        assert_eq!(fv.values[0], 1.0);
        assert!(fv.values[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn auth_type_shape() {
        let src = "package com.fsck.k9.mail;

public enum AuthType {
    PLAIN,
    CRAM_MD5,
    EXTERNAL,
    XOAUTH2,
    AUTOMATIC,
    LOGIN;

    public static AuthType parse(String value) {
        if (value == null) {
            return null;
        }
        for (AuthType type : values()) {
            if (type.name().equalsIgnoreCase(value)) {
                return type;
            }
        }
        if (value.equals(\"CRAM-MD5\")) {
            return CRAM_MD5;
        }
        if (value.equals(\"XOAUTH\")) {
            return XOAUTH2;
        }
        return null;
    }

    public boolean isSecure() {
        switch (this) {
            case CRAM_MD5: case EXTERNAL:
                return true;
            default:
                return false;
        }
    }
}
";
        let fv = features_of(src, "k9mail-library/src/main/java/com/fsck/k9/mail/AuthType.java");
        assert_eq!(fv.values[0], 33.0);
        assert_eq!(fv.values[2], 6.0);
        assert_eq!(fv.get("numStaticAttrs"), Some(6.0));
        assert_eq!(fv.get("numStaticMethods"), Some(1.0));
    }

    #[test]
    fn accessor_ratio() {
        let src = "class Bean {
            int a; int b; int c; int d;
            int getA() { return a; } int getB() { return b; } boolean isC() { return c > 0; } int getD() { return d; }
            void setA(int v) { a = v; } void setB(int v) { b = v; }
            void reset() {} void run() {} int size() { return 4; } void clear(int x) {}
        }";
        let fv = features_of(src, "Bean.java");
        assert_eq!(fv.get("numGetters"), Some(4.0));
        assert_eq!(fv.get("numSetters"), Some(2.0));
        assert_eq!(fv.get("accessorRatio"), Some(0.6));
    }

    #[test]
    fn body_counts() {
        let src = "class W { int go(int n) { if (n > 0) { for (int i = 0; i < n; i++) { log(i); log(n); } } while (n-- > 0) tick(); return n; } }";
        let fv = features_of(src, "W.java");
        assert_eq!(fv.get("numInvocations"), Some(3.0));
        assert_eq!(fv.get("numDistinctInvokedNames"), Some(2.0));
        assert_eq!(fv.get("numConditionals"), Some(1.0));
        assert_eq!(fv.get("numLoops"), Some(2.0));
        assert_eq!(fv.get("numReturns"), Some(1.0));
    }

    #[test]
    fn csv_round_trip() {
        let mut fv = FeatureVector {
            canonical_key: "p.src.A".into(),
            values: [0.0; NUM_FEATURES],
        };
        fv.values[0] = 33.0;
        fv.values[21] = 0.6;
        let rows = vec![(fv.clone(), Some(StereotypeLabel::InformationHolder))];
        let mut buf = Vec::new();
        write_features_csv(&mut buf, &rows).unwrap();
        assert!(String::from_utf8_lossy(&buf).contains("p.src.A.java,A,33,"));
        assert_eq!(read_features_csv(&buf[..]).unwrap(), rows);
        assert_eq!(read_labels_csv(&buf[..]).unwrap(), [("p.src.A".to_string(), StereotypeLabel::InformationHolder)]);
    }
}
