//! Structural model of Java source files.
//!
//! A [`SourceUnit`] holds one [`ClassModel`] per top-level type of a file.
//! Nested, inner and anonymous types are folded into the enclosing
//! top-level type: their fields and methods become members of the outer
//! model, so one record exists per file-level type.

mod body;
pub mod graph;
pub mod lexer;
pub mod metrics;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use graph::{build_type_graph, GraphError, TypeGraph};
pub use metrics::{compute_metrics, cyclomatic, MethodMetrics, MetricVector};
pub use parser::parse_source;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: u32, column: u32, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyError {
    #[error("not a Java source file: {0}")]
    NotJavaSource(String),
    #[error("empty source path")]
    EmptyPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Protected,
    Package,
    Private,
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Visibility::Public => "public",
            Visibility::Protected => "protected",
            Visibility::Package => "package",
            Visibility::Private => "private",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldModel {
    pub name: String,
    pub visibility: Visibility,
    pub is_static: bool,
    pub is_final: bool,
    pub type_name: String,
    pub has_getter: bool,
    pub has_setter: bool,
}

impl FieldModel {
    /// Public and assignable: the "global variable" shape.
    pub fn is_public_static_mutable(&self) -> bool {
        self.visibility == Visibility::Public && self.is_static && !self.is_final
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodModel {
    pub name: String,
    pub param_count: usize,
    /// `None` for constructors.
    pub return_type: Option<String>,
    pub loc: usize,
    pub cyclomatic: usize,
    pub is_static: bool,
    pub is_abstract: bool,
    pub is_override: bool,
    pub is_constructor: bool,
    pub visibility: Visibility,
    pub invoked_names: Vec<String>,
    pub max_chain_length: usize,
    pub reads_fields: BTreeSet<String>,
    pub writes_fields: BTreeSet<String>,
    pub conditionals: usize,
    pub loops: usize,
    pub returns: usize,
    /// `Type.member` accesses that are not invocations, e.g. `Config.DEBUG`.
    pub qualified_accesses: BTreeSet<(String, String)>,
}

impl MethodModel {
    pub fn is_getter(&self) -> bool {
        if self.param_count != 0 || self.is_static || self.is_constructor {
            return false;
        }
        let returns_value = self.return_type.as_deref().is_some_and(|t| t != "void");
        returns_value && (accessor_suffix(&self.name, "get").is_some() || accessor_suffix(&self.name, "is").is_some())
    }

    pub fn is_setter(&self) -> bool {
        self.param_count == 1
            && !self.is_static
            && !self.is_constructor
            && accessor_suffix(&self.name, "set").is_some()
    }

    /// The property name this accessor exposes, lower-camel-cased.
    pub fn accessed_property(&self) -> Option<String> {
        let suffix = if self.is_getter() {
            accessor_suffix(&self.name, "get").or_else(|| accessor_suffix(&self.name, "is"))
        } else if self.is_setter() {
            accessor_suffix(&self.name, "set")
        } else {
            None
        }?;
        let mut chars = suffix.chars();
        let first = chars.next()?;
        Some(first.to_lowercase().chain(chars).collect())
    }

    pub fn touched_fields(&self) -> impl Iterator<Item = &String> {
        self.reads_fields.union(&self.writes_fields)
    }
}

fn accessor_suffix<'a>(name: &'a str, prefix: &str) -> Option<&'a str> {
    let rest = name.strip_prefix(prefix)?;
    rest.chars().next().filter(|c| c.is_uppercase() || *c == '_').map(|_| rest)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassModel {
    pub name: String,
    pub canonical_key: String,
    pub kind: TypeKind,
    pub is_abstract: bool,
    pub extends_name: Option<String>,
    pub implements_names: Vec<String>,
    pub fields: Vec<FieldModel>,
    pub methods: Vec<MethodModel>,
    pub loc: usize,
    /// Every identifier mentioned inside the declaration except its own name.
    pub referenced_names: BTreeSet<String>,
}

impl ClassModel {
    /// Package part of the canonical key (everything before the last segment).
    pub fn package_prefix(&self) -> &str {
        let key = self.canonical_key.split('$').next().unwrap_or(&self.canonical_key);
        key.rsplit_once('.').map(|(p, _)| p).unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceUnit {
    pub path: String,
    pub types: Vec<ClassModel>,
}

/// Dotted, extension-less form of a project-relative path:
/// `src/a/B.java` becomes `src.a.B`.
pub fn canonical_key(path: &str) -> Result<String, KeyError> {
    let normalized = path.replace('\\', "/");
    let trimmed = normalized.trim_start_matches("./").trim_matches('/');
    if trimmed.is_empty() {
        return Err(KeyError::EmptyPath);
    }
    let stem = trimmed
        .strip_suffix(".java")
        .ok_or_else(|| KeyError::NotJavaSource(path.to_string()))?;
    if stem.is_empty() || stem.ends_with('/') {
        return Err(KeyError::NotJavaSource(path.to_string()));
    }
    Ok(stem.split('/').filter(|s| !s.is_empty()).collect::<Vec<_>>().join("."))
}

/// Table-style class path: canonical key with `.java` re-appended.
pub fn full_class_path(key: &str) -> String {
    format!("{key}.java")
}

/// Inverse of [`full_class_path`]; tolerates keys without the extension.
pub fn key_from_class_path(path: &str) -> &str {
    path.strip_suffix(".java").unwrap_or(path)
}
