//! Class-level metrics consumed by rule cards and the feature extractor.

use serde::{Deserialize, Serialize};

use super::graph::TypeGraph;
use super::{body, lexer, ClassModel, MethodModel, ParseError, Visibility};

/// Methods at least this long (in code lines) count as long for
/// [`MetricVector::num_long_no_param_methods`].
pub const LONG_METHOD_LOC: usize = 60;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricVector {
    pub loc: usize,
    pub nom: usize,
    pub nof: usize,
    pub max_params: usize,
    pub avg_params: f64,
    #[serde(rename = "maxCC")]
    pub max_cc: usize,
    #[serde(rename = "totalCC")]
    pub total_cc: usize,
    #[serde(rename = "avgCC")]
    pub avg_cc: f64,
    pub lcom_fraction: f64,
    pub dit: usize,
    pub no_children: usize,
    pub num_interfaces: usize,
    pub num_public_instance_fields: usize,
    pub num_public_static_mutable_fields: usize,
    pub max_chain_length: usize,
    pub num_overridden: usize,
    pub num_accessors: usize,
    pub num_long_no_param_methods: usize,
    pub uses_foreign_globals: bool,
    pub references_derived_type: bool,
    pub is_abstract: bool,
    pub parent_loc: usize,
    pub max_method_loc: usize,
    /// `numOverridden` over the corpus-local parent's overridable method count.
    pub override_ratio: f64,
    /// `nom + nof`.
    pub member_count: usize,
}

/// The per-method values that per-method rule cards are evaluated against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodMetrics {
    pub name: String,
    pub params: usize,
    pub loc: usize,
    pub cyclomatic: usize,
    pub chain: usize,
}

impl From<&MethodModel> for MethodMetrics {
    fn from(m: &MethodModel) -> Self {
        Self {
            name: m.name.clone(),
            params: m.param_count,
            loc: m.loc,
            cyclomatic: m.cyclomatic,
            chain: m.max_chain_length,
        }
    }
}

/// Cyclomatic complexity of a method body given as source text (without
/// the enclosing braces).
pub fn cyclomatic(body_src: &str) -> Result<usize, ParseError> {
    Ok(body::analyze(&lexer::tokenize(body_src)?).cyclomatic)
}

/// Share of method pairs that touch no common own-class field.
pub fn lcom_fraction(methods: &[MethodModel]) -> f64 {
    let n = methods.len();
    if n < 2 {
        return 0.0;
    }
    let touched: Vec<Vec<&String>> = methods.iter().map(|m| m.touched_fields().collect()).collect();
    let mut disjoint = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if !touched[i].iter().any(|f| touched[j].contains(f)) {
                disjoint += 1;
            }
        }
    }
    disjoint as f64 / (n * (n - 1) / 2) as f64
}

fn overrides(method: &MethodModel, class: &ClassModel, graph: &TypeGraph) -> bool {
    if method.is_constructor || method.is_static {
        return false;
    }
    method.is_override
        || graph
            .ancestors(&class.canonical_key)
            .iter()
            .any(|a| a.overridable.contains(&(method.name.clone(), method.param_count)))
}

pub fn compute_metrics(class: &ClassModel, graph: &TypeGraph) -> MetricVector {
    let methods = &class.methods;
    let nom = methods.len();
    let param_sum: usize = methods.iter().map(|m| m.param_count).sum();
    let total_cc: usize = methods.iter().map(|m| m.cyclomatic).sum();
    let key = class.canonical_key.as_str();

    let num_overridden = methods.iter().filter(|m| overrides(m, class, graph)).count();
    let parent = graph.parent(key);
    let override_ratio = match parent {
        Some(p) if !p.overridable.is_empty() => num_overridden as f64 / p.overridable.len() as f64,
        _ => 0.0,
    };

    let uses_foreign_globals = methods.iter().any(|m| {
        m.qualified_accesses.iter().any(|(owner, member)| {
            graph
                .resolve(owner, key)
                .is_some_and(|target| target.public_static_mutable.contains(member))
        })
    });
    let references_derived_type = graph
        .descendants(key)
        .iter()
        .any(|d| class.referenced_names.contains(&d.name));

    MetricVector {
        loc: class.loc,
        nom,
        nof: class.fields.len(),
        max_params: methods.iter().map(|m| m.param_count).max().unwrap_or(0),
        avg_params: if nom == 0 { 0.0 } else { param_sum as f64 / nom as f64 },
        max_cc: methods.iter().map(|m| m.cyclomatic).max().unwrap_or(0),
        total_cc,
        avg_cc: if nom == 0 { 0.0 } else { total_cc as f64 / nom as f64 },
        lcom_fraction: lcom_fraction(methods),
        dit: graph.dit(key),
        no_children: graph.no_children(key),
        num_interfaces: class.implements_names.len(),
        num_public_instance_fields: class
            .fields
            .iter()
            .filter(|f| f.visibility == Visibility::Public && !f.is_static && !f.is_final)
            .count(),
        num_public_static_mutable_fields: class.fields.iter().filter(|f| f.is_public_static_mutable()).count(),
        max_chain_length: methods.iter().map(|m| m.max_chain_length).max().unwrap_or(0),
        num_overridden,
        num_accessors: methods.iter().filter(|m| m.is_getter() || m.is_setter()).count(),
        num_long_no_param_methods: methods
            .iter()
            .filter(|m| m.loc >= LONG_METHOD_LOC && m.param_count == 0)
            .count(),
        uses_foreign_globals,
        references_derived_type,
        is_abstract: class.is_abstract,
        parent_loc: parent.map(|p| p.loc).unwrap_or(0),
        max_method_loc: methods.iter().map(|m| m.loc).max().unwrap_or(0),
        override_ratio,
        member_count: nom + class.fields.len(),
    }
}
