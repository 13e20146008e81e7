//! Corpus-wide inheritance graph.
//!
//! Supertype names are resolved by simple name against the corpus. When
//! several corpus types share a simple name, the one whose package shares
//! the longest dotted prefix with the referencing type wins; remaining ties
//! go to the smallest canonical key. Names that resolve to nothing are
//! kept as external supertypes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{ClassModel, SourceUnit, TypeKind, Visibility};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("inheritance cycle through {0:?}")]
    Cycle(Vec<String>),
    #[error("duplicate canonical key {0}")]
    DuplicateKey(String),
}

/// Per-type facts other types' metrics depend on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub key: String,
    pub name: String,
    pub kind: TypeKind,
    pub loc: usize,
    /// `(name, arity)` of non-private, non-static, non-constructor methods.
    pub overridable: BTreeSet<(String, usize)>,
    pub public_static_mutable: BTreeSet<String>,
}

#[derive(Debug, Clone, Default)]
pub struct TypeGraph {
    nodes: Vec<NodeInfo>,
    index: HashMap<String, usize>,
    by_name: HashMap<String, Vec<usize>>,
    parent: Vec<Option<usize>>,
    interfaces: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    extends_edges: Vec<(usize, usize)>,
    implements_edges: Vec<(usize, usize)>,
    external: BTreeMap<String, Vec<String>>,
}

fn common_prefix_segments(a: &str, b: &str) -> usize {
    a.split('.')
        .zip(b.split('.'))
        .take_while(|(x, y)| x == y)
        .count()
}

fn package_of(key: &str) -> &str {
    let key = key.split('$').next().unwrap_or(key);
    key.rsplit_once('.').map(|(p, _)| p).unwrap_or("")
}

impl TypeGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Canonical keys in sorted order.
    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.key.as_str())
    }

    pub fn node(&self, key: &str) -> Option<&NodeInfo> {
        self.index.get(key).map(|&i| &self.nodes[i])
    }

    pub fn extends_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.extends_edges
            .iter()
            .map(|&(c, p)| (self.nodes[c].key.as_str(), self.nodes[p].key.as_str()))
    }

    pub fn implements_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.implements_edges
            .iter()
            .map(|&(c, p)| (self.nodes[c].key.as_str(), self.nodes[p].key.as_str()))
    }

    /// Supertype names of `key` that did not resolve inside the corpus.
    pub fn external_supertypes(&self, key: &str) -> &[String] {
        self.external.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parent(&self, key: &str) -> Option<&NodeInfo> {
        let i = *self.index.get(key)?;
        self.parent[i].map(|p| &self.nodes[p])
    }

    /// Length of the corpus-local `extends` chain starting at `key`.
    pub fn dit(&self, key: &str) -> usize {
        let Some(&start) = self.index.get(key) else { return 0 };
        let mut depth = 0;
        let mut cur = start;
        while let Some(p) = self.parent[cur] {
            depth += 1;
            cur = p;
        }
        depth
    }

    /// Direct subtypes through either `extends` or `implements` edges.
    pub fn no_children(&self, key: &str) -> usize {
        self.index.get(key).map(|&i| self.children[i].len()).unwrap_or(0)
    }

    /// Corpus-local ancestors along `extends`, nearest first.
    pub fn ancestors(&self, key: &str) -> Vec<&NodeInfo> {
        let mut out = Vec::new();
        let Some(&start) = self.index.get(key) else { return out };
        let mut cur = start;
        while let Some(p) = self.parent[cur] {
            out.push(&self.nodes[p]);
            cur = p;
        }
        out
    }

    /// Transitive subtypes of `key` (any edge kind), sorted by key.
    pub fn descendants(&self, key: &str) -> Vec<&NodeInfo> {
        let Some(&start) = self.index.get(key) else { return Vec::new() };
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            for &c in &self.children[n] {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen.remove(&start);
        seen.into_iter().map(|i| &self.nodes[i]).collect()
    }

    /// Resolves a (possibly qualified) type name as seen from `from_key`.
    pub fn resolve(&self, name: &str, from_key: &str) -> Option<&NodeInfo> {
        self.resolve_index(name, from_key).map(|i| &self.nodes[i])
    }

    fn resolve_index(&self, name: &str, from_key: &str) -> Option<usize> {
        let bare = name.trim_end_matches("[]");
        let simple = bare.rsplit('.').next()?;
        let candidates = self.by_name.get(simple)?;
        let qualified = bare.contains('.');
        let from_pkg = package_of(from_key);
        candidates
            .iter()
            .copied()
            .filter(|&c| self.nodes[c].key != from_key)
            .filter(|&c| !qualified || self.nodes[c].key.ends_with(&format!(".{bare}")) || self.nodes[c].key == bare)
            .max_by(|&a, &b| {
                let pa = common_prefix_segments(package_of(&self.nodes[a].key), from_pkg);
                let pb = common_prefix_segments(package_of(&self.nodes[b].key), from_pkg);
                // larger prefix wins; on ties the smaller key wins
                pa.cmp(&pb).then_with(|| self.nodes[b].key.cmp(&self.nodes[a].key))
            })
    }
}

fn node_info(class: &ClassModel) -> NodeInfo {
    NodeInfo {
        key: class.canonical_key.clone(),
        name: class.name.clone(),
        kind: class.kind,
        loc: class.loc,
        overridable: class
            .methods
            .iter()
            .filter(|m| !m.is_constructor && !m.is_static && m.visibility != Visibility::Private)
            .map(|m| (m.name.clone(), m.param_count))
            .collect(),
        public_static_mutable: class
            .fields
            .iter()
            .filter(|f| f.is_public_static_mutable())
            .map(|f| f.name.clone())
            .collect(),
    }
}

pub fn build_type_graph(units: &[SourceUnit]) -> Result<TypeGraph, GraphError> {
    let mut classes: Vec<&ClassModel> = units.iter().flat_map(|u| u.types.iter()).collect();
    classes.sort_by(|a, b| a.canonical_key.cmp(&b.canonical_key));
    if let Some(w) = classes.windows(2).find(|w| w[0].canonical_key == w[1].canonical_key) {
        return Err(GraphError::DuplicateKey(w[0].canonical_key.clone()));
    }

    let mut graph = TypeGraph {
        nodes: classes.iter().map(|c| node_info(c)).collect(),
        ..TypeGraph::default()
    };
    for (i, n) in graph.nodes.iter().enumerate() {
        graph.index.insert(n.key.clone(), i);
        graph.by_name.entry(n.name.clone()).or_default().push(i);
    }
    let n = graph.nodes.len();
    graph.parent = vec![None; n];
    graph.interfaces = vec![Vec::new(); n];
    graph.children = vec![Vec::new(); n];

    for (i, class) in classes.iter().enumerate() {
        if let Some(sup) = &class.extends_name {
            match graph.resolve_index(sup, &class.canonical_key) {
                Some(p) => {
                    graph.parent[i] = Some(p);
                    graph.extends_edges.push((i, p));
                    graph.children[p].push(i);
                }
                None => graph.external.entry(class.canonical_key.clone()).or_default().push(sup.clone()),
            }
        }
        for iface in &class.implements_names {
            match graph.resolve_index(iface, &class.canonical_key) {
                Some(p) => {
                    if !graph.interfaces[i].contains(&p) {
                        graph.interfaces[i].push(p);
                        graph.implements_edges.push((i, p));
                        graph.children[p].push(i);
                    }
                }
                None => graph.external.entry(class.canonical_key.clone()).or_default().push(iface.clone()),
            }
        }
    }

    // extends edges form a forest iff following parents never revisits a node
    let mut state = vec![0u8; n]; // 0 unvisited, 1 on current path, 2 done
    for start in 0..n {
        let mut path: Vec<usize> = Vec::new();
        let mut cur = Some(start);
        while let Some(c) = cur {
            match state[c] {
                2 => break,
                1 => {
                    let from = path.iter().position(|&p| p == c).unwrap_or(0);
                    return Err(GraphError::Cycle(
                        path[from..].iter().map(|&p| graph.nodes[p].key.clone()).collect(),
                    ));
                }
                _ => {
                    state[c] = 1;
                    path.push(c);
                    cur = graph.parent[c];
                }
            }
        }
        for p in path {
            state[p] = 2;
        }
    }
    Ok(graph)
}
