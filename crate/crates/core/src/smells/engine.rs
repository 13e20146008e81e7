//! Rule-card evaluation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::card::{CardError, Level, Metric, Predicate, RuleCard};
use super::{class_name_of, Smell, SmellCountTable};
use crate::model::{ClassModel, MethodMetrics, MetricVector};

/// What a card is evaluated against: one class's metrics plus its methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmellSubject {
    pub canonical_key: String,
    pub class_name: String,
    pub metrics: MetricVector,
    pub methods: Vec<MethodMetrics>,
}

impl SmellSubject {
    pub fn from_class(class: &ClassModel, metrics: MetricVector) -> Self {
        Self {
            canonical_key: class.canonical_key.clone(),
            class_name: class.name.clone(),
            metrics,
            methods: class.methods.iter().map(MethodMetrics::from).collect(),
        }
    }
}

/// A metric comparison that held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub value: f64,
    pub level: String,
    pub threshold: f64,
}

/// One firing of a card: the whole class, or one offending method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Occurrence {
    pub method: Option<String>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmellDetection {
    pub canonical_key: String,
    pub smell: Smell,
    pub count: u32,
    pub occurrences: Vec<Occurrence>,
}

/// Splits an identifier into camel-case words: `HTTPRequestMaker` gives
/// `HTTP`, `Request`, `Maker`.
pub(crate) fn camel_words(name: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = name.char_indices().collect();
    let mut words = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &(pos, c)) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if let Some(s) = start.take() {
                words.push(&name[s..pos]);
            }
            continue;
        }
        let prev = i.checked_sub(1).map(|p| chars[p].1);
        let next = chars.get(i + 1).map(|&(_, n)| n);
        let boundary = match prev {
            Some(p) if p.is_alphanumeric() => {
                (c.is_uppercase() && (p.is_lowercase() || p.is_ascii_digit()))
                    || (c.is_uppercase() && p.is_uppercase() && next.is_some_and(char::is_lowercase))
            }
            _ => false,
        };
        if boundary {
            if let Some(s) = start {
                words.push(&name[s..pos]);
            }
            start = Some(pos);
        } else if start.is_none() {
            start = Some(pos);
        }
    }
    if let Some(s) = start {
        words.push(&name[s..]);
    }
    words
}

/// A lexicon entry matches a camel-case word that equals it, or, for entries
/// of four or more letters, starts with it (`Process` matches `Processor`).
fn lexicon_matches(patterns: &[String], class_name: &str) -> bool {
    let words = camel_words(class_name);
    patterns.iter().any(|p| {
        let p = p.to_lowercase();
        words.iter().any(|w| {
            let w = w.to_lowercase();
            w == p || (p.chars().count() >= 4 && w.starts_with(&p))
        })
    })
}

/// Evaluates `pred`; on success returns the metric comparisons that held.
fn eval(pred: &Predicate, mv: &MetricVector, class_name: &str) -> Option<Vec<Witness>> {
    match pred {
        Predicate::Metric {
            metric,
            label,
            level,
            threshold,
        } => {
            let value = metric.value(mv);
            level.holds(value, *threshold).then(|| {
                vec![Witness {
                    label: label.clone(),
                    value,
                    level: level.keyword().to_string(),
                    threshold: *threshold,
                }]
            })
        }
        Predicate::Struct { flag, expected } => (flag.value(mv) == *expected).then(Vec::new),
        Predicate::Lexicon(patterns) => lexicon_matches(patterns, class_name).then(Vec::new),
        Predicate::Inter(children) => {
            let mut all = Vec::new();
            for c in children {
                all.extend(eval(c, mv, class_name)?);
            }
            Some(all)
        }
        Predicate::Union(children) => {
            let mut any = None;
            for c in children {
                if let Some(w) = eval(c, mv, class_name) {
                    any.get_or_insert_with(Vec::new).extend(w);
                }
            }
            any
        }
    }
}

/// The class metrics with the per-method maxima replaced by one method's values.
fn method_overlay(mv: &MetricVector, m: &MethodMetrics) -> MetricVector {
    MetricVector {
        max_params: m.params,
        max_cc: m.cyclomatic,
        max_chain_length: m.chain,
        max_method_loc: m.loc,
        ..mv.clone()
    }
}

pub fn evaluate(card: &RuleCard, subject: &SmellSubject) -> Option<SmellDetection> {
    let mv = &subject.metrics;
    let name = if subject.class_name.is_empty() { class_name_of(&subject.canonical_key) } else { &subject.class_name };
    let class_level = eval(&card.rule, mv, name)?;
    let mut occurrences: Vec<Occurrence> = Vec::new();
    if card.smell.is_per_method() {
        for m in &subject.methods {
            if let Some(witnesses) = eval(&card.rule, &method_overlay(mv, m), name) {
                occurrences.push(Occurrence {
                    method: Some(m.name.clone()),
                    witnesses,
                });
            }
        }
    }
    if occurrences.is_empty() {
        occurrences.push(Occurrence {
            method: None,
            witnesses: class_level,
        });
    }
    Some(SmellDetection {
        canonical_key: subject.canonical_key.clone(),
        smell: card.smell,
        count: occurrences.len() as u32,
        occurrences,
    })
}

/// Runs every card over every subject. The table has one row per subject,
/// zero-filled when clean; detections come back sorted by key then smell.
pub fn detect_all(
    cards: &[RuleCard],
    subjects: &[SmellSubject],
) -> Result<(SmellCountTable, Vec<SmellDetection>), CardError> {
    let mut seen = BTreeSet::new();
    for card in cards {
        if !seen.insert(card.smell) {
            return Err(CardError::DuplicateCard(card.smell));
        }
    }
    let mut table = SmellCountTable::new();
    let mut detections = Vec::new();
    for s in subjects {
        table.ensure_row(&s.canonical_key, &s.class_name);
        for card in cards {
            if let Some(d) = evaluate(card, s) {
                table.add(&d.canonical_key, d.smell, d.count);
                detections.push(d);
            }
        }
    }
    detections.sort_by(|a, b| (&a.canonical_key, a.smell).cmp(&(&b.canonical_key, b.smell)));
    Ok((table, detections))
}

/// Raises every `VERY_HIGH` threshold of `card` by `delta`.
pub fn raise_very_high(card: &RuleCard, delta: f64) -> RuleCard {
    let mut out = card.clone();
    out.rule.for_each_metric_mut(&mut |_: Metric, level, threshold: &mut f64| {
        if level == Level::VeryHigh {
            *threshold += delta;
        }
    });
    out
}
