use std::collections::{BTreeMap, BTreeSet};
use std::io;

use serde::Serialize;

use super::MiningError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemSet {
    /// Sorted, without duplicates.
    pub items: Vec<String>,
    /// Number of transactions containing every item.
    pub count: usize,
    pub support: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationRule {
    pub antecedent: Vec<String>,
    pub consequent: String,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

fn frequent(count: usize, n: usize, min_support: f64) -> bool {
    // tolerance keeps e.g. 1/20 >= 0.05 despite binary rounding
    count as f64 / n as f64 >= min_support - 1e-12
}

/// Levelwise frequent-itemset search. Output is ordered by size, then items.
pub fn apriori(transactions: &[BTreeSet<String>], min_support: f64) -> Result<Vec<ItemSet>, MiningError> {
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(MiningError::BadSupport(min_support));
    }
    if transactions.is_empty() {
        return Err(MiningError::EmptyTransactions);
    }
    let n = transactions.len();
    let support_of = |items: &[String]| transactions.iter().filter(|t| items.iter().all(|i| t.contains(i))).count();

    let mut singles: BTreeMap<&str, usize> = BTreeMap::new();
    for t in transactions {
        for i in t {
            *singles.entry(i).or_default() += 1;
        }
    }
    let mut level: Vec<Vec<String>> =
        singles.into_iter().filter(|&(_, c)| frequent(c, n, min_support)).map(|(i, _)| vec![i.to_string()]).collect();
    let mut out = Vec::new();
    while !level.is_empty() {
        for items in &level {
            let count = support_of(items);
            out.push(ItemSet { items: items.clone(), count, support: count as f64 / n as f64 });
        }
        let known: BTreeSet<&Vec<String>> = level.iter().collect();
        let mut next = Vec::new();
        // join sets sharing all but the last item, then prune by downward closure
        for (a, x) in level.iter().enumerate() {
            for y in &level[a + 1..] {
                if x[..x.len() - 1] != y[..y.len() - 1] {
                    continue;
                }
                let mut cand = x.clone();
                cand.push(y[y.len() - 1].clone());
                let closed = (0..cand.len()).all(|skip| {
                    let sub: Vec<String> = cand.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, s)| s.clone()).collect();
                    known.contains(&sub)
                });
                if closed && frequent(support_of(&cand), n, min_support) {
                    next.push(cand);
                }
            }
        }
        next.sort();
        level = next;
    }
    Ok(out)
}

/// Rules `X -> y` with one consequent item, drawn from the frequent itemsets.
///
/// `consequents` restricts `y`. Sorted by confidence, then support (both
/// descending), then antecedent and consequent.
pub fn rules(itemsets: &[ItemSet], consequents: Option<&BTreeSet<String>>) -> Result<Vec<AssociationRule>, MiningError> {
    let by_items: BTreeMap<&[String], &ItemSet> = itemsets.iter().map(|s| (s.items.as_slice(), s)).collect();
    let lookup = |items: &[String]| -> Result<f64, MiningError> {
        by_items.get(items).map(|s| s.support).ok_or_else(|| MiningError::MissingSubsetSupport(items.to_vec()))
    };
    let mut out = Vec::new();
    for set in itemsets.iter().filter(|s| s.items.len() >= 2) {
        for (k, y) in set.items.iter().enumerate() {
            if consequents.is_some_and(|c| !c.contains(y)) {
                continue;
            }
            let x: Vec<String> = set.items.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, s)| s.clone()).collect();
            let confidence = set.support / lookup(&x)?;
            let lift = confidence / lookup(std::slice::from_ref(y))?;
            out.push(AssociationRule { antecedent: x, consequent: y.clone(), support: set.support, confidence, lift });
        }
    }
    out.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then(b.support.total_cmp(&a.support))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
    Ok(out)
}

pub fn write_rules_csv<W: io::Write>(out: W, rules: &[AssociationRule]) -> Result<(), MiningError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["antecedent", "consequent", "support", "confidence", "lift"])?;
    for r in rules {
        w.write_record([
            r.antecedent.join(" & "),
            r.consequent.clone(),
            format!("{:.4}", r.support),
            format!("{:.4}", r.confidence),
            format!("{:.4}", r.lift),
        ])?;
    }
    w.flush()?;
    Ok(())
}
