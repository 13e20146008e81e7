//! Clustering, dendrograms and association rules over binary smell data.

mod apriori;
mod dendrogram;
mod popc;

use std::collections::BTreeSet;
use std::io;

use thiserror::Error;

pub use apriori::{apriori, rules, write_rules_csv, AssociationRule, ItemSet};
pub use dendrogram::{agglomerate, jaccard, DendrogramNode, Distance, Linkage};
pub use popc::{kmeans_init, popc, popc_observed, popc_score, presence_by_group, write_clusters_csv, ClusterAssignment, Move, PopcParams};

use crate::dataset::FineGrainedRecord;
use crate::smells::{Smell, SmellCountTable};

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("at least two samples are needed")]
    TooFewSamples,
    #[error("at least two rows are needed")]
    TooFewRows,
    #[error("no transactions")]
    EmptyTransactions,
    #[error("minimum support must lie in (0, 1], got {0}")]
    BadSupport(f64),
    #[error("support of {0:?} is missing from the itemsets")]
    MissingSubsetSupport(Vec<String>),
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Samples by features, each cell 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: Vec<String>,
    columns: Vec<String>,
    cells: Vec<Vec<bool>>,
}

fn check_unique(labels: &[String]) -> Result<(), MiningError> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(MiningError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

impl BinaryMatrix {
    pub fn new(rows: Vec<String>, columns: Vec<String>, cells: Vec<Vec<bool>>) -> Result<Self, MiningError> {
        check_unique(&rows)?;
        check_unique(&columns)?;
        if cells.len() != rows.len() {
            return Err(MiningError::Ragged { row: cells.len(), found: 0, expected: columns.len() });
        }
        for (row, c) in cells.iter().enumerate() {
            if c.len() != columns.len() {
                return Err(MiningError::Ragged { row, found: c.len(), expected: columns.len() });
            }
        }
        Ok(BinaryMatrix { rows, columns, cells })
    }

    /// Rows labelled `0..n` and columns `f0..`; handy for fixtures.
    pub fn from_bits(cells: Vec<Vec<bool>>) -> Result<Self, MiningError> {
        let width = cells.first().map_or(0, Vec::len);
        let rows = (0..cells.len()).map(|i| i.to_string()).collect();
        let columns = (0..width).map(|j| format!("f{j}")).collect();
        Self::new(rows, columns, cells)
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, column: usize) -> bool {
        self.cells[row][column]
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.cells[row]
    }

    /// Indices of the set cells of a row.
    pub fn ones(&self, row: usize) -> Vec<usize> {
        self.cells[row].iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect()
    }

    pub fn column_total(&self, column: usize) -> usize {
        self.cells.iter().filter(|r| r[column]).count()
    }
}

fn smell_columns() -> Vec<String> {
    Smell::ALL.iter().map(|s| s.to_string()).collect()
}

/// Presence of each smell per class, columns in catalogue order.
pub fn binarize_table(table: &SmellCountTable) -> BinaryMatrix {
    let rows: Vec<String> = table.keys().map(str::to_string).collect();
    let cells = table.rows().map(|(_, r)| r.counts.iter().map(|&c| c >= 1).collect()).collect();
    BinaryMatrix::new(rows, smell_columns(), cells).expect("table keys are unique")
}

pub fn binarize_records(records: &[FineGrainedRecord]) -> Result<BinaryMatrix, MiningError> {
    let rows = records.iter().map(|r| r.canonical_key.clone()).collect();
    let cells = records.iter().map(|r| r.counts.iter().map(|&c| c >= 1).collect()).collect();
    BinaryMatrix::new(rows, smell_columns(), cells)
}
