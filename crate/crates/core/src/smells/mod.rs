//! Design-smell catalogue, rule cards, detection and `.ini` detection files.

pub mod card;
pub mod engine;
pub mod ini;

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use card::{default_rule_cards, parse_rule_card, parse_rule_cards, CardError, Level, Metric, Predicate, RuleCard, StructFlag};
pub use engine::{detect_all, evaluate, Occurrence, SmellDetection, SmellSubject, Witness};
pub use ini::{default_class_pattern, emit_ini, ini_file_name, parse_ini, IniError, IniWarning};

use crate::model::{full_class_path, key_from_class_path};

macro_rules! smells {
    ($($variant:ident),* $(,)?) => {
        /// The eighteen detectable design smells.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum Smell {
            $($variant),*
        }

        impl Smell {
            /// Catalogue order.
            pub const ALL: [Smell; 18] = [$(Smell::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Smell::$variant => stringify!($variant)),*
                }
            }
        }
    };
}

smells!(
    AntiSingleton,
    BaseClassKnowsDerivedClass,
    BaseClassShouldBeAbstract,
    Blob,
    ClassDataShouldBePrivate,
    ComplexClass,
    FunctionalDecomposition,
    LargeClass,
    LazyClass,
    LongMethod,
    LongParameterList,
    ManyFieldAttributesButNotComplex,
    MessageChains,
    RefusedParentBequest,
    SpaghettiCode,
    SpeculativeGenerality,
    SwissArmyKnife,
    TraditionBreaker,
);

impl Smell {
    /// Column order of persisted tables: Blob, LongMethod and LazyClass
    /// first, then the rest in catalogue order.
    pub const CSV_ORDER: [Smell; 18] = [
        Smell::Blob,
        Smell::LongMethod,
        Smell::LazyClass,
        Smell::AntiSingleton,
        Smell::BaseClassKnowsDerivedClass,
        Smell::BaseClassShouldBeAbstract,
        Smell::ClassDataShouldBePrivate,
        Smell::ComplexClass,
        Smell::FunctionalDecomposition,
        Smell::LargeClass,
        Smell::LongParameterList,
        Smell::ManyFieldAttributesButNotComplex,
        Smell::MessageChains,
        Smell::RefusedParentBequest,
        Smell::SpaghettiCode,
        Smell::SpeculativeGenerality,
        Smell::SwissArmyKnife,
        Smell::TraditionBreaker,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Smells whose count is the number of offending methods.
    pub fn is_per_method(self) -> bool {
        matches!(
            self,
            Smell::LongMethod | Smell::LongParameterList | Smell::MessageChains | Smell::ComplexClass
        )
    }
}

impl fmt::Display for Smell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown design smell '{0}'")]
pub struct UnknownSmell(pub String);

impl FromStr for Smell {
    type Err = UnknownSmell;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Smell::ALL
            .into_iter()
            .find(|smell| smell.name() == s)
            .ok_or_else(|| UnknownSmell(s.to_string()))
    }
}

/// Simple class name of a canonical key: last dotted segment, or the part
/// after `$` for secondary top-level types.
pub fn class_name_of(key: &str) -> &str {
    let last = key.rsplit('.').next().unwrap_or(key);
    last.rsplit('$').next().unwrap_or(last)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmellRow {
    pub class_name: String,
    /// Indexed by [`Smell::index`].
    pub counts: [u32; 18],
}

/// Per-class smell counts, one row per canonical key, rows sorted by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SmellCountTable {
    rows: BTreeMap<String, SmellRow>,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("schema mismatch: {0}")]
    Schema(String),
}

impl SmellCountTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds a zero row for `key` if absent.
    pub fn ensure_row(&mut self, key: &str, class_name: &str) -> &mut SmellRow {
        self.rows.entry(key.to_string()).or_insert_with(|| SmellRow {
            class_name: class_name.to_string(),
            counts: [0; 18],
        })
    }

    pub fn add(&mut self, key: &str, smell: Smell, count: u32) {
        let row = self.ensure_row(key, class_name_of(key));
        row.counts[smell.index()] += count;
    }

    pub fn get(&self, key: &str, smell: Smell) -> u32 {
        self.rows.get(key).map(|r| r.counts[smell.index()]).unwrap_or(0)
    }

    pub fn row(&self, key: &str) -> Option<&SmellRow> {
        self.rows.get(key)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &SmellRow)> {
        self.rows.iter().map(|(k, r)| (k.as_str(), r))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// Column of counts for one smell, in row order.
    pub fn column(&self, smell: Smell) -> Vec<u32> {
        self.rows.values().map(|r| r.counts[smell.index()]).collect()
    }

    /// Non-zero `(key, smell, count)` cells in row-then-catalogue order.
    pub fn triples(&self) -> Vec<(String, Smell, u32)> {
        self.rows
            .iter()
            .flat_map(|(k, r)| {
                Smell::ALL
                    .into_iter()
                    .filter(|s| r.counts[s.index()] > 0)
                    .map(move |s| (k.clone(), s, r.counts[s.index()]))
            })
            .collect()
    }

    /// Writes `FullClassPath, Classname, <18 smell columns>`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), TableError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["FullClassPath".to_string(), "Classname".to_string()];
        header.extend(Smell::CSV_ORDER.iter().map(|s| s.name().to_string()));
        w.write_record(&header)?;
        for (key, row) in &self.rows {
            let mut rec = vec![full_class_path(key), row.class_name.clone()];
            rec.extend(Smell::CSV_ORDER.iter().map(|s| row.counts[s.index()].to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(input: R) -> Result<Self, TableError> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let headers = r.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| TableError::Schema(format!("missing column {name}")))
        };
        let path_col = col("FullClassPath")?;
        let name_col = col("Classname")?;
        let smell_cols: Vec<(Smell, usize)> = Smell::ALL
            .into_iter()
            .map(|s| col(s.name()).map(|c| (s, c)))
            .collect::<Result<_, _>>()?;
        let mut table = Self::new();
        for rec in r.records() {
            let rec = rec?;
            let key = key_from_class_path(&rec[path_col]).to_string();
            let row = table.ensure_row(&key, &rec[name_col]);
            for &(smell, c) in &smell_cols {
                row.counts[smell.index()] = rec[c]
                    .trim()
                    .parse()
                    .map_err(|_| TableError::Schema(format!("bad count '{}' for {smell}", &rec[c])))?;
            }
        }
        Ok(table)
    }
}
