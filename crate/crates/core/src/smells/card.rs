//! Rule-card grammar.
//!
//! ```text
//! card  := "RULE_CARD" ":" Smell "{" rule+ "}" ";"?
//! rule  := "RULE" ":" Name "{" expr "}" ";"?
//! expr  := leaf | ("INTER" | "UNION") "{" expr ("," ? expr)* "}" | Name
//! leaf  := "(" "METRIC" ":" metric "," level "," number ")"
//!        | "(" "STRUCT" ":" flag "," bool ")"
//!        | "(" "LEXIC" ":" word ("," word)* ")"
//! ```
//!
//! The first rule of a card is its root; a bare `Name` refers to another
//! rule of the same card. `#` and `//` start line comments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::Smell;
use crate::model::MetricVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown metric '{0}'")]
    UnknownMetric(String),
    #[error("unknown structural flag '{0}'")]
    UnknownFlag(String),
    #[error("unknown design smell '{0}'")]
    UnknownSmell(String),
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("rule '{0}' refers to itself")]
    RecursiveRule(String),
    #[error("duplicate rule card for {0}")]
    DuplicateCard(Smell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    VeryHigh,
    High,
    Low,
    VeryLow,
    Equal,
}

impl Level {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Level::VeryHigh | Level::High => value >= threshold,
            Level::Low | Level::VeryLow => value <= threshold,
            Level::Equal => value == threshold,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Level::VeryHigh => "VERY_HIGH",
            Level::High => "HIGH",
            Level::Low => "LOW",
            Level::VeryLow => "VERY_LOW",
            Level::Equal => "EQUAL",
        }
    }

    fn parse(word: &str) -> Option<Self> {
        Some(match word {
            "VERY_HIGH" => Level::VeryHigh,
            "HIGH" => Level::High,
            "LOW" => Level::Low,
            "VERY_LOW" => Level::VeryLow,
            "EQUAL" => Level::Equal,
            _ => return None,
        })
    }
}

macro_rules! metrics {
    ($($variant:ident => $name:literal, $field:ident;)*) => {
        /// Numeric [`MetricVector`] fields a card may compare.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Metric {
            $($variant),*
        }

        impl Metric {
            pub const ALL: &'static [Metric] = &[$(Metric::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Metric::$variant => $name),*
                }
            }

            pub fn value(self, mv: &MetricVector) -> f64 {
                match self {
                    $(Metric::$variant => mv.$field as f64),*
                }
            }
        }
    };
}

metrics! {
    Loc => "loc", loc;
    Nom => "nom", nom;
    Nof => "nof", nof;
    MaxParams => "maxParams", max_params;
    AvgParams => "avgParams", avg_params;
    MaxCc => "maxCC", max_cc;
    TotalCc => "totalCC", total_cc;
    AvgCc => "avgCC", avg_cc;
    LcomFraction => "lcomFraction", lcom_fraction;
    Dit => "dit", dit;
    NoChildren => "noChildren", no_children;
    NumInterfaces => "numInterfaces", num_interfaces;
    NumPublicInstanceFields => "numPublicInstanceFields", num_public_instance_fields;
    NumPublicStaticMutableFields => "numPublicStaticMutableFields", num_public_static_mutable_fields;
    MaxChainLength => "maxChainLength", max_chain_length;
    NumOverridden => "numOverridden", num_overridden;
    NumAccessors => "numAccessors", num_accessors;
    NumLongNoParamMethods => "numLongNoParamMethods", num_long_no_param_methods;
    ParentLoc => "parentLoc", parent_loc;
    MaxMethodLoc => "maxMethodLoc", max_method_loc;
    OverrideRatio => "overrideRatio", override_ratio;
    MemberCount => "memberCount", member_count;
}

impl Metric {
    pub fn parse(name: &str) -> Option<Self> {
        if name == "NOParam" {
            return Some(Metric::MaxParams);
        }
        Metric::ALL.iter().copied().find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructFlag {
    IsAbstract,
    ReferencesDerivedType,
    UsesForeignGlobals,
}

impl StructFlag {
    pub fn name(self) -> &'static str {
        match self {
            StructFlag::IsAbstract => "isAbstract",
            StructFlag::ReferencesDerivedType => "referencesDerivedType",
            StructFlag::UsesForeignGlobals => "usesForeignGlobals",
        }
    }

    pub fn value(self, mv: &MetricVector) -> bool {
        match self {
            StructFlag::IsAbstract => mv.is_abstract,
            StructFlag::ReferencesDerivedType => mv.references_derived_type,
            StructFlag::UsesForeignGlobals => mv.uses_foreign_globals,
        }
    }

    fn parse(name: &str) -> Option<Self> {
        [StructFlag::IsAbstract, StructFlag::ReferencesDerivedType, StructFlag::UsesForeignGlobals]
            .into_iter()
            .find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Metric {
        metric: Metric,
        /// Name as written in the card, kept for `.ini` witness lines.
        label: String,
        level: Level,
        threshold: f64,
    },
    Struct {
        flag: StructFlag,
        expected: bool,
    },
    Lexicon(Vec<String>),
    Inter(Vec<Predicate>),
    Union(Vec<Predicate>),
}

impl Predicate {
    pub fn metric(metric: Metric, level: Level, threshold: f64) -> Self {
        Predicate::Metric {
            metric,
            label: metric.name().to_string(),
            level,
            threshold,
        }
    }

    /// Visits every leaf metric comparison, mutably.
    pub fn for_each_metric_mut(&mut self, f: &mut impl FnMut(Metric, Level, &mut f64)) {
        match self {
            Predicate::Metric { metric, level, threshold, .. } => f(*metric, *level, threshold),
            Predicate::Inter(children) | Predicate::Union(children) => {
                children.iter_mut().for_each(|c| c.for_each_metric_mut(f))
            }
            Predicate::Struct { .. } | Predicate::Lexicon(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleCard {
    pub smell: Smell,
    pub rule: Predicate,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Metric { label, level, threshold, .. } => {
                write!(f, "(METRIC: {label}, {}, {threshold})", level.keyword())
            }
            Predicate::Struct { flag, expected } => write!(f, "(STRUCT: {}, {expected})", flag.name()),
            Predicate::Lexicon(words) => write!(f, "(LEXIC: {})", words.join(", ")),
            Predicate::Inter(children) | Predicate::Union(children) => {
                let op = if matches!(self, Predicate::Inter(_)) { "INTER" } else { "UNION" };
                write!(f, "{op} {{ ")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(" }")
            }
        }
    }
}

impl fmt::Display for RuleCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RULE_CARD : {} {{ RULE : {}Class {{ {} }} ; }};", self.smell, self.smell, self.rule)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Sym(char),
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, CardError> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line_text = match (raw.find('#'), raw.find("//")) {
            (Some(a), Some(b)) => &raw[..a.min(b)],
            (Some(a), None) | (None, Some(a)) => &raw[..a],
            (None, None) => raw,
        };
        let chars: Vec<char> = line_text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (li + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
            } else if "{}();:,".contains(c) {
                out.push(Lexed { tok: Tok::Sym(c), line, column });
                i += 1;
            } else if c.is_ascii_digit() || (c == '-' || c == '.') && chars.get(i + 1).is_some_and(char::is_ascii_digit) {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| CardError::Syntax {
                    line,
                    column,
                    message: format!("bad number '{s}'"),
                })?;
                out.push(Lexed { tok: Tok::Num(n), line, column });
            } else if c.is_alphanumeric() || c == '_' || c == '$' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                    i += 1;
                }
                out.push(Lexed {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line,
                    column,
                });
            } else {
                return Err(CardError::Syntax {
                    line,
                    column,
                    message: format!("unexpected character '{c}'"),
                });
            }
        }
    }
    Ok(out)
}

/// Unresolved rule body.
enum Raw {
    Leaf(Predicate),
    Inter(Vec<Raw>),
    Union(Vec<Raw>),
    Ref(String),
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> CardError {
        let (line, column) = self.toks.get(self.pos).map(|t| (t.line, t.column)).unwrap_or(self.end);
        CardError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn sym(&mut self, c: char) -> Result<(), CardError> {
        if self.at_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn word(&mut self) -> Result<String, CardError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), CardError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected {kw}"))),
        }
    }

    fn number(&mut self) -> Result<f64, CardError> {
        match self.peek() {
            Some(&Tok::Num(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected a number")),
        }
    }

    fn card(&mut self) -> Result<RuleCard, CardError> {
        self.keyword("RULE_CARD")?;
        self.sym(':')?;
        let name = self.word()?;
        let smell: Smell = name.parse().map_err(|_| CardError::UnknownSmell(name))?;
        self.sym('{')?;
        let mut rules: Vec<(String, Raw)> = Vec::new();
        while !self.at_sym('}') {
            self.keyword("RULE")?;
            self.sym(':')?;
            let rule_name = self.word()?;
            self.sym('{')?;
            let body = self.expr()?;
            self.sym('}')?;
            if self.at_sym(';') {
                self.pos += 1;
            }
            rules.push((rule_name, body));
        }
        if rules.is_empty() {
            return Err(self.error("rule card without rules"));
        }
        self.sym('}')?;
        if self.at_sym(';') {
            self.pos += 1;
        }
        let table: BTreeMap<&str, &Raw> = rules.iter().map(|(n, r)| (n.as_str(), r)).collect();
        let rule = resolve(&rules[0].1, &table, &mut BTreeSet::from([rules[0].0.clone()]))?;
        Ok(RuleCard { smell, rule })
    }

    fn expr(&mut self) -> Result<Raw, CardError> {
        if self.at_sym('(') {
            return self.leaf().map(Raw::Leaf);
        }
        let w = self.word()?;
        match w.as_str() {
            "INTER" | "UNION" => {
                self.sym('{')?;
                let mut children = Vec::new();
                while !self.at_sym('}') {
                    children.push(self.expr()?);
                    if self.at_sym(',') {
                        self.pos += 1;
                    }
                }
                if children.is_empty() {
                    return Err(self.error(format!("empty {w}")));
                }
                self.sym('}')?;
                Ok(if w == "INTER" { Raw::Inter(children) } else { Raw::Union(children) })
            }
            _ => Ok(Raw::Ref(w)),
        }
    }

    fn leaf(&mut self) -> Result<Predicate, CardError> {
        self.sym('(')?;
        let kind = self.word()?;
        self.sym(':')?;
        let pred = match kind.as_str() {
            "METRIC" => {
                let label = self.word()?;
                let metric = Metric::parse(&label).ok_or_else(|| CardError::UnknownMetric(label.clone()))?;
                self.sym(',')?;
                let lw = self.word()?;
                let level = Level::parse(&lw).ok_or_else(|| self.error(format!("unknown level {lw}")))?;
                self.sym(',')?;
                let threshold = self.number()?;
                Predicate::Metric {
                    metric,
                    label,
                    level,
                    threshold,
                }
            }
            "STRUCT" => {
                let name = self.word()?;
                let flag = StructFlag::parse(&name).ok_or(CardError::UnknownFlag(name))?;
                self.sym(',')?;
                let expected = match self.word()?.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(self.error("expected true or false")),
                };
                Predicate::Struct { flag, expected }
            }
            "LEXIC" => {
                let mut words = vec![self.word()?];
                while self.at_sym(',') {
                    self.pos += 1;
                    words.push(self.word()?);
                }
                Predicate::Lexicon(words)
            }
            other => return Err(self.error(format!("unknown leaf kind {other}"))),
        };
        self.sym(')')?;
        Ok(pred)
    }
}

fn resolve(raw: &Raw, rules: &BTreeMap<&str, &Raw>, active: &mut BTreeSet<String>) -> Result<Predicate, CardError> {
    Ok(match raw {
        Raw::Leaf(p) => p.clone(),
        Raw::Inter(c) => Predicate::Inter(c.iter().map(|r| resolve(r, rules, active)).collect::<Result<_, _>>()?),
        Raw::Union(c) => Predicate::Union(c.iter().map(|r| resolve(r, rules, active)).collect::<Result<_, _>>()?),
        Raw::Ref(name) => {
            let target = rules.get(name.as_str()).ok_or_else(|| CardError::UnknownRule(name.clone()))?;
            if !active.insert(name.clone()) {
                return Err(CardError::RecursiveRule(name.clone()));
            }
            let p = resolve(target, rules, active)?;
            active.remove(name);
            p
        }
    })
}

fn parser(text: &str) -> Result<Parser, CardError> {
    let toks = lex(text)?;
    let end = (text.lines().count().max(1), text.lines().last().map_or(0, |l| l.chars().count()) + 1);
    Ok(Parser { toks, pos: 0, end })
}

pub fn parse_rule_card(text: &str) -> Result<RuleCard, CardError> {
    let mut p = parser(text)?;
    let card = p.card()?;
    if p.pos < p.toks.len() {
        return Err(p.error("trailing input after rule card"));
    }
    Ok(card)
}

/// Parses any number of consecutive cards; each smell may appear once.
pub fn parse_rule_cards(text: &str) -> Result<Vec<RuleCard>, CardError> {
    let mut p = parser(text)?;
    let mut cards: Vec<RuleCard> = Vec::new();
    while p.pos < p.toks.len() {
        let card = p.card()?;
        if cards.iter().any(|c| c.smell == card.smell) {
            return Err(CardError::DuplicateCard(card.smell));
        }
        cards.push(card);
    }
    Ok(cards)
}

pub const DEFAULT_RULE_CARDS: &str = include_str!("default_cards.txt");

pub fn default_rule_cards() -> Vec<RuleCard> {
    parse_rule_cards(DEFAULT_RULE_CARDS).expect("built-in rule cards parse")
}
