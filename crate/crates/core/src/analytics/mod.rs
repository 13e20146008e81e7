//! Descriptive and inferential statistics over the per-class records.
//!
//! Values are kept at full precision; the CSV writers round percentages
//! to two decimals.

pub mod svg;

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use statrs::function::beta::beta_reg;
use thiserror::Error;

use crate::dataset::{CorpusManifest, FineGrainedRecord, ProjectKind};
use crate::roles::StereotypeLabel;
use crate::smells::Smell;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no line count for project '{0}'")]
    MissingLoc(String),
    #[error("each sample needs at least two values")]
    TooFewSamples,
    #[error("a sample has zero variance")]
    ZeroVariance,
    #[error("at least two rows are needed")]
    TooFewRows,
    #[error("the records contain no smells")]
    NoSmells,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Two decimals, as printed in reports.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Rounds to hundredths so that the rounded values keep the sum of the
/// inputs (largest-remainder apportionment).
pub fn round2_preserving_sum(values: &[f64]) -> Vec<f64> {
    let scaled: Vec<f64> = values.iter().map(|v| v * 100.0).collect();
    let target = scaled.iter().sum::<f64>().round() as i64;
    let mut units: Vec<i64> = scaled.iter().map(|v| v.floor() as i64).collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| (scaled[b] - scaled[b].floor()).total_cmp(&(scaled[a] - scaled[a].floor())).then(a.cmp(&b)));
    let missing = target - units.iter().sum::<i64>();
    for &i in order.iter().cycle().take(missing.max(0) as usize) {
        units[i] += 1;
    }
    units.into_iter().map(|u| u as f64 / 100.0).collect()
}

impl StereotypePercentages {
    /// The twelve cells in table order (a then b per stereotype), rounded
    /// for printing.
    pub fn printed(&self) -> Vec<f64> {
        let cells: Vec<f64> = TABLE_ORDER.iter().flat_map(|l| [self.smelly[l.index()], self.clean[l.index()]]).collect();
        round2_preserving_sum(&cells)
    }
}

/// Shares in table order, rounded for printing.
pub fn printed_shares(shares: &[f64; 6]) -> Vec<f64> {
    let ordered: Vec<f64> = TABLE_ORDER.iter().map(|l| shares[l.index()]).collect();
    round2_preserving_sum(&ordered)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

// ---------------------------------------------------------------- density

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub project: String,
    pub kind: ProjectKind,
    pub total_smells: u64,
    pub loc: u64,
    pub kloc: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySummary {
    pub kind: ProjectKind,
    pub projects: usize,
    /// Unweighted mean of the per-project densities.
    pub mean_density: f64,
    /// Total smells of the group over its total KLOC.
    pub pooled_density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub rows: Vec<DensityRow>,
    pub summaries: Vec<DensitySummary>,
}

impl DensityReport {
    pub fn densities(&self, kind: ProjectKind) -> Vec<f64> {
        self.rows.iter().filter(|r| r.kind == kind).map(|r| r.density).collect()
    }
}

/// Smells per KLOC for every manifest project. `loc` is keyed by project name.
pub fn smell_density(
    records: &[FineGrainedRecord],
    manifest: &CorpusManifest,
    loc: &BTreeMap<String, u64>,
) -> Result<DensityReport, StatsError> {
    let mut rows = Vec::new();
    for p in &manifest.projects {
        let lines = loc.get(&p.name).copied().filter(|&l| l > 0).ok_or_else(|| StatsError::MissingLoc(p.name.clone()))?;
        let prefix = p.key_prefix();
        let total_smells: u64 = records
            .iter()
            .filter(|r| r.project == prefix)
            .map(|r| r.counts.iter().map(|&c| c as u64).sum::<u64>())
            .sum();
        let kloc = lines as f64 / 1000.0;
        rows.push(DensityRow {
            project: p.name.clone(),
            kind: p.kind,
            total_smells,
            loc: lines,
            kloc,
            density: total_smells as f64 / kloc,
        });
    }
    let summaries = ProjectKind::ALL
        .into_iter()
        .filter_map(|kind| {
            let group: Vec<&DensityRow> = rows.iter().filter(|r| r.kind == kind).collect();
            if group.is_empty() {
                return None;
            }
            let smells: u64 = group.iter().map(|r| r.total_smells).sum();
            let kloc: f64 = group.iter().map(|r| r.kloc).sum();
            Some(DensitySummary {
                kind,
                projects: group.len(),
                mean_density: group.iter().map(|r| r.density).sum::<f64>() / group.len() as f64,
                pooled_density: smells as f64 / kloc,
            })
        })
        .collect();
    Ok(DensityReport { rows, summaries })
}

pub fn write_density_csv<W: io::Write>(out: W, report: &DensityReport) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["project", "kind", "total_smells", "loc", "kloc", "density"])?;
    for r in &report.rows {
        w.write_record([
            r.project.clone(),
            r.kind.to_string(),
            r.total_smells.to_string(),
            r.loc.to_string(),
            format!("{:.3}", r.kloc),
            format!("{:.2}", r.density),
        ])?;
    }
    for s in &report.summaries {
        w.write_record([
            format!("mean:{}", s.kind),
            s.kind.to_string(),
            String::new(),
            String::new(),
            String::new(),
            format!("{:.2}", s.mean_density),
        ])?;
        w.write_record([
            format!("pooled:{}", s.kind),
            s.kind.to_string(),
            String::new(),
            String::new(),
            String::new(),
            format!("{:.2}", s.pooled_density),
        ])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- Welch

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p: f64,
}

pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<WelchResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewSamples);
    }
    let (va, vb) = (variance(a), variance(b));
    if va == 0.0 || vb == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let t = (mean(a) - mean(b)) / (sa + sb).sqrt();
    let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    let p = beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0);
    Ok(WelchResult { t, df, p })
}

// ---------------------------------------------------------------- Spearman

/// Ranks starting at 1, ties sharing the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
    }
}

/// Rank correlation; `None` when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "columns differ in length");
    if x.len() < 2 {
        return None;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpearmanMatrix {
    /// Catalogue order on both axes.
    pub values: [[f64; 18]; 18],
    /// Columns without variance; their off-diagonal entries are 0.
    pub constant: [bool; 18],
}

impl SpearmanMatrix {
    pub fn get(&self, a: Smell, b: Smell) -> f64 {
        self.values[a.index()][b.index()]
    }

    /// The largest off-diagonal coefficient, with its pair in catalogue order.
    pub fn max_pair(&self) -> Option<(Smell, Smell, f64)> {
        let mut best: Option<(Smell, Smell, f64)> = None;
        for (i, a) in Smell::ALL.into_iter().enumerate() {
            for b in Smell::ALL.into_iter().skip(i + 1) {
                let v = self.get(a, b);
                if best.is_none_or(|(_, _, bv)| v > bv) {
                    best = Some((a, b, v));
                }
            }
        }
        best
    }
}

pub fn spearman_matrix(rows: &[[u32; 18]]) -> Result<SpearmanMatrix, StatsError> {
    if rows.len() < 2 {
        return Err(StatsError::TooFewRows);
    }
    let columns: Vec<Vec<f64>> = (0..18).map(|j| rows.iter().map(|r| r[j] as f64).collect()).collect();
    let ranks: Vec<Vec<f64>> = columns.iter().map(|c| average_ranks(c)).collect();
    let mut constant = [false; 18];
    for (j, c) in columns.iter().enumerate() {
        constant[j] = c.iter().all(|&v| v == c[0]);
    }
    let mut values = [[0.0; 18]; 18];
    for i in 0..18 {
        values[i][i] = 1.0;
        for j in i + 1..18 {
            let v = pearson(&ranks[i], &ranks[j]).unwrap_or(0.0);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(SpearmanMatrix { values, constant })
}

pub fn write_spearman_csv<W: io::Write>(out: W, m: &SpearmanMatrix) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["smell".to_string()];
    header.extend(Smell::ALL.iter().map(|s| s.to_string()));
    header.push("constant".into());
    w.write_record(&header)?;
    for s in Smell::ALL {
        let mut rec = vec![s.to_string()];
        rec.extend(m.values[s.index()].iter().map(|v| format!("{v:.4}")));
        rec.push(m.constant[s.index()].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- stereotype tables

/// Column order of the percentage tables.
pub const TABLE_ORDER: [StereotypeLabel; 6] = [
    StereotypeLabel::ServiceProvider,
    StereotypeLabel::Coordinator,
    StereotypeLabel::InformationHolder,
    StereotypeLabel::Interfacer,
    StereotypeLabel::Controller,
    StereotypeLabel::Structurer,
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StereotypePercentages {
    pub project: String,
    pub kind: Option<ProjectKind>,
    /// Number of classes.
    pub noc: usize,
    /// Share of the project's classes that have the stereotype and a smell.
    pub smelly: [f64; 6],
    /// Share that have the stereotype and no smell.
    pub clean: [f64; 6],
}

/// Per project, in order of first appearance of the project name.
pub fn stereotype_percentages(records: &[FineGrainedRecord]) -> Vec<StereotypePercentages> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&FineGrainedRecord>> = BTreeMap::new();
    for r in records {
        if !groups.contains_key(r.project.as_str()) {
            order.push(&r.project);
        }
        groups.entry(&r.project).or_default().push(r);
    }
    order
        .into_iter()
        .map(|project| {
            let rs = &groups[project];
            let noc = rs.len();
            let mut smelly = [0.0; 6];
            let mut clean = [0.0; 6];
            for r in rs {
                let cell = if r.is_smelly() { &mut smelly } else { &mut clean };
                cell[r.label.index()] += 1.0;
            }
            for v in smelly.iter_mut().chain(clean.iter_mut()) {
                *v *= 100.0 / noc as f64;
            }
            StereotypePercentages {
                project: project.to_string(),
                kind: rs[0].kind,
                noc,
                smelly,
                clean,
            }
        })
        .collect()
}

pub fn write_percentages_csv<W: io::Write>(out: W, rows: &[StereotypePercentages]) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["project".to_string(), "kind".into(), "NOC".into()];
    for l in TABLE_ORDER {
        header.push(format!("{}_a", l.abbreviation()));
        header.push(format!("{}_b", l.abbreviation()));
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.project.clone(), r.kind.map(|k| k.to_string()).unwrap_or_default(), r.noc.to_string()];
        rec.extend(r.printed().iter().map(|v| format!("{v:.2}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn smell_total(r: &FineGrainedRecord) -> u64 {
    r.counts.iter().map(|&c| c as u64).sum()
}

/// Percentage of all smell occurrences that fall in each stereotype.
pub fn smell_share_by_stereotype(records: &[FineGrainedRecord]) -> Result<[f64; 6], StatsError> {
    let mut totals = [0u64; 6];
    for r in records {
        totals[r.label.index()] += smell_total(r);
    }
    let all: u64 = totals.iter().sum();
    if all == 0 {
        return Err(StatsError::NoSmells);
    }
    Ok(totals.map(|t| 100.0 * t as f64 / all as f64))
}

pub fn write_shares_csv<W: io::Write>(out: W, shares: &[f64; 6]) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["stereotype", "share"])?;
    for (l, v) in TABLE_ORDER.iter().zip(printed_shares(shares)) {
        w.write_record([l.display_name().to_string(), format!("{v:.2}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Occurrences of each smell per stereotype, `[label][smell]`.
pub fn smell_by_stereotype(records: &[FineGrainedRecord]) -> [[u64; 18]; 6] {
    let mut out = [[0u64; 18]; 6];
    for r in records {
        for (j, &c) in r.counts.iter().enumerate() {
            out[r.label.index()][j] += c as u64;
        }
    }
    out
}

pub fn write_smell_by_stereotype_csv<W: io::Write>(out: W, freq: &[[u64; 18]; 6]) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["stereotype", "smell", "frequency"])?;
    for l in TABLE_ORDER {
        for s in Smell::ALL {
            w.write_record([l.display_name().to_string(), s.to_string(), freq[l.index()][s.index()].to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `cells[smell][label][kind]`, kind indexed by [`ProjectKind::ALL`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresenceMatrix {
    pub cells: [[[bool; 2]; 6]; 18],
}

fn kind_index(kind: ProjectKind) -> usize {
    match kind {
        ProjectKind::Desktop => 0,
        ProjectKind::Mobile => 1,
    }
}

impl PresenceMatrix {
    pub fn get(&self, smell: Smell, label: StereotypeLabel, kind: ProjectKind) -> bool {
        self.cells[smell.index()][label.index()][kind_index(kind)]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().flatten().flatten().filter(|&&b| b).count()
    }
}

/// Records without a project kind are left out.
pub fn presence_matrix(records: &[FineGrainedRecord]) -> PresenceMatrix {
    let mut cells = [[[false; 2]; 6]; 18];
    for r in records {
        let Some(kind) = r.kind else { continue };
        for s in r.smells() {
            cells[s.index()][r.label.index()][kind_index(kind)] = true;
        }
    }
    PresenceMatrix { cells }
}

pub fn write_presence_csv<W: io::Write>(out: W, m: &PresenceMatrix) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["smell", "stereotype", "M", "D"])?;
    let mark = |b: bool| if b { "1" } else { "0" };
    for s in Smell::ALL {
        for l in TABLE_ORDER {
            w.write_record([
                s.to_string(),
                l.display_name().to_string(),
                mark(m.get(s, l, ProjectKind::Mobile)).to_string(),
                mark(m.get(s, l, ProjectKind::Desktop)).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
