//! Powered outer probabilistic clustering on binary rows.
//!
//! The score sums, over every feature `j` with `m_j` ones and every
//! cluster `k`, the term `(c_kj / m_j)^theta`. It peaks when each
//! feature's ones sit in a single cluster.

use std::collections::BTreeMap;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{BinaryMatrix, MiningError};

pub const DEFAULT_THETA: f64 = 2.0;
const MAX_KMEANS_ITERATIONS: usize = 100;
// accepted moves must raise the score by more than float noise
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterAssignment {
    /// Cluster id per sample, numbered `0..cluster_count`.
    pub clusters: Vec<usize>,
    pub cluster_count: usize,
    pub score: f64,
    /// k-means iterations, or sweeps for the move phase.
    pub iterations: usize,
}

impl ClusterAssignment {
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.clusters.iter().enumerate().filter(|(_, &c)| c == cluster).map(|(i, _)| i).collect()
    }
}

/// One accepted move of the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub sweep: usize,
    pub sample: usize,
    pub from: usize,
    pub to: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PopcParams {
    pub theta: f64,
    /// Contribution of a cluster holding `c` of a feature's `m` ones.
    pub term: fn(c: usize, m: usize, theta: f64) -> f64,
    pub max_sweeps: usize,
}

pub fn outer_power(c: usize, m: usize, theta: f64) -> f64 {
    (c as f64 / m as f64).powf(theta)
}

impl PopcParams {
    pub fn new(theta: f64) -> Self {
        PopcParams { theta, term: outer_power, max_sweeps: 10_000 }
    }
}

impl Default for PopcParams {
    fn default() -> Self {
        Self::new(DEFAULT_THETA)
    }
}

fn score_with(clusters: &[usize], m: &BinaryMatrix, params: &PopcParams) -> f64 {
    let mut total = 0.0;
    for j in 0..m.n_columns() {
        let mut per_cluster: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, &k) in clusters.iter().enumerate() {
            if m.get(i, j) {
                *per_cluster.entry(k).or_default() += 1;
            }
        }
        let mj: usize = per_cluster.values().sum();
        if mj > 0 {
            total += per_cluster.values().map(|&c| (params.term)(c, mj, params.theta)).sum::<f64>();
        }
    }
    total
}

/// The score of an assignment given as one cluster id per sample.
pub fn popc_score(clusters: &[usize], m: &BinaryMatrix, theta: f64) -> f64 {
    score_with(clusters, m, &PopcParams::new(theta))
}

fn sq_dist(a: &[bool], center: &[f64]) -> f64 {
    a.iter().zip(center).map(|(&x, &c)| (if x { 1.0 } else { 0.0 } - c).powi(2)).sum()
}

/// Renumbers ids to `0..` in ascending order of the old ids.
fn compact(clusters: &mut [usize]) -> usize {
    let mut ids: Vec<usize> = clusters.to_vec();
    ids.sort_unstable();
    ids.dedup();
    for c in clusters.iter_mut() {
        *c = ids.binary_search(c).expect("id present");
    }
    ids.len()
}

/// k-means with `ceil(n/2)` farthest-point seeded centers.
///
/// Identical rows always share a center, so the work runs over distinct
/// rows weighted by multiplicity.
pub fn kmeans_init(m: &BinaryMatrix, seed: u64) -> Result<ClusterAssignment, MiningError> {
    let n = m.n_rows();
    if n < 2 {
        return Err(MiningError::TooFewSamples);
    }
    let mut patterns: Vec<&[bool]> = Vec::new();
    let mut weight: Vec<usize> = Vec::new();
    let mut pattern_of = Vec::with_capacity(n);
    let mut index: BTreeMap<&[bool], usize> = BTreeMap::new();
    for i in 0..n {
        let row = m.row(i);
        let p = *index.entry(row).or_insert_with(|| {
            patterns.push(row);
            weight.push(0);
            patterns.len() - 1
        });
        weight[p] += 1;
        pattern_of.push(p);
    }

    let wanted = n.div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = pattern_of[rng.gen_range(0..n)];
    let to_center = |p: usize| -> Vec<f64> { patterns[p].iter().map(|&b| if b { 1.0 } else { 0.0 }).collect() };
    let mut centers = vec![to_center(first)];
    let mut nearest: Vec<f64> = patterns.iter().map(|p| sq_dist(p, &centers[0])).collect();
    // centers beyond the distinct rows would stay empty and be dropped
    while centers.len() < wanted {
        let (far, &d) = nearest
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |best, cur| if *cur.1 > *best.1 { cur } else { best });
        if d <= 0.0 {
            break;
        }
        centers.push(to_center(far));
        for (p, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(patterns[p], centers.last().unwrap()));
        }
    }

    let mut assign = vec![usize::MAX; patterns.len()];
    let mut iterations = 0;
    while iterations < MAX_KMEANS_ITERATIONS {
        iterations += 1;
        let mut changed = false;
        for (p, pat) in patterns.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (k, c) in centers.iter().enumerate() {
                let d = sq_dist(pat, c);
                if d < best_d {
                    best = k;
                    best_d = d;
                }
            }
            if assign[p] != best {
                assign[p] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (k, center) in centers.iter_mut().enumerate() {
            let mut sum = vec![0.0; m.n_columns()];
            let mut count = 0usize;
            for (p, pat) in patterns.iter().enumerate().filter(|(p, _)| assign[*p] == k) {
                count += weight[p];
                for (s, &b) in sum.iter_mut().zip(pat.iter()) {
                    if b {
                        *s += weight[p] as f64;
                    }
                }
            }
            if count > 0 {
                *center = sum.into_iter().map(|s| s / count as f64).collect();
            }
        }
    }

    let mut clusters: Vec<usize> = pattern_of.iter().map(|&p| assign[p]).collect();
    let cluster_count = compact(&mut clusters);
    let score = popc_score(&clusters, m, DEFAULT_THETA);
    Ok(ClusterAssignment { clusters, cluster_count, score, iterations })
}

pub fn popc(m: &BinaryMatrix, seed: u64, theta: f64) -> Result<ClusterAssignment, MiningError> {
    popc_observed(m, seed, &PopcParams::new(theta), |_| {})
}

/// Move search from the k-means start, reporting every accepted move.
pub fn popc_observed(
    m: &BinaryMatrix,
    seed: u64,
    params: &PopcParams,
    mut observer: impl FnMut(&Move),
) -> Result<ClusterAssignment, MiningError> {
    let init = kmeans_init(m, seed)?;
    let mut clusters = init.clusters;
    let features = m.n_columns();
    let totals: Vec<usize> = (0..features).map(|j| m.column_total(j)).collect();
    let ones: Vec<Vec<usize>> = (0..m.n_rows()).map(|i| m.ones(i)).collect();

    // counts[k][j]: ones of feature j inside cluster k
    let mut counts: Vec<Vec<usize>> = vec![vec![0; features]; init.cluster_count];
    let mut sizes = vec![0usize; init.cluster_count];
    for (i, &k) in clusters.iter().enumerate() {
        sizes[k] += 1;
        for &j in &ones[i] {
            counts[k][j] += 1;
        }
    }
    let term = |c: usize, j: usize| if c == 0 { 0.0 } else { (params.term)(c, totals[j], params.theta) };
    let mut score = score_with(&clusters, m, params);
    let mut sweeps = 0;

    loop {
        sweeps += 1;
        let mut improved = false;
        for s in 0..clusters.len() {
            let from = clusters[s];
            let gain = |counts: &[Vec<usize>], to: Option<usize>| -> f64 {
                ones[s]
                    .iter()
                    .map(|&j| {
                        let a = counts[from][j];
                        let b = to.map_or(0, |k| counts[k][j]);
                        term(b + 1, j) - term(b, j) + term(a - 1, j) - term(a, j)
                    })
                    .sum()
            };
            let mut target = None;
            for k in (0..counts.len()).filter(|&k| k != from && sizes[k] > 0) {
                let d = gain(&counts, Some(k));
                if d > MIN_GAIN {
                    target = Some((k, d));
                    break;
                }
            }
            if target.is_none() && sizes[from] > 1 {
                let d = gain(&counts, None);
                if d > MIN_GAIN {
                    counts.push(vec![0; features]);
                    sizes.push(0);
                    target = Some((counts.len() - 1, d));
                }
            }
            let Some((to, delta)) = target else { continue };
            for &j in &ones[s] {
                counts[from][j] -= 1;
                counts[to][j] += 1;
            }
            sizes[from] -= 1;
            sizes[to] += 1;
            clusters[s] = to;
            let after = score + delta;
            observer(&Move { sweep: sweeps, sample: s, from, to, before: score, after });
            score = after;
            improved = true;
        }
        if !improved || sweeps >= params.max_sweeps {
            break;
        }
    }
    let cluster_count = compact(&mut clusters);
    let score = score_with(&clusters, m, params);
    Ok(ClusterAssignment { clusters, cluster_count, score, iterations: sweeps })
}

/// Rows are groups, columns the clusters; a cell is set when a sample of
/// the group lies in the cluster. `groups_of[i]` lists the groups of sample `i`.
pub fn presence_by_group(a: &ClusterAssignment, groups_of: &[Vec<String>], groups: &[String]) -> BinaryMatrix {
    let mut cells = vec![vec![false; a.cluster_count]; groups.len()];
    for (i, &k) in a.clusters.iter().enumerate() {
        for g in &groups_of[i] {
            if let Some(r) = groups.iter().position(|x| x == g) {
                cells[r][k] = true;
            }
        }
    }
    let columns = (0..a.cluster_count).map(|k| format!("c{k}")).collect();
    BinaryMatrix::new(groups.to_vec(), columns, cells).expect("groups are unique")
}

pub fn write_clusters_csv<W: io::Write>(out: W, m: &BinaryMatrix, a: &ClusterAssignment) -> Result<(), MiningError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sample", "cluster"])?;
    for (label, k) in m.rows().iter().zip(&a.clusters) {
        w.write_record([label.as_str(), &k.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
