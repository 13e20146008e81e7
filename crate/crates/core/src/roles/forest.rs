//! Random forest of Gini decision trees.
//!
//! Tree `i` draws its bootstrap sample and candidate features from a
//! ChaCha8 stream seeded with `seed + i`, so trees can be built in any
//! order and still come out the same.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FeatureVector, LabeledExample, StereotypeLabel, FEATURE_NAMES, NUM_FEATURES};

const NUM_LABELS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("no training examples")]
    InsufficientData,
    #[error("model was trained on feature order {model}, this build uses {expected}")]
    ModelFeatureMismatch { model: String, expected: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrainWarning {
    /// Only one label present; the model always predicts it.
    DegenerateLabels(StereotypeLabel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub seed: u64,
    pub features_per_split: usize,
    pub oversample: bool,
}

impl TrainParams {
    pub fn new(seed: u64) -> Self {
        Self {
            trees: 100,
            max_depth: None,
            seed,
            // round(sqrt(23))
            features_per_split: 4,
            oversample: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        /// Values `<= threshold` go left.
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        distribution: [f64; NUM_LABELS],
    },
}

impl Node {
    fn leaf<'a>(&'a self, x: &[f64; NUM_FEATURES]) -> &'a [f64; NUM_LABELS] {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { distribution } => return distribution,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Split features in pre-order; two trees with the same shape and the
    /// same sequence split on the same features.
    pub fn structure(&self) -> Vec<Option<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            match n {
                Node::Leaf { .. } => out.push(None),
                Node::Split { feature, left, right, .. } => {
                    out.push(Some(*feature));
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub seed: u64,
    pub tree_count: usize,
    pub feature_order_hash: String,
    pub feature_names: Vec<String>,
    pub labels: Vec<StereotypeLabel>,
    pub trees: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: StereotypeLabel,
    /// Indexed by [`StereotypeLabel::index`].
    pub probabilities: [f64; NUM_LABELS],
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Fingerprint of the feature names and their order.
pub fn feature_order_hash() -> String {
    format!("{:016x}", fnv1a(FEATURE_NAMES.join(",").as_bytes()))
}

fn gini(counts: &[usize; NUM_LABELS], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

struct Builder<'a> {
    x: &'a [[f64; NUM_FEATURES]],
    y: &'a [usize],
    max_depth: Option<usize>,
    features_per_split: usize,
}

impl Builder<'_> {
    fn leaf(&self, idx: &[usize]) -> Node {
        let mut distribution = [0.0; NUM_LABELS];
        for &i in idx {
            distribution[self.y[i]] += 1.0;
        }
        let n = idx.len() as f64;
        distribution.iter_mut().for_each(|d| *d /= n);
        Node::Leaf { distribution }
    }

    /// Best threshold on `feature`: `(weighted child gini, threshold)`.
    fn best_threshold(&self, idx: &[usize], feature: usize) -> Option<(f64, f64)> {
        let mut pts: Vec<(f64, usize)> = idx.iter().map(|&i| (self.x[i][feature], self.y[i])).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = pts.len();
        let mut right = [0usize; NUM_LABELS];
        for &(_, y) in &pts {
            right[y] += 1;
        }
        let mut left = [0usize; NUM_LABELS];
        let mut best: Option<(f64, f64)> = None;
        for k in 0..n - 1 {
            let y = pts[k].1;
            left[y] += 1;
            right[y] -= 1;
            let (lo, hi) = (pts[k].0, pts[k + 1].0);
            if lo == hi {
                continue;
            }
            let nl = k + 1;
            let score = (nl as f64 * gini(&left, nl) + (n - nl) as f64 * gini(&right, n - nl)) / n as f64;
            if best.is_none_or(|(b, _)| score < b) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid < hi { mid } else { lo };
                best = Some((score, threshold));
            }
        }
        best
    }

    fn grow(&self, idx: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> Node {
        let first = self.y[idx[0]];
        let pure = idx.iter().all(|&i| self.y[i] == first);
        if pure || idx.len() < 2 || self.max_depth.is_some_and(|d| depth >= d) {
            return self.leaf(&idx);
        }
        // Draw candidates in a random order; if none of the first k can split
        // the node, keep drawing from the remaining features.
        let mut order: Vec<usize> = (0..NUM_FEATURES).collect();
        order.shuffle(rng);
        let mut best: Option<(f64, usize, f64)> = None;
        for (tried, &f) in order.iter().enumerate() {
            if tried >= self.features_per_split && best.is_some() {
                break;
            }
            if let Some((score, threshold)) = self.best_threshold(&idx, f) {
                if best.is_none_or(|(b, _, _)| score < b) {
                    best = Some((score, f, threshold));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return self.leaf(&idx);
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| self.x[i][feature] <= threshold);
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.grow(l, depth + 1, rng)),
            right: Box::new(self.grow(r, depth + 1, rng)),
        }
    }
}

/// Duplicates random members of every minority label until each label
/// present has as many examples as the largest one.
fn oversample(examples: &[LabeledExample], seed: u64) -> Vec<LabeledExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut by_label: Vec<Vec<&LabeledExample>> = vec![Vec::new(); NUM_LABELS];
    for e in examples {
        by_label[e.label.index()].push(e);
    }
    let target = by_label.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = examples.to_vec();
    for group in by_label.iter().filter(|g| !g.is_empty()) {
        for _ in group.len()..target {
            out.push(group[rng.gen_range(0..group.len())].clone());
        }
    }
    out
}

pub fn train(examples: &[LabeledExample], params: &TrainParams) -> Result<(ForestModel, Vec<TrainWarning>), ForestError> {
    if examples.is_empty() || params.trees == 0 {
        return Err(ForestError::InsufficientData);
    }
    let mut labels: Vec<StereotypeLabel> = examples.iter().map(|e| e.label).collect();
    labels.sort();
    labels.dedup();
    let mut warnings = Vec::new();
    if labels.len() == 1 {
        log::warn!("only one label ({}) in training data; model is constant", labels[0]);
        warnings.push(TrainWarning::DegenerateLabels(labels[0]));
    }

    let data = if params.oversample {
        oversample(examples, params.seed)
    } else {
        examples.to_vec()
    };
    let x: Vec<[f64; NUM_FEATURES]> = data.iter().map(|e| e.features.values).collect();
    let y: Vec<usize> = data.iter().map(|e| e.label.index()).collect();
    let builder = Builder {
        x: &x,
        y: &y,
        max_depth: params.max_depth,
        features_per_split: params.features_per_split.clamp(1, NUM_FEATURES),
    };
    let n = data.len();
    let trees = (0..params.trees)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(i as u64));
            let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            builder.grow(sample, 0, &mut rng)
        })
        .collect();

    let model = ForestModel {
        seed: params.seed,
        tree_count: params.trees,
        feature_order_hash: feature_order_hash(),
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        labels,
        trees,
    };
    Ok((model, warnings))
}

/// Mean of the trees' leaf distributions; the label is the first maximum in
/// [`StereotypeLabel::ALL`] order.
pub fn predict(model: &ForestModel, fv: &FeatureVector) -> Result<Prediction, ForestError> {
    let expected = feature_order_hash();
    if model.feature_order_hash != expected {
        return Err(ForestError::ModelFeatureMismatch {
            model: model.feature_order_hash.clone(),
            expected,
        });
    }
    let mut probabilities = [0.0; NUM_LABELS];
    for tree in &model.trees {
        for (p, d) in probabilities.iter_mut().zip(tree.leaf(&fv.values)) {
            *p += d;
        }
    }
    let total: f64 = probabilities.iter().sum();
    probabilities.iter_mut().for_each(|p| *p /= total);
    let mut best = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > probabilities[best] {
            best = i;
        }
    }
    Ok(Prediction {
        label: StereotypeLabel::ALL[best],
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use StereotypeLabel::*;

    fn example(key: usize, values: [f64; NUM_FEATURES], label: StereotypeLabel) -> LabeledExample {
        LabeledExample {
            features: FeatureVector {
                canonical_key: format!("k{key}"),
                values,
            },
            label,
        }
    }

    /// Feature 0 below 50 is an Information Holder, above is a Controller;
    /// the other features are unrelated noise.
    fn separable(n: usize) -> Vec<LabeledExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        (0..n)
            .map(|i| {
                let mut v = [0.0; NUM_FEATURES];
                for x in v.iter_mut() {
                    *x = rng.gen_range(0..1000) as f64;
                }
                v[0] = if i % 2 == 0 { rng.gen_range(0..50) as f64 } else { rng.gen_range(50..100) as f64 };
                example(i, v, if v[0] < 50.0 { InformationHolder } else { Controller })
            })
            .collect()
    }

    fn accuracy(model: &ForestModel, data: &[LabeledExample]) -> f64 {
        let hits = data
            .iter()
            .filter(|e| predict(model, &e.features).unwrap().label == e.label)
            .count();
        hits as f64 / data.len() as f64
    }

    #[test]
    fn constant_model() {
        let data: Vec<_> = (0..5).map(|i| example(i, [i as f64; NUM_FEATURES], ServiceProvider)).collect();
        let (model, warnings) = train(&data, &TrainParams::new(1)).unwrap();
        assert_eq!(warnings, [TrainWarning::DegenerateLabels(ServiceProvider)]);
        let p = predict(&model, &data[0].features).unwrap();
        assert_eq!(p.label, ServiceProvider);
        assert_eq!(p.probabilities[ServiceProvider.index()], 1.0);
    }

    #[test]
    fn empty_training_set() {
        assert_eq!(train(&[], &TrainParams::new(1)).unwrap_err(), ForestError::InsufficientData);
    }

    #[test]
    fn separable_fixture_is_learned() {
        let data = separable(60);
        let (model, _) = train(&data, &TrainParams::new(7)).unwrap();
        assert_eq!(accuracy(&model, &data), 1.0);
        assert!(model.trees.iter().all(leaf_sums_ok));
    }

    fn leaf_sums_ok(node: &Node) -> bool {
        match node {
            Node::Leaf { distribution } => (distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12,
            Node::Split { feature, left, right, .. } => *feature < NUM_FEATURES && leaf_sums_ok(left) && leaf_sums_ok(right),
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let data = separable(40);
        let mut params = TrainParams::new(42);
        params.trees = 20;
        params.oversample = true;
        let a = serde_json::to_string(&train(&data, &params).unwrap().0).unwrap();
        let b = serde_json::to_string(&train(&data, &params).unwrap().0).unwrap();
        assert_eq!(a, b);
        params.seed = 43;
        let c = serde_json::to_string(&train(&data, &params).unwrap().0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn json_round_trip_predicts_identically() {
        let data = separable(40);
        let mut params = TrainParams::new(5);
        params.trees = 15;
        let (model, _) = train(&data, &params).unwrap();
        let back: ForestModel = serde_json::from_str(&serde_json::to_string_pretty(&model).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut v = [0.0; NUM_FEATURES];
            v.iter_mut().for_each(|x| *x = rng.gen_range(-10.0..1000.0));
            let fv = FeatureVector { canonical_key: "probe".into(), values: v };
            assert_eq!(predict(&model, &fv).unwrap(), predict(&back, &fv).unwrap());
        }
    }

    #[test]
    fn feature_mismatch_is_detected() {
        let (mut model, _) = train(&separable(10), &TrainParams::new(1)).unwrap();
        model.feature_order_hash = "0000".into();
        assert!(matches!(predict(&model, &separable(1)[0].features), Err(ForestError::ModelFeatureMismatch { .. })));
    }

    #[test]
    fn monotone_rescaling_keeps_structure() {
        let data = separable(50);
        let rescaled: Vec<_> = data
            .iter()
            .map(|e| {
                let mut e = e.clone();
                e.features.values[0] = (e.features.values[0] / 10.0).exp();
                e
            })
            .collect();
        let mut params = TrainParams::new(11);
        params.trees = 10;
        let (a, _) = train(&data, &params).unwrap();
        let (b, _) = train(&rescaled, &params).unwrap();
        for (ta, tb) in a.trees.iter().zip(&b.trees) {
            assert_eq!(ta.structure(), tb.structure());
        }
        for (e, r) in data.iter().zip(&rescaled) {
            assert_eq!(predict(&a, &e.features).unwrap().label, predict(&b, &r.features).unwrap().label);
        }
    }

    #[test]
    fn max_depth_is_respected() {
        let mut params = TrainParams::new(2);
        params.max_depth = Some(1);
        params.trees = 5;
        let (model, _) = train(&separable(30), &params).unwrap();
        assert!(model.trees.iter().all(|t| t.depth() <= 1));
    }

    #[test]
    fn oversampling_balances_labels() {
        let mut data = separable(4);
        data.push(example(9, [1.0; NUM_FEATURES], Coordinator));
        let balanced = oversample(&data, 1);
        let count = |l: StereotypeLabel| balanced.iter().filter(|e| e.label == l).count();
        assert_eq!((count(InformationHolder), count(Controller), count(Coordinator)), (2, 2, 2));
    }

    #[test]
    fn noise_free_fixtures_fit_training_set() {
        // distinct points, labels a fixed function of two features
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<_> = (0..80)
                .map(|i| {
                    let mut v = [0.0; NUM_FEATURES];
                    v.iter_mut().for_each(|x| *x = rng.gen_range(0.0..1.0));
                    v[5] = i as f64;
                    let label = StereotypeLabel::ALL[((v[1] * 3.0) as usize + 3 * (v[2] > 0.5) as usize) % 6];
                    example(i, v, label)
                })
                .collect();
            let (model, _) = train(&data, &TrainParams::new(seed)).unwrap();
            assert_eq!(accuracy(&model, &data), 1.0, "seed {seed}");
        }
    }

    proptest! {
        #[test]
        fn probabilities_are_normalised(values in proptest::array::uniform23(-1e6f64..1e6)) {
            let mut params = TrainParams::new(4);
            params.trees = 8;
            let mut data = separable(20);
            data.push(example(99, [3.0; NUM_FEATURES], Structurer));
            let (model, _) = train(&data, &params).unwrap();
            let fv = FeatureVector { canonical_key: "x".into(), values };
            let p = predict(&model, &fv).unwrap();
            prop_assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert_eq!(p.clone(), predict(&model, &fv).unwrap());
        }
    }
}
