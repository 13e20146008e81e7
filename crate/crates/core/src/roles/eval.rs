use serde::{Deserialize, Serialize};

use super::forest::{predict, ForestError, ForestModel};
use super::{LabeledExample, StereotypeLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelScores {
    pub label: StereotypeLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    /// Labels that occur as truth or prediction, in enumeration order.
    pub per_label: Vec<LabelScores>,
    pub macro_f1: f64,
    /// `confusion[actual][predicted]`.
    pub confusion: [[usize; 6]; 6],
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Confusion-matrix scores; a score with an empty denominator is 0.
pub fn scores(actual: &[StereotypeLabel], predicted: &[StereotypeLabel]) -> Evaluation {
    assert_eq!(actual.len(), predicted.len(), "actual and predicted lengths differ");
    let mut confusion = [[0usize; 6]; 6];
    for (a, p) in actual.iter().zip(predicted) {
        confusion[a.index()][p.index()] += 1;
    }
    let mut per_label = Vec::new();
    for l in StereotypeLabel::ALL {
        let i = l.index();
        let support: usize = confusion[i].iter().sum();
        let predicted_as: usize = confusion.iter().map(|row| row[i]).sum();
        if support == 0 && predicted_as == 0 {
            continue;
        }
        let tp = confusion[i][i];
        let precision = ratio(tp, predicted_as);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_label.push(LabelScores {
            label: l,
            precision,
            recall,
            f1,
            support,
        });
    }
    let hits: usize = (0..6).map(|i| confusion[i][i]).sum();
    let macro_f1 = if per_label.is_empty() {
        0.0
    } else {
        per_label.iter().map(|s| s.f1).sum::<f64>() / per_label.len() as f64
    };
    Evaluation {
        accuracy: ratio(hits, actual.len()),
        per_label,
        macro_f1,
        confusion,
    }
}

pub fn evaluate(model: &ForestModel, heldout: &[LabeledExample]) -> Result<Evaluation, ForestError> {
    let predicted = heldout
        .iter()
        .map(|e| predict(model, &e.features).map(|p| p.label))
        .collect::<Result<Vec<_>, _>>()?;
    let actual: Vec<StereotypeLabel> = heldout.iter().map(|e| e.label).collect();
    Ok(scores(&actual, &predicted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use StereotypeLabel::*;

    #[test]
    fn perfect_predictions() {
        let labels = [Coordinator, Interfacer, Interfacer, Structurer];
        let e = scores(&labels, &labels);
        assert_eq!(e.accuracy, 1.0);
        assert!(e.per_label.iter().all(|s| s.f1 == 1.0));
        assert_eq!(e.macro_f1, 1.0);
    }

    #[test]
    fn constant_predictor_on_balanced_pair() {
        let e = scores(&[Controller, Controller, Interfacer, Interfacer], &[Controller; 4]);
        assert_eq!(e.accuracy, 0.5);
    }

    #[test]
    fn four_example_confusion() {
        let actual = [InformationHolder, InformationHolder, Controller, ServiceProvider];
        let predicted = [InformationHolder, Controller, Controller, InformationHolder];
        let e = scores(&actual, &predicted);
        assert_eq!(e.accuracy, 0.5);
        let by = |l: StereotypeLabel| e.per_label.iter().find(|s| s.label == l).unwrap().clone();
        let ct = by(Controller);
        assert_eq!((ct.precision, ct.recall), (0.5, 1.0));
        assert!((ct.f1 - 2.0 / 3.0).abs() < 1e-12);
        let ih = by(InformationHolder);
        assert_eq!((ih.precision, ih.recall, ih.f1, ih.support), (0.5, 0.5, 0.5, 2));
        let sp = by(ServiceProvider);
        assert_eq!((sp.precision, sp.recall, sp.f1), (0.0, 0.0, 0.0));
        assert_eq!(e.per_label.len(), 3);
        assert!((e.macro_f1 - (0.5 + 2.0 / 3.0) / 3.0).abs() < 1e-12);
        assert_eq!(e.confusion[InformationHolder.index()][Controller.index()], 1);
    }
}
