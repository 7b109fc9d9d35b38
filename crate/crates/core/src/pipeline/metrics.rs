//! Support-weighted classification metrics over the two stances.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Stance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    /// Arithmetic mean of several runs.
    pub fn mean(runs: &[Metrics]) -> Option<Metrics> {
        if runs.is_empty() {
            return None;
        }
        let n = runs.len() as f64;
        Some(Metrics {
            precision: runs.iter().map(|m| m.precision).sum::<f64>() / n,
            recall: runs.iter().map(|m| m.recall).sum::<f64>() / n,
            f1: runs.iter().map(|m| m.f1).sum::<f64>() / n,
        })
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={:.4} R={:.4} wF1={:.4}",
            self.precision, self.recall, self.f1
        )
    }
}

/// Counts indexed `[gold][predicted]`, class 0 being Favour.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_pairs(predictions: &[Stance], golds: &[Stance]) -> Result<Self> {
        check_lengths(predictions, golds)?;
        let mut m = ConfusionMatrix::default();
        for (p, g) in predictions.iter().zip(golds) {
            m.counts[g.class_index()][p.class_index()] += 1;
        }
        Ok(m)
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        for g in 0..2 {
            for p in 0..2 {
                self.counts[g][p] += other.counts[g][p];
            }
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn gold_count(&self, class: Stance) -> usize {
        self.counts[class.class_index()].iter().sum()
    }

    pub fn predicted_count(&self, class: Stance) -> usize {
        self.counts.iter().map(|row| row[class.class_index()]).sum()
    }

    /// Support-weighted precision, recall and F1; empty ratios count as 0.
    pub fn metrics(&self) -> Metrics {
        let total = self.total();
        let mut out = Metrics {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        };
        if total == 0 {
            return out;
        }
        for class in Stance::ALL {
            let c = class.class_index();
            let tp = self.counts[c][c] as f64;
            let support = self.gold_count(class) as f64;
            let predicted = self.predicted_count(class) as f64;
            let p = ratio(tp, predicted);
            let r = ratio(tp, support);
            let f1 = ratio(2.0 * p * r, p + r);
            let w = support / total as f64;
            out.precision += w * p;
            out.recall += w * r;
            out.f1 += w * f1;
        }
        out
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "            pred F  pred A")?;
        for class in Stance::ALL {
            let row = self.counts[class.class_index()];
            writeln!(f, "  gold {}  {:>7} {:>7}", class, row[0], row[1])?;
        }
        Ok(())
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn check_lengths(predictions: &[Stance], golds: &[Stance]) -> Result<()> {
    if predictions.len() != golds.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            golds.len()
        )));
    }
    if golds.is_empty() {
        return Err(Error::InvalidInput("no predictions to score".into()));
    }
    Ok(())
}

pub fn metrics(predictions: &[Stance], golds: &[Stance]) -> Result<Metrics> {
    Ok(ConfusionMatrix::from_pairs(predictions, golds)?.metrics())
}
