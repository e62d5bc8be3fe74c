//! Micro-averaged multi-label metrics and the topology comparison table.
//!
//! Ratios with a zero denominator are defined as 0, so an empty prediction
//! set scores `P = R = F1 = 0` even when the gold set is empty too.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::Topology;
use crate::vocab::{LabelVector, NUM_LABELS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ClassCounts {
    pub fn f1(&self) -> f64 {
        let p = ratio(self.tp, self.tp + self.fp);
        let r = ratio(self.tp, self.tp + self.fn_);
        f1(p, r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    /// Unweighted mean of per-class F1, reported as a diagnostic only.
    pub macro_f1: f64,
    pub per_class: Vec<ClassCounts>,
    pub n_examples: usize,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

impl MetricsReport {
    pub fn from_counts(per_class: Vec<ClassCounts>, n_examples: usize) -> Self {
        let (tp, fp, fn_) = per_class
            .iter()
            .fold((0, 0, 0), |(a, b, c), k| (a + k.tp, b + k.fp, c + k.fn_));
        let p = ratio(tp, tp + fp);
        let r = ratio(tp, tp + fn_);
        let macro_f1 = per_class.iter().map(ClassCounts::f1).sum::<f64>() / per_class.len().max(1) as f64;
        Self {
            micro_precision: p,
            micro_recall: r,
            micro_f1: f1(p, r),
            macro_f1,
            per_class,
            n_examples,
        }
    }
}

pub fn micro_prf(preds: &[LabelVector], golds: &[LabelVector]) -> Result<MetricsReport> {
    if preds.len() != golds.len() {
        return Err(Error::ShapeMismatch {
            context: "predictions vs gold labels",
            expected: golds.len(),
            actual: preds.len(),
        });
    }
    let mut counts = alloc::vec![ClassCounts::default(); NUM_LABELS];
    for (p, g) in preds.iter().zip(golds) {
        for (c, k) in counts.iter_mut().enumerate() {
            match (p.get(c), g.get(c)) {
                (true, true) => k.tp += 1,
                (true, false) => k.fp += 1,
                (false, true) => k.fn_ += 1,
                (false, false) => {}
            }
        }
    }
    Ok(MetricsReport::from_counts(counts, preds.len()))
}

/// Micro F1 values of the four text-and-image fusion rows in the published
/// results, shown beside measured values for orientation only.
pub fn reference_f1(topology: Topology) -> f64 {
    match topology {
        Topology::Concat => 0.4983,
        Topology::Early => 0.5058,
        Topology::Late => 0.5407,
        Topology::Mfas => 0.5698,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    rows: Vec<(Topology, MetricsReport)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub macro_f1: f64,
    pub n_examples: usize,
    pub reference_f1: f64,
    pub per_class: Vec<ClassCounts>,
}

pub fn comparison_report(results: BTreeMap<Topology, MetricsReport>) -> Result<ComparisonReport> {
    if results.is_empty() {
        return Err(Error::EmptyDataset);
    }
    // Topology's ordering is the fixed row order.
    Ok(ComparisonReport {
        rows: results.into_iter().collect(),
    })
}

impl ComparisonReport {
    pub fn rows(&self) -> &[(Topology, MetricsReport)] {
        &self.rows
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>9} {:>9} {:>9}",
            "topology", "precision", "recall", "f1", "reference"
        );
        for (t, m) in &self.rows {
            let _ = writeln!(
                out,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
                t.tag(),
                m.micro_precision,
                m.micro_recall,
                m.micro_f1,
                reference_f1(*t)
            );
        }
        out
    }

    pub fn to_json_map(&self) -> BTreeMap<String, ComparisonRow> {
        self.rows
            .iter()
            .map(|(t, m)| {
                (
                    String::from(t.tag()),
                    ComparisonRow {
                        precision: m.micro_precision,
                        recall: m.micro_recall,
                        f1: m.micro_f1,
                        macro_f1: m.macro_f1,
                        n_examples: m.n_examples,
                        reference_f1: reference_f1(*t),
                        per_class: m.per_class.clone(),
                    },
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_map())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Rng;
    use proptest::prelude::*;

    fn random_vectors(rng: &mut Rng, n: usize, density: f64) -> Vec<LabelVector> {
        (0..n)
            .map(|_| {
                let mut bits = [false; NUM_LABELS];
                for b in &mut bits {
                    *b = rng.next_f64() < density;
                }
                LabelVector::from_bits(bits)
            })
            .collect()
    }

    fn brute_force(preds: &[LabelVector], golds: &[LabelVector]) -> (u64, u64, u64) {
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for i in 0..preds.len() {
            for c in 0..NUM_LABELS {
                let p = preds[i].bits()[c];
                let g = golds[i].bits()[c];
                if p && g {
                    tp += 1;
                }
                if p && !g {
                    fp += 1;
                }
                if !p && g {
                    fn_ += 1;
                }
            }
        }
        (tp, fp, fn_)
    }

    #[test]
    fn perfect_and_degenerate() {
        let mut rng = Rng::new(1);
        let g = random_vectors(&mut rng, 20, 0.3);
        let m = micro_prf(&g, &g).unwrap();
        assert_eq!((m.micro_precision, m.micro_recall, m.micro_f1), (1.0, 1.0, 1.0));
        let zeros = alloc::vec![LabelVector::zeros(); 20];
        let m = micro_prf(&zeros, &g).unwrap();
        assert_eq!((m.micro_precision, m.micro_recall, m.micro_f1), (0.0, 0.0, 0.0));
        let m = micro_prf(&zeros, &zeros).unwrap();
        assert_eq!((m.micro_precision, m.micro_recall, m.micro_f1), (0.0, 0.0, 0.0));
        assert!(micro_prf(&zeros[..3], &g).is_err());
    }

    #[test]
    fn matches_brute_force_on_1000_sets() {
        let mut rng = Rng::new(77);
        for _ in 0..1000 {
            let n = 1 + rng.below(30);
            let density = rng.next_f64();
            let p = random_vectors(&mut rng, n, density);
            let g = random_vectors(&mut rng, n, density);
            let m = micro_prf(&p, &g).unwrap();
            let (tp, fp, fn_) = brute_force(&p, &g);
            let sum = m
                .per_class
                .iter()
                .fold((0, 0, 0), |a, k| (a.0 + k.tp, a.1 + k.fp, a.2 + k.fn_));
            assert_eq!(sum, (tp, fp, fn_));
            let prec = if tp + fp == 0 {
                0.0
            } else {
                tp as f64 / (tp + fp) as f64
            };
            let rec = if tp + fn_ == 0 {
                0.0
            } else {
                tp as f64 / (tp + fn_) as f64
            };
            let f = if prec + rec == 0.0 {
                0.0
            } else {
                2.0 * prec * rec / (prec + rec)
            };
            assert_eq!(m.micro_precision, prec);
            assert_eq!(m.micro_recall, rec);
            assert_eq!(m.micro_f1, f);
            for c in 0..NUM_LABELS {
                let gold_pos = g.iter().filter(|v| v.get(c)).count() as u64;
                assert_eq!(m.per_class[c].tp + m.per_class[c].fn_, gold_pos);
            }
        }
    }

    #[test]
    fn report_formatting_and_order() {
        let mut rng = Rng::new(3);
        let g = random_vectors(&mut rng, 10, 0.4);
        let p = random_vectors(&mut rng, 10, 0.4);
        let mut results = BTreeMap::new();
        results.insert(Topology::Mfas, micro_prf(&p, &g).unwrap());
        results.insert(Topology::Concat, micro_prf(&g, &g).unwrap());
        results.insert(Topology::Late, micro_prf(&p, &g).unwrap());
        results.insert(Topology::Early, micro_prf(&p, &g).unwrap());
        let report = comparison_report(results).unwrap();
        let order: Vec<Topology> = report.rows().iter().map(|r| r.0).collect();
        assert_eq!(
            order,
            [Topology::Concat, Topology::Early, Topology::Late, Topology::Mfas]
        );
        let text = report.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("Concat"));
        assert!(lines[1].contains("1.0000    1.0000    1.0000"));
        assert!(lines[4].starts_with("MFAS"));

        let json = report.to_json().unwrap();
        let back: BTreeMap<String, ComparisonRow> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report.to_json_map());
        assert_eq!(back["Concat"].f1, 1.0);
        assert!(comparison_report(BTreeMap::new()).is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_perfect_example_monotone(seed in any::<u64>(), n in 1usize..40) {
            let mut rng = Rng::new(seed);
            let p = random_vectors(&mut rng, n, 0.3);
            let g = random_vectors(&mut rng, n, 0.3);
            let base = micro_prf(&p, &g).unwrap();
            let mut idx: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut idx);
            let ps: Vec<_> = idx.iter().map(|&i| p[i]).collect();
            let gs: Vec<_> = idx.iter().map(|&i| g[i]).collect();
            prop_assert_eq!(&micro_prf(&ps, &gs).unwrap(), &base);

            let extra = random_vectors(&mut rng, 1, 0.3)[0];
            let mut p2 = p.clone();
            let mut g2 = g.clone();
            p2.push(extra);
            g2.push(extra);
            prop_assert!(micro_prf(&p2, &g2).unwrap().micro_f1 >= base.micro_f1 - 1e-15);
        }
    }
}
