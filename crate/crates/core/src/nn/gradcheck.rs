//! Central finite-difference oracle for analytic gradients.

use alloc::vec::Vec;

use super::rng::Rng;
use super::{Gradients, Parameterized};

pub const DEFAULT_STEP: f64 = 1e-4;
const REL_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    All,
    /// Uniformly sampled `(tensor, index)` pairs, with replacement.
    Sample {
        count: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub tensor: usize,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
    /// The probe crossed a non-differentiable point (see [`check_piecewise`]).
    pub kink: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn kinks(&self) -> usize {
        self.entries.iter().filter(|e| e.kink).count()
    }

    fn smooth(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.kink)
    }

    pub fn max_rel_error(&self) -> f64 {
        self.smooth().map(|e| e.rel_error).fold(0.0, f64::max)
    }

    pub fn fraction_within(&self, tol: f64) -> f64 {
        let n = self.smooth().count();
        if n == 0 {
            return 1.0;
        }
        self.smooth().filter(|e| e.rel_error <= tol).count() as f64 / n as f64
    }

    /// At least 99% of entries within `1e-4` and all within `1e-3`, ignoring
    /// kinked probes.
    pub fn passes(&self) -> bool {
        self.fraction_within(1e-4) >= 0.99 && self.max_rel_error() <= 1e-3
    }

    pub fn worst(&self) -> Option<&Entry> {
        self.smooth().max_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
    }
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_FLOOR)
}

/// Compares `analytic` against `(L(θ + h) - L(θ - h)) / 2h` for the selected
/// parameters. `loss` must be deterministic; the model is restored after
/// each probe.
pub fn check<M, F>(model: &mut M, analytic: &Gradients, selection: Selection, h: f64, mut loss: F) -> Report
where
    M: Parameterized + ?Sized,
    F: FnMut(&M) -> f64,
{
    check_piecewise(model, analytic, selection, h, |m| (loss(m), 0))
}

/// Like [`check`] for piecewise-smooth losses. `loss` also returns a
/// fingerprint of the active piece (for ReLU networks, the sign pattern of
/// every pre-activation); a probe whose `+h` and `-h` fingerprints differ
/// from the unperturbed one is flagged as a kink and excluded from the
/// summary statistics.
pub fn check_piecewise<M, F>(model: &mut M, analytic: &Gradients, selection: Selection, h: f64, mut loss: F) -> Report
where
    M: Parameterized + ?Sized,
    F: FnMut(&M) -> (f64, u64),
{
    let (_, base) = loss(model);
    let sizes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
    assert_eq!(sizes.len(), analytic.0.len(), "gradient tensor count");
    let targets: Vec<(usize, usize)> = match selection {
        Selection::All => sizes
            .iter()
            .enumerate()
            .flat_map(|(t, &n)| (0..n).map(move |i| (t, i)))
            .collect(),
        Selection::Sample { count, seed } => {
            let total: usize = sizes.iter().sum();
            let mut rng = Rng::new(seed);
            (0..count)
                .map(|_| {
                    let mut flat = rng.below(total);
                    let mut t = 0;
                    while flat >= sizes[t] {
                        flat -= sizes[t];
                        t += 1;
                    }
                    (t, flat)
                })
                .collect()
        }
    };

    let mut report = Report::default();
    for (t, i) in targets {
        let original = model.tensors()[t][i];
        model.tensors_mut()[t][i] = original + h;
        let (up, up_piece) = loss(model);
        model.tensors_mut()[t][i] = original - h;
        let (down, down_piece) = loss(model);
        model.tensors_mut()[t][i] = original;
        let numeric = (up - down) / (2.0 * h);
        let a = analytic.0[t][i];
        report.entries.push(Entry {
            tensor: t,
            index: i,
            analytic: a,
            numeric,
            rel_error: relative_error(a, numeric),
            kink: up_piece != base || down_piece != base,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quad(Vec<f64>);

    impl Parameterized for Quad {
        fn tensors(&self) -> Vec<&[f64]> {
            alloc::vec![&self.0[..]]
        }
        fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
            alloc::vec![&mut self.0[..]]
        }
    }

    fn cubic(q: &Quad) -> f64 {
        q.0.iter().enumerate().map(|(i, x)| (i as f64 + 1.0) * x * x * x).sum()
    }

    #[test]
    fn accepts_correct_and_rejects_wrong() {
        let mut q = Quad(alloc::vec![0.5, -1.0, 2.0]);
        let good = Gradients(alloc::vec![q
            .0
            .iter()
            .enumerate()
            .map(|(i, x)| 3.0 * (i as f64 + 1.0) * x * x)
            .collect()]);
        let r = check(&mut q, &good, Selection::All, DEFAULT_STEP, cubic);
        assert!(r.passes(), "{:?}", r.worst());
        assert_eq!(q.0, [0.5, -1.0, 2.0]);

        let mut bad = good.clone();
        bad.0[0][1] *= 1.01;
        let r = check(&mut q, &bad, Selection::All, DEFAULT_STEP, cubic);
        assert!(!r.passes());
        assert_eq!(r.worst().unwrap().index, 1);

        let r = check(
            &mut q,
            &good,
            Selection::Sample { count: 10, seed: 1 },
            DEFAULT_STEP,
            cubic,
        );
        assert_eq!(r.len(), 10);
        assert_eq!(r.kinks(), 0);
    }

    #[test]
    fn kinked_probes_are_flagged() {
        // |x| at x = 5e-5 with h = 1e-4: the central difference straddles 0.
        let mut q = Quad(alloc::vec![5e-5, 1.0]);
        let g = Gradients(alloc::vec![alloc::vec![1.0, 1.0]]);
        let abs = |q: &Quad| q.0.iter().map(|x| x.abs()).sum::<f64>();
        let piece = |q: &Quad| {
            q.0.iter()
                .enumerate()
                .fold(0u64, |a, (i, x)| a | (u64::from(*x > 0.0) << i))
        };
        let plain = check(&mut q, &g, Selection::All, DEFAULT_STEP, abs);
        assert!(!plain.passes());
        let r = check_piecewise(&mut q, &g, Selection::All, DEFAULT_STEP, |q| (abs(q), piece(q)));
        assert_eq!(r.kinks(), 1);
        assert!(r.passes());
    }
}
