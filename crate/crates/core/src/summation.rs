//! Compensated summation.

use rayon::prelude::*;

/// Neumaier's variant of Kahan summation: the compensation also captures
/// the low bits when the new term is larger than the running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> KahanSum {
        KahanSum::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Adds another partial sum, keeping both halves of it.
    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for KahanSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> KahanSum {
        let mut s = KahanSum::new();
        s.extend(iter);
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().collect::<KahanSum>().value()
}

/// Sums fixed-size chunks on the rayon pool and merges them by chunk
/// index, so the result does not depend on scheduling.
pub fn parallel_compensated_sum(terms: &[f64], chunk: usize) -> f64 {
    let chunk = chunk.max(1);
    let parts: Vec<KahanSum> = terms
        .par_chunks(chunk)
        .map(|c| c.iter().copied().collect())
        .collect();
    let mut total = KahanSum::new();
    for p in &parts {
        total.merge(p);
    }
    total.value()
}
