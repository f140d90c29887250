use rand::Rng;

use crate::error::{Error, Result};

/// Vose's alias table: constant-time draws from a fixed discrete
/// distribution after linear-time construction.
#[derive(Clone, Debug, PartialEq)]
pub struct AliasTable {
    threshold: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || !(total > 0.0) || !total.is_finite() || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::ZeroWeights);
        }
        let n = weights.len();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut threshold = vec![1.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            threshold[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // leftovers differ from 1 only by rounding
        for i in small.into_iter().chain(large) {
            threshold[i] = 1.0;
        }
        for i in 0..n {
            // never land on a zero-weight slot through rounding
            if weights[i] == 0.0 {
                threshold[i] = 0.0;
            }
        }
        Ok(AliasTable { threshold, alias })
    }

    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }

    pub fn threshold(&self, i: usize) -> f64 {
        self.threshold[i]
    }

    pub fn alias(&self, i: usize) -> usize {
        self.alias[i] as usize
    }

    /// Draw from one uniform `u ∈ [0, 1)`.
    pub fn pick(&self, u: f64) -> usize {
        let x = u * self.len() as f64;
        let i = (x as usize).min(self.len() - 1);
        if x - (i as f64) < self.threshold[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.pick(rng.gen::<f64>())
    }

    /// Probability of drawing `i`, read back from the table.
    pub fn probability(&self, i: usize) -> f64 {
        let n = self.len() as f64;
        let mut p = self.threshold[i] / n;
        for j in 0..self.len() {
            if self.alias[j] as usize == i && j != i {
                p += (1.0 - self.threshold[j]) / n;
            }
        }
        p
    }
}

/// Linear-scan draw proportional to `weights`, or `None` when every weight
/// is zero.
pub fn pick_direct(weights: impl Iterator<Item = f64> + Clone, u: f64) -> Option<usize> {
    let total: f64 = weights.clone().sum();
    if !(total > 0.0) {
        return None;
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            acc += w;
            last = Some(i);
            if target < acc {
                return Some(i);
            }
        }
    }
    last
}
