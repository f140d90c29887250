use std::collections::HashMap;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::algebra::MinPlus;
use crate::pattern::{PatternBank, Word};

/// Below these sizes the direct sum beats the transform.
pub const FFT_MIN_N: usize = 64;
pub const FFT_MIN_P: usize = 8;

/// `a[i] = Σ_k λ[k] · b[i + k]` for `i ∈ [0, |b| − |λ|]`, summed directly.
pub fn correlate_direct(b: &[f64], lambda: &[f64]) -> Vec<f64> {
    if lambda.len() > b.len() {
        return Vec::new();
    }
    (0..=b.len() - lambda.len())
        .map(|i| lambda.iter().zip(&b[i..]).filter(|(l, _)| **l != 0.0).map(|(l, x)| l * x).sum())
        .collect()
}

/// Same as [`correlate_direct`], through a zero-padded power-of-two transform.
pub fn correlate_fft(b: &[f64], lambda: &[f64]) -> Vec<f64> {
    if lambda.is_empty() || lambda.len() > b.len() {
        return correlate_direct(b, lambda);
    }
    let size = (b.len() + lambda.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut x: Vec<Complex<f64>> = b.iter().map(|&v| Complex::new(v, 0.0)).collect();
    x.resize(size, Complex::default());
    // convolving with the reversed indicator gives the correlation
    let mut y: Vec<Complex<f64>> = lambda.iter().rev().map(|&v| Complex::new(v, 0.0)).collect();
    y.resize(size, Complex::default());
    forward.process(&mut x);
    forward.process(&mut y);
    for (u, v) in x.iter_mut().zip(&y) {
        *u *= v;
    }
    inverse.process(&mut x);
    let scale = 1.0 / size as f64;
    let shift = lambda.len() - 1;
    (0..=b.len() - lambda.len()).map(|i| x[i + shift].re * scale).collect()
}

/// Picks the direct or the transform path by size.
pub fn correlate(b: &[f64], lambda: &[f64]) -> Vec<f64> {
    if b.len() < FFT_MIN_N || lambda.len() < FFT_MIN_P {
        correlate_direct(b, lambda)
    } else {
        correlate_fft(b, lambda)
    }
}

/// `f_s(α|β)` for `s ∈ [|α|, n]`, stored at `s − |α|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternCostTable {
    pub first: usize,
    pub values: Vec<f64>,
}

impl PatternCostTable {
    pub fn at(&self, s: usize) -> Option<f64> {
        s.checked_sub(self.first).and_then(|k| self.values.get(k)).copied()
    }
}

/// Energy of every placement of `word`: `b[j − 1]` for a start `j`.
pub fn placement_energies(bank: &PatternBank, word: &Word) -> Vec<f64> {
    let n = bank.n();
    if word.len() > n {
        return Vec::new();
    }
    let costs = bank.costs::<MinPlus<f64>>();
    (1..=n + 1 - word.len()).map(|j| costs.get(word, j).0).collect()
}

/// Where `beta` occurs inside `alpha`.
pub fn indicator(alpha: &Word, beta: &Word) -> Vec<f64> {
    if beta.len() > alpha.len() {
        return Vec::new();
    }
    (0..=alpha.len() - beta.len()).map(|k| if alpha.0[k..k + beta.len()] == beta.0[..] { 1.0 } else { 0.0 }).collect()
}

fn table_from(alpha: &Word, a: Vec<f64>, n: usize) -> PatternCostTable {
    let len = (n + 1).saturating_sub(alpha.len().max(1));
    let mut values = a;
    values.resize(len, 0.0);
    PatternCostTable { first: alpha.len().max(1), values }
}

/// Sum of the energies of the placements of `beta` inside the placement of
/// `alpha` ending at `s`, for every `s`.
pub fn fft_pattern_costs(bank: &PatternBank, alpha: &Word, beta: &Word) -> PatternCostTable {
    let lambda = indicator(alpha, beta);
    let a = if lambda.is_empty() { Vec::new() } else { correlate(&placement_energies(bank, beta), &lambda) };
    table_from(alpha, a, bank.n())
}

fn direct_pattern_costs(bank: &PatternBank, alpha: &Word, beta: &Word) -> PatternCostTable {
    let lambda = indicator(alpha, beta);
    let a = if lambda.is_empty() { Vec::new() } else { correlate_direct(&placement_energies(bank, beta), &lambda) };
    table_from(alpha, a, bank.n())
}

/// `f(α_s)` for every word of `words` and every end `s`, with the words of
/// Γ no longer than `delta` handled by convolution and the rest directly.
pub fn assemble_f_via_fft(bank: &PatternBank, words: &[Word], delta: usize) -> HashMap<Word, PatternCostTable> {
    let gamma = bank.gamma();
    let mut out = HashMap::with_capacity(words.len());
    for alpha in words {
        let mut acc = table_from(alpha, Vec::new(), bank.n());
        for beta in &gamma {
            let t = if beta.len() <= delta {
                fft_pattern_costs(bank, alpha, beta)
            } else {
                direct_pattern_costs(bank, alpha, beta)
            };
            for (x, y) in acc.values.iter_mut().zip(&t.values) {
                *x += y;
            }
        }
        out.insert(alpha.clone(), acc);
    }
    out
}
