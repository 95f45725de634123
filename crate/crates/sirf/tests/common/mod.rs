//! Shared helpers for integration tests.
#![allow(dead_code)] // each test binary uses a different subset

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use sirf::data::Dataset;
use sirf::rng::stream_rng;

/// Gaussian features with labels from a deterministic rule on the row.
pub fn gaussian_data(n: usize, p: usize, seed: u64, label: impl Fn(&[f64]) -> u8) -> Dataset {
    let mut rng = stream_rng(seed, 0);
    let mut columns = vec![Vec::with_capacity(n); p];
    let mut responses = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
        responses.push(label(&row));
        for (j, &v) in row.iter().enumerate() {
            columns[j].push(v);
        }
    }
    let names = (0..p).map(|j| format!("x{}", j + 1)).collect();
    Dataset::from_columns(columns, responses, names).unwrap()
}

/// Gaussian features with independent random labels (pure noise).
pub fn noise_data(n: usize, p: usize, seed: u64) -> Dataset {
    let base = gaussian_data(n, p, seed, |_| 0);
    let mut rng = stream_rng(seed ^ 0x5eed, 1);
    let responses: Vec<u8> = (0..n).map(|_| rng.random_range(0..2) as u8).collect();
    Dataset::from_columns(
        (0..p).map(|j| base.column(j).to_vec()).collect(),
        responses,
        base.feature_names().to_vec(),
    )
    .unwrap()
}

pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}
