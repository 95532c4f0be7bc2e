//! Inputs shared by the benchmarks.

use chartqa_core::answer_eval::TableEntry;
use chartqa_core::chart_data::Cell;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| f64::from(rng.gen_range(-10_000..10_000)) / 10.0).collect()
}

pub fn random_entries(n: usize, seed: u64) -> Vec<TableEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| TableEntry {
            key: format!("row{} col{}", rng.gen_range(0..n), i % 4),
            value: Cell::new(format!("{}.{}", rng.gen_range(0..1000), rng.gen_range(0..10))),
        })
        .collect()
}

pub fn random_costs(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect()
}
