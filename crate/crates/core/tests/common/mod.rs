#![allow(dead_code)]

use pubag_core::data::SparseVec;
use pubag_core::rng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Two Gaussian blobs in `d` dimensions with overlapping classes.
pub fn blobs(n_pos: usize, n_neg: usize, d: usize, seed: u64) -> (Vec<SparseVec>, Vec<SparseVec>) {
    let mut rng = rng::seeded(seed);
    let shift: f64 = rng.random_range(0.3..1.5);
    let mut draw = |offset: f64| {
        let v: Vec<f64> = (0..d)
            .map(|j| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z + if j == 0 { offset } else { 0.0 }
            })
            .collect();
        SparseVec::from_dense(&v)
    };
    let pos = (0..n_pos).map(|_| draw(shift)).collect();
    let neg = (0..n_neg).map(|_| draw(-shift)).collect();
    (pos, neg)
}

pub fn dense(x: &SparseVec, d: usize) -> Vec<f64> {
    x.to_dense(d)
}

pub fn refs(v: &[SparseVec]) -> Vec<&SparseVec> {
    v.iter().collect()
}
