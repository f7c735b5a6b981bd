//! Fixtures shared by the benchmarks.

use ergm_sampled::{Network, NodeAttributes};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Undirected Bernoulli graph with the given density.
pub fn random_network(n: usize, density: f64, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = Network::empty(n, false);
    for d in y.clone().dyads() {
        if rng.gen::<f64>() < density {
            y.set(d.i, d.j, true);
        }
    }
    y
}

/// Random covariates with the collaboration-network column layout.
pub fn random_attributes(n: usize, seed: u64) -> NodeAttributes {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut column = |levels: &[f64]| -> Vec<f64> {
        (0..n).map(|_| levels[rng.gen_range(0..levels.len())]).collect()
    };
    let practice = column(&[0.0, 1.0]);
    let gender = column(&[0.0, 1.0]);
    let office = column(&[1.0, 2.0, 3.0]);
    let seniority = (1..=n).map(|r| r as f64 / n as f64).collect();
    NodeAttributes::new(n)
        .with("seniority", seniority)
        .and_then(|a| a.with("practice", practice))
        .and_then(|a| a.with("gender", gender))
        .and_then(|a| a.with("office", office))
        .expect("fresh columns")
}
