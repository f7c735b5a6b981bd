//! Brute-force oracles written without the crate's statistics, tracing or
//! enumeration code. Graphs are bit masks over a fixed dyad order.
#![allow(dead_code)]

use std::path::PathBuf;

use ergm_sampled::Network;

/// Dyads in mask order: `i < j` for undirected graphs, all `i != j` otherwise.
pub fn dyad_list(n: usize, directed: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (directed || i < j) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn adjacency(n: usize, directed: bool, mask: u64) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for (k, &(i, j)) in dyad_list(n, directed).iter().enumerate() {
        if mask >> k & 1 == 1 {
            a[i][j] = true;
            if !directed {
                a[j][i] = true;
            }
        }
    }
    a
}

pub fn network(n: usize, directed: bool, mask: u64) -> Network {
    let a = adjacency(n, directed, mask);
    let mut y = Network::empty(n, directed);
    for (i, row) in a.iter().enumerate() {
        for (j, &tie) in row.iter().enumerate() {
            if tie && (directed || i < j) {
                y.set(i, j, true);
            }
        }
    }
    y
}

pub fn mask_of(y: &Network) -> u64 {
    dyad_list(y.n(), y.is_directed())
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| y.has_edge(i, j))
        .fold(0, |m, (k, _)| m | 1 << k)
}

/// Edge count and GWESP of an undirected graph, straight from the
/// definition `e^a Σ_k (1 − (1 − e^-a)^k) EP_k`.
pub fn edges_gwesp(a: &[Vec<bool>], decay: f64) -> (f64, f64) {
    let n = a.len();
    let mut edges = 0.0;
    let mut gwesp = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if !a[i][j] {
                continue;
            }
            edges += 1.0;
            let k = (0..n).filter(|&h| a[i][h] && a[j][h]).count() as i32;
            gwesp += decay.exp() * (1.0 - (1.0 - (-decay).exp()).powi(k));
        }
    }
    (edges, gwesp)
}

/// `η·Z(y)` for every undirected graph on `n` nodes under edges + GWESP.
pub fn log_weights(n: usize, decay: f64, eta: &[f64]) -> Vec<f64> {
    let m = n * (n - 1) / 2;
    (0..1u64 << m)
        .map(|mask| {
            let (e, g) = edges_gwesp(&adjacency(n, false, mask), decay);
            eta[0] * e + eta[1] * g
        })
        .collect()
}

pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let top = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

pub fn probabilities(log_w: &[f64]) -> Vec<f64> {
    let z = log_sum_exp(log_w.iter().cloned());
    log_w.iter().map(|w| (w - z).exp()).collect()
}

/// `KL(ξ‖η)` by summing over every graph.
pub fn kl(n: usize, decay: f64, xi: &[f64], eta: &[f64]) -> f64 {
    let lx = log_weights(n, decay, xi);
    let le = log_weights(n, decay, eta);
    let zx = log_sum_exp(lx.iter().cloned());
    let ze = log_sum_exp(le.iter().cloned());
    lx.iter()
        .zip(&le)
        .map(|(a, b)| {
            let p = (a - zx).exp();
            p * ((a - zx) - (b - ze))
        })
        .sum()
}

/// Nodes reached from `s0` within `limit` waves, following out-ties.
pub fn trace_nodes(a: &[Vec<bool>], s0: u32, limit: usize) -> u32 {
    let n = a.len();
    let mut selected = s0;
    let mut frontier = s0;
    for _ in 0..limit {
        let mut next = 0u32;
        for i in (0..n).filter(|i| frontier >> i & 1 == 1) {
            for j in (0..n).filter(|&j| a[i][j]) {
                next |= 1 << j;
            }
        }
        next &= !selected;
        if next == 0 {
            break;
        }
        selected |= next;
        frontier = next;
    }
    selected
}

/// Dyads observed once `selected` is sampled: undirected dyads with a sampled
/// endpoint; directed dyads whose sender is sampled.
pub fn observed_mask(n: usize, directed: bool, selected: u32) -> u64 {
    dyad_list(n, directed)
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| selected >> i & 1 == 1 || (!directed && selected >> j & 1 == 1))
        .fold(0, |m, (k, _)| m | 1 << k)
}

pub fn bernoulli_weight(psi: f64, n: usize, s: u32) -> f64 {
    let k = s.count_ones() as i32;
    psi.powi(k) * (1.0 - psi).powi(n as i32 - k)
}

pub fn is_connected(a: &[Vec<bool>]) -> bool {
    let n = a.len();
    n == 0 || trace_nodes(a, 1, n).count_ones() as usize == n
}

/// Where the collaboration-network bundle is expected.
pub fn lazega_dir() -> PathBuf {
    std::env::var_os("LAZEGA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/lazega"))
}
