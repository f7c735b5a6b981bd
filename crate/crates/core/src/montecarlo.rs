//! Monte Carlo summaries shared by the samplers and estimators.

/// Draws of a p-vector stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StatSample {
    p: usize,
    data: Vec<f64>,
}

impl StatSample {
    pub fn new(p: usize) -> Self {
        StatSample { p, data: Vec::new() }
    }

    pub fn with_capacity(p: usize, rows: usize) -> Self {
        StatSample {
            p,
            data: Vec::with_capacity(p * rows),
        }
    }

    pub fn from_rows(p: usize, rows: impl IntoIterator<Item = Vec<f64>>) -> Self {
        let mut sample = StatSample::new(p);
        for row in rows {
            sample.push(&row);
        }
        sample
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.p);
        self.data.extend_from_slice(row);
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.p).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.p..(r + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p.max(1))
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k]).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.p];
        for row in self.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        let count = self.len() as f64;
        mean.iter_mut().for_each(|m| *m /= count);
        mean
    }

    /// Sample covariance (divisor m).
    #[allow(clippy::needless_range_loop)]
    pub fn covariance(&self) -> Vec<Vec<f64>> {
        let mean = self.mean();
        let mut cov = vec![vec![0.0; self.p]; self.p];
        for row in self.rows() {
            for a in 0..self.p {
                let da = row[a] - mean[a];
                for b in a..self.p {
                    cov[a][b] += da * (row[b] - mean[b]);
                }
            }
        }
        let count = self.len() as f64;
        for a in 0..self.p {
            for b in a..self.p {
                cov[a][b] /= count;
                cov[b][a] = cov[a][b];
            }
        }
        cov
    }

    /// Per-coordinate Monte Carlo standard error of the mean (batch means).
    pub fn mean_standard_errors(&self) -> Vec<f64> {
        (0..self.p)
            .map(|k| batch_means_se(&self.column(k)))
            .collect()
    }

    /// Per-coordinate effective sample size.
    pub fn effective_sizes(&self) -> Vec<f64> {
        (0..self.p)
            .map(|k| effective_sample_size(&self.column(k)))
            .collect()
    }
}

pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of the mean of an autocorrelated series by
/// non-overlapping batch means with about sqrt(m) batches.
pub fn batch_means_se(xs: &[f64]) -> f64 {
    let m = xs.len();
    if m < 4 {
        return f64::NAN;
    }
    let batches = ((m as f64).sqrt().floor() as usize).clamp(2, 64);
    let size = m / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| mean(&xs[b * size..(b + 1) * size]))
        .collect();
    let used = (batches * size) as f64;
    // var(batch mean) * size estimates the long-run variance
    let long_run = variance(&means) * size as f64;
    (long_run / used).sqrt()
}

/// Effective sample size from Geyer's initial positive sequence of
/// autocorrelations.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let m = xs.len();
    if m < 4 {
        return m as f64;
    }
    let mu = mean(xs);
    let centred: Vec<f64> = xs.iter().map(|x| x - mu).collect();
    let c0 = centred.iter().map(|x| x * x).sum::<f64>() / m as f64;
    if c0 <= 0.0 {
        return m as f64;
    }
    let autocorr = |lag: usize| -> f64 {
        centred[..m - lag]
            .iter()
            .zip(&centred[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (m as f64 * c0)
    };
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < m {
        let pair = autocorr(lag) + autocorr(lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    (m as f64 / tau.max(1.0 / m as f64)).min(m as f64)
}

/// Log of the mean of `exp(values)` together with its delta-method
/// standard error, treating the series as an MCMC output.
pub fn log_mean_exp(values: &[f64]) -> (f64, f64) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let m = mean(&scaled);
    let se = batch_means_se(&scaled) / m;
    (max + m.ln(), se)
}

/// Importance weights `exp(values)` normalised to sum one, plus the
/// Kish effective sample size.
pub fn normalised_weights(values: &[f64]) -> (Vec<f64>, f64) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let ess = 1.0 / w.iter().map(|x| x * x).sum::<f64>();
    (w, ess)
}

/// Weighted mean and covariance of the rows of `sample`.
#[allow(clippy::needless_range_loop)]
pub fn weighted_moments(sample: &StatSample, weights: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let p = sample.dim();
    let mut mean = vec![0.0; p];
    for (row, w) in sample.rows().zip(weights) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += w * v;
        }
    }
    let mut cov = vec![vec![0.0; p]; p];
    for (row, w) in sample.rows().zip(weights) {
        for a in 0..p {
            let da = row[a] - mean[a];
            for b in a..p {
                cov[a][b] += w * da * (row[b] - mean[b]);
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            cov[a][b] = cov[b][a];
        }
    }
    (mean, cov)
}

/// splitmix64 finaliser; derives independent stream seeds from a master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
