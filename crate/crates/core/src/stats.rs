//! Flyvbjerg–Petersen reblocking of serially correlated samples.

use std::fmt::Write as _;

/// Minimum number of samples left after discarding.
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("{len} samples after discarding {discard}; need at least {MIN_SAMPLES}")]
    TooShort { len: usize, discard: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockLevel {
    pub block_size: usize,
    pub n_blocks: usize,
    pub mean: f64,
    pub std_err: f64,
    pub std_err_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReblockResult {
    pub levels: Vec<BlockLevel>,
    /// Index into `levels` of the plateau level.
    pub chosen: usize,
    /// Whether the plateau test fired; if not, `chosen` is the level with
    /// the largest standard error among those with at least 8 blocks.
    pub converged: bool,
    pub mean: f64,
    pub std_err: f64,
}

impl ReblockResult {
    pub fn naive_std_err(&self) -> f64 {
        self.levels[0].std_err
    }

    /// One row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,block_size,n_blocks,mean,std_err,std_err_err,chosen\n");
        for (k, l) in self.levels.iter().enumerate() {
            writeln!(
                out,
                "{k},{},{},{:.12e},{:.12e},{:.12e},{}",
                l.block_size,
                l.n_blocks,
                l.mean,
                l.std_err,
                l.std_err_err,
                u8::from(k == self.chosen)
            )
            .unwrap();
        }
        out
    }
}

fn level_stats(x: &[f64], block_size: usize) -> BlockLevel {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std_err = (var / (n - 1.0)).sqrt();
    BlockLevel { block_size, n_blocks: x.len(), mean, std_err, std_err_err: std_err / (2.0 * (n - 1.0)).sqrt() }
}

/// Pair-averages repeatedly and picks the first level whose standard error
/// differs from the next level's by less than its own error estimate.
pub fn reblock(series: &[f64], discard: usize) -> Result<ReblockResult, StatsError> {
    let len = series.len().saturating_sub(discard);
    if len < MIN_SAMPLES {
        return Err(StatsError::TooShort { len, discard });
    }
    let data = &series[discard..];
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite(i + discard));
    }
    let mut levels = Vec::new();
    let mut x = data.to_vec();
    let mut size = 1;
    while x.len() >= 2 {
        levels.push(level_stats(&x, size));
        x = x.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        size *= 2;
    }
    let plateau = levels
        .windows(2)
        .position(|w| (w[1].std_err - w[0].std_err).abs() < w[0].std_err_err && w[1].n_blocks >= 4);
    let (chosen, converged) = match plateau {
        Some(k) => (k, true),
        None => {
            let k = levels
                .iter()
                .enumerate()
                .filter(|(_, l)| l.n_blocks >= 8)
                .max_by(|a, b| a.1.std_err.total_cmp(&b.1.std_err))
                .map(|(k, _)| k)
                .unwrap_or(0);
            (k, false)
        }
    };
    // the full-data mean; block means agree up to the dropped tail samples
    let mean = levels[0].mean;
    Ok(ReblockResult { std_err: levels[chosen].std_err, levels, chosen, converged, mean })
}

/// Sample mean and standard deviation (n - 1 denominator).
pub fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
