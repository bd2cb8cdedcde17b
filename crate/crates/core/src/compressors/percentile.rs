use serde::{Deserialize, Serialize};

use super::Block;
use crate::error::{Error, Result};
use crate::image::Sample;

/// Fixed quantiles sampled from every block, placed row-major ascending in
/// the `n x n` output (top-left is the minimum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileScheme {
    n: usize,
    quantiles: Vec<f64>,
}

impl PercentileScheme {
    /// Evenly spaced quantiles `k/(n²-1)`, or the median when `n = 1`.
    pub fn evenly_spaced(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        let count = n * n;
        let quantiles = if count == 1 {
            vec![0.5]
        } else {
            (0..count).map(|k| k as f64 / (count - 1) as f64).collect()
        };
        Ok(Self { n, quantiles })
    }

    /// A custom scheme; quantiles must be ascending within `[0, 1]`.
    pub fn from_quantiles(n: usize, quantiles: Vec<f64>) -> Result<Self> {
        if n == 0 || quantiles.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "{} quantiles for n={n}",
                quantiles.len()
            )));
        }
        if quantiles.iter().any(|q| !(0.0..=1.0).contains(q)) || quantiles.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "quantiles must be ascending within [0, 1]".into(),
            ));
        }
        Ok(Self { n, quantiles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quantiles(&self) -> &[f64] {
        &self.quantiles
    }

    /// Sorted-order index of each quantile in a block of `count` values.
    pub fn ranks(&self, count: usize) -> Vec<usize> {
        self.quantiles.iter().map(|&q| nearest_rank(q, count)).collect()
    }
}

pub fn make_percentile_scheme(n: usize) -> Result<PercentileScheme> {
    PercentileScheme::evenly_spaced(n)
}

/// Nearest-rank index `round(q·(count-1))`, ties to even.
pub(crate) fn nearest_rank(q: f64, count: usize) -> usize {
    let last = count.saturating_sub(1);
    let pos = q * last as f64;
    // q is usually a ratio like 1/3, so q·(count-1) can miss an exact .5 by an ulp.
    let twice = (2.0 * pos).round();
    let pos = if (2.0 * pos - twice).abs() < 1e-9 {
        twice / 2.0
    } else {
        pos
    };
    (pos.round_ties_even() as usize).min(last)
}

pub(crate) fn sample_sorted<T: Sample>(values: &mut [T], ranks: &[usize], out: &mut [T]) {
    values.sort_unstable_by(|a, b| a.total_cmp(b));
    for (o, &r) in out.iter_mut().zip(ranks) {
        *o = values[r];
    }
}

pub fn compress_block_percentile<T: Sample>(block: &Block<T>, scheme: &PercentileScheme) -> Result<Block<T>> {
    let m = block.side();
    if scheme.n() > m {
        return Err(Error::InvalidBlockSizes { m, n: scheme.n() });
    }
    let ranks = scheme.ranks(m * m);
    let mut values = block.values().to_vec();
    let mut out = vec![values[0]; scheme.n() * scheme.n()];
    sample_sorted(&mut values, &ranks, &mut out);
    Block::new(scheme.n(), out)
}
