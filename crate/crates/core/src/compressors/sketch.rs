//! Sparse Gaussian sketch matrices and the two matrix-based block kernels.
//!
//! Each entry is zero with probability `1 - gamma` and otherwise drawn from
//! `N(0, 1/(rows·cols))`. Entries are generated in row-major order from a
//! ChaCha8 stream keyed by the seed: for every entry one uniform draw decides
//! the zero branch, followed by one normal draw if the entry is kept.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Block;
use crate::error::{Error, Result};
use crate::image::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SketchKind {
    /// `n² x m²`, applied to the flattened block.
    Rmm,
    /// `n x m`, applied on both sides of the block.
    Ms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SketchMatrix {
    kind: SketchKind,
    rows: usize,
    cols: usize,
    gamma: f64,
    seed: u64,
    entries: Vec<f32>,
}

impl SketchMatrix {
    pub fn from_parts(
        kind: SketchKind,
        rows: usize,
        cols: usize,
        gamma: f64,
        seed: u64,
        entries: Vec<f32>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "sketch matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("gamma {gamma} outside [0, 1]")));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            kind,
            rows,
            cols,
            gamma,
            seed,
            entries,
        })
    }

    pub fn generate(kind: SketchKind, rows: usize, cols: usize, gamma: f64, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "sketch matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("gamma {gamma} outside [0, 1]")));
        }
        let std_dev = (1.0 / (rows * cols) as f64).sqrt();
        let normal = Normal::new(0.0, std_dev).expect("finite positive std dev");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = (0..rows * cols)
            .map(|_| {
                if rng.random::<f64>() < gamma {
                    normal.sample(&mut rng) as f32
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self {
            kind,
            rows,
            cols,
            gamma,
            seed,
            entries,
        })
    }

    /// Matrix for RMM compression of `m x m` blocks to `n x n`.
    pub fn for_rmm(m: usize, n: usize, gamma: f64, seed: u64) -> Result<Self> {
        Self::generate(SketchKind::Rmm, n * n, m * m, gamma, seed)
    }

    /// Matrix for two-sided sketching of `m x m` blocks to `n x n`.
    pub fn for_ms(m: usize, n: usize, gamma: f64, seed: u64) -> Result<Self> {
        Self::generate(SketchKind::Ms, n, m, gamma, seed)
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[f32] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> f32 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// `self · x` for a dense vector, accumulated in f64.
    pub(crate) fn mul_vec_into<T: Sample>(&self, x: &[T], out: &mut [f32]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate().take(self.rows) {
            let acc: f64 = self.row(r).iter().zip(x).map(|(&a, &b)| a as f64 * b.to_f64()).sum();
            *o = acc as f32;
        }
    }

    /// `self · B · selfᵀ` for a row-major `cols x cols` block.
    pub(crate) fn sandwich_into<T: Sample>(&self, block: &[T], tmp: &mut [f64], out: &mut [f32]) {
        let (n, m) = (self.rows, self.cols);
        debug_assert_eq!(block.len(), m * m);
        // tmp = self · B  (n x m)
        for i in 0..n {
            let row = self.row(i);
            for j in 0..m {
                tmp[i * m + j] = (0..m).map(|k| row[k] as f64 * block[k * m + j].to_f64()).sum();
            }
        }
        // out = tmp · selfᵀ  (n x n)
        for i in 0..n {
            for j in 0..n {
                let other = self.row(j);
                let acc: f64 = (0..m).map(|k| tmp[i * m + k] * other[k] as f64).sum();
                out[i * n + j] = acc as f32;
            }
        }
    }
}

pub fn gen_sketch_matrix(kind: SketchKind, rows: usize, cols: usize, gamma: f64, seed: u64) -> Result<SketchMatrix> {
    SketchMatrix::generate(kind, rows, cols, gamma, seed)
}

pub(crate) fn rmm_output_side(mat: &SketchMatrix, m: usize) -> Result<usize> {
    if mat.kind != SketchKind::Rmm {
        return Err(Error::InvalidParameter("RMM requires an rmm-kind matrix".into()));
    }
    if mat.cols != m * m {
        return Err(Error::DimensionMismatch(format!(
            "RMM matrix has {} columns, block has {} values",
            mat.cols,
            m * m
        )));
    }
    let n = (mat.rows as f64).sqrt().round() as usize;
    if n * n != mat.rows {
        return Err(Error::DimensionMismatch(format!(
            "RMM matrix row count {} is not a perfect square",
            mat.rows
        )));
    }
    Ok(n)
}

pub(crate) fn ms_output_side(mat: &SketchMatrix, m: usize) -> Result<usize> {
    if mat.kind != SketchKind::Ms {
        return Err(Error::InvalidParameter("MS requires an ms-kind matrix".into()));
    }
    if mat.cols != m {
        return Err(Error::DimensionMismatch(format!(
            "MS matrix has {} columns, block side is {m}",
            mat.cols
        )));
    }
    Ok(mat.rows)
}

pub fn compress_block_rmm<T: Sample>(block: &Block<T>, mat: &SketchMatrix) -> Result<Block<f32>> {
    let n = rmm_output_side(mat, block.side())?;
    let mut out = vec![0.0f32; n * n];
    mat.mul_vec_into(block.values(), &mut out);
    Block::new(n, out)
}

pub fn compress_block_ms<T: Sample>(block: &Block<T>, mat: &SketchMatrix) -> Result<Block<f32>> {
    let n = ms_output_side(mat, block.side())?;
    let mut tmp = vec![0.0f64; n * block.side()];
    let mut out = vec![0.0f32; n * n];
    mat.sandwich_into(block.values(), &mut tmp, &mut out);
    Block::new(n, out)
}
