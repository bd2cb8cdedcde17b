//! Network-side helpers: how a first convolutional layer walks a compressed
//! image, and sketching of fully-connected layer inputs.

use serde::{Deserialize, Serialize};

use crate::compressors::{SketchKind, SketchMatrix};
use crate::error::{Error, Result};
use crate::grid::{ConvArch, ImageDims, Ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionVisit {
    pub top: usize,
    pub left: usize,
    /// Both offsets are multiples of `n`.
    pub aligned: bool,
    /// Aligned and `r` is a multiple of `n`.
    pub whole_blocks: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsumptionReport {
    pub dims: ImageDims,
    pub arch: ConvArch,
    pub n: usize,
    /// Visits in raster order.
    pub regions: Vec<RegionVisit>,
    /// Every region starts on a block boundary. Equals `s mod n == 0`
    /// whenever the walk has at least two placements per axis.
    pub aligned: bool,
    /// Every region covers whole blocks only.
    pub whole_blocks: bool,
}

impl ConsumptionReport {
    /// `(top, left)` of the first region in raster order that is not
    /// block-aligned.
    pub fn first_misaligned(&self) -> Option<(usize, usize)> {
        self.regions.iter().find(|v| !v.aligned).map(|v| (v.top, v.left))
    }
}

/// Enumerate every placement `(i·s, j·s)` of an `r x r` region that fits in
/// `dims` and classify it against an `n x n` block grid.
pub fn simulate_conv_consumption(dims: ImageDims, arch: ConvArch, n: usize) -> ConsumptionReport {
    let divides = |x: usize| n != 0 && x.is_multiple_of(n);
    let starts = |len: usize| -> Vec<usize> {
        if arch.region > len {
            return Vec::new();
        }
        (0..=(len - arch.region) / arch.stride)
            .map(|i| i * arch.stride)
            .collect()
    };
    let rows = starts(dims.height);
    let cols = starts(dims.width);
    let region_ok = divides(arch.region);
    let mut regions = Vec::with_capacity(rows.len() * cols.len());
    for &top in &rows {
        for &left in &cols {
            let aligned = divides(top) && divides(left);
            regions.push(RegionVisit {
                top,
                left,
                aligned,
                whole_blocks: aligned && region_ok,
            });
        }
    }
    let aligned = !regions.is_empty() && regions.iter().all(|v| v.aligned);
    let whole_blocks = aligned && regions.iter().all(|v| v.whole_blocks);
    ConsumptionReport {
        dims,
        arch,
        n,
        regions,
        aligned,
        whole_blocks,
    }
}

/// Geometry for sketching an FC layer input: the length-`input_len` vector
/// is viewed as a `reshape_rows x reshape_cols` matrix and left-multiplied
/// by a `sketch_rows x reshape_rows` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcSketchSpec {
    pub input_len: usize,
    pub reshape_rows: usize,
    pub reshape_cols: usize,
    pub sketch_rows: usize,
    pub seed: u64,
}

impl FcSketchSpec {
    pub fn new(
        input_len: usize,
        reshape_rows: usize,
        reshape_cols: usize,
        sketch_rows: usize,
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            input_len,
            reshape_rows,
            reshape_cols,
            sketch_rows,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `sketch_rows == reshape_rows` is accepted as the uncompressed case.
    pub fn validate(&self) -> Result<()> {
        if self.reshape_rows == 0 || self.reshape_cols == 0 || self.sketch_rows == 0 {
            return Err(Error::InvalidParameter("fc sketch dimensions must be >= 1".into()));
        }
        if self.reshape_rows * self.reshape_cols != self.input_len {
            return Err(Error::InvalidParameter(format!(
                "reshape {}x{} does not hold {} inputs",
                self.reshape_rows, self.reshape_cols, self.input_len
            )));
        }
        if self.sketch_rows > self.reshape_rows {
            return Err(Error::InvalidParameter(format!(
                "sketch_rows {} exceeds reshape_rows {}",
                self.sketch_rows, self.reshape_rows
            )));
        }
        Ok(())
    }

    pub fn output_len(&self) -> usize {
        self.sketch_rows * self.reshape_cols
    }

    /// Dense Gaussian `sketch_rows x reshape_rows` matrix seeded by `seed`.
    pub fn matrix(&self) -> Result<SketchMatrix> {
        self.validate()?;
        SketchMatrix::generate(SketchKind::Ms, self.sketch_rows, self.reshape_rows, 1.0, self.seed)
    }
}

pub fn sketch_fc_inputs(v: &[f32], spec: &FcSketchSpec, mat: &SketchMatrix) -> Result<Vec<f32>> {
    spec.validate()?;
    if v.len() != spec.input_len {
        return Err(Error::DimensionMismatch(format!(
            "input has {} values, spec expects {}",
            v.len(),
            spec.input_len
        )));
    }
    if mat.rows() != spec.sketch_rows || mat.cols() != spec.reshape_rows {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, spec needs {}x{}",
            mat.rows(),
            mat.cols(),
            spec.sketch_rows,
            spec.reshape_rows
        )));
    }
    let cols = spec.reshape_cols;
    let mut out = Vec::with_capacity(spec.output_len());
    let mut acc = vec![0f64; cols];
    for i in 0..spec.sketch_rows {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for (k, &w) in mat.row(i).iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let w = f64::from(w);
            for (a, &x) in acc.iter_mut().zip(&v[k * cols..(k + 1) * cols]) {
                *a += w * f64::from(x);
            }
        }
        out.extend(acc.iter().map(|&a| a as f32));
    }
    Ok(out)
}

pub fn fc_compression_ratio(spec: &FcSketchSpec) -> Ratio {
    Ratio::new(spec.sketch_rows as u64, spec.reshape_rows as u64)
}
