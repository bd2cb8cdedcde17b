//! Separable resampling: pixel-area averaging for shrinking axes and
//! half-pixel-centred bilinear interpolation for enlarging axes.

use crate::error::{Error, Result};
use crate::grid::ImageDims;
use crate::image::{Image, PlaneMap, Sample};

/// Per-output-index source taps for one axis. Weights are left
/// unnormalized; `norm` is divided out once after both passes so that
/// integer shrink factors reduce to an exact block sum over the block area.
#[derive(Debug, Clone)]
struct AxisWeights {
    taps: Vec<Vec<(usize, f64)>>,
    norm: f64,
}

impl AxisWeights {
    fn area(src: usize, dst: usize) -> Self {
        debug_assert!(dst <= src && dst > 0);
        let taps = (0..dst)
            .map(|i| {
                let start = (i * src) as f64 / dst as f64;
                let end = ((i + 1) * src) as f64 / dst as f64;
                let first = start.floor() as usize;
                let last = (end.ceil() as usize).min(src);
                (first..last)
                    .filter_map(|j| {
                        let w = end.min((j + 1) as f64) - start.max(j as f64);
                        (w > 0.0).then_some((j, w))
                    })
                    .collect()
            })
            .collect();
        Self {
            taps,
            norm: src as f64 / dst as f64,
        }
    }

    fn bilinear(src: usize, dst: usize) -> Self {
        let scale = src as f64 / dst as f64;
        let taps = (0..dst)
            .map(|i| {
                let x = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
                let j0 = x.floor() as usize;
                let j1 = (j0 + 1).min(src - 1);
                let frac = x - j0 as f64;
                if j1 == j0 || frac == 0.0 {
                    vec![(j0, 1.0)]
                } else {
                    vec![(j0, 1.0 - frac), (j1, frac)]
                }
            })
            .collect();
        Self { taps, norm: 1.0 }
    }

    fn for_axis(src: usize, dst: usize) -> Self {
        if dst <= src {
            Self::area(src, dst)
        } else {
            Self::bilinear(src, dst)
        }
    }
}

struct Separable {
    rows: AxisWeights,
    cols: AxisWeights,
}

impl PlaneMap for Separable {
    fn apply<T: Sample>(&self, plane: &[T], h: usize, w: usize) -> Result<(usize, usize, Vec<T>)> {
        let (dh, dw) = (self.rows.taps.len(), self.cols.taps.len());
        let mut horiz = vec![0.0f64; h * dw];
        for y in 0..h {
            let src = &plane[y * w..(y + 1) * w];
            for (x, taps) in self.cols.taps.iter().enumerate() {
                horiz[y * dw + x] = taps.iter().map(|&(j, wt)| src[j].to_f64() * wt).sum();
            }
        }
        let norm = self.rows.norm * self.cols.norm;
        let mut out = Vec::with_capacity(dh * dw);
        for taps in &self.rows.taps {
            for x in 0..dw {
                let acc: f64 = taps.iter().map(|&(j, wt)| horiz[j * dw + x] * wt).sum();
                out.push(T::from_f64(acc / norm));
            }
        }
        Ok((dh, dw, out))
    }
}

/// Resample every channel to `height x width`, choosing area averaging or
/// bilinear interpolation independently per axis.
pub fn resample(image: &Image, height: usize, width: usize) -> Result<Image> {
    if height == 0 || width == 0 {
        return Err(Error::InvalidParameter("target size must be >= 1".into()));
    }
    image.map_planes(Separable {
        rows: AxisWeights::for_axis(image.height(), height),
        cols: AxisWeights::for_axis(image.width(), width),
    })
}

/// Pixel-area-weighted downgrade; each output pixel is the mean of the
/// source area it covers. 8-bit results are rounded half away from zero.
pub fn downgrade_area(image: &Image, target: ImageDims) -> Result<Image> {
    let src = image.dims();
    if target.height > src.height || target.width > src.width {
        return Err(Error::UpscaleNotSupported {
            src_h: src.height,
            src_w: src.width,
            dst_h: target.height,
            dst_w: target.width,
        });
    }
    if target.channels != src.channels {
        return Err(Error::DimensionMismatch(format!(
            "downgrade cannot change channel count {} -> {}",
            src.channels, target.channels
        )));
    }
    image.map_planes(Separable {
        rows: AxisWeights::area(src.height, target.height),
        cols: AxisWeights::area(src.width, target.width),
    })
}
