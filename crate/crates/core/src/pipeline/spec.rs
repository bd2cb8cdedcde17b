use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compressors::{Compressor, Method, SketchMatrix};
use crate::error::{Error, Result};
use crate::grid::{self, CompressionRatios};
use crate::lcio::{sha256, Digest32};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Compress at consumption time from stored resized images.
    Inline,
    /// Compress once, storing `copies` augmented compressed images per source.
    Default,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Inline => "inline",
            Mode::Default => "default",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inline" => Ok(Mode::Inline),
            "default" => Ok(Mode::Default),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

/// Everything that determines the output of one compression run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionSpec {
    pub method: Method,
    pub m: usize,
    pub n: usize,
    pub gamma: f64,
    pub seed: u64,
    pub resize_to: usize,
    pub crop_to: usize,
    pub copies: usize,
    pub flip_prob: f64,
    pub mode: Mode,
}

impl CompressionSpec {
    /// 256 -> random 224 crop -> 7x7 blocks to 2x2 percentiles, two copies.
    pub fn new(method: Method, m: usize, n: usize) -> Self {
        Self {
            method,
            m,
            n,
            gamma: 1.0,
            seed: 0,
            resize_to: 256,
            crop_to: 224,
            copies: 2,
            flip_prob: 0.5,
            mode: Mode::Default,
        }
    }

    pub fn validate(&self) -> Result<()> {
        grid::check_block_sizes(self.m, self.n)?;
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::InvalidParameter(format!(
                "flip_prob must lie in [0, 1], got {}",
                self.flip_prob
            )));
        }
        if self.crop_to == 0 || self.crop_to > self.resize_to {
            return Err(Error::InvalidParameter(format!(
                "crop_to must satisfy 1 <= crop_to <= resize_to, got crop_to={} resize_to={}",
                self.crop_to, self.resize_to
            )));
        }
        if !self.crop_to.is_multiple_of(self.m) {
            return Err(Error::NonDivisible {
                axis: "crop_to",
                len: self.crop_to,
                block: self.m,
            });
        }
        if self.copies == 0 {
            return Err(Error::InvalidParameter("copies must be >= 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn digest(&self) -> Digest32 {
        sha256(&serde_json::to_vec(self).expect("spec serializes"))
    }

    pub fn ratios(&self) -> Result<CompressionRatios> {
        grid::compression_ratios(self.m, self.n, self.copies)
    }

    /// The dataset-wide sketch matrix for RMM/MS, generated from `seed`.
    pub fn sketch_matrix(&self) -> Result<Option<SketchMatrix>> {
        match self.method {
            Method::Rmm => SketchMatrix::for_rmm(self.m, self.n, self.gamma, self.seed).map(Some),
            Method::Ms => SketchMatrix::for_ms(self.m, self.n, self.gamma, self.seed).map(Some),
            Method::Percentile | Method::Downgrade => Ok(None),
        }
    }

    pub fn compressor(&self, matrix: Option<&SketchMatrix>) -> Result<Compressor> {
        Compressor::for_method(self.method, self.m, self.n, matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        let s = CompressionSpec::new(Method::Percentile, 7, 2);
        s.validate().unwrap();
        assert_eq!(s.ratios().unwrap().sr.as_f64(), 6.125);
    }

    #[test]
    fn validation_names_the_precondition() {
        let mut s = CompressionSpec::new(Method::Percentile, 7, 7);
        assert!(matches!(s.validate(), Err(Error::InvalidBlockSizes { .. })));
        s.n = 2;
        s.crop_to = 225;
        s.resize_to = 256;
        assert!(matches!(s.validate(), Err(Error::NonDivisible { axis: "crop_to", .. })));
        s.crop_to = 280;
        assert!(s.validate().unwrap_err().to_string().contains("crop_to"));
        s.crop_to = 224;
        s.gamma = 1.5;
        assert!(s.validate().unwrap_err().to_string().contains("gamma"));
        s.gamma = 1.0;
        s.copies = 0;
        assert!(s.validate().unwrap_err().to_string().contains("copies"));
    }

    #[test]
    fn digest_tracks_content() {
        let a = CompressionSpec::new(Method::Rmm, 7, 2);
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.seed = 1;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn sketch_matrix_only_for_matrix_methods() {
        assert!(CompressionSpec::new(Method::Percentile, 7, 2)
            .sketch_matrix()
            .unwrap()
            .is_none());
        let m = CompressionSpec::new(Method::Ms, 7, 2).sketch_matrix().unwrap().unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 7));
        let m = CompressionSpec::new(Method::Rmm, 7, 2)
            .sketch_matrix()
            .unwrap()
            .unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 49));
    }
}
