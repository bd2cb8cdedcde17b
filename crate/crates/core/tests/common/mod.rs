#![allow(dead_code)]

use std::path::Path;

use locomp::{Image, ImageDims, SketchMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dims(h: usize, w: usize, c: usize) -> ImageDims {
    ImageDims::new(h, w, c).unwrap()
}

pub fn random_u8_image(r: &mut impl Rng, h: usize, w: usize, c: usize) -> Image {
    let d = dims(h, w, c);
    Image::from_u8(d, (0..d.len()).map(|_| r.random()).collect()).unwrap()
}

pub fn random_f32_image(r: &mut impl Rng, h: usize, w: usize, c: usize) -> Image {
    let d = dims(h, w, c);
    Image::from_f32(d, (0..d.len()).map(|_| r.random_range(-1.0f32..1.0)).collect()).unwrap()
}

/// Write `count` random RGB PNGs of assorted sizes into `dir/<class>/`.
pub fn write_png_dataset(dir: &Path, count: usize, seed: u64) {
    let mut r = rng(seed);
    for i in 0..count {
        let class = format!("class{}", i % 3);
        std::fs::create_dir_all(dir.join(&class)).unwrap();
        let h = r.random_range(230..300);
        let w = r.random_range(230..300);
        let img = random_u8_image(&mut r, h, w, 3);
        img.save_png(&dir.join(class).join(format!("img{i:04}.png"))).unwrap();
    }
}

/// Row-major matrix times row-major flattened block, accumulated in f64.
pub fn naive_matvec(mat: &SketchMatrix, x: &[f64]) -> Vec<f64> {
    (0..mat.rows())
        .map(|i| (0..mat.cols()).map(|j| f64::from(mat.get(i, j)) * x[j]).sum())
        .collect()
}

/// `M · B · Mᵀ` by explicit triple loops.
pub fn naive_sandwich(mat: &SketchMatrix, b: &[f64], m: usize) -> Vec<f64> {
    let n = mat.rows();
    let mut left = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            for k in 0..m {
                left[i * m + j] += f64::from(mat.get(i, k)) * b[k * m + j];
            }
        }
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                out[i * n + j] += left[i * m + k] * f64::from(mat.get(j, k));
            }
        }
    }
    out
}

/// `M ⊗ M` as an `n² x m²` row-major matrix.
pub fn kronecker_self(mat: &SketchMatrix) -> Vec<f32> {
    let (n, m) = (mat.rows(), mat.cols());
    let mut k = vec![0f32; n * n * m * m];
    for i in 0..n {
        for p in 0..n {
            for j in 0..m {
                for q in 0..m {
                    let row = i * n + p;
                    let col = j * m + q;
                    k[row * m * m + col] = mat.get(i, j) * mat.get(p, q);
                }
            }
        }
    }
    k
}

/// Max absolute error scaled by the oracle's largest magnitude.
pub fn rel_err(got: &[f32], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    let scale = want.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    got.iter()
        .zip(want)
        .map(|(&g, &w)| (f64::from(g) - w).abs())
        .fold(0.0, f64::max)
        / scale
}

pub fn fixtures_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Taxonomy name of a format error.
pub fn error_kind(e: &locomp::Error) -> &'static str {
    use locomp::Error::*;
    match e {
        BadMagic { .. } => "BadMagic",
        VersionUnsupported(_) => "VersionUnsupported",
        LengthMismatch { .. } => "LengthMismatch",
        DigestMismatch(_) => "DigestMismatch",
        BadHeader(_) => "BadHeader",
        _ => "other",
    }
}

fn mutate(bytes: &[u8], f: impl FnOnce(&mut Vec<u8>)) -> Vec<u8> {
    let mut b = bytes.to_vec();
    f(&mut b);
    b
}

/// Single-fault corruptions of a valid `.lcim` file and the error each
/// must produce.
pub fn lcim_corpus(good: &[u8]) -> Vec<(&'static str, Vec<u8>, &'static str)> {
    let h = locomp::lcio::LCIM_HEADER_LEN;
    vec![
        ("magic", mutate(good, |b| b[0] = b'X'), "BadMagic"),
        ("version", mutate(good, |b| b[4] = 2), "VersionUnsupported"),
        ("method tag", mutate(good, |b| b[6] = 9), "BadHeader"),
        ("dtype tag", mutate(good, |b| b[7] = 5), "BadHeader"),
        ("reserved", mutate(good, |b| b[28] = 1), "BadHeader"),
        ("zero n", mutate(good, |b| b[12..16].fill(0)), "BadHeader"),
        ("truncated", good[..good.len() - 1].to_vec(), "LengthMismatch"),
        ("short header", good[..40].to_vec(), "LengthMismatch"),
        ("trailing", mutate(good, |b| b.push(0)), "LengthMismatch"),
        ("blocks grown", mutate(good, |b| b[20] += 1), "LengthMismatch"),
        ("payload bit", mutate(good, |b| b[h + 5] ^= 0x10), "DigestMismatch"),
        ("digest bit", mutate(good, |b| b[70] ^= 0x01), "DigestMismatch"),
    ]
}

/// Single-fault corruptions of a valid `.lcmx` file.
pub fn lcmx_corpus(good: &[u8]) -> Vec<(&'static str, Vec<u8>, &'static str)> {
    let h = locomp::lcio::LCMX_HEADER_LEN;
    vec![
        ("magic", mutate(good, |b| b[3] = b'Y'), "BadMagic"),
        ("version", mutate(good, |b| b[4] = 7), "VersionUnsupported"),
        ("kind", mutate(good, |b| b[6] = 4), "BadHeader"),
        ("reserved", mutate(good, |b| b[7] = 1), "BadHeader"),
        (
            "gamma",
            mutate(good, |b| b[16..24].copy_from_slice(&2.0f64.to_le_bytes())),
            "BadHeader",
        ),
        ("truncated", good[..good.len() - 3].to_vec(), "LengthMismatch"),
        (
            "trailing",
            mutate(good, |b| b.extend_from_slice(&[0; 4])),
            "LengthMismatch",
        ),
        ("payload bit", mutate(good, |b| b[h] ^= 0x80), "DigestMismatch"),
    ]
}
