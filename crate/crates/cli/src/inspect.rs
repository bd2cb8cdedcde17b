use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use locomp::grid::compression_ratios;
use locomp::lcio::{read_lcim, read_manifest, read_matrix, sha256, verify_manifest, LCIM_MAGIC, LCMX_MAGIC};
use locomp::{CompressedImage, Dtype, Image, ImageDims, PixelData};
use serde_json::{json, Value};

#[derive(clap::Args)]
pub struct Args {
    /// A .lcim or .lcmx file, a manifest.json, or a dataset directory.
    path: PathBuf,
    #[arg(long)]
    json: bool,
    /// Write a grayscale PNG of the compressed grid (.lcim only), channels
    /// side by side.
    #[arg(long)]
    render: Option<PathBuf>,
    /// Check every file listed in a manifest against its digest.
    #[arg(long)]
    verify: bool,
}

pub fn run(a: Args) -> Result<()> {
    let path = if a.path.is_dir() {
        a.path.join(locomp::pipeline::MANIFEST_FILE)
    } else {
        a.path.clone()
    };
    let bytes = fs::read(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => locomp::Error::MissingFile(path.clone()),
        _ => locomp::Error::Io(e),
    })?;

    let magic = bytes.get(..4);
    let (summary, text) = if magic == Some(&LCIM_MAGIC[..]) {
        let cimg = read_lcim(&bytes)?;
        if let Some(out) = &a.render {
            render(&cimg)?.save_png(out)?;
        }
        describe_lcim(&cimg, &bytes)?
    } else if magic == Some(&LCMX_MAGIC[..]) {
        let mat = read_matrix(&bytes)?;
        let v = json!({
            "kind": "lcmx",
            "matrix_kind": mat.kind(),
            "rows": mat.rows(),
            "cols": mat.cols(),
            "gamma": mat.gamma(),
            "seed": mat.seed(),
            "nonzero": mat.entries().iter().filter(|&&e| e != 0.0).count(),
            "sha256": hex(&bytes),
        });
        let text = format!(
            "sketch matrix ({:?})\n  shape   {}x{}\n  gamma   {}\n  seed    {}\n  nonzero {}",
            mat.kind(),
            mat.rows(),
            mat.cols(),
            mat.gamma(),
            mat.seed(),
            v["nonzero"]
        );
        (v, text)
    } else {
        let text = std::str::from_utf8(&bytes).context("file is neither .lcim, .lcmx nor a JSON manifest")?;
        let manifest = read_manifest(text)?;
        if a.verify {
            verify_manifest(&manifest, path.parent().unwrap_or(Path::new(".")))?;
        }
        let r = manifest.spec.ratios()?;
        let v = json!({
            "kind": "manifest",
            "spec": manifest.spec,
            "spec_digest": manifest.spec_digest,
            "sources": manifest.source_count,
            "entries": manifest.entries.len(),
            "skipped": manifest.skipped.len(),
            "matrices": manifest.matrices,
            "cr": r.cr.as_f64(),
            "sr": r.sr.as_f64(),
            "verified": a.verify,
        });
        let s = &manifest.spec;
        let text = format!(
            "dataset manifest\n  method  {} m={} n={} copies={} seed={}\n  sources {} ({} skipped), entries {}\n  CR {}  SR {}{}",
            s.method,
            s.m,
            s.n,
            s.copies,
            s.seed,
            manifest.source_count,
            manifest.skipped.len(),
            manifest.entries.len(),
            r.cr,
            r.sr,
            if a.verify { "\n  all files verified" } else { "" }
        );
        (v, text)
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!("{text}");
    }
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    hex::encode(sha256(bytes))
}

fn describe_lcim(cimg: &CompressedImage, bytes: &[u8]) -> Result<(Value, String)> {
    let d = cimg.dims();
    let r = compression_ratios(cimg.m(), cimg.n(), 1)?;
    let v = json!({
        "kind": "lcim",
        "method": cimg.method().as_str(),
        "m": cimg.m(),
        "n": cimg.n(),
        "dtype": cimg.dtype(),
        "height": d.height,
        "width": d.width,
        "channels": d.channels,
        "blocks_down": cimg.blocks_down(),
        "blocks_across": cimg.blocks_across(),
        "spec_digest": hex::encode(cimg.spec_digest()),
        "sha256": hex(bytes),
        "cr": r.cr.as_f64(),
    });
    let text = format!(
        "compressed image\n  method  {} m={} n={}\n  dtype   {}\n  dims    {}\n  blocks  {}x{}\n  CR      {}",
        cimg.method(),
        cimg.m(),
        cimg.n(),
        match cimg.dtype() {
            Dtype::U8 => "u8",
            Dtype::F32 => "f32",
        },
        d,
        cimg.blocks_down(),
        cimg.blocks_across(),
        r.cr
    );
    Ok((v, text))
}

/// Channels laid out left to right, each min-max scaled to 0..=255.
fn render(cimg: &CompressedImage) -> Result<Image> {
    let d = cimg.dims();
    let plane = d.height * d.width;
    let values: Vec<f64> = match cimg.image().data() {
        PixelData::U8(v) => v.iter().map(|&x| f64::from(x)).collect(),
        PixelData::F32(v) => v.iter().map(|&x| f64::from(x)).collect(),
    };
    let out_dims = ImageDims::new(d.height, d.width * d.channels, 1)?;
    let mut out = vec![0u8; out_dims.len()];
    for k in 0..d.channels {
        let ch = &values[k * plane..(k + 1) * plane];
        let (lo, hi) = ch
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        for y in 0..d.height {
            for x in 0..d.width {
                let v = (ch[y * d.width + x] - lo) / span * 255.0;
                out[y * out_dims.width + k * d.width + x] = v.round() as u8;
            }
        }
    }
    Ok(Image::from_u8(out_dims, out)?)
}
