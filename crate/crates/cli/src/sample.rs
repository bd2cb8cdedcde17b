use std::fs;
use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use locomp::augment::LimitedAugmentParams;
use locomp::lcio::{write_atomic, write_lcim};
use locomp::pipeline::RuntimeSampler;
use locomp::PixelData;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// `.lcim` files.
    Lcim,
    /// Headerless little-endian tensors in channel, row, column order.
    Raw,
}

#[derive(clap::Args)]
pub struct Args {
    /// Dataset directory or its manifest.json.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    flip_prob: f64,
    /// Crop side in blocks; omit to keep the stored size.
    #[arg(long)]
    crop_blocks: Option<usize>,
    /// Only sample this source index instead of drawing sources uniformly.
    #[arg(long)]
    source: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Lcim)]
    format: Format,
}

pub fn run(a: Args) -> Result<()> {
    let params = LimitedAugmentParams {
        crop_blocks: a.crop_blocks,
        flip_prob: a.flip_prob,
    };
    let sampler = RuntimeSampler::open(&a.manifest, params)?;
    fs::create_dir_all(&a.out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut index = Vec::with_capacity(a.count);
    for i in 0..a.count {
        let s = match a.source {
            Some(idx) => sampler.sample_source(idx, &mut rng)?,
            None => sampler.sample(&mut rng)?,
        };
        let d = s.image.dims();
        let (name, bytes) = match a.format {
            Format::Lcim => (format!("{i:06}.lcim"), write_lcim(&s.image)?),
            Format::Raw => {
                let bytes = match s.image.image().data() {
                    PixelData::U8(v) => v.clone(),
                    PixelData::F32(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
                };
                (format!("{i:06}.raw"), bytes)
            }
        };
        write_atomic(&a.out.join(&name), &bytes)?;
        index.push(json!({
            "file": name,
            "source_index": s.source_index,
            "copy": s.copy,
            "label": s.label,
            "dtype": s.image.dtype(),
            "shape": [d.channels, d.height, d.width],
        }));
    }
    let text = serde_json::to_string_pretty(&index)? + "\n";
    write_atomic(&a.out.join("index.json"), text.as_bytes())?;
    println!("wrote {} samples to {}", a.count, a.out.display());
    Ok(())
}
