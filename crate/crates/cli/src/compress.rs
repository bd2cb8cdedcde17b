use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use locomp::lcio::{write_atomic, write_lcim};
use locomp::pipeline::{prepare_default, run_inline, InlineOptions, PrepareOptions, MANIFEST_FILE};
use locomp::{CompressionSpec, ConvArch, Dataset, Method, Mode};
use serde_json::json;

#[derive(clap::Args)]
pub struct Args {
    /// Directory of source images (PNG/PPM/PGM), searched recursively.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    method: Method,
    /// Uncompressed block side.
    #[arg(long)]
    m: usize,
    /// Compressed block side.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 256)]
    resize: usize,
    #[arg(long, default_value_t = 224)]
    crop: usize,
    /// Augmented copies per image (default mode).
    #[arg(long, default_value_t = 2)]
    copies: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Nonzero probability of sketch matrix entries.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    flip_prob: f64,
    #[arg(long, default_value_t = Mode::Default)]
    mode: Mode,
    /// Epochs to emit in inline mode.
    #[arg(long, default_value_t = 1)]
    epochs: usize,
    /// First-layer region side; with --s, enables the stride check.
    #[arg(long, requires = "s")]
    r: Option<usize>,
    /// First-layer stride.
    #[arg(long, requires = "r")]
    s: Option<usize>,
    /// CSV of `path,label` rows; defaults to parent directory names.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Also write the resized uncompressed images here (inline mode).
    #[arg(long)]
    resized_dir: Option<PathBuf>,
    #[arg(long, env = "LOCOMP_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    json: bool,
}

pub fn run(a: Args) -> Result<()> {
    let spec = CompressionSpec {
        method: a.method,
        m: a.m,
        n: a.n,
        gamma: a.gamma,
        seed: a.seed,
        resize_to: a.resize,
        crop_to: a.crop,
        copies: a.copies,
        flip_prob: a.flip_prob,
        mode: a.mode,
    };
    spec.validate()?;
    let arch = match (a.r, a.s) {
        (Some(r), Some(s)) => Some(ConvArch::new(r, s)?),
        _ => None,
    };
    let ratios = spec.ratios()?;
    let dataset = Dataset::scan(&a.input, a.labels.as_deref())?;

    match spec.mode {
        Mode::Default => {
            let opts = PrepareOptions {
                arch,
                threads: a.threads,
            };
            let manifest = prepare_default(&dataset, &spec, &a.out, &opts)?;
            let path = a.out.join(MANIFEST_FILE);
            if a.json {
                let summary = json!({
                    "manifest": path,
                    "sources": manifest.source_count,
                    "entries": manifest.entries.len(),
                    "skipped": manifest.skipped,
                    "cr": ratios.cr.as_f64(),
                    "sr": ratios.sr.as_f64(),
                });
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                println!(
                    "wrote {} tensors from {} sources to {}",
                    manifest.entries.len(),
                    manifest.source_count,
                    path.display()
                );
                for s in &manifest.skipped {
                    println!("skipped {}: {}", s.source, s.reason);
                }
                println!("CR {}  SR {}", ratios.cr, ratios.sr);
            }
        }
        Mode::Inline => {
            fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
            let opts = InlineOptions {
                epochs: a.epochs,
                arch,
                resized_dir: a.resized_dir.clone(),
                threads: a.threads,
            };
            let mut index = csv::Writer::from_writer(Vec::new());
            index.write_record(["epoch", "source", "label", "output"])?;
            let out = &a.out;
            let report = run_inline(&dataset, &spec, &opts, |t| {
                let rel = format!("epoch{:03}/{:06}.lcim", t.epoch, t.source_index);
                let path = out.join(&rel);
                fs::create_dir_all(path.parent().expect("has parent"))?;
                write_atomic(&path, &write_lcim(&t.tensor)?)?;
                index
                    .write_record([t.epoch.to_string(), t.source, t.label, rel])
                    .map_err(|e| locomp::Error::Io(e.into()))?;
                Ok(())
            })?;
            write_atomic(&out.join("index.csv"), &index.into_inner()?)?;
            if a.json {
                let summary = json!({
                    "index": out.join("index.csv"),
                    "emitted": report.emitted,
                    "skipped": report.skipped,
                    "cr": ratios.cr.as_f64(),
                });
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                println!(
                    "wrote {} tensors over {} epochs to {}",
                    report.emitted,
                    a.epochs,
                    out.display()
                );
                for s in &report.skipped {
                    println!("skipped {}: {}", s.source, s.reason);
                }
                println!("CR {}", ratios.cr);
            }
        }
    }
    Ok(())
}
