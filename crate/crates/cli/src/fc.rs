use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use locomp::netops::{fc_compression_ratio, sketch_fc_inputs, FcSketchSpec};

#[derive(clap::Args)]
pub struct Args {
    /// Little-endian f32 vector of length rows*cols.
    #[arg(long = "in")]
    input: PathBuf,
    /// Where to write the sketched f32 vector.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 25)]
    rows: usize,
    #[arg(long, default_value_t = 256)]
    cols: usize,
    /// Rows of the sketch matrix.
    #[arg(long, default_value_t = 13)]
    sketch_rows: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(a: Args) -> Result<()> {
    let spec = FcSketchSpec::new(a.rows * a.cols, a.rows, a.cols, a.sketch_rows, a.seed)?;
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    if bytes.len() % 4 != 0 {
        return Err(locomp::Error::LengthMismatch {
            expected: spec.input_len * 4,
            actual: bytes.len(),
        }
        .into());
    }
    let v: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    let out = sketch_fc_inputs(&v, &spec, &spec.matrix()?)?;
    let raw: Vec<u8> = out.iter().flat_map(|x| x.to_le_bytes()).collect();
    locomp::lcio::write_atomic(&a.out, &raw)?;
    println!(
        "{} -> {} values, CR {}",
        spec.input_len,
        out.len(),
        fc_compression_ratio(&spec)
    );
    Ok(())
}
