use anyhow::Result;
use locomp::grid::check_stride_compat;
use locomp::netops::simulate_conv_consumption;
use locomp::{ConvArch, ImageDims};
use serde_json::json;

use crate::Rejected;

#[derive(clap::Args)]
pub struct Args {
    /// Convolution region side.
    #[arg(long)]
    r: usize,
    /// Convolution stride.
    #[arg(long)]
    s: usize,
    /// Compressed block side.
    #[arg(long)]
    n: usize,
    /// Compressed image height used for the region walk.
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long)]
    json: bool,
}

pub fn run(a: Args) -> Result<()> {
    if a.n == 0 {
        return Err(locomp::Error::InvalidParameter("n must be >= 1".into()).into());
    }
    let arch = ConvArch::new(a.r, a.s)?;
    let dims = ImageDims::new(a.height, a.width, 1)?;
    let compat = check_stride_compat(arch, a.n);
    let sim = simulate_conv_consumption(dims, arch, a.n);
    let misaligned = sim.regions.iter().filter(|v| !v.aligned).count();

    if a.json {
        let v = json!({
            "r": a.r,
            "s": a.s,
            "n": a.n,
            "stride_ok": compat.stride_ok,
            "region_ok": compat.region_ok,
            "regions": sim.regions.len(),
            "misaligned_regions": misaligned,
            "whole_blocks": sim.whole_blocks,
            "first_misaligned": sim.first_misaligned(),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        let verdict = if compat.stride_ok { "OK" } else { "FAIL" };
        println!("{verdict}: r={} s={} n={}", a.r, a.s, a.n);
        println!("  s mod n = {}  r mod n = {}", a.s % a.n, a.r % a.n);
        println!(
            "  {}x{} walk: {} regions, {} misaligned",
            a.height,
            a.width,
            sim.regions.len(),
            misaligned
        );
        if let Some((top, left)) = sim.first_misaligned() {
            println!("  first misaligned region at ({top}, {left})");
        }
        if compat.stride_ok && !compat.region_ok {
            println!("  regions start on block boundaries but cut blocks at their far edge");
        }
    }
    if compat.stride_ok {
        Ok(())
    } else {
        Err(Rejected(format!("stride {} is not a multiple of n={}", a.s, a.n)).into())
    }
}
