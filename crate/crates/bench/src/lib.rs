//! Deterministic inputs shared by the kernel benchmarks.

use locomp::{Image, ImageDims};

/// A `side x side x channels` u8 image with a repeating diagonal ramp.
pub fn ramp_image(side: usize, channels: usize) -> Image {
    let dims = ImageDims::new(side, side, channels).expect("nonzero dims");
    let data = (0..dims.len())
        .map(|i| ((i / side + i % side) * 7 % 256) as u8)
        .collect();
    Image::from_u8(dims, data).expect("length matches dims")
}
