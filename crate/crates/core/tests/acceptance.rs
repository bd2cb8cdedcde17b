//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use common::*;
use locomp::augment::{crop_at, hflip, limited_crop_at, limited_flip};
use locomp::compressors::{
    compress_block_ms, compress_block_percentile, compress_block_rmm, make_percentile_scheme, pca_feasible,
};
use locomp::grid::{compressed_dims, compression_ratios};
use locomp::lcio::{payload_bytes, read_lcim, read_lcim_file, read_matrix, write_lcim, write_matrix, LCIM_HEADER_LEN};
use locomp::netops::{fc_compression_ratio, sketch_fc_inputs, FcSketchSpec};
use locomp::pipeline::{prepare_default, run_inline, InlineOptions};
use locomp::{
    compress_image, Block, CompressedImage, CompressionSpec, Compressor, Dataset, Method, Mode, PixelData, Ratio,
    SketchKind, SketchMatrix,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Kernel and linearity tolerance, max-abs error over max-abs oracle value.
const REL_TOL: f64 = 1e-5;
/// f32 tolerance for crop commutation.
const F32_TOL: f32 = 1e-6;
/// On-disk storage ratio tolerance.
const SR_TOL: f64 = 0.02;
/// Width of the statistical acceptance band, in standard deviations.
const SIGMAS: f64 = 3.0;

type Outcome = Result<String, String>;

struct Gate {
    failed: Vec<&'static str>,
}

impl Gate {
    fn run(&mut self, name: &'static str, budget: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; took {took:.2?} > budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<34} {detail} [{took:.2?}]"),
            Err(detail) => {
                println!("FAIL  {name:<34} {detail} [{took:.2?}]");
                self.failed.push(name);
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn dimensional() -> Outcome {
    let mut r = rng(1);
    for (side, want) in [(224, 64), (784, 224)] {
        let d = compressed_dims(dims(side, side, 3), 7, 2).map_err(|e| e.to_string())?;
        ensure(d == dims(want, want, 3), || format!("{side} planned as {d}"))?;
        let img = random_u8_image(&mut r, side, side, 3);
        let out = compress_image(&img, &Compressor::percentile(7, 2).unwrap()).map_err(|e| e.to_string())?;
        ensure(out.dims() == dims(want, want, 3), || {
            format!("{side} compressed to {}", out.dims())
        })?;
    }
    Ok("224x224x3 -> 64x64x3, 784x784x3 -> 224x224x3".into())
}

fn ratios() -> Outcome {
    let table = [(1, (49, 4), (49, 4)), (2, (49, 4), (49, 8)), (4, (49, 4), (49, 16))];
    for (c, cr, sr) in table {
        let got = compression_ratios(7, 2, c).map_err(|e| e.to_string())?;
        ensure(
            got.cr == Ratio::new(cr.0, cr.1) && got.sr == Ratio::new(sr.0, sr.1),
            || format!("c={c}: got CR {} SR {}", got.cr, got.sr),
        )?;
    }

    let src = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_png_dataset(src.path(), 100, 2);
    let ds = Dataset::scan(src.path(), None).map_err(|e| e.to_string())?;
    let mut measured = Vec::new();
    for c in [1, 2, 4] {
        let out = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut spec = CompressionSpec::new(Method::Percentile, 7, 2);
        spec.copies = c;
        let manifest = prepare_default(&ds, &spec, out.path(), &Default::default()).map_err(|e| e.to_string())?;
        let mut stored = 0u64;
        for e in &manifest.entries {
            stored += fs::metadata(out.path().join(&e.output))
                .map_err(|e| e.to_string())?
                .len()
                - LCIM_HEADER_LEN as u64;
        }
        let original = (manifest.source_count * spec.crop_to * spec.crop_to * 3) as u64;
        let sr = original as f64 / stored as f64;
        let want = 12.25 / c as f64;
        ensure((sr - want).abs() <= SR_TOL * want, || {
            format!("c={c}: on-disk SR {sr:.4} vs {want}")
        })?;
        measured.push(format!("{sr:.4}"));
    }
    Ok(format!(
        "CR 12.25, SR 12.25/6.125/3.0625 exact; on-disk SR {}",
        measured.join("/")
    ))
}

fn pca_feasibility_oracle() -> Outcome {
    let mut checked = 0;
    for m in 1..=32 {
        for n in 1..=32 {
            for p in 1..=32 {
                let direct = n * n >= 2 * m * p + m;
                ensure(pca_feasible(m, n, p) == direct, || {
                    format!("disagree at m={m} n={n} P={p}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} triples agree"))
}

fn pca_single_component_claim() -> Outcome {
    let counter: Vec<(usize, usize)> = (5..=32)
        .flat_map(|m| (1..=4).map(move |n| (m, n)))
        .filter(|&(m, n)| pca_feasible(m, n, 1))
        .collect();
    ensure(counter.is_empty(), || {
        format!("P=1 is feasible at (m, n) = {counter:?}, where n^2 >= 3m")
    })?;
    Ok("P=1 infeasible for all m in 5..=32, n in 1..=4".into())
}

fn random_block(r: &mut impl Rng, m: usize) -> Block<f32> {
    Block::new(m, (0..m * m).map(|_| r.random_range(0.0f32..255.0)).collect()).unwrap()
}

fn as_f64(b: &Block<f32>) -> Vec<f64> {
    b.values().iter().map(|&v| f64::from(v)).collect()
}

fn kernel_oracles() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = r.random_range(2..=12);
        let n = r.random_range(1..m);
        let gamma = r.random_range(0.05..=1.0);
        let seed = r.random();
        let block = random_block(&mut r, m);
        let x = as_f64(&block);

        let rmm = SketchMatrix::for_rmm(m, n, gamma, seed).unwrap();
        let got = compress_block_rmm(&block, &rmm).map_err(|e| e.to_string())?;
        let e = rel_err(got.values(), &naive_matvec(&rmm, &x));
        ensure(e <= REL_TOL, || format!("RMM m={m} n={n} seed={seed}: rel err {e:e}"))?;
        worst = worst.max(e);

        let ms = SketchMatrix::for_ms(m, n, gamma, seed).unwrap();
        let got = compress_block_ms(&block, &ms).map_err(|e| e.to_string())?;
        let e = rel_err(got.values(), &naive_sandwich(&ms, &x, m));
        ensure(e <= REL_TOL, || format!("MS m={m} n={n} seed={seed}: rel err {e:e}"))?;
        worst = worst.max(e);
    }
    let mut worst_kron = 0.0f64;
    for _ in 0..100 {
        let m = r.random_range(2..=9);
        let n = r.random_range(1..m);
        let seed = r.random();
        let block = random_block(&mut r, m);
        let ms = SketchMatrix::for_ms(m, n, 1.0, seed).unwrap();
        let kron = SketchMatrix::from_parts(SketchKind::Rmm, n * n, m * m, 1.0, seed, kronecker_self(&ms)).unwrap();
        let a = compress_block_ms(&block, &ms).map_err(|e| e.to_string())?;
        let b = compress_block_rmm(&block, &kron).map_err(|e| e.to_string())?;
        let e = rel_err(a.values(), &as_f64(&b));
        ensure(e <= REL_TOL, || format!("MS vs kron RMM m={m} n={n}: rel err {e:e}"))?;
        worst_kron = worst_kron.max(e);
    }
    Ok(format!(
        "10^3 pairs worst {worst:.1e}; 10^2 Kronecker pairs worst {worst_kron:.1e}"
    ))
}

fn percentile_properties() -> Outcome {
    let mut r = rng(4);
    let scheme = make_percentile_scheme(2).map_err(|e| e.to_string())?;
    for i in 0..10_000 {
        // Narrow ranges on some blocks force ties.
        let hi: u8 = if i % 4 == 0 { 4 } else { 255 };
        let vals: Vec<u8> = (0..49).map(|_| r.random_range(0..=hi)).collect();
        let out =
            compress_block_percentile(&Block::new(7, vals.clone()).unwrap(), &scheme).map_err(|e| e.to_string())?;
        ensure(out.values().iter().all(|v| vals.contains(v)), || {
            format!("block {i}: value not in source")
        })?;
        let (min, max) = (*vals.iter().min().unwrap(), *vals.iter().max().unwrap());
        ensure(out.values().contains(&min) && out.values().contains(&max), || {
            format!("block {i}: min/max missing")
        })?;
        let mut shuffled = vals.clone();
        shuffled.shuffle(&mut r);
        let again = compress_block_percentile(&Block::new(7, shuffled).unwrap(), &scheme).map_err(|e| e.to_string())?;
        ensure(again == out, || format!("block {i}: not permutation invariant"))?;
        let c = vals[0];
        let constant =
            compress_block_percentile(&Block::new(7, vec![c; 49]).unwrap(), &scheme).map_err(|e| e.to_string())?;
        ensure(constant.values().iter().all(|&v| v == c), || {
            format!("block {i}: constant {c} not preserved")
        })?;
    }
    Ok("10^4 blocks: membership, min/max, permutation, constant".into())
}

fn sketch_entry_statistics() -> Outcome {
    // Dense case: one 1000x1000 matrix plus standardized entries of many
    // small RMM matrices with distinct seeds.
    let big = SketchMatrix::generate(SketchKind::Ms, 1000, 1000, 1.0, 5).map_err(|e| e.to_string())?;
    let var = 1.0 / 1e6;
    let v: Vec<f64> = big.entries().iter().map(|&e| f64::from(e)).collect();
    check_moments("1000x1000", &v, var)?;

    let mut z = Vec::with_capacity(1_000_000);
    let mut seed = 0u64;
    while z.len() < 1_000_000 {
        let mat = SketchMatrix::for_rmm(7, 2, 1.0, seed).unwrap();
        let scale = ((mat.rows() * mat.cols()) as f64).sqrt();
        z.extend(mat.entries().iter().map(|&e| f64::from(e) * scale));
        seed += 1;
    }
    check_moments("standardized 4x49", &z, 1.0)?;

    let sparse = SketchMatrix::generate(SketchKind::Rmm, 1000, 1000, 0.5, 6).map_err(|e| e.to_string())?;
    let total = sparse.entries().len() as f64;
    let nonzero = sparse.entries().iter().filter(|&&e| e != 0.0).count() as f64;
    let frac = nonzero / total;
    let sd = (0.25 / total).sqrt();
    ensure((frac - 0.5).abs() <= SIGMAS * sd, || {
        format!("gamma=0.5 nonzero fraction {frac}")
    })?;
    Ok(format!(
        "mean/var within 3 sigma over 2x10^6 entries; gamma=0.5 nonzero {frac:.4}"
    ))
}

fn check_moments(name: &str, v: &[f64], var: f64) -> Result<(), String> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let s2 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mean_sd = (var / n).sqrt();
    let var_sd = var * (2.0 / (n - 1.0)).sqrt();
    ensure((mean).abs() <= SIGMAS * mean_sd, || {
        format!("{name}: mean {mean:e} beyond 3 sigma {mean_sd:e}")
    })?;
    ensure((s2 - var).abs() <= SIGMAS * var_sd, || {
        format!("{name}: variance {s2:e} vs {var:e}")
    })
}

fn same_within(a: &CompressedImage, b: &CompressedImage) -> bool {
    if a.dims() != b.dims() || a.method() != b.method() {
        return false;
    }
    match (a.image().data(), b.image().data()) {
        (PixelData::U8(x), PixelData::U8(y)) => x == y,
        (PixelData::F32(x), PixelData::F32(y)) => x.iter().zip(y).all(|(p, q)| (p - q).abs() <= F32_TOL),
        _ => false,
    }
}

fn commutation() -> Outcome {
    let mut r = rng(6);
    let pct = Compressor::percentile(7, 2).unwrap();
    for i in 0..100 {
        let img = random_u8_image(&mut r, 224, 224, 3);
        let lhs = compress_image(&hflip(&img), &pct).map_err(|e| e.to_string())?;
        let rhs = limited_flip(&compress_image(&img, &pct).map_err(|e| e.to_string())?);
        ensure(lhs == rhs, || format!("image {i}: flip square fails"))?;

        let seed: u64 = r.random();
        let k = r.random_range(1..=32);
        let (bt, bl) = (r.random_range(0..=32 - k), r.random_range(0..=32 - k));
        let comps = [
            pct.clone(),
            Compressor::rmm(7, SketchMatrix::for_rmm(7, 2, 1.0, seed).unwrap()).unwrap(),
            Compressor::ms(7, SketchMatrix::for_ms(7, 2, 1.0, seed).unwrap()).unwrap(),
            Compressor::downgrade(7, 2).unwrap(),
        ];
        let cropped = crop_at(&img, bt * 7, bl * 7, k * 7, k * 7).map_err(|e| e.to_string())?;
        for comp in &comps {
            let a = compress_image(&cropped, comp).map_err(|e| e.to_string())?;
            let whole = compress_image(&img, comp).map_err(|e| e.to_string())?;
            let b = limited_crop_at(&whole, bt, bl, k).map_err(|e| e.to_string())?;
            ensure(same_within(&a, &b), || {
                format!("image {i}: crop square fails for {}", comp.method())
            })?;
        }
    }
    Ok("100 images: flip square (percentile) and crop square (all methods)".into())
}

fn mode_equivalence() -> Outcome {
    let src = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_png_dataset(src.path(), 50, 7);
    let ds = Dataset::scan(src.path(), None).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for method in Method::ALL {
        let out = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut spec = CompressionSpec::new(method, 7, 2);
        spec.copies = 1;
        spec.resize_to = 224;
        spec.crop_to = 224;
        spec.flip_prob = 0.0;
        spec.seed = 99;
        let manifest = prepare_default(&ds, &spec, out.path(), &Default::default()).map_err(|e| e.to_string())?;
        spec.mode = Mode::Inline;
        let mut inline = Vec::new();
        run_inline(&ds, &spec, &InlineOptions::default(), |t| {
            inline.push(payload_bytes(&t.tensor));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
        ensure(inline.len() == manifest.entries.len(), || {
            format!("{method}: count mismatch")
        })?;
        for (bytes, e) in inline.iter().zip(&manifest.entries) {
            let stored = read_lcim_file(&out.path().join(&e.output)).map_err(|e| e.to_string())?;
            ensure(*bytes == payload_bytes(&stored), || {
                format!("{method}: {} differs", e.source)
            })?;
            compared += 1;
        }
    }
    Ok(format!("{compared} payloads byte-identical across 4 methods"))
}

fn golden_files() -> Outcome {
    let dir = fixtures_dir();
    let mut cases = 0;
    for m in Method::ALL {
        let bytes = fs::read(dir.join(format!("{m}.lcim"))).map_err(|e| e.to_string())?;
        let img = read_lcim(&bytes).map_err(|e| e.to_string())?;
        ensure(write_lcim(&img).map_err(|e| e.to_string())? == bytes, || {
            format!("{m}.lcim not bit-exact")
        })?;
        for (case, bad, want) in lcim_corpus(&bytes) {
            let got = read_lcim(&bad).err().map(|e| error_kind(&e)).unwrap_or("accepted");
            ensure(got == want, || format!("{m}.lcim {case}: {got}, expected {want}"))?;
            cases += 1;
        }
    }
    for name in ["rmm.lcmx", "ms.lcmx"] {
        let bytes = fs::read(dir.join(name)).map_err(|e| e.to_string())?;
        let mat = read_matrix(&bytes).map_err(|e| e.to_string())?;
        ensure(write_matrix(&mat).map_err(|e| e.to_string())? == bytes, || {
            format!("{name} not bit-exact")
        })?;
        for (case, bad, want) in lcmx_corpus(&bytes) {
            let got = read_matrix(&bad).err().map(|e| error_kind(&e)).unwrap_or("accepted");
            ensure(got == want, || format!("{name} {case}: {got}, expected {want}"))?;
            cases += 1;
        }
    }
    Ok(format!("6 fixtures bit-exact; {cases} corrupted files classified"))
}

fn fc_sketch() -> Outcome {
    let spec = FcSketchSpec::new(6400, 25, 256, 13, 11).map_err(|e| e.to_string())?;
    let mat = spec.matrix().map_err(|e| e.to_string())?;
    let mut r = rng(8);
    let vec =
        |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f32> { (0..6400).map(|_| r.random_range(-1.0f32..1.0)).collect() };
    let a = vec(&mut r);
    let out = sketch_fc_inputs(&a, &spec, &mat).map_err(|e| e.to_string())?;
    ensure(out.len() == 3328, || format!("output length {}", out.len()))?;

    let mut oracle = vec![0.0f64; 13 * 256];
    for i in 0..13 {
        for j in 0..256 {
            for k in 0..25 {
                oracle[i * 256 + j] += f64::from(mat.get(i, k)) * f64::from(a[k * 256 + j]);
            }
        }
    }
    let e = rel_err(&out, &oracle);
    ensure(e <= REL_TOL, || format!("oracle rel err {e:e}"))?;

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (x, y) = (vec(&mut r), vec(&mut r));
        let alpha = r.random_range(-3.0f32..3.0);
        let combo: Vec<f32> = x.iter().zip(&y).map(|(p, q)| alpha * p + q).collect();
        let lhs = sketch_fc_inputs(&combo, &spec, &mat).map_err(|e| e.to_string())?;
        let fx = sketch_fc_inputs(&x, &spec, &mat).map_err(|e| e.to_string())?;
        let fy = sketch_fc_inputs(&y, &spec, &mat).map_err(|e| e.to_string())?;
        let rhs: Vec<f64> = fx
            .iter()
            .zip(&fy)
            .map(|(p, q)| f64::from(alpha) * f64::from(*p) + f64::from(*q))
            .collect();
        worst = worst.max(rel_err(&lhs, &rhs));
    }
    ensure(worst <= REL_TOL, || format!("linearity rel err {worst:e}"))?;
    let cr = fc_compression_ratio(&spec);
    Ok(format!(
        "6400 -> 3328, CR {cr} = {:.2}, linearity worst {worst:.1e}",
        cr.as_f64()
    ))
}

fn main() {
    let mut gate = Gate { failed: Vec::new() };
    gate.run("dimensional reproduction", secs(1), dimensional);
    gate.run("ratio reproduction", secs(10), ratios);
    gate.run("pca feasibility oracle", secs(1), pca_feasibility_oracle);
    gate.run("pca single-component claim", secs(1), pca_single_component_claim);
    gate.run("kernel oracles", secs(30), kernel_oracles);
    gate.run("percentile properties", secs(10), percentile_properties);
    gate.run("sketch entry statistics", secs(30), sketch_entry_statistics);
    gate.run("commutation squares", secs(60), commutation);
    gate.run("mode equivalence", secs(60), mode_equivalence);
    gate.run("format golden files", secs(5), golden_files);
    gate.run("fc input sketching", secs(5), fc_sketch);
    println!("N/A   classification accuracy tables      needs full-scale training, see README");
    if !gate.failed.is_empty() {
        println!("{} criterion(s) failed: {}", gate.failed.len(), gate.failed.join(", "));
        std::process::exit(1);
    }
    println!("all criteria passed");
}
