//! S-PSNR and L-PSNR on a synthetic frame pair: plain PSNR over-counts pole
//! rows, the sphere metrics do not, and latitude weights shift the balance
//! further.

use spheretile::geometry::{equirect_to_sphere, PixelCoord, PlanarImage};
use spheretile::metrics::{build_sampleset, lpsnr, spsnr, WeightTable};

fn main() -> spheretile::Result<()> {
    let (w, h) = (1024u32, 512u32);
    let reference = PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    });

    // distortion concentrated in the top 10% of rows (the pole region)
    let mut test = reference.clone();
    for y in 0..h / 10 {
        for x in 0..w {
            let v = test.get(0, x, y);
            test.put(0, x, y, v.saturating_add(12));
        }
    }

    // plain frame PSNR, for contrast
    let mse = reference
        .plane(0)
        .iter()
        .zip(test.plane(0))
        .map(|(a, b)| {
            let d = *a as f64 - *b as f64;
            d * d
        })
        .sum::<f64>()
        / (w as f64 * h as f64);
    println!(
        "frame PSNR (flat pixels):    {:.2} dB",
        10.0 * (255.0f64 * 255.0 / mse).log10()
    );

    let samples = build_sampleset(200_000)?;
    println!(
        "S-PSNR (uniform on sphere):  {:.2} dB",
        spsnr(&reference, &test, &samples)?
    );
    println!(
        "L-PSNR (cos-latitude table): {:.2} dB",
        lpsnr(&reference, &test, &samples, &WeightTable::cos_latitude())?
    );

    let equator_only = WeightTable::from_pairs(&[
        (-90.0, 0.0),
        (-31.0, 0.0),
        (-30.0, 1.0),
        (30.0, 1.0),
        (31.0, 0.0),
        (90.0, 0.0),
    ])?;
    let masked = lpsnr(&reference, &test, &samples, &equator_only)?;
    println!("L-PSNR (equator band only):  {masked} dB (pole-only distortion masked)");
    Ok(())
}
