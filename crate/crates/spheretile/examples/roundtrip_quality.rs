//! Measures how much a full project/reconstruct round trip costs in S-PSNR
//! for the tile schemes and the cubic baseline.

use spheretile::geometry::{equirect_to_sphere, PixelCoord, PlanarImage};
use spheretile::metrics::{build_sampleset, spsnr};
use spheretile::optimizer::optimize_cuts;
use spheretile::projector::{
    cube_face_side, plan_tiles, remap, DensityRule, SourceProjection, TargetPlan,
};
use spheretile::scheme::PoleStyle;

fn main() -> spheretile::Result<()> {
    let (w, h) = (2048u32, 1024u32);
    let frame = PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    });
    let density = DensityRule::from_equirect_height(h);
    let samples = build_sampleset(200_000)?;

    for n in [1usize, 2] {
        let scheme = optimize_cuts(n, PoleStyle::SquarePole, 0.0)?.scheme;
        let geoms = plan_tiles(&scheme, density)?;
        let tiles = remap(
            &SourceProjection::Equirect(&frame),
            &TargetPlan::Tiles { geoms: &geoms },
        )?;
        let back = remap(
            &SourceProjection::Tiles {
                images: &tiles,
                geoms: &geoms,
                scheme: &scheme,
                blend: false,
            },
            &TargetPlan::Equirect {
                width: w,
                height: h,
            },
        )?
        .remove(0);
        let db = spsnr(&frame, &back, &samples)?;
        println!("{}-tile round trip: {db:.2} dB S-PSNR", 2 * n + 1);
    }

    let side = cube_face_side(density);
    let faces = remap(
        &SourceProjection::Equirect(&frame),
        &TargetPlan::CubeFaces { side },
    )?;
    let back = remap(
        &SourceProjection::CubeFaces(&faces),
        &TargetPlan::Equirect {
            width: w,
            height: h,
        },
    )?
    .remove(0);
    let db = spsnr(&frame, &back, &samples)?;
    println!("cubic round trip:  {db:.2} dB S-PSNR ({side} px faces)");
    Ok(())
}
