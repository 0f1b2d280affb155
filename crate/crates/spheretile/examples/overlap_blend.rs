//! Overlap blending as de-blocking: tiles get per-tile DC offsets (a stand-in
//! for independent-encode banding) and the border step is measured with and
//! without blending.

use spheretile::geometry::{equirect_to_sphere, PixelCoord, PlanarImage};
use spheretile::optimizer::optimize_cuts;
use spheretile::projector::{
    blend_overlaps, plan_tiles, remap, DensityRule, SourceProjection, TargetPlan,
};
use spheretile::scheme::PoleStyle;

use std::f64::consts::PI;

fn main() -> spheretile::Result<()> {
    let (w, h) = (2048u32, 1024u32);
    let frame = PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    });
    let density = DensityRule::from_equirect_height(h);

    for overlap_pct in [0.3, 0.5, 0.7] {
        let sigma = overlap_pct / 100.0;
        let scheme = optimize_cuts(2, PoleStyle::SquarePole, sigma)?.scheme;
        let geoms = plan_tiles(&scheme, density)?;
        let mut tiles = remap(
            &SourceProjection::Equirect(&frame),
            &TargetPlan::Tiles { geoms: &geoms },
        )?;
        for (idx, tile) in tiles.iter_mut().enumerate() {
            let delta: i16 = if idx % 2 == 0 { 4 } else { -4 };
            for v in tile.plane_mut(0) {
                *v = (*v as i16 + delta).clamp(0, 255) as u8;
            }
        }

        let hard = remap(
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
        let blended = blend_overlaps(&tiles, &scheme, density, w, h)?;

        let step_at = |img: &PlanarImage, border: f64| -> i32 {
            let yc = (PI / 2.0 - border) / PI * h as f64;
            let lo = (yc - 5.0).floor().max(0.0) as u32;
            let hi = ((yc + 5.0).ceil() as u32).min(h - 2);
            (lo..=hi)
                .map(|y| {
                    (0..w)
                        .map(|x| (img.get(0, x, y + 1) as i32 - img.get(0, x, y) as i32).abs())
                        .max()
                        .unwrap()
                })
                .max()
                .unwrap()
        };
        let border = scheme.cuts()[0];
        println!(
            "{overlap_pct}% overlap, border at {:.2} deg: step {} hard cut, {} blended",
            border.to_degrees(),
            step_at(&hard, border),
            step_at(&blended, border),
        );
    }
    Ok(())
}
