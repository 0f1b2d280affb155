//! Splits a synthetic equirectangular frame into the optimal 5-tile set and
//! writes the tile rasters plus the layout manifest.

use spheretile::geometry::{equirect_to_sphere, PixelCoord, PlanarImage};
use spheretile::io::save_image;
use spheretile::layout::{kind_code, pack};
use spheretile::optimizer::optimize_cuts;
use spheretile::projector::{plan_tiles, remap, DensityRule, SourceProjection, TargetPlan};
use spheretile::scheme::PoleStyle;

fn main() -> spheretile::Result<()> {
    let out = std::path::Path::new("target/example-out/project_tiles");
    std::fs::create_dir_all(out)?;

    let (w, h) = (2048u32, 1024u32);
    let frame = PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    });

    let scheme = optimize_cuts(2, PoleStyle::SquarePole, 0.005)?.scheme;
    let density = DensityRule::from_equirect_height(h);
    let geoms = plan_tiles(&scheme, density)?;
    let tiles = remap(
        &SourceProjection::Equirect(&frame),
        &TargetPlan::Tiles { geoms: &geoms },
    )?;

    for (img, geom) in tiles.iter().zip(&geoms) {
        let path = out.join(format!("tile_{:02}_{}.png", geom.id, kind_code(&geom.kind)));
        save_image(&path, img)?;
        println!(
            "{} ({}x{}, lat {:.2}..{:.2} deg)",
            path.display(),
            geom.width_px,
            geom.height_px,
            geom.lat_lo.to_degrees(),
            geom.lat_hi.to_degrees()
        );
    }
    let manifest = pack(&geoms, &scheme)?;
    manifest.save(&out.join("manifest.json"))?;
    println!("{}", out.join("manifest.json").display());
    Ok(())
}
