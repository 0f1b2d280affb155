//! Packs a tile set into one canvas for single-decoder delivery, writes
//! canvas + manifest, and verifies the unpack round trip.

use spheretile::geometry::{equirect_to_sphere, PixelCoord, PlanarImage};
use spheretile::io::save_image;
use spheretile::layout::{compose_canvas, pack, unpack, LayoutManifest};
use spheretile::optimizer::optimize_cuts;
use spheretile::projector::{plan_tiles, remap, DensityRule, SourceProjection, TargetPlan};
use spheretile::scheme::PoleStyle;

fn main() -> spheretile::Result<()> {
    let out = std::path::Path::new("target/example-out/pack_canvas");
    std::fs::create_dir_all(out)?;

    let (w, h) = (2048u32, 1024u32);
    let frame = PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    });

    for (label, n) in [("3-tile", 1usize), ("5-tile", 2)] {
        let scheme = optimize_cuts(n, PoleStyle::SquarePole, 0.0)?.scheme;
        let geoms = plan_tiles(&scheme, DensityRule::from_equirect_height(h))?;
        let tiles = remap(
            &SourceProjection::Equirect(&frame),
            &TargetPlan::Tiles { geoms: &geoms },
        )?;
        let manifest = pack(&geoms, &scheme)?;
        let canvas = compose_canvas(&manifest, &tiles)?;

        let canvas_path = out.join(format!("{label}-canvas.png"));
        let manifest_path = out.join(format!("{label}-manifest.json"));
        save_image(&canvas_path, &canvas)?;
        manifest.save(&manifest_path)?;

        let reloaded = LayoutManifest::load(&manifest_path)?;
        assert_eq!(unpack(&canvas, &reloaded)?, tiles, "lossless round trip");

        println!(
            "{label}: canvas {}x{}, layout waste {:.1}%, equirect source would be {}x{}",
            manifest.canvas_w,
            manifest.canvas_h,
            manifest.waste_ratio() * 100.0,
            w,
            h
        );
        println!("  -> {}", canvas_path.display());
    }
    Ok(())
}
