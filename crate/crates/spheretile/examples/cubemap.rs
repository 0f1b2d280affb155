//! Equirectangular to cube faces and back, writing the six face images.

use spheretile::geometry::{equirect_to_sphere, PixelCoord, PlanarImage};
use spheretile::io::save_image;
use spheretile::projector::{cube_face_side, remap, DensityRule, SourceProjection, TargetPlan};

fn main() -> spheretile::Result<()> {
    let out = std::path::Path::new("target/example-out/cubemap");
    std::fs::create_dir_all(out)?;

    let (w, h) = (2048u32, 1024u32);
    let frame = PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    });

    let side = cube_face_side(DensityRule::from_equirect_height(h));
    let faces = remap(
        &SourceProjection::Equirect(&frame),
        &TargetPlan::CubeFaces { side },
    )?;
    for (face, name) in faces
        .iter()
        .zip(["posx", "negx", "posy", "negy", "posz", "negz"])
    {
        let path = out.join(format!("face_{name}.png"));
        save_image(&path, face)?;
        println!("{} ({side}x{side})", path.display());
    }

    let back = remap(
        &SourceProjection::CubeFaces(&faces),
        &TargetPlan::Equirect {
            width: w,
            height: h,
        },
    )?
    .remove(0);
    let path = out.join("back_to_equirect.png");
    save_image(&path, &back)?;
    println!("{}", path.display());
    Ok(())
}
