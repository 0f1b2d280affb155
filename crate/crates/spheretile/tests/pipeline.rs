//! End-to-end pipeline through files: project, pack, write, read back,
//! unpack, reconstruct, measure.

use spheretile::geometry::{equirect_to_sphere, ColorModel, PixelCoord, PlanarImage};
use spheretile::io::{load_image, save_image};
use spheretile::layout::{compose_canvas, pack, unpack, LayoutManifest};
use spheretile::metrics::{build_sampleset, spsnr};
use spheretile::optimizer::optimize_cuts;
use spheretile::projector::{
    blend_overlaps, plan_tiles, remap, DensityRule, SourceProjection, TargetPlan,
};
use spheretile::scheme::PoleStyle;

use std::path::PathBuf;

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("spheretile-pipeline").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn gradient(w: u32, h: u32) -> PlanarImage {
    PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    })
}

fn luma_psnr(a: &PlanarImage, b: &PlanarImage) -> f64 {
    let samples = build_sampleset(100_000).unwrap();
    spsnr(&a.to_luma(), &b.to_luma(), &samples).unwrap()
}

#[test]
fn packed_png_round_trip_preserves_quality() {
    let dir = workdir("png");
    let (w, h) = (1024u32, 512u32);
    let source = gradient(w, h);

    let scheme = optimize_cuts(2, PoleStyle::SquarePole, 0.005)
        .unwrap()
        .scheme;
    let density = DensityRule::from_equirect_height(h);
    let geoms = plan_tiles(&scheme, density).unwrap();
    let tiles = remap(
        &SourceProjection::Equirect(&source),
        &TargetPlan::Tiles { geoms: &geoms },
    )
    .unwrap();

    let manifest = pack(&geoms, &scheme).unwrap();
    let canvas = compose_canvas(&manifest, &tiles).unwrap();

    let canvas_path = dir.join("canvas.png");
    let manifest_path = dir.join("manifest.json");
    save_image(&canvas_path, &canvas).unwrap();
    manifest.save(&manifest_path).unwrap();

    // fresh process's view: everything reloaded from disk
    let manifest2 = LayoutManifest::load(&manifest_path).unwrap();
    assert_eq!(manifest2, manifest);
    let canvas2 = load_image(&canvas_path, None).unwrap();
    assert_eq!(canvas2, canvas); // gray PNG is lossless

    let tiles2 = unpack(&canvas2, &manifest2).unwrap();
    assert_eq!(tiles2, tiles);

    let scheme2 = manifest2.to_scheme().unwrap();
    let rebuilt = blend_overlaps(
        &tiles2,
        &scheme2,
        DensityRule::new(manifest2.density_ppr).unwrap(),
        w,
        h,
    )
    .unwrap();
    let db = luma_psnr(&source, &rebuilt);
    assert!(db >= 40.0, "packed round trip S-PSNR {db:.2} dB");
}

#[test]
fn yuv_frames_flow_through_the_whole_pipeline() {
    let dir = workdir("yuv");
    let (w, h) = (512u32, 256u32);
    let luma = gradient(w, h);
    let size = (w * h) as usize;
    // mild chroma pattern so subsampling is exercised
    let cb: Vec<u8> = (0..size).map(|i| 120 + (i % 16) as u8).collect();
    let cr: Vec<u8> = (0..size).map(|i| 130 + (i % 8) as u8).collect();
    let source = PlanarImage::from_planes(
        w,
        h,
        ColorModel::Ycbcr,
        vec![luma.plane(0).to_vec(), cb, cr],
    )
    .unwrap();

    let src_path = dir.join("source.yuv");
    save_image(&src_path, &source).unwrap();
    let loaded = load_image(&src_path, Some((w, h))).unwrap();
    assert_eq!(loaded.plane(0), source.plane(0));

    let scheme = optimize_cuts(1, PoleStyle::SquarePole, 0.0).unwrap().scheme;
    let density = DensityRule::from_equirect_height(h);
    let geoms = plan_tiles(&scheme, density).unwrap();
    let tiles = remap(
        &SourceProjection::Equirect(&loaded),
        &TargetPlan::Tiles { geoms: &geoms },
    )
    .unwrap();
    assert!(tiles.iter().all(|t| t.color() == ColorModel::Ycbcr));

    // tile rasters go out as .yuv and come back
    let mut reloaded = Vec::new();
    for (i, tile) in tiles.iter().enumerate() {
        let path = dir.join(format!("tile{i}.yuv"));
        save_image(&path, tile).unwrap();
        reloaded.push(load_image(&path, Some((tile.width(), tile.height()))).unwrap());
    }

    let rebuilt = remap(
        &SourceProjection::Tiles {
            images: &reloaded,
            geoms: &geoms,
            scheme: &scheme,
            blend: false,
        },
        &TargetPlan::Equirect {
            width: w,
            height: h,
        },
    )
    .unwrap()
    .remove(0);
    let db = luma_psnr(&source, &rebuilt);
    assert!(db >= 40.0, "yuv round trip S-PSNR {db:.2} dB");
}

#[test]
fn cube_baseline_round_trip() {
    let (w, h) = (768u32, 384u32);
    let source = gradient(w, h);
    let side = spheretile::projector::cube_face_side(DensityRule::from_equirect_height(h));
    let faces = remap(
        &SourceProjection::Equirect(&source),
        &TargetPlan::CubeFaces { side },
    )
    .unwrap();
    assert_eq!(faces.len(), 6);
    let back = remap(
        &SourceProjection::CubeFaces(&faces),
        &TargetPlan::Equirect {
            width: w,
            height: h,
        },
    )
    .unwrap()
    .remove(0);
    let db = luma_psnr(&source, &back);
    assert!(db >= 40.0, "cube round trip S-PSNR {db:.2} dB");
}
