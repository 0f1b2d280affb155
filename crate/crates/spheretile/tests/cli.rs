//! Binary-level tests: flag handling, exit codes, text and JSON output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spheretile"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn spheretile")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("spheretile-cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn optimize_prints_published_angles() {
    let out = run(&[
        "optimize",
        "--tiles",
        "3",
        "--pole",
        "square",
        "--overlap",
        "0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\u{3b8}1=45.00\u{b0}"), "{text}");

    let out = run(&[
        "optimize",
        "--tiles",
        "5",
        "--pole",
        "circle",
        "--overlap",
        "0.3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("\u{3b8}1=26.08\u{b0} \u{3b8}2=38.81\u{b0}"),
        "{text}"
    );
}

#[test]
fn optimize_json_golden() {
    let out = run(&[
        "optimize",
        "--tiles",
        "3",
        "--pole",
        "square",
        "--overlap",
        "0",
        "--json",
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        r#"{"tiles":3,"pole":"square","overlap_percent":0.0,"cuts_deg":[45.0],"area_ratio":1.1781,"converged":true}"#
    );
}

#[test]
fn optimize_rejects_even_tile_counts() {
    let out = run(&["optimize", "--tiles", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("odd"), "{}", stderr(&out));
}

#[test]
fn optimize_rejects_infeasible_overlap() {
    let out = run(&["optimize", "--tiles", "3", "--overlap", "60"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("infeasible"), "{}", stderr(&out));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["optimize", "--tiles", "3", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_area_shows_the_four_way_table() {
    let out = run(&["compare-area"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("157%"), "{text}");
    assert!(text.contains("191%") || text.contains("190%"), "{text}");
    assert!(text.contains("124%") || text.contains("123%"), "{text}");
    assert!(text.contains("113%"), "{text}");
}

#[test]
fn compare_area_json_golden() {
    let out = run(&["compare-area", "--json"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        r#"{"equirect":1.5708,"cubic":1.9099,"yu_5_tile":1.2388,"proposed_5_tile":1.1337}"#
    );
}

/// Smooth gray test frame written as PNG.
fn write_test_frame(dir: &PathBuf, w: u32, h: u32) -> PathBuf {
    use spheretile::geometry::{equirect_to_sphere, PixelCoord, PlanarImage};
    let img = PlanarImage::from_fn_gray(w, h, |x, y| {
        let s = equirect_to_sphere(PixelCoord::new(x as f64 + 0.5, y as f64 + 0.5), w, h);
        (128.0 + 70.0 * s.lon().sin() * s.lat().cos() + 40.0 * s.lat().sin()).round() as u8
    });
    let path = dir.join("frame.png");
    spheretile::io::save_image(&path, &img).unwrap();
    path
}

#[test]
fn project_pack_unproject_metrics_end_to_end() {
    let dir = workdir("e2e");
    let frame = write_test_frame(&dir, 1024, 512);
    let outdir = dir.join("tiles");

    let out = run(&[
        "project",
        "--input",
        frame.to_str().unwrap(),
        "--tiles",
        "5",
        "--pole",
        "square",
        "--overlap",
        "0.5",
        "--output",
        outdir.to_str().unwrap(),
        "--pack",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let canvas = outdir.join("canvas.png");
    let manifest = outdir.join("manifest.json");
    assert!(canvas.exists() && manifest.exists());

    let rebuilt = dir.join("rebuilt.png");
    let out = run(&[
        "unproject",
        "--input",
        canvas.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--output",
        rebuilt.to_str().unwrap(),
        "--width",
        "1024",
        "--height",
        "512",
        "--blend",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(&[
        "metrics",
        "spsnr",
        "--ref",
        frame.to_str().unwrap(),
        "--test",
        rebuilt.to_str().unwrap(),
        "--samples",
        "50000",
        "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let db = report["value_db"].as_f64().expect("finite PSNR");
    assert!(db >= 40.0, "end-to-end S-PSNR {db}");
}

#[test]
fn project_accepts_scheme_files() {
    let dir = workdir("scheme-file");
    let frame = write_test_frame(&dir, 256, 128);
    let scheme = dir.join("scheme.json");
    std::fs::write(
        &scheme,
        r#"{"cuts_deg": [35.07, 53.17], "pole": "square", "sigma": 0.005}"#,
    )
    .unwrap();
    let outdir = dir.join("tiles");
    let out = run(&[
        "project",
        "--input",
        frame.to_str().unwrap(),
        "--scheme",
        scheme.to_str().unwrap(),
        "--output",
        outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(outdir.join("tile_01_ring-n-1.png").exists());

    // a manifest written by project works as a scheme file too
    let out2 = run(&[
        "project",
        "--input",
        frame.to_str().unwrap(),
        "--scheme",
        outdir.join("manifest.json").to_str().unwrap(),
        "--output",
        dir.join("tiles2").to_str().unwrap(),
    ]);
    assert!(out2.status.success(), "{}", stderr(&out2));
}

#[test]
fn project_writes_individual_tiles_and_unprojects_from_directory() {
    let dir = workdir("tiles-dir");
    let frame = write_test_frame(&dir, 512, 256);
    let outdir = dir.join("tiles");

    let out = run(&[
        "project",
        "--input",
        frame.to_str().unwrap(),
        "--cuts",
        "45.0",
        "--pole",
        "square",
        "--output",
        outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(outdir.join("tile_00_equator.png").exists());
    assert!(outdir.join("tile_01_cap-n.png").exists());
    assert!(outdir.join("tile_02_cap-s.png").exists());

    let rebuilt = dir.join("rebuilt.png");
    let out = run(&[
        "unproject",
        "--input",
        outdir.to_str().unwrap(),
        "--manifest",
        outdir.join("manifest.json").to_str().unwrap(),
        "--output",
        rebuilt.to_str().unwrap(),
        "--width",
        "512",
        "--height",
        "256",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(rebuilt.exists());
}

#[test]
fn identical_frames_report_inf() {
    let dir = workdir("inf");
    let frame = write_test_frame(&dir, 128, 64);
    let out = run(&[
        "metrics",
        "spsnr",
        "--ref",
        frame.to_str().unwrap(),
        "--test",
        frame.to_str().unwrap(),
        "--samples",
        "5000",
        "--json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["value_db"], serde_json::json!("inf"));
}

#[test]
fn bdrate_from_csv_files() {
    let dir = workdir("bdrate");
    let anchor = dir.join("anchor.csv");
    let test = dir.join("test.csv");
    std::fs::write(
        &anchor,
        "bitrate_kbps,psnr_db\n1000,32\n2000,35\n4000,38\n8000,41\n",
    )
    .unwrap();
    std::fs::write(
        &test,
        "bitrate_kbps,psnr_db\n1100,32\n2200,35\n4400,38\n8800,41\n",
    )
    .unwrap();
    let out = run(&[
        "metrics",
        "bdrate",
        "--anchor",
        anchor.to_str().unwrap(),
        "--test",
        test.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("+10.00%"), "{}", stdout(&out));
}

#[test]
fn malformed_csv_is_a_runtime_error() {
    let dir = workdir("badcsv");
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "nope\n1,2\n").unwrap();
    let out = run(&[
        "metrics",
        "bdrate",
        "--anchor",
        bad.to_str().unwrap(),
        "--test",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_is_a_runtime_error() {
    let out = run(&[
        "metrics",
        "spsnr",
        "--ref",
        "/nonexistent/a.png",
        "--test",
        "/nonexistent/b.png",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn yuv_input_requires_size() {
    let dir = workdir("yuvsize");
    let raw = dir.join("frame.yuv");
    std::fs::write(&raw, vec![0u8; 128 * 64 * 3 / 2]).unwrap();
    let out = run(&[
        "project",
        "--input",
        raw.to_str().unwrap(),
        "--tiles",
        "3",
        "--output",
        dir.join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("size"), "{}", stderr(&out));

    let out = run(&[
        "project",
        "--input",
        raw.to_str().unwrap(),
        "--size",
        "128x64",
        "--tiles",
        "3",
        "--output",
        dir.join("out").to_str().unwrap(),
        "--format",
        "yuv",
        "--pack",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.join("out").join("canvas.yuv").exists());
}
